from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyInput
from ..geometry import MultiPolygon, centroid


@dataclass(frozen=True, eq=False)
class Feature:
    """A district or state outline with text properties.

    ``geographic`` marks lon/lat degrees (NAD83); otherwise coordinates are
    projected meters.
    """

    geometry: MultiPolygon
    properties: dict = field(default_factory=dict)
    geographic: bool = False

    def __post_init__(self):
        geom = MultiPolygon.of(self.geometry)
        if geom.is_empty:
            raise EmptyInput("feature geometry is empty")
        object.__setattr__(self, "geometry", geom)
        object.__setattr__(self, "properties", {str(k): str(v) for k, v in self.properties.items()})

    @property
    def statefp(self) -> str:
        return self.properties.get("STATEFP", "")

    @property
    def district_id(self) -> str:
        return self.properties.get("CD115FP", "")

    def geometry_centroid(self) -> np.ndarray:
        return centroid(self.geometry)
