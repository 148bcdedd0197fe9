"""Tiny hand-rolled shapefile writer for fixtures (independent of the reader)."""

import struct

import numpy as np


def polygon_record(rings, shape_type=5) -> bytes:
    rings = [np.vstack([r, r[:1]]) for r in map(np.asarray, rings)]
    pts = np.vstack(rings)
    parts = np.cumsum([0] + [len(r) for r in rings[:-1]])
    box = struct.pack("<4d", *pts.min(axis=0), *pts.max(axis=0))
    body = struct.pack("<i", shape_type) + box + struct.pack("<ii", len(rings), len(pts))
    body += struct.pack(f"<{len(parts)}i", *parts) + pts.astype("<f8").tobytes()
    return body


def shp_bytes(records, shape_type=5, file_code=9994) -> bytes:
    """``records``: list of ring lists, or None for a null shape."""
    out = b""
    allpts = [np.asarray(r) for rec in records if rec for r in rec]
    bbox = (np.vstack(allpts).min(axis=0).tolist() + np.vstack(allpts).max(axis=0).tolist()
            if allpts else [0.0] * 4)
    for i, rec in enumerate(records, 1):
        body = struct.pack("<i", 0) if rec is None else polygon_record(rec, shape_type)
        out += struct.pack(">ii", i, len(body) // 2) + body
    header = struct.pack(">i20xi", file_code, (100 + len(out)) // 2)
    header += struct.pack("<ii4d32x", 1000, shape_type, *bbox)
    return header + out


def dbf_bytes(rows, fields) -> bytes:
    """dBASE III with character fields ``[(name, width), ...]``."""
    rlen = 1 + sum(w for _, w in fields)
    hlen = 32 + 32 * len(fields) + 1
    head = struct.pack("<B3BIHH20x", 3, 118, 1, 1, len(rows), hlen, rlen)
    for name, w in fields:
        head += name.encode("ascii").ljust(11, b"\0") + b"C" + b"\0" * 4 + bytes([w, 0]) + b"\0" * 14
    head += b"\r"
    body = b""
    for row in rows:
        body += b" " + b"".join(str(row[n]).encode("utf-8").ljust(w)[:w] for n, w in fields)
    return head + body + b"\x1a"
