"""PNG rendering of class maps."""
from __future__ import annotations

import io
from typing import Sequence

import numpy as np
from PIL import Image

from gwvuln.grid import Grid

# low -> high: green, yellow-green, yellow, orange, red
DEFAULT_PALETTE_5 = ((0, 128, 0), (154, 205, 50), (255, 255, 0), (255, 165, 0), (255, 0, 0))


def default_palette(k: int) -> tuple:
    """``k`` colours spread evenly along the green-to-red ramp."""
    if k == 5:
        return DEFAULT_PALETTE_5
    if k == 1:
        return (DEFAULT_PALETTE_5[2],)
    anchors = np.array(DEFAULT_PALETTE_5, dtype=np.float64)
    pos = np.linspace(0.0, 4.0, k)
    out = []
    for p in pos:
        i = min(int(p), 3)
        t = p - i
        c = (1 - t) * anchors[i] + t * anchors[i + 1]
        out.append(tuple(int(round(v)) for v in c))
    return tuple(out)


def render_map(classes: Grid, palette: Sequence[Sequence[int]] | None = None) -> Image.Image:
    """One RGBA pixel per cell; class ``i`` gets ``palette[i-1]``, nodata is transparent."""
    mask = classes.mask
    ids = np.where(mask, classes.values, 0).astype(np.int64)
    if palette is None:
        k = int(ids.max()) if mask.any() else 1
        palette = default_palette(max(k, 1))
    k = len(palette)
    bad = mask & ((ids < 1) | (ids > k) | (classes.values != ids))
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValueError(f"class id {classes.values[r, c]} at (row={r}, col={c}) outside palette 1..{k}")
    lut = np.zeros((k + 1, 4), dtype=np.uint8)
    lut[1:, :3] = np.asarray(palette, dtype=np.uint8)[:, :3]
    lut[1:, 3] = 255
    return Image.fromarray(lut[ids])


def png_bytes(img: Image.Image) -> bytes:
    buf = io.BytesIO()
    img.save(buf, format="PNG", optimize=False)
    return buf.getvalue()
