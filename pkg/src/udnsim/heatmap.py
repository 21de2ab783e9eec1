"""Coverage-map serialization: CSV, deterministic PNG rendering with the
red-high / blue-low convention, and what-if difference maps.

The PNG encoder is hand-rolled (fixed zlib level, no ancillary chunks,
no timestamps) so identical maps always produce byte-identical files.
"""

from __future__ import annotations

import io
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .config import Direction
from .engine import CoverageMap


class HeatmapError(ValueError):
    pass


@dataclass(frozen=True)
class ColorRgb:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not (isinstance(v, int) and 0 <= v <= 255):
                raise HeatmapError(f"channel out of range: {v}")


@dataclass
class DiffMap:
    values: np.ndarray          # a - b, in [-1, 1]
    resolution: int
    side_km: float
    fingerprint_a: str
    fingerprint_b: str

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "side_km": self.side_km,
            "fingerprint_a": self.fingerprint_a,
            "fingerprint_b": self.fingerprint_b,
            "values": [float(v) for v in self.values.reshape(-1)],
        }


def _round_half_away(x: float) -> int:
    # floor(x + 0.5) for x >= 0: plain round-half-up, not banker's
    return int(np.floor(x + 0.5))


def colorize(v: float) -> ColorRgb:
    """Linear blue-to-red ramp: 0 -> blue, 1 -> red."""
    if not (0.0 <= v <= 1.0):
        raise HeatmapError(f"coverage value out of range: {v}")
    return ColorRgb(_round_half_away(255.0 * v), 0, _round_half_away(255.0 * (1.0 - v)))


def diverging_color(t: float) -> ColorRgb:
    """Blue (-1) -> white (0) -> red (+1) ramp for difference maps."""
    t = max(-1.0, min(1.0, t))
    r = _round_half_away(255.0 * (1.0 - max(0.0, -t)))
    g = _round_half_away(255.0 * (1.0 - abs(t)))
    b = _round_half_away(255.0 * (1.0 - max(0.0, t)))
    return ColorRgb(r, g, b)


def write_csv(cmap: CoverageMap) -> bytes:
    """Rows of "x_km,y_km,coverage" in row-major pixel order (i outer)."""
    out = io.StringIO()
    out.write("x_km,y_km,coverage\n")
    res = cmap.resolution
    step = cmap.side_km / res
    for i in range(res):
        x = (i + 0.5) * step
        for j in range(res):
            y = (j + 0.5) * step
            out.write(f"{x:g},{y:g},{cmap.values[i, j]:.6f}\n")
    return out.getvalue().encode("ascii")


def parse_csv(data: bytes) -> CoverageMap:
    lines = data.decode("ascii").strip().splitlines()
    if not lines or lines[0] != "x_km,y_km,coverage":
        raise HeatmapError("bad CSV header")
    rows = [ln.split(",") for ln in lines[1:]]
    res = int(round(len(rows) ** 0.5))
    if res * res != len(rows):
        raise HeatmapError("CSV does not contain a square grid")
    xs = sorted({float(r[0]) for r in rows})
    side = (xs[-1] + xs[0]) if len(xs) > 1 else 2.0 * float(rows[0][0])
    values = np.zeros((res, res))
    step = side / res
    for r in rows:
        i = int(float(r[0]) / step)
        j = int(float(r[1]) / step)
        values[min(i, res - 1), min(j, res - 1)] = float(r[2])
    return CoverageMap("", res, side, Direction.DL, values,
                       np.zeros((res, res), dtype=np.int64))


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    chunk = tag + payload
    return struct.pack(">I", len(payload)) + chunk + struct.pack(
        ">I", zlib.crc32(chunk) & 0xFFFFFFFF)


def _encode_png(rgb_rows: np.ndarray) -> bytes:
    """rgb_rows: (height, width, 3) uint8, row 0 at the top."""
    h, wd, _ = rgb_rows.shape
    raw = b"".join(b"\x00" + rgb_rows[r].tobytes() for r in range(h))
    return b"".join([
        b"\x89PNG\r\n\x1a\n",
        _png_chunk(b"IHDR", struct.pack(">IIBBBBB", wd, h, 8, 2, 0, 0, 0)),
        _png_chunk(b"IDAT", zlib.compress(raw, 6)),
        _png_chunk(b"IEND", b""),
    ])


def _rgb_grid(values: np.ndarray, color_fn) -> np.ndarray:
    """Map values[i, j] to an image: column i = x, top row = max y."""
    res_x, res_y = values.shape
    img = np.zeros((res_y, res_x, 3), dtype=np.uint8)
    for i in range(res_x):
        for j in range(res_y):
            c = color_fn(float(values[i, j]))
            img[res_y - 1 - j, i] = (c.r, c.g, c.b)
    return img


def write_png(cmap: CoverageMap) -> bytes:
    """resolution x resolution image, lower-left pixel is map cell (0, 0)."""
    return _encode_png(_rgb_grid(np.clip(cmap.values, 0.0, 1.0), colorize))


def diff(map_a: CoverageMap, map_b: CoverageMap) -> DiffMap:
    if map_a.resolution != map_b.resolution or map_a.side_km != map_b.side_km:
        raise HeatmapError("maps must share resolution and region")
    return DiffMap(map_a.values - map_b.values, map_a.resolution, map_a.side_km,
                   map_a.fingerprint, map_b.fingerprint)


def write_diff_png(dmap: DiffMap) -> bytes:
    """Diverging colormap scaled to +/- max|diff| (white when identical)."""
    scale = float(np.max(np.abs(dmap.values)))
    if scale <= 0.0:
        scale = 1.0
    return _encode_png(_rgb_grid(dmap.values / scale, diverging_color))
