"""Raster data model and ESRI ASCII grid I/O.

A :class:`Grid` stores its cells as a ``(nrows, ncols)`` float64 array with
rows ordered north to south, exactly as they appear in the body of an ASCII
grid file. Missing cells hold the header's ``nodata_value`` sentinel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


class GridFormatError(ValueError):
    """Raised when an ASCII grid document cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HeaderMismatchError(ValueError):
    """Raised when grids that must share a geometry do not."""


class OutOfBoundsError(ValueError):
    """Raised when a coordinate falls outside a grid's extent."""


class CellError(ValueError):
    """Raised when a cell-wise operation produces an invalid value."""


@dataclass(frozen=True)
class GridHeader:
    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata_value: float = -9999.0

    def __post_init__(self):
        if int(self.ncols) != self.ncols or self.ncols < 1:
            raise ValueError(f"ncols must be a positive integer, got {self.ncols!r}")
        if int(self.nrows) != self.nrows or self.nrows < 1:
            raise ValueError(f"nrows must be a positive integer, got {self.nrows!r}")
        if not (math.isfinite(self.cellsize) and self.cellsize > 0):
            raise ValueError(f"cellsize must be positive, got {self.cellsize!r}")
        for name in ("xllcorner", "yllcorner", "nodata_value"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "ncols", int(self.ncols))
        object.__setattr__(self, "nrows", int(self.nrows))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def extent(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of the grid."""
        return (
            self.xllcorner,
            self.yllcorner,
            self.xllcorner + self.ncols * self.cellsize,
            self.yllcorner + self.nrows * self.cellsize,
        )

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Return 1-D arrays of column-center x and row-center y (north first)."""
        xs = self.xllcorner + (np.arange(self.ncols) + 0.5) * self.cellsize
        ys = self.yllcorner + (self.nrows - np.arange(self.nrows) - 0.5) * self.cellsize
        return xs, ys

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        x = self.xllcorner + (col + 0.5) * self.cellsize
        y = self.yllcorner + (self.nrows - row - 0.5) * self.cellsize
        return x, y

    def diff(self, other: "GridHeader") -> list[str]:
        """Names of the fields that differ between two headers."""
        return [f.name for f in fields(self) if getattr(self, f.name) != getattr(other, f.name)]


class Grid:
    """Immutable raster layer.

    Parameters
    ----------
    header : GridHeader
    values : array_like
        Cell values, either ``(nrows, ncols)`` or flat row-major of length
        ``nrows * ncols``. Cells equal to ``header.nodata_value`` are nodata.
    """

    __slots__ = ("header", "values")

    def __init__(self, header: GridHeader, values):
        arr = np.array(values, dtype=np.float64)
        if arr.size != header.nrows * header.ncols:
            raise ValueError(
                f"wrong value count: expected {header.nrows * header.ncols}, got {arr.size}"
            )
        arr = arr.reshape(header.shape)
        bad = ~np.isfinite(arr)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise CellError(f"non-finite value at cell (row={r}, col={c})")
        arr.setflags(write=False)
        object.__setattr__(self, "header", header)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Grid is immutable")

    @classmethod
    def from_masked(cls, header: GridHeader, data, mask) -> "Grid":
        """Build a grid from data plus a boolean validity mask."""
        arr = np.where(mask, data, header.nodata_value)
        return cls(header, arr)

    @classmethod
    def full(cls, header: GridHeader, value: float) -> "Grid":
        return cls(header, np.full(header.shape, value, dtype=np.float64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.header.shape

    @property
    def mask(self) -> np.ndarray:
        """True where the cell holds a valid value."""
        return self.values != self.header.nodata_value

    def valid_values(self) -> np.ndarray:
        return self.values[self.mask]

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def with_values(self, values) -> "Grid":
        return Grid(self.header, values)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.header == other.header and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.header, self.values.tobytes()))

    def __repr__(self):
        return f"Grid({self.header.nrows}x{self.header.ncols}, cellsize={self.header.cellsize})"


def format_number(v: float) -> str:
    """Shortest text that parses back to exactly ``v``."""
    v = float(v)
    if v == 0.0:
        return "-0" if math.copysign(1.0, v) < 0 else "0"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _parse_number(token: str, line: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise GridFormatError(f"non-numeric token {token!r}", line) from None
    if not math.isfinite(v):
        raise GridFormatError(f"non-finite token {token!r}", line)
    return v


def read_ascii_grid(text: str) -> Grid:
    """Parse an ESRI ASCII grid document."""
    lines = text.splitlines()
    header: dict[str, float] = {}
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        key = parts[0].lower()
        try:
            float(parts[0])
            break  # first body line
        except ValueError:
            pass
        if key in ("xllcenter", "yllcenter"):
            raise GridFormatError(f"center-registered grids are not supported ({parts[0]})", i + 1)
        if key not in HEADER_KEYS:
            raise GridFormatError(f"malformed header keyword {parts[0]!r}", i + 1)
        if key in header:
            raise GridFormatError(f"duplicate header keyword {parts[0]!r}", i + 1)
        if len(parts) != 2:
            raise GridFormatError(f"header line for {parts[0]!r} must hold one value", i + 1)
        header[key] = _parse_number(parts[1], i + 1)
        i += 1

    header.setdefault("nodata_value", -9999.0)
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise GridFormatError(f"missing header keyword(s): {', '.join(missing)}", i + 1)
    for key in ("ncols", "nrows"):
        if not header[key].is_integer() or header[key] < 1:
            raise GridFormatError(f"{key} must be a positive integer", None)
    try:
        gh = GridHeader(
            int(header["ncols"]), int(header["nrows"]), header["xllcorner"],
            header["yllcorner"], header["cellsize"], header["nodata_value"],
        )
    except ValueError as exc:
        raise GridFormatError(str(exc)) from None

    expected = gh.ncols * gh.nrows
    values = np.empty(expected, dtype=np.float64)
    n = 0
    last_line = i
    for lineno in range(i, len(lines)):
        tokens = lines[lineno].split()
        if not tokens:
            continue
        last_line = lineno + 1
        if n + len(tokens) > expected:
            raise GridFormatError(
                f"wrong value count: more than {expected} values for a "
                f"{gh.nrows}x{gh.ncols} grid", lineno + 1,
            )
        for tok in tokens:
            values[n] = _parse_number(tok, lineno + 1)
            n += 1
    if n != expected:
        raise GridFormatError(
            f"wrong value count: expected {expected} values, found {n}", last_line or None
        )
    return Grid(gh, values)


def write_ascii_grid(g: Grid) -> str:
    h = g.header
    out = [
        f"ncols {h.ncols}",
        f"nrows {h.nrows}",
        f"xllcorner {format_number(h.xllcorner)}",
        f"yllcorner {format_number(h.yllcorner)}",
        f"cellsize {format_number(h.cellsize)}",
        f"NODATA_value {format_number(h.nodata_value)}",
    ]
    for row in g.values:
        out.append(" ".join(format_number(v) for v in row.tolist()))
    return "\n".join(out) + "\n"


def load_grid(path) -> Grid:
    with open(path, encoding="utf-8") as fh:
        return read_ascii_grid(fh.read())


def save_grid(g: Grid, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_ascii_grid(g))


def map_cells(g: Grid, f: Callable[[float], float]) -> Grid:
    """Apply a scalar function to every valid cell; nodata stays nodata."""
    out = g.values.copy()
    nodata = g.header.nodata_value
    flat = out.reshape(-1)
    for idx in np.flatnonzero(g.mask.reshape(-1)):
        try:
            v = float(f(float(flat[idx])))
        except ArithmeticError as exc:
            raise CellError(f"function failed at cell index {idx}: {exc}") from exc
        if not math.isfinite(v):
            raise CellError(f"function produced non-finite value at cell index {idx}")
        if v == nodata:
            raise CellError(f"function produced the nodata sentinel at cell index {idx}")
        flat[idx] = v
    return Grid(g.header, out)


def check_same_header(grids: Iterable[Grid]) -> GridHeader:
    grids = list(grids)
    ref = grids[0].header
    for k, g in enumerate(grids[1:], start=1):
        if g.header != ref:
            raise HeaderMismatchError(
                f"grid {k} header differs from grid 0 in: {', '.join(ref.diff(g.header))}"
            )
    return ref


def weighted_sum(layers: Sequence[tuple[Grid, float]]) -> Grid:
    """Cell-wise ``sum(weight_i * layer_i)``; nodata in any input is absorbing.

    Terms are accumulated in list order so the result does not depend on how
    the work is scheduled.
    """
    if not layers:
        raise ValueError("weighted_sum needs at least one layer")
    header = check_same_header(g for g, _ in layers)
    total = np.zeros(header.shape, dtype=np.float64)
    valid = np.ones(header.shape, dtype=bool)
    for g, w in layers:
        valid &= g.mask
        total += float(w) * g.values
    return Grid.from_masked(header, total, valid)


def sample_at(g: Grid, x: float, y: float) -> float | None:
    """Value of the cell containing ``(x, y)``, or ``None`` on nodata.

    Column is ``floor((x - xllcorner) / cellsize)``; row is counted the same
    way from the top edge, so a point on an edge shared by two cells goes to
    the higher-index one. Points on the east or south outer boundary belong to
    the last column or row.
    """
    h = g.header
    xmin, ymin, xmax, ymax = h.extent
    if not (xmin <= x <= xmax and ymin <= y <= ymax):
        raise OutOfBoundsError(f"point ({x}, {y}) outside grid extent {h.extent}")
    col = min(int(math.floor((x - xmin) / h.cellsize)), h.ncols - 1)
    row = min(int(math.floor((ymax - y) / h.cellsize)), h.nrows - 1)
    v = g.values[row, col]
    return None if v == h.nodata_value else float(v)
