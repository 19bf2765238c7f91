"""Sweeps over r and the raster/vector pictures drawn from them.

CSV columns (one row per r, in increasing r):

    r          exact decimal (or p/q) string
    ell        number of intervals, empty on error
    endpoints  space-separated normalized endpoints lo_1 hi_1 lo_2 hi_2 ...,
               x = (v - 1) / (zeta(r) - 1), repr() floats
    densities  space-separated "num/den"
    error      empty, or "<ExceptionName>: message"

In the pictures a pixel column c of width W is black iff its centre
x = (c + 0.5) / W lies in one of the row's normalized intervals. Image rows
run from the largest r at the top to the smallest at the bottom.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np

from .closure import closure
from .endpoints import expr_eval
from .realnum import Enclosure, ExactReal, Precision, parse_real, zeta_enclosure

log = logging.getLogger(__name__)

CSV_FIELDS = ["r", "ell", "endpoints", "densities", "error"]


@dataclass
class ScanRow:
    r: str
    ell: int | None = None
    endpoints: list[float] = field(default_factory=list)
    densities: list[Fraction] = field(default_factory=list)
    error: str = ""

    @property
    def segments(self) -> list[tuple[float, float]]:
        e = self.endpoints
        return list(zip(e[0::2], e[1::2]))


def format_r(r: Fraction) -> str:
    """Exact decimal rendering when r terminates in base 10, else ``p/q``."""
    den, twos, fives = r.denominator, 0, 0
    while den % 2 == 0:
        den, twos = den // 2, twos + 1
    while den % 5 == 0:
        den, fives = den // 5, fives + 1
    digits = max(twos, fives)
    if den != 1:
        return f"{r.numerator}/{r.denominator}"
    scaled = r * 10**digits
    text = str(scaled.numerator).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}" if digits else text


def normalized(value: ExactReal, zeta: Enclosure) -> float:
    """``(v - 1) / (zeta(r) - 1)`` evaluated at the enclosures' midpoints."""
    with mpmath.workprec(zeta.prec):
        v = mpmath.mpf(value.numerator) / value.denominator if isinstance(value, Fraction) else value.mid()
        return float((v - 1) / (zeta.mid() - 1))


def scan_row(r_text: str, precision: Precision = Precision()) -> ScanRow:
    """Closure at one r, flattened for the CSV; failures land in ``error``."""
    row = ScanRow(r_text)
    try:
        result = closure(r_text, precision)
        r, prec = result.r, precision.base
        z = zeta_enclosure(r, prec)
        for interval in result.intervals:
            row.endpoints.append(normalized(expr_eval(interval.lo, r, prec), z))
            row.endpoints.append(normalized(expr_eval(interval.hi, r, prec), z))
        row.densities = list(result.densities)
        row.ell = result.ell
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        log.warning("r = %s failed: %s", r_text, exc)
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def r_grid(r_min, r_max, step) -> list[str]:
    lo, hi, st = parse_real(r_min), parse_real(r_max), parse_real(step)
    if not (1 < lo <= hi) or st <= 0:
        raise ValueError("need 1 < r_min <= r_max and step > 0")
    out, k = [], 0
    while lo + k * st <= hi:
        out.append(format_r(lo + k * st))
        k += 1
    return out


def scan(r_min, r_max, step, precision: Precision = Precision(), jobs: int = 1) -> list[ScanRow]:
    grid = r_grid(r_min, r_max, step)
    if jobs <= 1:
        return [scan_row(r, precision) for r in grid]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(scan_row, grid, [precision] * len(grid)))


def write_csv(rows: Sequence[ScanRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([
                row.r,
                "" if row.ell is None else row.ell,
                " ".join(repr(x) for x in row.endpoints),
                " ".join(f"{d.numerator}/{d.denominator}" for d in row.densities),
                row.error,
            ])


def read_csv(path) -> list[ScanRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != CSV_FIELDS:
            raise ValueError(f"{path}: expected header {','.join(CSV_FIELDS)}")
        for rec in reader:
            rows.append(ScanRow(
                r=rec["r"],
                ell=int(rec["ell"]) if rec["ell"] else None,
                endpoints=[float(x) for x in rec["endpoints"].split()],
                densities=[Fraction(d) for d in rec["densities"].split()],
                error=rec["error"],
            ))
    return rows


# -- pictures --------------------------------------------------------------

def raster(rows: Sequence[ScanRow], width: int, height: int | None = None) -> np.ndarray:
    """Greyscale image (0 = black, 255 = white), top row = largest r."""
    if not rows:
        raise ValueError("empty scan")
    if width < 1:
        raise ValueError("width must be >= 1")
    height = len(rows) if height is None else height
    if height < 1:
        raise ValueError("height must be >= 1")
    centres = (np.arange(width) + 0.5) / width
    lines = []
    for row in rows:
        black = np.zeros(width, dtype=bool)
        for lo, hi in row.segments:
            black |= (centres >= lo) & (centres <= hi)
        lines.append(np.where(black, 0, 255).astype(np.uint8))
    # image row y shows scan row floor((height - 1 - y) * n / height)
    n = len(rows)
    index = ((height - 1 - np.arange(height)) * n) // height
    return np.stack([lines[i] for i in index])


def write_pgm(image: np.ndarray, path) -> None:
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos)
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = (int(f) for f in fields[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM not supported")
    pixels = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8)
    return pixels.reshape(h, w)


def write_svg(rows: Sequence[ScanRow], path, width: int = 1000, height: int | None = None) -> None:
    """One black rectangle per interval per row, same orientation as :func:`raster`."""
    if not rows:
        raise ValueError("empty scan")
    height = len(rows) if height is None else height
    band = height / len(rows)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, row in enumerate(rows):
        y = height - (i + 1) * band
        for lo, hi in row.segments:
            parts.append(
                f'<rect x="{lo * width:.3f}" y="{y:.3f}" width="{(hi - lo) * width:.3f}" '
                f'height="{band:.3f}" fill="black"><title>r={row.r}</title></rect>'
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
