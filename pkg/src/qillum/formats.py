"""Plain-text file formats: matrix dumps, scenario configs, result tables,
reflectivity grids and PGM images."""

from __future__ import annotations

import csv
import json
import math
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from .errors import ConfigError, DomainError
from .hilbert import HermitianOperator
from .imaging import ReflectivityMap
from .scenarios import SignalSpec

SWEEP_COLUMNS = (
    "eta", "b", "d", "kind", "regime", "q_numeric", "s_star", "q_analytic",
    "q_regime_approx", "helstrom_error", "trials_eps01",
)
CAMPAIGN_COLUMNS = (
    "kind", "truth", "eta", "b", "d", "alpha", "beta", "replicas",
    "mean_shots", "ci95", "error_rate", "seed",
)
CONFIG_KEYS = ("eta", "b", "d", "prior0", "psi", "seed")


def fmt(value) -> str:
    """17 significant digits for floats; ints, bools and strings verbatim."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        # JSON has no nan/inf literals
        return v if math.isfinite(v) else fmt(v)
    return str(value)


# -- matrix dump ---------------------------------------------------------

def write_matrix_dump(op: HermitianOperator, stream: TextIO) -> None:
    """``dim <n>`` then one ``row col re im`` line per entry, row-major."""
    stream.write(f"dim {op.dim}\n")
    m = op.matrix
    for i in range(op.dim):
        for j in range(op.dim):
            z = m[i, j]
            stream.write(f"{i} {j} {fmt(float(z.real))} {fmt(float(z.imag))}\n")


def read_matrix_dump(stream: TextIO) -> np.ndarray:
    header = stream.readline().split()
    if len(header) != 2 or header[0] != "dim":
        raise ConfigError(f"matrix dump must start with 'dim <n>', got {' '.join(header)!r}")
    dim = int(header[1])
    m = np.zeros((dim, dim), dtype=complex)
    seen = 0
    for line in stream:
        if not line.strip():
            continue
        i, j, re, im = line.split()
        m[int(i), int(j)] = complex(float(re), float(im))
        seen += 1
    if seen != dim * dim:
        raise ConfigError(f"matrix dump has {seen} entries, expected {dim * dim}")
    return m


# -- scenario config -----------------------------------------------------

def parse_psi(text: str, d: Optional[int] = None) -> Optional[SignalSpec]:
    """``uniform`` (returned as None) or ``re:im,re:im,...``."""
    text = text.strip()
    if text == "uniform":
        return None
    try:
        amps = []
        for item in text.split(","):
            re, _, im = item.strip().partition(":")
            amps.append(complex(float(re), float(im or 0.0)))
    except ValueError as exc:
        raise ConfigError(f"psi: cannot parse {text!r} as re:im,... ({exc})") from None
    if d is not None and len(amps) != d:
        raise ConfigError(f"psi: {len(amps)} amplitudes given for d={d}")
    try:
        return SignalSpec(np.array(amps))
    except DomainError as exc:
        raise ConfigError(f"psi: {exc}") from None


def parse_config(text: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment. Values stay strings."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


# -- result tables -------------------------------------------------------

def write_table(rows: Sequence[Dict], columns: Sequence[str], stream: TextIO,
                fmt_name: str = "csv", comment: Optional[str] = None) -> None:
    if fmt_name == "json":
        doc = {
            "comment": comment,
            "columns": list(columns),
            "rows": [{c: _json_value(r[c]) for c in columns} for r in rows],
        }
        json.dump(doc, stream, indent=1)
        stream.write("\n")
        return
    if comment is not None:
        stream.write(f"# {comment}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r[c]) for c in columns])


def read_csv_table(stream: TextIO) -> List[Dict[str, str]]:
    lines = [ln for ln in stream.read().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- imaging grids -------------------------------------------------------

def read_map(stream: TextIO) -> ReflectivityMap:
    """``width height`` then ``height`` rows of ``width`` reals."""
    tokens = [ln.split() for ln in stream.read().splitlines() if ln.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise ConfigError("map must start with 'width height'")
    width, height = int(tokens[0][0]), int(tokens[0][1])
    rows = tokens[1:]
    if len(rows) != height or any(len(r) != width for r in rows):
        raise ConfigError(f"map body does not match declared size {width}x{height}")
    try:
        return ReflectivityMap(np.array(rows, dtype=float))
    except DomainError as exc:
        raise ConfigError(f"map: {exc}") from None


def write_grid(grid: np.ndarray, stream: TextIO, summary: Optional[Iterable[str]] = None) -> None:
    h, w = grid.shape
    stream.write(f"{w} {h}\n")
    for row in grid:
        stream.write(" ".join(fmt(float(v)) for v in row) + "\n")
    for line in summary or ():
        stream.write(line + "\n")


def write_pgm(detected: np.ndarray, stream: TextIO) -> None:
    """ASCII PGM (P2), detected pixels white."""
    h, w = detected.shape
    stream.write(f"P2\n{w} {h}\n255\n")
    for row in detected:
        stream.write(" ".join("255" if v else "0" for v in row) + "\n")
