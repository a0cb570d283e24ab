"""Lattice windows and reproducible exponential weight fields.

Weights are generated by a counter-based construction: every site (x, y)
is hashed together with the seed through a splitmix64-style finalizer and
the 64-bit result is mapped to an Exp(1) variate by inverse CDF.  The value
at a site therefore depends only on (seed, x, y), never on the order of
evaluation, which makes fields extensible (enlarging the window preserves
the overlap), trivially parallel, and bit-for-bit reproducible.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

RNG_ID = "splitmix64-exp-v1"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MAGIC = b"LPPW"
_FORMAT_VERSION = 1


class InvalidWindowError(ValueError):
    """Raised for empty or malformed lattice windows."""


class FieldFormatError(Exception):
    """Raised when a serialized field file cannot be parsed.

    Messages name the byte offset at which parsing failed.
    """


@dataclass(frozen=True)
class LatticeWindow:
    """Finite rectangle of lattice sites, both bounds inclusive."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self) -> None:
        for v in (self.x_min, self.x_max, self.y_min, self.y_max):
            if not isinstance(v, (int, np.integer)):
                raise InvalidWindowError(f"window bounds must be integers, got {v!r}")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise InvalidWindowError(
                f"empty window: [{self.x_min},{self.x_max}]x[{self.y_min},{self.y_max}]"
            )

    @property
    def nx(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def ny(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    def contains(self, x: int, y: int) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def index(self, x: int, y: int) -> tuple[int, int]:
        """Array offsets of site (x, y); raises if outside the window."""
        if not self.contains(x, y):
            raise InvalidWindowError(f"site ({x},{y}) outside window {self}")
        return (x - self.x_min, y - self.y_min)

    def __str__(self) -> str:  # compact, used in error messages
        return f"[{self.x_min},{self.x_max}]x[{self.y_min},{self.y_max}]"


def _mix(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays (wraparound intended)."""
    with np.errstate(over="ignore"):
        z = z.astype(np.uint64, copy=True)
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def _mix_scalar(z: int) -> int:
    return int(_mix(np.array([z], dtype=np.uint64))[0])


def derive_seed(seed: int, tag: int) -> int:
    """Independent sub-stream seed for (seed, tag); pure and stable."""
    with np.errstate(over="ignore"):
        t = np.uint64(tag & 0xFFFFFFFFFFFFFFFF) + _GOLDEN
        return _mix_scalar(int(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ _mix(t[None])[0]))


def site_uniform(seed: int, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Uniform(0,1) variates keyed by (seed, x, y), strictly inside (0,1)."""
    with np.errstate(over="ignore"):
        h0 = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN
        h0 = _mix(np.asarray(h0)[None])[0]
        ux = np.asarray(xs, dtype=np.int64).astype(np.uint64)
        uy = np.asarray(ys, dtype=np.int64).astype(np.uint64)
        h = _mix(_mix(ux ^ h0) ^ uy)
    # (h >> 11) has 53 random bits; +0.5 keeps the result away from 0 and 1
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def site_exponential(
    seed: int, xs: np.ndarray, ys: np.ndarray, rate: float = 1.0
) -> np.ndarray:
    """Exp(rate) variates keyed by (seed, x, y); strictly positive."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    u = site_uniform(seed, xs, ys)
    return -np.log1p(-u) / rate


def stream_exponential(seed: int, start: int, count: int, rate: float = 1.0) -> np.ndarray:
    """One-dimensional Exp(rate) stream: entries start .. start+count-1."""
    idx = np.arange(start, start + count, dtype=np.int64)
    return site_exponential(seed, idx, np.zeros_like(idx), rate=rate)


class WeightField:
    """Exponential weights on a lattice window.

    values is a C-order float64 array of shape (nx, ny); values[i, j] is the
    weight at site (x_min + i, y_min + j).  Fields produced by
    sample_weight_field carry the seed of the counter-based generator and can
    be extended beyond their window; handmade fields (explicit values) cannot.
    """

    def __init__(
        self,
        window: LatticeWindow,
        values: np.ndarray,
        seed: int | None = None,
        rng_id: str = RNG_ID,
    ) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != window.shape:
            raise ValueError(
                f"values shape {values.shape} does not match window shape {window.shape}"
            )
        if not np.all(values > 0):
            raise ValueError("weight values must be strictly positive")
        self.window = window
        self.values = values
        self.seed = seed
        self.rng_id = rng_id

    def weight(self, x: int, y: int) -> float:
        i, j = self.window.index(x, y)
        return float(self.values[i, j])

    @property
    def extensible(self) -> bool:
        return self.seed is not None and self.rng_id == RNG_ID

    def weights_on(self, window: LatticeWindow) -> np.ndarray:
        """Weights on another window; samples fresh sites when extensible."""
        w = self.window
        if (
            window.x_min >= w.x_min
            and window.x_max <= w.x_max
            and window.y_min >= w.y_min
            and window.y_max <= w.y_max
        ):
            i0 = window.x_min - w.x_min
            j0 = window.y_min - w.y_min
            return self.values[i0 : i0 + window.nx, j0 : j0 + window.ny]
        if not self.extensible:
            raise ValueError(
                f"window {window} exceeds field window {w} and the field has no seed to extend from"
            )
        return _sample_values(window, self.seed)

    def row(self, y: int, x_lo: int, x_hi: int) -> np.ndarray:
        """Weights on the row segment [x_lo, x_hi] x {y} (extensible fields only
        when the segment leaves the window)."""
        return self.weights_on(LatticeWindow(x_lo, x_hi, y, y))[:, 0]


def _sample_values(window: LatticeWindow, seed: int) -> np.ndarray:
    xs = np.arange(window.x_min, window.x_max + 1, dtype=np.int64)
    ys = np.arange(window.y_min, window.y_max + 1, dtype=np.int64)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return site_exponential(seed, gx, gy)


def sample_weight_field(window: LatticeWindow, seed: int) -> WeightField:
    """Sample iid Exp(1) weights on the window, keyed by (seed, site)."""
    if not isinstance(window, LatticeWindow):
        raise InvalidWindowError(f"expected LatticeWindow, got {type(window).__name__}")
    return WeightField(window, _sample_values(window, seed), seed=seed)


# --- serialization -----------------------------------------------------------
#
# Layout (little endian):
#   offset 0   magic  b"LPPW"
#   offset 4   uint32 format version
#   offset 8   int64  x_min, x_max, y_min, y_max
#   offset 40  uint64 seed (2**64-1 encodes "no seed")
#   offset 48  uint16 rng_id length, then that many ascii bytes
#   then       float64 values, row-major (x rows of ny entries each)

_NO_SEED = 2**64 - 1


def save_field(field: WeightField, path: str | os.PathLike) -> None:
    w = field.window
    seed = _NO_SEED if field.seed is None else int(field.seed)
    rng_bytes = field.rng_id.encode("ascii")
    header = _MAGIC + struct.pack(
        "<IqqqqQH",
        _FORMAT_VERSION,
        w.x_min,
        w.x_max,
        w.y_min,
        w.y_max,
        seed,
        len(rng_bytes),
    )
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(header + rng_bytes + payload)
    os.replace(tmp, path)


def load_field(path: str | os.PathLike) -> WeightField:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) == 0:
        raise FieldFormatError(f"{path}: empty file ended at byte offset 0")
    if len(blob) < 4 or blob[:4] != _MAGIC:
        raise FieldFormatError(
            f"{path}: bad magic at byte offset 0 (expected {_MAGIC!r})"
        )
    if len(blob) < 50:
        raise FieldFormatError(f"{path}: truncated header, file ends at byte offset {len(blob)}")
    version, x_min, x_max, y_min, y_max, seed, rng_len = struct.unpack(
        "<IqqqqQH", blob[4:50]
    )
    if version != _FORMAT_VERSION:
        raise FieldFormatError(
            f"{path}: unsupported format version {version} at byte offset 4"
        )
    try:
        window = LatticeWindow(x_min, x_max, y_min, y_max)
    except InvalidWindowError as exc:
        raise FieldFormatError(f"{path}: invalid window at byte offset 8: {exc}") from exc
    if len(blob) < 50 + rng_len:
        raise FieldFormatError(
            f"{path}: rng id overruns file, file ends at byte offset {len(blob)}"
        )
    rng_id = blob[50 : 50 + rng_len].decode("ascii")
    off = 50 + rng_len
    need = window.n_sites * 8
    if len(blob) - off != need:
        raise FieldFormatError(
            f"{path}: payload at byte offset {off} should hold {need} bytes, found {len(blob) - off}"
        )
    values = np.frombuffer(blob, dtype="<f8", offset=off).reshape(window.shape).copy()
    if not np.all(values > 0):
        raise FieldFormatError(
            f"{path}: nonpositive weight in payload at byte offset {off}"
        )
    return WeightField(
        window, values, seed=None if seed == _NO_SEED else seed, rng_id=rng_id
    )


def write_field_tsv(field: WeightField, path: str | os.PathLike) -> None:
    """Plain text export: one `x<TAB>y<TAB>weight` line per site."""
    w = field.window
    lines = ["x\ty\tweight"]
    for i in range(w.nx):
        for j in range(w.ny):
            lines.append(f"{w.x_min + i}\t{w.y_min + j}\t{field.values[i, j]:.17g}")
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
