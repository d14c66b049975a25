"""File formats and run configuration.

HT3 layout: magic ``HT31``, little-endian uint32 m, n, p, then m*n*p
little-endian float32 values, band by band, each band row-major.
"""
import dataclasses
import os
import re
import tempfile
from contextlib import contextmanager

import numpy as np

from .errors import BadMagic, ConfigError, NonFiniteValue, TruncatedFile
from .noise import NoiseSpec
from .solver import SolverConfig
from .sstv import DiffWeights

MAGIC = b"HT31"
_HEADER = np.dtype([("m", "<u4"), ("n", "<u4"), ("p", "<u4")])


@contextmanager
def atomic_path(path):
    """Yield a temporary path that replaces ``path`` only on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def encode_ht3(t):
    t = np.asarray(t)
    if t.ndim != 3:
        raise ValueError(f"expected a 3-way array, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise NonFiniteValue("refusing to write non-finite values")
    header = np.array([t.shape], dtype=_HEADER).tobytes()
    payload = np.ascontiguousarray(np.moveaxis(t, -1, 0), dtype="<f4").tobytes()
    return MAGIC + header + payload


def decode_ht3(buf):
    if buf[:4] != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, found {bytes(buf[:4])!r}")
    if len(buf) < 4 + _HEADER.itemsize:
        raise TruncatedFile("header incomplete")
    head = np.frombuffer(buf, dtype=_HEADER, count=1, offset=4)[0]
    m, n, p = int(head["m"]), int(head["n"]), int(head["p"])
    expected = m * n * p * 4
    got = len(buf) - 4 - _HEADER.itemsize
    if got != expected:
        raise TruncatedFile(f"header declares {m}x{n}x{p} ({expected} bytes), payload has {got}")
    values = np.frombuffer(buf, dtype="<f4", offset=4 + _HEADER.itemsize).reshape(p, m, n)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("file contains non-finite values")
    return np.moveaxis(values, 0, -1).astype(float)


def load_ht3(path):
    with open(path, "rb") as fh:
        return decode_ht3(fh.read())


def save_ht3(path, t):
    data = encode_ht3(t)
    with atomic_path(path) as tmp, open(tmp, "wb") as fh:
        fh.write(data)


def encode_pgm(band):
    """8-bit binary PGM, min-max scaled; a constant band comes out black."""
    band = np.asarray(band, dtype=float)
    lo, hi = band.min(), band.max()
    scaled = np.zeros(band.shape) if hi == lo else (band - lo) / (hi - lo)
    pixels = np.round(scaled * 255).astype(np.uint8)
    m, n = band.shape
    return f"P5\n{n} {m}\n255\n".encode("ascii") + pixels.tobytes()


def normalize_bands(t):
    """Map each band affinely onto [0, 1]; returns the cube and (min, max) per band."""
    t = np.asarray(t, dtype=float)
    lo = t.min(axis=(0, 1))
    hi = t.max(axis=(0, 1))
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (t - lo) / safe, 0.0)
    return out, np.stack([lo, hi], axis=1)


def denormalize_bands(t, ranges):
    ranges = np.asarray(ranges, dtype=float)
    lo, hi = ranges[:, 0], ranges[:, 1]
    return np.asarray(t, dtype=float) * (hi - lo) + lo


# run.cfg grammar: "key = value" lines, '#' comments, comma-separated ranges

_SOLVER_KEYS = {f.name for f in dataclasses.fields(SolverConfig)}
_NOISE_KEYS = {f.name for f in dataclasses.fields(NoiseSpec)}
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def _parse_scalar(text):
    low = text.lower()
    if low == "none":
        return None
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_value(text):
    parts = [s.strip() for s in text.split(",")]
    values = tuple(_parse_scalar(s) for s in parts)
    return values[0] if len(values) == 1 else values


def parse_config(text):
    """Parse key=value text into ``(solver_kwargs, noise_kwargs)``."""
    solver, noise = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _LINE.match(line)
        if not match:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = match.groups()
        if key not in _SOLVER_KEYS and key not in _NOISE_KEYS:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        try:
            parsed = parse_value(value)
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from None
        (solver if key in _SOLVER_KEYS else noise)[key] = parsed
    return solver, noise


def _build(cls, kwargs):
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {cls.__name__}: {exc}") from None


def solver_config(kwargs):
    kwargs = dict(kwargs)
    if "weights" in kwargs:
        w = kwargs["weights"]
        if not isinstance(w, tuple) or len(w) != 3:
            raise ConfigError("weights takes three comma-separated values")
        kwargs["weights"] = _build(DiffWeights, dict(zip(("w1", "w2", "w3"), w)))
    return _build(SolverConfig, kwargs)


def noise_spec(kwargs, base=None):
    """NoiseSpec from parsed values, overriding ``base`` field by field."""
    merged = dataclasses.asdict(base) if base is not None else {}
    merged.update(kwargs)
    return _build(NoiseSpec, merged)


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def format_solver_config(cfg):
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, DiffWeights):
            v = ",".join(repr(float(x)) for x in v.as_tuple())
        elif isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        elif v is None:
            v = "none"
        else:
            v = str(v).lower() if isinstance(v, bool) else repr(v) if isinstance(v, float) else str(v)
        lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"


def format_noise_spec(spec):
    return "\n".join(f"{k}={v}" for k, v in spec.to_items()) + "\n"
