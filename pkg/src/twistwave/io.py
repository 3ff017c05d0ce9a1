"""Binary containers (little-endian complex128) and CSV exports."""
from __future__ import annotations

import csv
import struct
from fractions import Fraction
from pathlib import Path

import numpy as np

from .field import Grid, SampledField
from .ops import dyadic_triple
from .weyl import WeylKernel
from .zak import ZakField, ZakParams

VERSION = 1
_HEAD = "<4sIId"
_LAM = "<iQI"
_ZAK = "<4sIIdII"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _read_data(buf: bytes, off: int, shape) -> np.ndarray:
    count = int(np.prod(shape))
    arr = np.frombuffer(buf, dtype="<c16", count=count, offset=off)
    if arr.size != count:
        raise ValueError("truncated payload")
    return arr.reshape(shape).astype(complex)


def write_field(path, f: SampledField) -> None:
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack(_HEAD, b"TWF2", VERSION, g.n, g.extent))
        fh.write(np.ascontiguousarray(f.data, dtype="<c16").tobytes())


def read_field(path) -> SampledField:
    buf = Path(path).read_bytes()
    magic, ver, n, ext = struct.unpack_from(_HEAD, buf)
    if magic != b"TWF2" or ver != VERSION:
        raise ValueError(f"not a field file: {magic!r} v{ver}")
    return SampledField(Grid(ext, n), _read_data(buf, struct.calcsize(_HEAD), (n, n)))


def write_kernel(path, K: WeylKernel) -> None:
    g = K.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack(_HEAD, b"TWKL", VERSION, g.n, g.extent))
        fh.write(struct.pack(_LAM, *dyadic_triple(K.lam)))
        fh.write(np.ascontiguousarray(K.data, dtype="<c16").tobytes())


def read_kernel(path) -> WeylKernel:
    buf = Path(path).read_bytes()
    magic, ver, n, ext = struct.unpack_from(_HEAD, buf)
    if magic != b"TWKL" or ver != VERSION:
        raise ValueError(f"not a kernel file: {magic!r} v{ver}")
    off = struct.calcsize(_HEAD)
    sign, num, log2den = struct.unpack_from(_LAM, buf, off)
    lam = sign * Fraction(num, 1 << log2den)
    return WeylKernel(lam, Grid(ext, n), _read_data(buf, off + struct.calcsize(_LAM), (n, n)))


def write_zak(path, z: ZakField) -> None:
    p = z.params
    with open(path, "wb") as fh:
        fh.write(struct.pack(_ZAK, b"TWZK", VERSION, p.M, p.H, p.nt, p.n_eta))
        fh.write(np.ascontiguousarray(z.data, dtype="<c16").tobytes())


def read_zak(path) -> ZakField:
    buf = Path(path).read_bytes()
    magic, ver, M, H, nt, n_eta = struct.unpack_from(_ZAK, buf)
    if magic != b"TWZK" or ver != VERSION:
        raise ValueError(f"not a Zak file: {magic!r} v{ver}")
    p = ZakParams(M=M, H=H, n_eta=n_eta, n_t=nt)
    return ZakField(_read_data(buf, struct.calcsize(_ZAK), (n_eta, nt, nt)), p)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])


def bracket_rows(b):
    p = b.params
    for i, xi in enumerate(p.xi):
        for k, xip in enumerate(p.xip):
            yield float(xi), float(xip), float(b.data[i, k])


def write_bracket_csv(path, b) -> None:
    write_csv(path, ["xi", "xi_prime", "value"], bracket_rows(b))


def write_spectral_csv(path, s) -> None:
    write_csv(path, ["eta", "total", *[f"term_{j}" for j in sorted(s.per_j)]], s.rows())


def write_gram_csv(path, res) -> None:
    write_csv(path, ["row", "col", "re", "im"], res.rows())


def read_family(path):
    """Family file: JSON object mapping ``j`` to a field file path (relative to the JSON)."""
    import json

    from .wavelet import GeneratorFamily

    base = Path(path).parent
    with open(path) as fh:
        mapping = json.load(fh)
    return GeneratorFamily({int(j): read_field(base / p) for j, p in mapping.items()})
