"""Twisted translations and dyadic dilations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field import (Atom, ChirpField, Field2D, FunctionField, GridError,
                    SampledField, interpolate)


def dyadic(value) -> Fraction:
    """Exact dyadic rational for ``value``; rejects zero and non-dyadic input."""
    q = value if isinstance(value, Fraction) else Fraction(value)
    if q == 0:
        raise ValueError("lambda must be nonzero")
    d = q.denominator
    if d & (d - 1):
        raise ValueError(f"{value} is not a dyadic rational")
    return q


def dyadic_triple(q: Fraction) -> tuple[int, int, int]:
    """``(sign, |numerator|, log2 denominator)`` of a dyadic rational."""
    q = dyadic(q)
    return (1 if q > 0 else -1, abs(q.numerator), q.denominator.bit_length() - 1)


def pi_phase(turns) -> complex:
    """``exp(i*pi*turns)`` with ``turns`` reduced mod 2 exactly."""
    t = Fraction(turns) % 2
    if t.denominator <= 2:
        return {Fraction(0): 1.0 + 0j, Fraction(1, 2): 1j,
                Fraction(1): -1.0 + 0j, Fraction(3, 2): -1j}[t]
    return complex(np.exp(1j * np.pi * float(t)))


@dataclass(frozen=True)
class TwistIndex:
    k: int
    l: int
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "lam", dyadic(self.lam))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "l", int(self.l))


def _translate_atom(t: Atom, k: int, l: int, lam: Fraction) -> Atom:
    a = t.alpha
    return Atom(
        t.coef, t.px, t.qy,
        alpha=a,
        beta=t.beta + (lam - a) * l,
        gamma=t.gamma - (a + lam) * k,
        phase=(t.phase + a * k * l - t.beta * k - t.gamma * l) % 2,
        ax=t.ax, bx=t.bx - t.ax * k,
        ay=t.ay, by=t.by - t.ay * l,
    )


def twisted_translate(f: Field2D, t: TwistIndex) -> Field2D:
    """``e^{i pi lam (x l - y k)} f(x - k, y - l)``.

    Sampled fields are shifted by an exact index roll; values leaving the
    box are dropped (mass recorded in ``meta['dropped_mass']``).
    """
    k, l, lam = t.k, t.l, t.lam
    if isinstance(f, ChirpField):
        return ChirpField([_translate_atom(a, k, l, lam) for a in f.terms], f.name)
    if isinstance(f, SampledField):
        g = f.grid
        if abs(1.0 / g.h - round(1.0 / g.h)) > 0:
            raise GridError("integer shifts need 1/h integer")
        sx, sy = k * g.inv_h, l * g.inv_h
        n = g.n
        out = np.zeros_like(f.data)
        src_y = slice(max(0, -sy), min(n, n - sy))
        dst_y = slice(max(0, sy), min(n, n + sy))
        src_x = slice(max(0, -sx), min(n, n - sx))
        dst_x = slice(max(0, sx), min(n, n + sx))
        if src_x.start < src_x.stop and src_y.start < src_y.stop:
            out[dst_y, dst_x] = f.data[src_y, src_x]
        kept = np.sum(np.abs(out) ** 2)
        dropped = (np.sum(np.abs(f.data) ** 2) - kept) * g.h ** 2
        X, Y = np.meshgrid(g.nodes, g.nodes)
        turns = np.mod(float(lam) * (X * l - Y * k), 2.0)
        out = out * np.exp(1j * np.pi * turns)
        meta = dict(f.meta, dropped_mass=float(f.meta.get("dropped_mass", 0.0) + dropped))
        return SampledField(g, out, meta)
    lamf = float(lam)
    bbox = f.support()
    if bbox is not None:
        bbox = (bbox[0] + k, bbox[1] + k, bbox[2] + l, bbox[3] + l)
    return FunctionField(
        lambda x, y: np.exp(1j * np.pi * lamf * (x * l - y * k)) * f(x - k, y - l),
        bbox=bbox)


def composition_phase(t1: TwistIndex, t2: TwistIndex) -> complex:
    """Scalar ``c`` with ``T1 T2 = c * T_(k1+k2, l1+l2)`` for equal lambdas."""
    if t1.lam != t2.lam:
        raise ValueError("composition needs equal lambdas")
    return pi_phase(-t1.lam * (t1.k * t2.l - t1.l * t2.k))


def _dilate_atom(t: Atom, m: int) -> Atom:
    a = Fraction(2) ** m
    return Atom(t.coef * float(a), t.px, t.qy,
                alpha=t.alpha * a * a, beta=t.beta * a, gamma=t.gamma * a,
                phase=t.phase, ax=t.ax * a, bx=t.bx, ay=t.ay * a, by=t.by)


def dilate(f: Field2D, m: int, order: str = "nearest") -> Field2D:
    """``2^m f(2^m x, 2^m y)``; sampled fields are resampled with ``order``."""
    m = int(m)
    if m == 0:
        return f
    if isinstance(f, ChirpField):
        return ChirpField([_dilate_atom(a, m) for a in f.terms], f.name)
    a = 2.0 ** m
    if isinstance(f, SampledField):
        g = f.grid
        X, Y = np.meshgrid(g.nodes, g.nodes)
        data = a * interpolate(f, a * X, a * Y, order)
        before = np.sum(np.abs(f.data) ** 2) * g.h ** 2
        after = np.sum(np.abs(data) ** 2) * g.h ** 2
        meta = dict(f.meta, interpolation=order, truncation_loss=float(before - after))
        return SampledField(g, data, meta)
    bbox = f.support()
    if bbox is not None:
        bbox = tuple(v / a for v in bbox)
    return FunctionField(lambda x, y: a * f(a * x, a * y), bbox=bbox)


def wavelet_op(f: Field2D, j: int, k: int, l: int, m: int = 0) -> Field2D:
    """``D_{2^(m+j)} (T_(k,l))^{2^(-2j)} f``."""
    lam = Fraction(2) ** (-2 * j)
    return dilate(twisted_translate(f, TwistIndex(k, l, lam)), m + j)
