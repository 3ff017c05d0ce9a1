"""Complex fields on the plane: analytic or sampled, plus grid quadrature.

Three concrete field kinds exist:

* :class:`ChirpField` -- finite sums of separable chirp atoms
  ``c * exp(i*pi*(a*x*y + b*x + g*y)) * p(ax*x + bx) * q(ay*y + by)``.
  The class is closed under twisted translation and dyadic dilation and its
  Weyl kernel has a closed form, so identities can be checked exactly.
* :class:`FunctionField` -- any pure callable ``(x, y) -> complex``.
* :class:`SampledField` -- values on a uniform :class:`Grid`.

Grids use left-endpoint nodes ``-X + i*h`` on the half-open box ``[-X, X)^2``
and the composite rectangle rule for integrals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np


class GridError(ValueError):
    """Raised when grids are invalid or incommensurate."""


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-extent, extent)^2`` with ``n`` nodes per axis."""

    extent: float
    n: int

    def __post_init__(self):
        if not _is_pow2(int(self.n)):
            raise GridError(f"n must be a power of two, got {self.n}")
        if not self.extent > 0:
            raise GridError(f"extent must be positive, got {self.extent}")
        inv_h = Fraction(int(self.n)) / (2 * Fraction(self.extent))
        if inv_h.denominator != 1:
            raise GridError(f"1/h = {float(inv_h)} is not an integer")

    @property
    def h(self) -> float:
        return 2.0 * self.extent / self.n

    @property
    def inv_h(self) -> int:
        return int(round(self.n / (2.0 * self.extent)))

    @property
    def nodes(self) -> np.ndarray:
        return -self.extent + np.arange(self.n) * self.h

    def index_range(self, lo: float, hi: float) -> tuple[int, int]:
        """Node indices ``[i0, i1)`` whose coordinates fall in ``[lo, hi)``."""
        i0 = int(np.ceil((lo + self.extent) / self.h - 1e-12))
        i1 = int(np.ceil((hi + self.extent) / self.h - 1e-12))
        return max(i0, 0), min(max(i1, 0), self.n)


GridSpec = Grid


# ---------------------------------------------------------------------------
# one-dimensional profiles


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class Profile:
    """A function on the line with a closed-form Fourier integral.

    ``ft(w)`` returns ``int p(u) exp(i*w*u) du``.
    """

    def __call__(self, u):
        raise NotImplementedError

    def ft(self, w):
        raise NotImplementedError

    def support(self) -> Optional[tuple[float, float]]:
        """Closed interval outside which the profile vanishes, or None."""
        return None

    def breaks(self) -> tuple[float, ...]:
        """Points where the profile itself jumps."""
        return ()

    def ft_breaks(self) -> tuple[float, ...]:
        """Frequencies ``w`` where ``ft`` jumps."""
        return ()

    def effective_support(self) -> tuple[float, float]:
        s = self.support()
        return s if s is not None else (-64.0, 64.0)


@dataclass(frozen=True)
class Step(Profile):
    """Piecewise constant: ``values[r]`` on ``[edges[r], edges[r+1])``.

    Intervals are half-open so translates on dyadic edges tile without
    double counting; this is the a.e. representative used everywhere.
    """

    edges: tuple
    values: tuple

    def __post_init__(self):
        if len(self.edges) != len(self.values) + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("edges must increase strictly")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        edges = [float(e) for e in self.edges]
        for a, b, v in zip(edges, edges[1:], self.values):
            out[(u >= a) & (u < b)] = v
        return out

    def ft(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape, dtype=complex)
        for a, b, v in zip(self.edges, self.edges[1:], self.values):
            L = float(b) - float(a)
            mid = 0.5 * (float(a) + float(b))
            out += v * L * np.exp(1j * w * mid) * np.sinc(w * L / (2 * np.pi))
        return out

    def support(self):
        return float(self.edges[0]), float(self.edges[-1])

    def breaks(self):
        return tuple(float(e) for e in self.edges)

    def norm2(self) -> float:
        return float(sum(abs(v) ** 2 * (float(b) - float(a))
                         for a, b, v in zip(self.edges, self.edges[1:], self.values)))


@dataclass(frozen=True)
class Gaussian(Profile):
    """``exp(-pi*u^2)``; its Fourier integral is ``exp(-w^2/(4*pi))``."""

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.exp(-np.pi * u * u).astype(complex)

    def ft(self, w):
        w = np.asarray(w, dtype=float)
        return np.exp(-w * w / (4 * np.pi)).astype(complex)

    def effective_support(self):
        return (-8.0, 8.0)


@dataclass(frozen=True)
class Band(Profile):
    """Band-limited profile whose Fourier integral is piecewise constant.

    ``ft(w) = coeffs[r]`` when ``w / (2*pi)`` lies in ``bands[r] = (a, b)``
    (half-open), so ``p(u) = sum_r coeffs[r] * int_a^b exp(-2*pi*i*nu*u) dnu``.
    """

    bands: tuple
    coeffs: tuple

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        for (a, b), c in zip(self.bands, self.coeffs):
            L = float(b) - float(a)
            mid = 0.5 * (float(a) + float(b))
            out += c * L * np.exp(-2j * np.pi * mid * u) * np.sinc(L * u)
        return out

    def ft(self, w):
        nu = np.asarray(w, dtype=float) / (2 * np.pi)
        out = np.zeros(nu.shape, dtype=complex)
        for (a, b), c in zip(self.bands, self.coeffs):
            out[(nu >= float(a)) & (nu < float(b))] += c
        return out

    def ft_breaks(self):
        return tuple(2 * np.pi * float(e) for band in self.bands for e in band)

    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 * (float(b) - float(a))
                         for (a, b), c in zip(self.bands, self.coeffs)))


HAAR = Step((Fraction(0), Fraction(1, 2), Fraction(1)), (1.0, -1.0))
UNIT_BOX = Step((Fraction(0), Fraction(1)), (1.0,))
GAUSS = Gaussian()


# ---------------------------------------------------------------------------
# fields


class Field2D:
    """Base class. Fields are immutable; operations return new fields."""

    is_analytic = True

    def __call__(self, x, y):
        raise NotImplementedError

    def support(self) -> Optional[tuple[float, float, float, float]]:
        """Bounding box ``(x0, x1, y0, y1)`` of the support, or None."""
        return None


@dataclass(frozen=True)
class Atom:
    """``coef * e^{i pi phase} * e^{i pi (alpha x y + beta x + gamma y)}
    * px(ax x + bx) * qy(ay y + by)``.

    Chirp rates, offsets and the constant phase are exact fractions; all
    phase constants that twisted translation produces stay exact.
    """

    coef: complex
    px: Profile
    qy: Profile
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)
    phase: Fraction = Fraction(0)
    ax: Fraction = Fraction(1)
    bx: Fraction = Fraction(0)
    ay: Fraction = Fraction(1)
    by: Fraction = Fraction(0)

    def value(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = self.coef * np.exp(1j * np.pi * float(self.phase % 2))
        arg = float(self.alpha) * x * y + float(self.beta) * x + float(self.gamma) * y
        return (c * np.exp(1j * np.pi * arg)
                * self.px(float(self.ax) * x + float(self.bx))
                * self.qy(float(self.ay) * y + float(self.by)))

    def _interval(self, prof, a, b):
        s = prof.support()
        if s is None:
            return None
        lo, hi = (s[0] - float(b)) / float(a), (s[1] - float(b)) / float(a)
        return (min(lo, hi), max(lo, hi))

    def xsupport(self):
        return self._interval(self.px, self.ax, self.bx)

    def ysupport(self):
        return self._interval(self.qy, self.ay, self.by)

    def y_breaks(self) -> list[float]:
        """Values of ``y`` where the y-profile jumps."""
        return [(e - float(self.by)) / float(self.ay) for e in self.qy.breaks()]

    def y_effective(self) -> tuple[float, float]:
        s = self.qy.support() or self.qy.effective_support()
        lo, hi = (s[0] - float(self.by)) / float(self.ay), (s[1] - float(self.by)) / float(self.ay)
        return (min(lo, hi), max(lo, hi))

    def scaled(self, c) -> "Atom":
        return Atom(self.coef * c, self.px, self.qy, self.alpha, self.beta, self.gamma,
                    self.phase, self.ax, self.bx, self.ay, self.by)


class ChirpField(Field2D):
    """Finite sum of :class:`Atom` terms (closed-form analytic field)."""

    def __init__(self, terms: Sequence[Atom], name: str = ""):
        self.terms = tuple(terms)
        self.name = name

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for t in self.terms:
            out = out + t.value(x, y)
        return out

    def support(self):
        if not self.terms:
            return (0.0, 0.0, 0.0, 0.0)
        boxes = []
        for t in self.terms:
            xs, ys = t.xsupport(), t.ysupport()
            if xs is None or ys is None:
                return None
            boxes.append((*xs, *ys))
        b = np.array(boxes)
        return (b[:, 0].min(), b[:, 1].max(), b[:, 2].min(), b[:, 3].max())

    def __add__(self, other):
        if not isinstance(other, ChirpField):
            return NotImplemented
        return ChirpField(self.terms + other.terms)

    def __mul__(self, c):
        return ChirpField([t.scaled(c) for t in self.terms], self.name)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __repr__(self):
        return f"ChirpField({self.name or len(self.terms)})"


class FunctionField(Field2D):
    """Analytic field given by a pure vectorised callable."""

    def __init__(self, func: Callable, bbox=None, name: str = ""):
        self.func = func
        self.bbox = bbox
        self.name = name

    def __call__(self, x, y):
        return np.asarray(self.func(np.asarray(x, float), np.asarray(y, float)), dtype=complex)

    def support(self):
        return self.bbox


class SampledField(Field2D):
    """Field stored as ``data[iy, ix]`` on a grid (y-outer, x-inner)."""

    is_analytic = False

    def __init__(self, grid: Grid, data, meta: Optional[dict] = None):
        data = np.asarray(data, dtype=complex)
        if data.shape != (grid.n, grid.n):
            raise GridError(f"data shape {data.shape} does not match n={grid.n}")
        self.grid = grid
        self.data = data
        self.data.flags.writeable = False
        self.meta = dict(meta or {})

    def __call__(self, x, y, order: str = "nearest"):
        return interpolate(self, x, y, order)

    def __repr__(self):
        return f"SampledField(n={self.grid.n}, extent={self.grid.extent})"


def zero_field() -> ChirpField:
    return ChirpField([], name="zero")


def constant_field(c) -> FunctionField:
    return FunctionField(lambda x, y: np.full(np.broadcast(x, y).shape, c, dtype=complex),
                         name="constant")


def gaussian(scale: float = 1.0) -> ChirpField:
    """Unit-norm ``sqrt(2)*exp(-pi(x^2+y^2))`` (times ``scale``)."""
    return ChirpField([Atom(np.sqrt(2.0) * scale, GAUSS, GAUSS)], name="gaussian")


# ---------------------------------------------------------------------------
# sampling and quadrature


def interpolate(f: SampledField, x, y, order: str = "nearest"):
    """Evaluate a sampled field off-grid; zero outside the box."""
    g = f.grid
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = (x + g.extent) / g.h
    v = (y + g.extent) / g.h
    if order == "nearest":
        iu = np.rint(u).astype(np.int64)
        iv = np.rint(v).astype(np.int64)
        ok = (iu >= 0) & (iu < g.n) & (iv >= 0) & (iv < g.n)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        out[ok] = f.data[iv[ok], iu[ok]]
        return out
    if order == "linear":
        i0 = np.floor(u).astype(np.int64)
        j0 = np.floor(v).astype(np.int64)
        fu, fv = u - i0, v - j0
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for di, wi in ((0, 1 - fu), (1, fu)):
            for dj, wj in ((0, 1 - fv), (1, fv)):
                ii, jj = i0 + di, j0 + dj
                ok = (ii >= 0) & (ii < g.n) & (jj >= 0) & (jj < g.n)
                w = np.broadcast_to(wi * wj, out.shape)
                out[ok] += w[ok] * f.data[jj[ok], ii[ok]]
        return out
    raise ValueError(f"unknown interpolation order {order!r}")


def sample(f: Field2D, g: Grid, order: str = "nearest") -> SampledField:
    """Samples ``f(x_i, y_j)`` at the nodes of ``g``.

    Sampled inputs are resampled with the given interpolation order and must
    share the extent with ``n`` differing by a power of two.
    """
    if isinstance(f, SampledField):
        if f.grid == g:
            return f
        ratio = max(f.grid.n, g.n) / min(f.grid.n, g.n)
        if f.grid.extent != g.extent or not _is_pow2(int(ratio)):
            raise GridError(f"cannot resample {f.grid} onto {g}")
        X, Y = np.meshgrid(g.nodes, g.nodes)
        meta = dict(f.meta, interpolation=order)
        return SampledField(g, interpolate(f, X, Y, order), meta)
    X, Y = np.meshgrid(g.nodes, g.nodes)
    return SampledField(g, f(X, Y), {"interpolation": "exact"})


def _check_same(f: SampledField, g: SampledField):
    if f.grid != g.grid:
        raise GridError(f"grid mismatch: {f.grid} vs {g.grid}")


class Block:
    """Samples of an analytic field on the grid nodes inside its support box."""

    def __init__(self, f: Field2D, g: Grid):
        box = f.support()
        if box is None:
            ix, iy = (0, g.n), (0, g.n)
        else:
            ix = g.index_range(box[0], box[1] + 1e-9 * g.h)
            iy = g.index_range(box[2], box[3] + 1e-9 * g.h)
        self.ix, self.iy = ix, iy
        nodes = g.nodes
        X, Y = np.meshgrid(nodes[ix[0]:ix[1]], nodes[iy[0]:iy[1]])
        self.data = f(X, Y) if X.size else np.zeros((0, 0), complex)


def block_inner(a: Block, b: Block, h: float) -> complex:
    x0, x1 = max(a.ix[0], b.ix[0]), min(a.ix[1], b.ix[1])
    y0, y1 = max(a.iy[0], b.iy[0]), min(a.iy[1], b.iy[1])
    if x1 <= x0 or y1 <= y0:
        return 0j
    pa = a.data[y0 - a.iy[0]:y1 - a.iy[0], x0 - a.ix[0]:x1 - a.ix[0]]
    pb = b.data[y0 - b.iy[0]:y1 - b.iy[0], x0 - b.ix[0]:x1 - b.ix[0]]
    return complex(h * h * np.sum(pa * np.conj(pb)))


def inner(f: Field2D, g: Field2D, grid: Optional[Grid] = None) -> complex:
    """Rectangle-rule ``h^2 * sum f * conj(g)``.

    Sampled fields must share a grid. Analytic fields are sampled on
    ``grid`` restricted to their support boxes, which gives the same sum as
    the full grid.
    """
    if isinstance(f, SampledField) and isinstance(g, SampledField):
        _check_same(f, g)
        return complex(f.grid.h ** 2 * np.sum(f.data * np.conj(g.data)))
    if grid is None:
        grid = f.grid if isinstance(f, SampledField) else getattr(g, "grid", None)
        if grid is None:
            raise GridError("analytic fields need a grid for quadrature")
    if isinstance(f, SampledField) or isinstance(g, SampledField):
        return inner(sample(f, grid), sample(g, grid))
    return block_inner(Block(f, grid), Block(g, grid), grid.h)


def l2_norm(f: Field2D, grid: Optional[Grid] = None) -> float:
    v = inner(f, f, grid)
    scale = max(abs(v.real), 1e-300)
    if abs(v.imag) > 1e-12 * scale:
        raise ArithmeticError(f"<f,f> has imaginary part {v.imag}")
    return float(np.sqrt(max(v.real, 0.0)))


def outside_mass(f: Field2D, g: Grid, pad: int = 4, order: str = "nearest") -> float:
    """Squared L2 mass of ``f`` outside ``[-X, X)^2`` on a ``pad``-times larger box."""
    if isinstance(f, SampledField):
        return 0.0
    big = Grid(g.extent * pad, g.n * pad)
    inside = l2_norm(f, g) ** 2
    return max(l2_norm(f, big) ** 2 - inside, 0.0)
