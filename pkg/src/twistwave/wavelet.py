"""Twisted wavelet systems, Gram checks, coset decomposition and tiling families."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .field import (HAAR, UNIT_BOX, Atom, Band, Block, ChirpField, Field2D, Grid,
                    GridError, SampledField, Step, block_inner, inner)
from .ops import TwistIndex, pi_phase, twisted_translate, wavelet_op
from .report import VerificationReport


class GeneratorFamily(dict):
    """Mapping ``j -> psi_j``."""

    @property
    def j_range(self):
        return (min(self), max(self)) if self else None

    def generator(self, j: int) -> Field2D:
        if j not in self:
            raise KeyError(f"no generator for j={j}")
        return self[j]


def haar_generator(j: int, corrupted: bool = False) -> ChirpField:
    """``e^{i pi x y 4^-j} h(x) h(y)`` with ``h`` the Haar step on ``[0, 1)``.

    ``corrupted`` flips the sign of the ``x < 1/2`` half of the support.
    """
    lam = Fraction(1, 4) ** j if j >= 0 else Fraction(4) ** (-j)
    px = Step(HAAR.edges, (-1.0, -1.0)) if corrupted else HAAR
    return ChirpField([Atom(1.0, px, HAAR, alpha=lam)], name=f"haar{j}" + ("*" if corrupted else ""))


def haar_family(j_min: int, j_max: int, corrupted: bool = False) -> GeneratorFamily:
    return GeneratorFamily({j: haar_generator(j, corrupted) for j in range(j_min, j_max + 1)})


@dataclass(frozen=True, order=True)
class SystemIndex:
    j: int
    k: int
    l: int
    m: int = 0


def system_indices(js: Iterable[int], ks: Iterable[int], ls: Iterable[int],
                   ms: Iterable[int] = (0,)) -> list[SystemIndex]:
    ks, ls, ms = list(ks), list(ls), list(ms)
    return [SystemIndex(j, k, l, m) for j in js for m in ms for k in ks for l in ls]


def build_system(fam: GeneratorFamily, indices: Sequence[SystemIndex],
                 modified: bool = False) -> list[Field2D]:
    """``wavelet_op(psi_j, j, k, l, m)`` per index; ``m`` is ignored unless ``modified``."""
    out = []
    for ix in indices:
        if modified and ix.j < 0:
            raise ValueError("modified systems need j >= 0")
        out.append(wavelet_op(fam.generator(ix.j), ix.j, ix.k, ix.l, ix.m if modified else 0))
    return out


@dataclass
class GramResult:
    indices: list
    matrix: np.ndarray
    defect: float

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def rows(self):
        """``(row, col, re, im)`` tuples in row-major order."""
        n = self.matrix.shape[0]
        for a in range(n):
            for b in range(n):
                v = self.matrix[a, b]
                yield a, b, float(v.real), float(v.imag)


def gram_matrix(system: Sequence[Field2D], grid: Grid) -> np.ndarray:
    if any(isinstance(f, SampledField) for f in system):
        if not all(isinstance(f, SampledField) and f.grid == grid for f in system):
            raise GridError("sampled fields must all live on the Gram grid")
    blocks = [Block(f, grid) if not isinstance(f, SampledField) else None for f in system]
    n = len(system)
    G = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            if blocks[a] is not None:
                v = block_inner(blocks[a], blocks[b], grid.h)
            else:
                v = inner(system[a], system[b])
            G[a, b] = v
            G[b, a] = np.conj(v)
        G[a, a] = G[a, a].real
    return G


def gram_check(system: Sequence[Field2D], grid: Optional[Grid] = None,
               indices: Optional[list] = None) -> GramResult:
    """Pairwise inner products on ``grid`` and ``max |G - I|``."""
    grid = grid or Grid(8.0, 2048)
    G = gram_matrix(system, grid)
    defect = float(np.max(np.abs(G - np.eye(len(system))), initial=0.0))
    return GramResult(list(indices) if indices is not None else list(range(len(system))),
                      G, defect)


def gram_report(res: GramResult, tolerance: float = 1e-6, name: str = "wavelet.gram",
                params: Optional[dict] = None) -> VerificationReport:
    return VerificationReport.deviation(name, dict(params or {}, size=len(res.indices)),
                                        res.defect, tolerance,
                                        hermitian_defect=res.hermitian_defect())


def coset_decompose(k: int, l: int, j: int):
    """``k = p 2^j + r``, ``l = q 2^j + s`` with ``0 <= r, s < 2^j`` and the phase
    ``e^{-i pi 2^-j (p s - q r)}``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    n = 1 << j
    p, r = divmod(k, n)
    q, s = divmod(l, n)
    return p, q, r, s, pi_phase(-Fraction(p * s - q * r, n))


def w0j_element(psi_j: Field2D, j: int, kp: int, lp: int, k: int, l: int) -> Field2D:
    """``T_(k', l') D_{2^j} (T_(k,l))^{4^-j} psi_j``."""
    return twisted_translate(wavelet_op(psi_j, j, k, l), TwistIndex(kp, lp, 1))


def w0j_parseval_check(f: Field2D, psi_j: Field2D, j: int, R: int = 16,
                       grid: Optional[Grid] = None, tolerance: float = 1e-3) -> VerificationReport:
    """Truncated coefficient sum over ``|k'|, |l'| <= R``, ``0 <= k, l < 2^j``
    against ``||f||^2``.

    Only elements whose support box meets ``f``'s are evaluated; the others
    contribute exact zeros on the grid.
    """
    t0 = time.perf_counter()
    grid = grid or Grid(32.0, 1 << 14)
    fb = Block(f, grid)
    nf2 = block_inner(fb, fb, grid.h).real
    fbox = f.support()
    total = 0.0
    edge = 0.0
    evaluated = 0
    n = 1 << j
    for kp in range(-R, R + 1):
        for lp in range(-R, R + 1):
            for k in range(n):
                for l in range(n):
                    e = w0j_element(psi_j, j, kp, lp, k, l)
                    eb = e.support()
                    if fbox is not None and eb is not None and (
                            eb[0] >= fbox[1] or eb[1] <= fbox[0]
                            or eb[2] >= fbox[3] or eb[3] <= fbox[2]):
                        continue
                    c = abs(block_inner(fb, Block(e, grid), grid.h)) ** 2
                    evaluated += 1
                    total += c
                    if max(abs(kp), abs(lp)) == R:
                        edge += c
    rep = VerificationReport.deviation(
        "wavelet.w0j_parseval", {"j": j, "R": R, "grid": {"extent": grid.extent, "n": grid.n}},
        abs(total - nf2), tolerance, coefficient_sum=total, norm2=nf2,
        boundary_ring=edge, evaluated=evaluated)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


SHANNON = Band(((Fraction(1), Fraction(2)), (Fraction(-2), Fraction(-1))), (1.0, 1.0))


def tiling_generator(j: int, u_profile=UNIT_BOX) -> ChirpField:
    """Generator whose ``4^-j`` kernel is ``2^{-j/2} u(eta - xi) 1{|eta| in [4^j, 2*4^j)}``.

    The x-profile is band-limited to ``|nu| in [1, 2)``; the chirp rate
    ``4^-j`` moves the band to ``|eta| in [4^j, 2 * 4^j)``.
    """
    lam = Fraction(1, 4) ** j if j >= 0 else Fraction(4) ** (-j)
    return ChirpField([Atom(2.0 ** (-j / 2), SHANNON, u_profile, alpha=lam)], name=f"tiling{j}")


def design_tiling_family(j_range: Iterable[int], u_profile=UNIT_BOX) -> GeneratorFamily:
    """One tiling generator per ``j``; Calderon term ``j`` is ``1{|eta| in [2^j, 2^{j+1})}``."""
    return GeneratorFamily({j: tiling_generator(j, u_profile) for j in j_range})
