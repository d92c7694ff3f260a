"""Cohomology of coordinate subspace arrangement complements.

For a simplicial complex ``K`` on ``n`` vertices, ``Z = C^n - V`` where ``V``
is the union of the coordinate subspaces ``{z_i = 0, i in S}`` over the
non-faces ``S``.  Its cohomology splits over full subcomplexes:

    H^p(Z; A) = sum over J of  H~^(p - |J| - 1)(K_J; A)

Reduced cohomology uses the augmented chain complex, so the complex whose
only face is the empty simplex (``K_J`` for ``J`` empty) has
``H~^-1 = A`` and every nonempty complex has ``H~^-1 = 0``.  The ``J = {}``
term is what puts ``A`` into ``H^0(Z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .abgroup import FgAbGroup, PresentedGroup, normalize
from .exactla import smith_normal_form
from .matrix import IntMatrix
from .stackyfan import Fan, _json_count, _require_fan, codim_V

DEFAULT_MAX_N = 14


class SizeBoundError(ValueError):
    pass


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: int
    facets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        facets = {tuple(sorted(f)) for f in self.facets}
        maximal = [f for f in facets if not any(set(f) < set(g) for g in facets)]
        object.__setattr__(self, "facets", tuple(sorted(maximal, key=lambda f: (len(f), f))))

    def faces(self, dim: int, support: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        """Faces of dimension ``dim`` (``-1`` is the empty face) inside ``support``."""
        verts = range(self.vertices) if support is None else support
        if dim == -1:
            return [()]
        out = set()
        allowed = set(verts)
        for f in self.facets:
            inside = [v for v in f if v in allowed]
            out.update(combinations(inside, dim + 1))
        return sorted(out)

    def full_subcomplex(self, J: Sequence[int]) -> SimplicialComplex:
        allowed = set(J)
        return SimplicialComplex(
            self.vertices, tuple(tuple(v for v in f if v in allowed) for f in self.facets))


def underlying_complex(fan: Fan) -> SimplicialComplex:
    _require_fan(fan)
    return SimplicialComplex(fan.n_rays, fan.max_cones)


def _boundary(k: SimplicialComplex, dim: int, support) -> IntMatrix:
    """Augmented boundary map ``C_dim -> C_(dim-1)``."""
    src = k.faces(dim, support)
    dst = k.faces(dim - 1, support)
    index = {f: i for i, f in enumerate(dst)}
    rows = [[0] * len(src) for _ in dst]
    for j, f in enumerate(src):
        for pos in range(len(f)):
            rows[index[f[:pos] + f[pos + 1:]]][j] = (-1) ** pos
    return IntMatrix(len(dst), len(src), rows)


def _reduced_homology(k: SimplicialComplex, i: int, support) -> tuple[int, list[int]]:
    """Free rank and torsion of ``H~_i`` (augmented, so ``i >= -1``)."""
    if i < -1:
        return 0, []
    dim_i = len(k.faces(i, support))
    if dim_i == 0:
        return 0, []
    rank_out = smith_normal_form(_boundary(k, i, support)).rank if i >= 0 else 0
    if dim_i and len(k.faces(i + 1, support)):
        snf = smith_normal_form(_boundary(k, i + 1, support))
        diag = [d for d in snf.diagonal if d]
    else:
        diag = []
    free = dim_i - rank_out - len(diag)
    return free, [d for d in diag if d > 1]


def _cyclic_sum(factors: Iterable[int]) -> FgAbGroup:
    factors = [f for f in factors if f > 1]
    rel = IntMatrix.diagonal(factors)
    return normalize(PresentedGroup(len(factors), rel))[0]


def reduced_cohomology(k: SimplicialComplex, m: int, i: int,
                       support: Sequence[int] | None = None) -> FgAbGroup:
    """``H~^i(k; Z/m)`` by universal coefficients from integral homology.

    ``H~^i = Hom(H~_i, Z/m) + Ext(H~_(i-1), Z/m)``.
    """
    if m < 2:
        raise ValueError("coefficient modulus must be >= 2")
    if i < -1:
        return FgAbGroup.trivial()
    free, tors = _reduced_homology(k, i, support)
    _, tors_below = _reduced_homology(k, i - 1, support)
    factors = [m] * free + [math.gcd(a, m) for a in tors] + [math.gcd(a, m) for a in tors_below]
    return _cyclic_sum(factors)


def complement_cohomology(k: SimplicialComplex, m: int, p: int,
                          max_n: int = DEFAULT_MAX_N) -> FgAbGroup:
    """``H^p(Z; Z/m)`` for the arrangement complement of ``k``."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    if m < 2:
        raise ValueError("coefficient modulus must be >= 2")
    if k.vertices > max_n:
        raise SizeBoundError(f"{k.vertices} vertices exceeds the bound {max_n} (2^n subsets)")
    factors = []
    for size in range(0, min(k.vertices, p) + 1):
        deg = p - size - 1
        # H~^deg(K_J) needs a face of dimension deg or deg+1 inside J
        if deg > size - 1:
            continue
        for J in combinations(range(k.vertices), size):
            g = reduced_cohomology(k, m, deg, support=J)
            factors.extend(g.torsion)
    return _cyclic_sum(factors)


@dataclass(frozen=True)
class LemmaReport:
    codim: int | float
    coefficients: tuple[int, ...]
    h1: dict[int, FgAbGroup]
    h2: dict[int, FgAbGroup]

    @property
    def passed(self) -> bool:
        return all(g.is_trivial for g in list(self.h1.values()) + list(self.h2.values()))

    def to_json(self) -> dict:
        return {
            "codim_V": _json_count(self.codim),
            "coefficients": list(self.coefficients),
            "H1": {str(m): g.to_json() for m, g in self.h1.items()},
            "H2": {str(m): g.to_json() for m, g in self.h2.items()},
            "pass": self.passed,
        }


def verify_lemma(fan: Fan, m: int | Sequence[int], max_n: int = DEFAULT_MAX_N) -> LemmaReport:
    """Check ``H^1(Z; nu) = H^2(Z; nu) = 0``, one cyclic factor of ``nu`` at a time."""
    coeffs = (m,) if isinstance(m, int) else tuple(m)
    if fan.n_rays > max_n:
        raise SizeBoundError(f"{fan.n_rays} rays exceeds the bound {max_n} (2^n subsets)")
    k = underlying_complex(fan)
    return LemmaReport(
        codim=codim_V(fan),
        coefficients=coeffs,
        h1={c: complement_cohomology(k, c, 1, max_n) for c in coeffs},
        h2={c: complement_cohomology(k, c, 2, max_n) for c in coeffs},
    )
