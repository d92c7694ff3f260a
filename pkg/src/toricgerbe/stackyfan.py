"""Stacky fans ``(N, Sigma, beta)`` and their quotient presentations ``[Z/G]``.

Rays are implicit: ray ``i`` is spanned by the image of ``b_i`` in ``N``
modulo torsion.  Ray indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .abgroup import (
    DiagGroup,
    FgAbGroup,
    GroupHom,
    cokernel_of_hom,
    dual_descriptor,
    normalize_map,
)
from .exactla import kernel_basis
from .galedual import GaleDualResult, gale_dual
from .matrix import IntMatrix


class SchemaError(ValueError):
    """Input does not follow the JSON schema."""


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message}


class FanError(ValueError):
    """A stacky fan failed validation; ``diagnostics`` says why."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


@dataclass(frozen=True)
class Fan:
    n_rays: int
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "max_cones",
                           tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))

    def masks(self) -> list[int]:
        return [sum(1 << i for i in c) for c in self.max_cones]

    def is_face(self, subset: Iterable[int]) -> bool:
        mask = sum(1 << i for i in subset)
        return any(mask & ~c == 0 for c in self.masks())

    def key(self) -> tuple:
        return (self.n_rays, tuple(sorted(set(self.max_cones))))


def fan_diagnostics(fan: Fan) -> list[Diagnostic]:
    """Combinatorial well-formedness: index range, duplicates, maximality, coverage."""
    out = []
    for k, cone in enumerate(fan.max_cones):
        bad = [i for i in cone if not 0 <= i < fan.n_rays]
        if bad:
            out.append(Diagnostic("index_out_of_range",
                                  f"cone {k} {list(cone)} uses ray indices {bad} outside 0..{fan.n_rays - 1}"))
        if len(set(cone)) != len(cone):
            out.append(Diagnostic("duplicate_index", f"cone {k} {list(cone)} repeats a ray"))
    if out:
        return out
    cones = [set(c) for c in fan.max_cones]
    for a in range(len(cones)):
        for b in range(len(cones)):
            if a != b and cones[a] <= cones[b] and (cones[a] != cones[b] or a > b):
                out.append(Diagnostic("nested_cones",
                                      f"cone {a} {sorted(cones[a])} is contained in cone {b} {sorted(cones[b])}"))
    used = set().union(*cones) if cones else set()
    for i in range(fan.n_rays):
        if i not in used:
            out.append(Diagnostic("unused_ray", f"ray {i} lies in no cone"))
    return out


@dataclass(frozen=True)
class StackyFan:
    N: FgAbGroup
    fan: Fan
    beta: GroupHom

    @property
    def n(self) -> int:
        return self.fan.n_rays

    @property
    def d(self) -> int:
        return self.N.rank

    def reduced_rays(self) -> IntMatrix:
        """Free parts of the ``b_i`` as columns (the rays in ``N/torsion``)."""
        return self.beta.matrix.select_rows(range(self.d))

    @classmethod
    def from_beta(cls, N: FgAbGroup, beta_rows: Sequence[Sequence[int]],
                  cones: Sequence[Sequence[int]]) -> StackyFan:
        n = len(beta_rows)
        B = IntMatrix.from_cols(beta_rows, N.ngens)
        return cls(N, Fan(n, tuple(tuple(c) for c in cones)),
                   GroupHom(FgAbGroup.free(n), N, B))

    @classmethod
    def from_json(cls, obj, *, require_cones: bool = True) -> StackyFan:
        if not isinstance(obj, dict):
            raise SchemaError("stacky fan must be a JSON object")
        for key in ("N", "beta") + (("cones",) if require_cones else ()):
            if key not in obj:
                raise SchemaError(f"missing key {key!r}")
        N = FgAbGroup.from_json(obj["N"])
        beta = obj["beta"]
        if not isinstance(beta, list) or not all(
                isinstance(r, list) and len(r) == N.ngens and all(isinstance(x, int) for x in r)
                for r in beta):
            raise SchemaError(f"beta must be a list of integer rows of length {N.ngens}")
        cones = obj.get("cones", [])
        if not isinstance(cones, list) or not all(
                isinstance(c, list) and all(isinstance(i, int) for i in c) for c in cones):
            raise SchemaError("cones must be a list of integer lists")
        return cls.from_beta(N, beta, cones)

    def to_json(self) -> dict:
        return {
            "N": self.N.to_json(),
            "beta": [list(c) for c in self.beta.images],
            "cones": [list(c) for c in self.fan.max_cones],
        }

    def canonical(self) -> StackyFan:
        """Same stacky fan with ``N`` in invariant-factor form and ``beta`` in normal form."""
        can, to, _ = self.N.canonical()
        B = normalize_map(can, to @ self.beta.matrix)
        return StackyFan(can, self.fan, GroupHom(self.beta.source, can, B))

    def canonically_equal(self, other: StackyFan) -> bool:
        a, b = self.canonical(), other.canonical()
        return a.N == b.N and a.beta.matrix == b.beta.matrix and a.fan.key() == b.fan.key()


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.diagnostics

    def to_json(self) -> dict:
        return {"valid": self.valid, "diagnostics": [d.to_json() for d in self.diagnostics]}


def validate_stacky_fan(x: StackyFan, strict: bool = False) -> ValidationReport:
    """Check finiteness of ``coker(beta)``, simpliciality and fan well-formedness.

    ``strict`` also checks that any two cones meet in a common face, using
    exact separating-hyperplane feasibility.
    """
    report = ValidationReport(fan_diagnostics(x.fan))
    rays = x.reduced_rays()
    if rays.rank() != x.d:
        report.diagnostics.append(Diagnostic(
            "infinite_cokernel",
            f"coker(beta) is infinite: the b_i span a rank {rays.rank()} sublattice of rank {x.d}"))
    zero = [i for i in range(x.n) if not any(rays.col(i))]
    for i in zero:
        report.diagnostics.append(Diagnostic("zero_reduced_ray", f"b_{i} is zero in N/torsion"))
    if any(d.code in ("index_out_of_range", "duplicate_index") for d in report.diagnostics):
        return report
    for k, cone in enumerate(x.fan.max_cones):
        if any(i in zero for i in cone):
            continue
        if rays.select_cols(cone).rank() != len(cone):
            report.diagnostics.append(Diagnostic(
                "dependent_cone", f"cone {k} {list(cone)} has linearly dependent rays"))
    if strict and report.valid:
        for a, b in combinations(range(len(x.fan.max_cones)), 2):
            if not _meet_in_face(rays, x.fan.max_cones[a], x.fan.max_cones[b]):
                report.diagnostics.append(Diagnostic(
                    "fan_axiom",
                    f"cones {a} and {b} do not intersect in a common face"))
    return report


def require_valid(x: StackyFan, strict: bool = False) -> None:
    report = validate_stacky_fan(x, strict)
    if not report.valid:
        raise FanError(report.diagnostics)


def _meet_in_face(rays: IntMatrix, s: Sequence[int], t: Sequence[int]) -> bool:
    # separating functional h: zero on the common rays, >0 on s only, <0 on t only
    common = sorted(set(s) & set(t))
    d = rays.rows
    if common:
        K = kernel_basis(rays.select_cols(common).T)
    else:
        K = IntMatrix.identity(d)
    ineqs = [K.T.apply(rays.col(i)) for i in s if i not in common]
    ineqs += [tuple(-v for v in K.T.apply(rays.col(j))) for j in t if j not in common]
    return _strict_feasible(ineqs, K.cols)


def _strict_feasible(rows: list[Sequence[int]], nvars: int) -> bool:
    """Whether ``a . y > 0`` for all rows has a rational solution (Fourier-Motzkin)."""
    ineqs = {_primitive(a) for a in rows}
    for v in range(nvars):
        if any(not any(a) for a in ineqs):
            return False
        pos = [a for a in ineqs if a[v] > 0]
        neg = [a for a in ineqs if a[v] < 0]
        nxt = {a for a in ineqs if a[v] == 0}
        for p in pos:
            for q in neg:
                nxt.add(_primitive([-q[v] * x + p[v] * y for x, y in zip(p, q)]))
        ineqs = nxt
    return not ineqs


def _primitive(a: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*a) if a else 0
    return tuple(x // g for x in a) if g > 1 else tuple(a)


def irrelevant_ideal(fan: Fan) -> list[tuple[int, ...]]:
    """Generators of ``J_Sigma``: the rays outside each maximal cone, as index sets.

    An empty set is the monomial 1 (unit ideal, empty excluded locus).
    """
    _require_fan(fan)
    out = []
    for cone in fan.max_cones:
        gen = tuple(i for i in range(fan.n_rays) if i not in cone)
        if gen not in out:
            out.append(gen)
    return out


def primitive_collections(fan: Fan) -> list[tuple[int, ...]]:
    """Minimal sets of rays not contained in any single cone."""
    _require_fan(fan)
    out = []
    top = max((len(c) for c in fan.max_cones), default=0) + 1
    for size in range(1, min(top, fan.n_rays) + 1):
        for subset in combinations(range(fan.n_rays), size):
            if fan.is_face(subset):
                continue
            if all(fan.is_face(subset[:k] + subset[k + 1:]) for k in range(size)):
                out.append(subset)
    return out


def codim_V(fan: Fan) -> int | float:
    """Complex codimension of the excluded locus; ``math.inf`` when it is empty."""
    prims = primitive_collections(fan)
    return min((len(p) for p in prims), default=math.inf)


def _require_fan(fan: Fan):
    diags = fan_diagnostics(fan)
    if diags:
        raise FanError(diags)


@dataclass(frozen=True)
class QuotientPresentation:
    G: DiagGroup
    weight_matrix: IntMatrix
    mu: DiagGroup
    torus_rank_T: int
    excluded_codim: int | float
    ideal_generators: tuple[tuple[int, ...], ...]
    gale: GaleDualResult

    def action_formula(self) -> str:
        """The action on ``C^n`` written out, e.g. ``λ·(z1,z2) = (λ^3 z1, λ^3 z2)``."""
        r = self.G.torus_rank
        names = (["λ"] if r == 1 else [f"λ{k + 1}" for k in range(r)])
        names += [f"ζ{k + 1}" for k in range(len(self.G.cyclic_orders))]
        n = self.weight_matrix.cols
        coords = [f"z{i + 1}" for i in range(n)]
        terms = []
        for i in range(n):
            factors = []
            for t, name in enumerate(names):
                w = self.weight_matrix[t, i]
                if w == 1:
                    factors.append(name)
                elif w:
                    factors.append(f"{name}^{w}")
            terms.append(" ".join(factors + [coords[i]]))
        params = ", ".join(names) if len(names) != 1 else names[0]
        head = f"({params})" if len(names) > 1 else params
        return f"{head}·({','.join(coords)}) = ({', '.join(terms)})"

    def to_json(self) -> dict:
        return {
            "G": self.G.to_json(),
            "dg": self.gale.dg.to_json(),
            "weight_matrix": self.weight_matrix.to_list(),
            "mu": self.mu.to_json(),
            "mu_order": self.mu.order,
            "torus_rank_T": self.torus_rank_T,
            "excluded_codim": _json_count(self.excluded_codim),
            "ideal_generators": [list(g) for g in self.ideal_generators],
            "action": self.action_formula(),
        }


def _json_count(x):
    return "inf" if x == math.inf else x


def quotient_presentation(x: StackyFan) -> QuotientPresentation:
    """``[Z/G]`` data: the group ``G``, its weights on ``C^n``, the generic stabilizer ``mu``."""
    require_valid(x)
    gd = gale_dual(x.beta)
    return QuotientPresentation(
        G=dual_descriptor(gd.dg),
        weight_matrix=gd.beta_vee.matrix,
        mu=dual_descriptor(gd.coker_beta_vee),
        torus_rank_T=x.d,
        excluded_codim=codim_V(x.fan),
        ideal_generators=tuple(irrelevant_ideal(x.fan)),
        gale=gd,
    )


def coker_beta(x: StackyFan) -> FgAbGroup:
    return cokernel_of_hom(x.beta)[0]
