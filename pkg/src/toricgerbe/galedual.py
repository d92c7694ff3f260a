"""Gale duality for maps ``beta: Z^n -> N``.

With ``N = Z^(d+l) / im(Q)`` presented diagonally and ``B`` a lift of
``beta``, the dual group is ``DG(beta) = coker([B Q]^T)`` and ``beta_vee``
is the composite of ``Z^n -> Z^(n+l)`` (first ``n`` coordinates) with the
cokernel projection.  The output is brought into a normal form, since the
construction is only defined up to isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abgroup import (
    FgAbGroup,
    GroupError,
    GroupHom,
    cokernel_of_hom,
    is_exact_at,
    normalize_map,
    zero_hom,
)
from .exactla import _cokernel
from .matrix import IntMatrix


@dataclass(frozen=True)
class GaleDualResult:
    dg: FgAbGroup
    beta_vee: GroupHom
    coker_beta_vee: FgAbGroup
    n_star_rank: int
    # cyclic factors of independent blocks kept apart, e.g. Z + Z/3 + Z/2
    display_group: FgAbGroup
    display_matrix: IntMatrix

    def to_json(self) -> dict:
        return {
            "dg": self.dg.to_json(),
            "beta_vee": self.beta_vee.matrix.to_list(),
            "coker_beta_vee": self.coker_beta_vee.to_json(),
            "n_star_rank": self.n_star_rank,
            "display": {
                "group": self.display_group.to_json(),
                "beta_vee": self.display_matrix.to_list(),
            },
        }


def _blocks(M: IntMatrix) -> list[tuple[list[int], list[int]]]:
    """Connected components of the row/column support graph of ``M``, by first row."""
    parent = list(range(M.rows + M.cols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(M.rows):
        for j in range(M.cols):
            if M[i, j]:
                parent[find(i)] = find(M.rows + j)
    comps: dict[int, tuple[list[int], list[int]]] = {}
    for i in range(M.rows):
        comps.setdefault(find(i), ([], []))[0].append(i)
    for j in range(M.cols):
        root = find(M.rows + j)
        if root in comps:
            comps[root][1].append(j)
    return sorted(comps.values(), key=lambda rc: rc[0][0])


def _display_form(M: IntMatrix, n: int) -> tuple[FgAbGroup, IntMatrix]:
    """Cokernel of ``M`` assembled block by block, without merging invariant factors."""
    free_rows, tors_rows, torsion = [], [], []
    for rows, cols in _blocks(M):
        c = _cokernel(M.select_rows(rows).select_cols(cols))
        for k in range(c.to_canonical.rows):
            full = [0] * M.rows
            for local, i in enumerate(rows):
                full[i] = c.to_canonical[k, local]
            (free_rows if k < c.rank else tors_rows).append(full)
        torsion.extend(c.torsion)
    group = FgAbGroup(len(free_rows), tuple(torsion))
    proj = IntMatrix.from_rows(free_rows + tors_rows, M.rows)
    return group, normalize_map(group, proj.select_cols(range(n)), complete=False)


def gale_dual(beta: GroupHom) -> GaleDualResult:
    """Gale dual of ``beta``; the source must be free."""
    if beta.source.torsion:
        raise GroupError("Gale duality needs a free source group")
    n = beta.source.rank
    N = beta.target
    M = beta.matrix.hstack(N.relations()).T
    c = _cokernel(M)
    dg = FgAbGroup(c.rank, c.torsion)
    raw = c.to_canonical.select_cols(range(n))
    beta_vee = GroupHom(beta.source, dg, normalize_map(dg, raw))
    coker, _ = cokernel_of_hom(beta_vee)
    display_group, display_matrix = _display_form(M, n)
    return GaleDualResult(
        dg=dg,
        beta_vee=beta_vee,
        coker_beta_vee=coker,
        n_star_rank=N.rank,
        display_group=display_group,
        display_matrix=display_matrix,
    )


@dataclass(frozen=True)
class NodeCheck:
    sequence: str
    node: str
    ok: bool


@dataclass
class SequenceReport:
    checks: list[NodeCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[NodeCheck]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"sequence": c.sequence, "node": c.node, "ok": c.ok} for c in self.checks],
        }


def _check_four_term(report: SequenceReport, label: str, names, maps):
    """Record exactness of ``0 -> A -> B -> C -> D -> 0`` at each of its four nodes."""
    f, g, h = maps
    first, last = f.source, h.target
    trivial = FgAbGroup.trivial()
    chain = [zero_hom(trivial, first), f, g, h, zero_hom(last, trivial)]
    for name, (u, v) in zip(names, zip(chain, chain[1:])):
        report.checks.append(NodeCheck(label, name, is_exact_at(u, v)))


def _free_dual_inclusion(m: GroupHom) -> GroupHom:
    """``Hom(target, Z) -> Hom(Z^n, Z)`` by precomposition with ``m``."""
    r = m.target.rank
    dual_matrix = m.matrix.select_rows(range(r)).T
    return GroupHom(FgAbGroup.free(r), m.source, dual_matrix)


def verify_gale_sequences(beta: GroupHom, result: GaleDualResult) -> SequenceReport:
    """Exactness of both four-term sequences attached to ``beta`` and its dual.

    ``0 -> DG* -> Z^n -> N -> coker(beta) -> 0`` and
    ``0 -> N* -> Z^n -> DG -> coker(beta_vee) -> 0``.
    """
    report = SequenceReport()
    _, proj = cokernel_of_hom(beta)
    _check_four_term(report, "beta", ["DG*", "Z^n", "N", "coker(beta)"],
                     (_free_dual_inclusion(result.beta_vee), beta, proj))
    _, proj_vee = cokernel_of_hom(result.beta_vee)
    _check_four_term(report, "beta_vee", ["N*", "Z^n", "DG", "coker(beta_vee)"],
                     (_free_dual_inclusion(beta), result.beta_vee, proj_vee))
    return report
