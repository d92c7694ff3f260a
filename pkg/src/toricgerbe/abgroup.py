"""Finitely generated abelian groups and homomorphisms between them.

Groups are carried in diagonal form ``Z^r + Z/t_1 + ... + Z/t_k``.  A group
is *canonical* when the ``t_i`` form a divisibility chain; groups read from
input files may list their cyclic factors in any order (``Z/3 + Z/2`` is
allowed), and :meth:`FgAbGroup.canonical` merges them.

Element coordinates list the free coordinates first, then one coordinate per
cyclic factor reduced into ``[0, t_i)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .exactla import _cokernel, hermite_normal_form, kernel_basis, solve_in_image
from .matrix import IntMatrix


class GroupError(ValueError):
    """Raised for mismatched groups or ill-defined homomorphisms."""


@dataclass(frozen=True)
class FgAbGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.rank < 0:
            raise GroupError("free rank must be nonnegative")
        if any(t < 2 for t in self.torsion):
            raise GroupError(f"cyclic factors must be >= 2, got {list(self.torsion)}")

    @classmethod
    def free(cls, n: int) -> FgAbGroup:
        return cls(n, ())

    @classmethod
    def trivial(cls) -> FgAbGroup:
        return cls(0, ())

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def moduli(self) -> list[int | None]:
        return [None] * self.rank + list(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self) -> int | float:
        if self.rank:
            return math.inf
        return math.prod(self.torsion)

    @property
    def is_canonical(self) -> bool:
        return all(b % a == 0 for a, b in zip(self.torsion, self.torsion[1:]))

    def relations(self) -> IntMatrix:
        """Relation matrix: one column ``t_i * e_(rank+i)`` per cyclic factor."""
        k = len(self.torsion)
        return IntMatrix.zeros(self.rank, k).vstack(IntMatrix.diagonal(self.torsion))

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ngens:
            raise GroupError(f"element of length {len(v)} in a group with {self.ngens} generators")
        return tuple(x if m is None else x % m for x, m in zip(v, self.moduli))

    def canonical(self) -> tuple[FgAbGroup, IntMatrix, IntMatrix]:
        """Canonical form with mutually inverse coordinate changes ``(group, to, from)``."""
        return normalize(PresentedGroup(self.ngens, self.relations()))

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj) -> FgAbGroup:
        if not isinstance(obj, dict) or "rank" not in obj:
            raise GroupError("group must be an object with 'rank' and 'torsion'")
        rank, torsion = obj["rank"], obj.get("torsion", [])
        if not isinstance(rank, int) or not all(isinstance(t, int) for t in torsion):
            raise GroupError("group rank and torsion must be integers")
        return cls(rank, tuple(torsion))

    def __str__(self) -> str:
        parts = ["ℤ" if self.rank == 1 else f"ℤ^{self.rank}"] if self.rank else []
        parts += [f"ℤ/{t}" for t in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"


@dataclass(frozen=True)
class PresentedGroup:
    """``Z^generators / column-image(relations)``."""

    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise GroupError("relation matrix must have one row per generator")


def normalize(g: PresentedGroup) -> tuple[FgAbGroup, IntMatrix, IntMatrix]:
    """Canonical invariants of ``g`` plus coordinate changes to and from them.

    ``to_canonical`` maps generator coordinates of ``g`` to canonical
    coordinates; ``from_canonical`` lifts canonical coordinates back.  The
    two compose to the identity modulo the respective relations.
    """
    c = _cokernel(g.relations)
    return FgAbGroup(c.rank, c.torsion), c.to_canonical, c.from_canonical


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by its matrix on generator lifts.

    Column ``j`` of ``matrix`` holds the target coordinates of the image of
    the ``j``-th source generator.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise GroupError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.ngens}x{self.source.ngens}")
        object.__setattr__(self, "matrix", self.matrix.reduce_rows(self.target.moduli))

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.target.reduce(self.matrix.apply(v))

    @property
    def images(self) -> list[tuple[int, ...]]:
        return self.matrix.columns()


def identity_hom(g: FgAbGroup) -> GroupHom:
    return GroupHom(g, g, IntMatrix.identity(g.ngens))


def zero_hom(a: FgAbGroup, b: FgAbGroup) -> GroupHom:
    return GroupHom(a, b, IntMatrix.zeros(b.ngens, a.ngens))


def is_zero_element(g: FgAbGroup, v: Sequence[int]) -> bool:
    return all(x == 0 for x in g.reduce(v))


def hom_well_defined(f: GroupHom) -> bool:
    """True iff every source relation maps into the target relation image."""
    rel_image = f.matrix @ f.source.relations()
    return all(is_zero_element(f.target, col) for col in rel_image.columns())


def _require_well_defined(f: GroupHom):
    if not hom_well_defined(f):
        raise GroupError("homomorphism is not well defined on the source relations")


def compose(f: GroupHom, g: GroupHom) -> GroupHom:
    """``g`` after ``f``."""
    if f.target != g.source:
        raise GroupError(f"cannot compose: {f.target} is not {g.source}")
    return GroupHom(f.source, g.target, g.matrix @ f.matrix)


def subgroup_generated(g: FgAbGroup, gens: IntMatrix) -> tuple[FgAbGroup, GroupHom]:
    """The subgroup of ``g`` generated by the columns of ``gens``, with its inclusion."""
    s = gens.cols
    # relations among the generators: x with gens@x in im(relations of g)
    K = kernel_basis(gens.hstack(g.relations()))
    rel = K.select_rows(range(s))
    sub, _, frm = normalize(PresentedGroup(s, rel))
    return sub, GroupHom(sub, g, gens @ frm)


def kernel_of_hom(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Canonical kernel of ``f`` with its inclusion into the source."""
    _require_well_defined(f)
    K = kernel_basis(f.matrix.hstack(f.target.relations()))
    gens = K.select_rows(range(f.source.ngens))
    return subgroup_generated(f.source, gens)


def _coker_of_hom(f: GroupHom):
    return _cokernel(f.matrix.hstack(f.target.relations()))


def cokernel_of_hom(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Canonical cokernel of ``f`` with the projection from the target."""
    _require_well_defined(f)
    c = _coker_of_hom(f)
    group = FgAbGroup(c.rank, c.torsion)
    return group, GroupHom(f.target, group, c.to_canonical)


def cokernel_section(f: GroupHom) -> IntMatrix:
    """Lifts of the canonical cokernel generators to target coordinates."""
    return _coker_of_hom(f).from_canonical


def in_image(f: GroupHom, v: Sequence[int]) -> bool:
    return solve_in_image(f.matrix.hstack(f.target.relations()), list(v)) is not None


def is_exact_at(f: GroupHom, g: GroupHom) -> bool:
    """Whether ``image(f) == kernel(g)`` inside the common middle group."""
    if f.target != g.source:
        raise GroupError(f"sequence does not compose: {f.target} vs {g.source}")
    _require_well_defined(f)
    _require_well_defined(g)
    if not all(is_zero_element(g.target, v) for v in compose(f, g).images):
        return False
    _, inc = kernel_of_hom(g)
    return all(in_image(f, v) for v in inc.images)


def is_injective(f: GroupHom) -> bool:
    return kernel_of_hom(f)[0].is_trivial


def is_surjective(f: GroupHom) -> bool:
    return cokernel_of_hom(f)[0].is_trivial


def group_order(g: FgAbGroup) -> int | float:
    return g.order


@dataclass(frozen=True)
class DiagGroup:
    """Diagonalizable group ``(C^x)^torus_rank x mu_c1 x ...``, by its descriptor only."""

    torus_rank: int
    cyclic_orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cyclic_orders", tuple(self.cyclic_orders))

    def character_group(self) -> FgAbGroup:
        return FgAbGroup(self.torus_rank, self.cyclic_orders)

    @property
    def order(self) -> int | float:
        return self.character_group().order

    def to_json(self) -> dict:
        return {"torus_rank": self.torus_rank, "cyclic_orders": list(self.cyclic_orders)}

    def __str__(self) -> str:
        parts = []
        if self.torus_rank:
            parts.append("ℂ^×" if self.torus_rank == 1 else f"(ℂ^×)^{self.torus_rank}")
        parts += [f"μ_{m}" for m in self.cyclic_orders]
        return " × ".join(parts) if parts else "1"


def dual_descriptor(g: FgAbGroup) -> DiagGroup:
    """Descriptor of ``Hom(g, C^x)``; duality here is pure bookkeeping."""
    return DiagGroup(g.rank, g.torsion)


# -- normal forms for maps into a group -------------------------------------
#
# A map Z^n -> N is a matrix whose columns are elements of N.  Two such maps
# are identified when they differ by an automorphism of N.  For canonical N
# whose free rows have full rank the form below is complete: free rows go to
# Hermite form (trivial stabilizer), each torsion row is reduced modulo the
# shifts coming from Hom(free, torsion), and each primary part of the torsion
# block is replaced by the least element of its orbit under Aut(T_p).  The
# parts are glued back by CRT, so the result is canonical but need not be the
# lex-least element of the full orbit.


def _coset_basis(free: IntMatrix, t: int, n: int) -> list[tuple[int, ...]]:
    H, _ = hermite_normal_form(free.vstack(IntMatrix.identity(n).scale(t)))
    return [H.row(i) for i in range(n)]


def _reduce_coset(row: Sequence[int], basis) -> tuple[int, ...]:
    row = list(row)
    for c, b in enumerate(basis):
        q = row[c] // b[c]
        if q:
            row = [x - q * y for x, y in zip(row, b)]
    return tuple(row)


def _units(t: int) -> list[int]:
    return [u for u in range(1, t) if math.gcd(u, t) == 1]


def _unit_generators(t: int) -> list[int]:
    """A small generating set of ``(Z/t)^x``, chosen greedily in increasing order."""
    gens: list[int] = []
    group = {1 % t}
    for u in _units(t):
        if u in group:
            continue
        gens.append(u)
        frontier = list(group)
        while frontier:
            frontier = [x * g % t for x in frontier for g in gens if x * g % t not in group]
            group.update(frontier)
    return gens


def aut_generators(torsion: Sequence[int]) -> list[IntMatrix]:
    """Elementary automorphisms of ``Z/t_1 + ... + Z/t_k`` acting on coordinates.

    Scalings of one coordinate by generators of its unit group, plus the
    transvections ``x_i += (t_i / gcd(t_i, t_j)) x_j``.  Each differs from
    the identity in a single row.
    """
    k = len(torsion)
    gens = []
    for i, t in enumerate(torsion):
        for u in _unit_generators(t):
            rows = IntMatrix.identity(k).to_list()
            rows[i][i] = u
            gens.append(IntMatrix.from_rows(rows, k))
    for i in range(k):
        for j in range(k):
            if i != j:
                rows = IntMatrix.identity(k).to_list()
                rows[i][j] = torsion[i] // math.gcd(torsion[i], torsion[j])
                gens.append(IntMatrix.from_rows(rows, k))
    return gens


def _row_moves(gens: list[IntMatrix]) -> list[tuple[int, tuple[int, ...]]]:
    """Each generator as ``(i, coefficients of the new row i)``."""
    moves = []
    for A in gens:
        changed = [i for i in range(A.rows) if A.row(i) != tuple(int(i == j) for j in range(A.cols))]
        if len(changed) != 1:
            raise GroupError("automorphism generators must change exactly one row")
        moves.append((changed[0], A.row(changed[0])))
    return moves


def _act(move, block, torsion, bases):
    i, coeffs = move
    t = torsion[i]
    row = [0] * len(block[i])
    for a, other in zip(coeffs, block):
        if a:
            row = [x + a * y for x, y in zip(row, other)]
    new = _reduce_coset([x % t for x in row], bases[i])
    return block[:i] + (new,) + block[i + 1:]


def _orbit_min(block, torsion, bases, gens):
    moves = _row_moves(gens)
    seen = {block}
    queue = deque([block])
    while queue:
        cur = queue.popleft()
        for move in moves:
            nxt = _act(move, cur, torsion, bases)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return min(seen)


def _prime_exponents(t: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= t:
        while t % p == 0:
            out[p] = out.get(p, 0) + 1
            t //= p
        p += 1
    if t > 1:
        out[t] = out.get(t, 0) + 1
    return out


def _primary_orbit_min(block, torsion, H: IntMatrix, bases):
    """Orbit minimum computed one primary component at a time.

    ``Aut(T)`` is the product of the ``Aut(T_p)``, so each ``p``-part is
    minimised on its own and the rows are glued back by CRT.
    """
    n = H.cols
    pieces: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in torsion]
    exps = [_prime_exponents(t) for t in torsion]
    for p in sorted({p for e in exps for p in e}):
        idx = [i for i, e in enumerate(exps) if p in e]
        qs = [p ** exps[i][p] for i in idx]
        pbases = [_coset_basis(H, q, n) for q in qs]
        pblock = tuple(_reduce_coset([x % q for x in block[i]], b)
                       for i, q, b in zip(idx, qs, pbases))
        best = _orbit_min(pblock, qs, pbases, aut_generators(qs))
        for i, q, row in zip(idx, qs, best):
            pieces[i].append((q, row))
    out = []
    for i, t in enumerate(torsion):
        row = [0] * n
        for q, part in pieces[i]:
            m = t // q
            lift = m * pow(m, -1, q)
            row = [(x + lift * y) % t for x, y in zip(row, part)]
        out.append(_reduce_coset(row, bases[i]))
    return tuple(out)


def normalize_map(target: FgAbGroup, matrix: IntMatrix, *, complete: bool = True) -> IntMatrix:
    """Normal form of the columns of ``matrix`` under automorphisms of ``target``.

    With ``complete=False`` (or a non-canonical target) only per-factor unit
    scalings are used on the torsion rows; the result is still deterministic
    but isomorphic inputs need not agree.
    """
    d, n = target.rank, matrix.cols
    if matrix.rows != target.ngens:
        raise GroupError("matrix rows must match the generators of the target")
    H, _ = hermite_normal_form(matrix.select_rows(range(d)))
    torsion = target.torsion
    if not torsion or n == 0:
        return H.vstack(matrix.select_rows(range(d, target.ngens)).reduce_rows(torsion))
    bases = [_coset_basis(H, t, n) for t in torsion]
    block = tuple(_reduce_coset([x % t for x in matrix.row(d + i)], bases[i])
                  for i, t in enumerate(torsion))
    if complete and target.is_canonical:
        block = _primary_orbit_min(block, torsion, H, bases)
    else:
        block = tuple(
            min(_reduce_coset([u * x % t for x in row], basis) for u in _units(t))
            for row, t, basis in zip(block, torsion, bases))
    return H.vstack(IntMatrix.from_rows(block, n))


def canonical_map_form(target: FgAbGroup, matrix: IntMatrix) -> tuple[FgAbGroup, IntMatrix]:
    """Canonical target group and normal-form columns for a map into ``target``."""
    can, to, _ = target.canonical()
    return can, normalize_map(can, to @ matrix)
