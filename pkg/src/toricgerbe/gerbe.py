"""Gerbes from abelian central extensions, and rigidification.

An extension ``1 -> nu -> G~ -> G -> 1`` is given on the character side as
an injection ``p: DG(beta) -> D~`` with finite cokernel (``nu`` is the dual of
``coker(p)``).  The new stacky fan is the Gale dual of ``p o beta_vee``, over
the same fan.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .abgroup import (
    DiagGroup,
    FgAbGroup,
    GroupError,
    GroupHom,
    cokernel_of_hom,
    cokernel_section,
    compose,
    dual_descriptor,
    hom_well_defined,
    identity_hom,
    is_exact_at,
    is_injective,
    zero_hom,
)
from .exactla import solve_in_image
from .galedual import gale_dual
from .matrix import IntMatrix
from .stackyfan import (
    Diagnostic,
    FanError,
    SchemaError,
    StackyFan,
    require_valid,
    validate_stacky_fan,
)


class ExtensionError(ValueError):
    def __init__(self, code: str, message: str):
        self.diagnostic = Diagnostic(code, message)
        super().__init__(message)


@dataclass(frozen=True)
class ExtensionSpec:
    p: GroupHom

    @classmethod
    def from_json(cls, obj, source: FgAbGroup) -> ExtensionSpec:
        """Parse ``{"target": group, "matrix": rows}`` against the expected source ``DG(beta)``."""
        if not isinstance(obj, dict) or "target" not in obj or "matrix" not in obj:
            raise SchemaError("extension must be an object with 'target' and 'matrix'")
        target = FgAbGroup.from_json(obj["target"])
        rows = obj["matrix"]
        if not isinstance(rows, list) or len(rows) != target.ngens or not all(
                isinstance(r, list) and all(isinstance(x, int) for x in r) for r in rows):
            raise SchemaError(f"matrix must have {target.ngens} integer rows, one per target generator")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise SchemaError("matrix rows have different lengths")
        width = widths.pop() if widths else source.ngens
        if width != source.ngens:
            raise ExtensionError(
                "source_mismatch",
                f"matrix has {width} columns but DG(beta) = {source} has {source.ngens} generators")
        return cls(GroupHom(source, target, IntMatrix.from_rows(rows, width)))

    def to_json(self) -> dict:
        return {"target": self.p.target.to_json(), "matrix": self.p.matrix.to_list()}


def validate_extension(x: StackyFan, spec: ExtensionSpec) -> DiagGroup:
    """``nu`` for a well-posed extension; raises :class:`ExtensionError` otherwise."""
    require_valid(x)
    dg = gale_dual(x.beta).dg
    p = spec.p
    if p.source != dg:
        raise ExtensionError("source_mismatch", f"extension source {p.source} is not DG(beta) = {dg}")
    if not hom_well_defined(p):
        raise ExtensionError("ill_defined", "p does not respect the relations of DG(beta)")
    if not is_injective(p):
        raise ExtensionError("not_injective", "p is not injective, so the extension is not well posed")
    coker, _ = cokernel_of_hom(p)
    if not coker.is_finite:
        raise ExtensionError("infinite_nu", f"coker(p) = {coker} is infinite, so nu is not finite")
    return dual_descriptor(coker)


@dataclass
class KernelSequenceReport:
    """Orders and exactness for ``1 -> nu -> ker(alpha~) -> mu -> 1``, checked dually."""

    mu_order: int
    nu_order: int
    ker_alpha_order: int
    order_law: bool
    exact: bool

    @property
    def ok(self) -> bool:
        return self.order_law and self.exact

    def to_json(self) -> dict:
        return {
            "mu_order": self.mu_order,
            "nu_order": self.nu_order,
            "ker_alpha_order": self.ker_alpha_order,
            "order_law": self.order_law,
            "exact": self.exact,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class GerbeResult:
    stacky_fan: StackyFan
    display_fan: StackyFan
    nu: DiagGroup
    G_tilde: DiagGroup
    spec: ExtensionSpec
    report: KernelSequenceReport | None = field(default=None, compare=False)


def gerbe_stacky_fan(x: StackyFan, spec: ExtensionSpec) -> GerbeResult:
    """The stacky fan ``(N~, Sigma, beta~)`` of the gerbe induced by ``spec``."""
    nu = validate_extension(x, spec)
    gd = gale_dual(x.beta)
    tilde_vee = compose(gd.beta_vee, spec.p)
    back = gale_dual(tilde_vee)
    n = x.n
    new = StackyFan(back.dg, x.fan, GroupHom(FgAbGroup.free(n), back.dg, back.beta_vee.matrix))
    display = StackyFan(back.display_group, x.fan,
                        GroupHom(FgAbGroup.free(n), back.display_group, back.display_matrix))
    for fan in (new, display):
        report = validate_stacky_fan(fan)
        if not report.valid:
            raise RuntimeError(f"constructed stacky fan is invalid: {report.diagnostics}")
    result = GerbeResult(new, display, nu, dual_descriptor(spec.p.target), spec)
    return replace(result, report=verify_kernel_sequence(x, result))


def verify_kernel_sequence(x: StackyFan, result: GerbeResult) -> KernelSequenceReport:
    """Check ``0 -> coker(beta_vee) -> coker(beta~_vee) -> coker(p) -> 0``.

    ``coker(beta~_vee)`` is recomputed from the new stacky fan, so this also
    checks that Gale duality brought us back to ``p o beta_vee``.
    """
    p = result.spec.p
    beta_vee = gale_dual(x.beta).beta_vee
    mu, proj1 = cokernel_of_hom(beta_vee)
    tilde_vee = compose(beta_vee, p)
    ker_alpha, proj2 = cokernel_of_hom(tilde_vee)
    nu, proj3 = cokernel_of_hom(p)
    recomputed = gale_dual(result.stacky_fan.beta).coker_beta_vee

    inc = GroupHom(mu, ker_alpha, proj2.matrix @ p.matrix @ cokernel_section(beta_vee))
    quo = GroupHom(ker_alpha, nu, proj3.matrix @ cokernel_section(tilde_vee))
    trivial = FgAbGroup.trivial()
    exact = (hom_well_defined(inc) and hom_well_defined(quo)
             and is_exact_at(zero_hom(trivial, mu), inc)
             and is_exact_at(inc, quo)
             and is_exact_at(quo, zero_hom(nu, trivial)))
    return KernelSequenceReport(
        mu_order=mu.order,
        nu_order=nu.order,
        ker_alpha_order=recomputed.order,
        order_law=(recomputed.order == nu.order * mu.order and recomputed == ker_alpha),
        exact=exact,
    )


def rigidify(x: StackyFan) -> StackyFan:
    """Reduced stacky fan: ``N`` modulo torsion, ``b_i`` projected accordingly."""
    require_valid(x)
    free = FgAbGroup.free(x.d)
    return StackyFan(free, x.fan, GroupHom(x.beta.source, free, x.reduced_rays()))


def identity_extension(x: StackyFan) -> ExtensionSpec:
    return ExtensionSpec(identity_hom(gale_dual(x.beta).dg))


def canonical_injection(x: StackyFan) -> ExtensionSpec:
    """The injection ``DG(beta_red) -> DG(beta)`` exhibiting ``G`` as an extension of ``G_red`` by ``mu``.

    It is the unique ``p`` with ``p o beta_red_vee = beta_vee``.
    """
    red = gale_dual(rigidify(x).beta).beta_vee
    full = gale_dual(x.beta).beta_vee
    system = red.matrix.hstack(red.target.relations())
    cols = []
    for k in range(red.target.ngens):
        e = [int(i == k) for i in range(red.target.ngens)]
        sol = solve_in_image(system, e)
        if sol is None:
            raise GroupError("reduced Gale dual map is not surjective")
        cols.append(full(sol[:x.n]))
    p = GroupHom(red.target, full.target, IntMatrix.from_cols(cols, full.target.ngens))
    if not hom_well_defined(p) or compose(red, p) != full:
        raise GroupError("beta_vee does not factor through the reduced Gale dual")
    return ExtensionSpec(p)


__all__ = [
    "ExtensionError",
    "ExtensionSpec",
    "FanError",
    "GerbeResult",
    "KernelSequenceReport",
    "canonical_injection",
    "gerbe_stacky_fan",
    "identity_extension",
    "rigidify",
    "validate_extension",
    "verify_kernel_sequence",
]
