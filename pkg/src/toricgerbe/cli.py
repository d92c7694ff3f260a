"""Batch command-line interface.

Every command prints one JSON report (sorted keys, two-space indent) or,
with ``--pretty``, a human-readable rendering.  Exit codes: 0 success,
1 domain or validation failure, 2 parse or I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .abgroup import FgAbGroup, GroupError
from .exactla import smith_normal_form
from .galedual import gale_dual, verify_gale_sequences
from .gerbe import ExtensionError, ExtensionSpec, gerbe_stacky_fan, rigidify
from .matrix import IntMatrix
from .momentangle import DEFAULT_MAX_N, SizeBoundError, verify_lemma
from .stackyfan import (
    Diagnostic,
    FanError,
    SchemaError,
    StackyFan,
    coker_beta,
    quotient_presentation,
    validate_stacky_fan,
)

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Unreadable or unparseable input; maps to exit code 2."""


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    diagnostics: list[dict] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def fail(self, code: int, *diags: Diagnostic) -> RunReport:
        self.exit_code = code
        self.diagnostics.extend(d.to_json() for d in diags)
        return self

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
            "ok": self.exit_code == EXIT_OK,
        }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _read(path: str, report: RunReport, label: str):
    try:
        raw = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    report.inputs[label] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def _read_fan(path: str, report: RunReport, *, require_cones: bool = True) -> StackyFan:
    obj = _read(path, report, "fan")
    try:
        return StackyFan.from_json(obj, require_cones=require_cones)
    except (SchemaError, GroupError) as e:
        raise InputError(f"{path}: {e}") from e


def _checked_fan(args, report: RunReport) -> StackyFan | None:
    x = _read_fan(args.fan, report)
    v = validate_stacky_fan(x, strict=args.strict_fan)
    if not v.valid:
        report.fail(EXIT_DOMAIN, *v.diagnostics)
        return None
    return x


def _write_out(path: str | None, obj, report: RunReport):
    if path is None:
        return
    try:
        Path(path).write_text(dumps(obj))
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from e
    report.outputs["written"] = path


# -- commands ---------------------------------------------------------------


def cmd_validate(args, report: RunReport) -> RunReport:
    x = _read_fan(args.fan, report)
    v = validate_stacky_fan(x, strict=args.strict_fan)
    report.outputs = {"valid": v.valid, "n_rays": x.n, "N": x.N.to_json()}
    if not v.valid:
        report.fail(EXIT_DOMAIN, *v.diagnostics)
    return report


def cmd_present(args, report: RunReport) -> RunReport:
    x = _checked_fan(args, report)
    if x is None:
        return report
    report.outputs = {"stacky_fan": x.to_json(), "presentation": quotient_presentation(x).to_json()}
    return report


def cmd_gale_dual(args, report: RunReport) -> RunReport:
    x = _read_fan(args.fan, report, require_cones=False)
    result = gale_dual(x.beta)
    sequences = verify_gale_sequences(x.beta, result)
    report.outputs = {
        "gale_dual": result.to_json(),
        "coker_beta": coker_beta(x).to_json(),
        "sequences": sequences.to_json(),
    }
    if not sequences.ok:
        failed = ", ".join(f"{c.sequence}@{c.node}" for c in sequences.failures())
        report.fail(EXIT_DOMAIN, Diagnostic("not_exact", f"sequence not exact at {failed}"))
    return report


def cmd_gerbe(args, report: RunReport) -> RunReport:
    x = _checked_fan(args, report)
    ext_obj = _read(args.extension, report, "extension")
    if x is None:
        return report
    dg = gale_dual(x.beta).dg
    try:
        spec = ExtensionSpec.from_json(ext_obj, dg)
        result = gerbe_stacky_fan(x, spec)
    except ExtensionError as e:
        return report.fail(EXIT_DOMAIN, e.diagnostic)
    except (SchemaError, GroupError) as e:
        raise InputError(f"{args.extension}: {e}") from e
    report.outputs = {
        "stacky_fan": result.stacky_fan.to_json(),
        "display_fan": result.display_fan.to_json(),
        "nu": result.nu.to_json(),
        "G_tilde": result.G_tilde.to_json(),
        "kernel_sequence": result.report.to_json(),
        "presentation": quotient_presentation(result.stacky_fan).to_json(),
    }
    _write_out(args.out, result.display_fan.to_json(), report)
    if not result.report.ok:
        report.fail(EXIT_DOMAIN, Diagnostic("kernel_sequence", "kernel sequence check failed"))
    return report


def cmd_rigidify(args, report: RunReport) -> RunReport:
    x = _checked_fan(args, report)
    if x is None:
        return report
    reduced = rigidify(x).canonical().to_json()
    report.outputs = {"reduced_fan": reduced}
    _write_out(args.out, reduced, report)
    return report


def cmd_mu(args, report: RunReport) -> RunReport:
    x = _checked_fan(args, report)
    if x is None:
        return report
    q = quotient_presentation(x)
    report.outputs = {"mu": q.mu.to_json(), "mu_order": q.mu.order,
                      "coker_beta_vee": q.gale.coker_beta_vee.to_json()}
    return report


def cmd_lemma(args, report: RunReport) -> RunReport:
    x = _checked_fan(args, report)
    if x is None:
        return report
    try:
        lemma = verify_lemma(x.fan, args.coeff or [2], max_n=args.max_n)
    except SizeBoundError as e:
        return report.fail(EXIT_DOMAIN, Diagnostic("size_bound", str(e)))
    report.outputs = {"lemma": lemma.to_json()}
    if not lemma.passed:
        report.fail(EXIT_DOMAIN, Diagnostic("lemma_failed", "H^1 or H^2 of Z does not vanish"))
    return report


def cmd_snf(args, report: RunReport) -> RunReport:
    rows = _read(args.matrix, report, "matrix")
    if not isinstance(rows, list) or not all(
            isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r)
            for r in rows):
        raise InputError("matrix must be a JSON array of integer rows")
    if len({len(r) for r in rows}) > 1:
        raise InputError("matrix rows have different lengths")
    A = IntMatrix.from_rows(rows)
    snf = smith_normal_form(A)
    report.outputs = {"U": snf.U.to_list(), "D": snf.D.to_list(), "V": snf.V.to_list(),
                      "diagonal": snf.diagonal, "shape": list(A.shape)}
    return report


# -- pretty rendering -------------------------------------------------------


def _group(obj) -> str:
    return str(FgAbGroup(obj["rank"], tuple(obj["torsion"])))


def _diag_group(obj) -> str:
    from .abgroup import DiagGroup
    return str(DiagGroup(obj["torus_rank"], tuple(obj["cyclic_orders"])))


def _fan_lines(fan: dict, title: str) -> list[str]:
    rays = "   ".join(f"b{i + 1} = {tuple(b)}" for i, b in enumerate(fan["beta"]))
    cones = " ".join("{" + ",".join(str(i + 1) for i in c) + "}" for c in fan["cones"])
    return [f"{title}: N = {_group(fan['N'])}", f"  {rays}", f"  cones: {cones}"]


def _presentation_lines(p: dict) -> list[str]:
    ideal = ", ".join(" ".join(f"z{i + 1}" for i in g) or "1" for g in p["ideal_generators"])
    return [
        f"G = {_diag_group(p['G'])}    (characters {_group(p['dg'])})",
        f"weights = {p['weight_matrix']}",
        f"action: {p['action']}",
        f"μ = {_diag_group(p['mu'])}    |μ| = {p['mu_order']}",
        f"T = (ℂ^×)^{p['torus_rank_T']}",
        f"J = ⟨{ideal}⟩    codim V = {p['excluded_codim']}",
    ]


def render_pretty(report: RunReport) -> str:
    out = report.outputs
    lines = [f"[{report.command}] {'ok' if report.exit_code == EXIT_OK else 'FAILED'}"]
    if report.command in ("present", "gerbe", "rigidify"):
        lines.append("(ray indices shown 1-based)")
    if "stacky_fan" in out and report.command == "present":
        lines += _fan_lines(out["stacky_fan"], "stacky fan")
    if "presentation" in out and report.command == "present":
        lines += _presentation_lines(out["presentation"])
    if report.command == "validate":
        lines.append(f"valid: {out.get('valid')}")
    if report.command == "gale-dual" and out:
        g = out["gale_dual"]
        lines += [f"DG(β) = {_group(g['dg'])}", f"β^∨ = {g['beta_vee']}",
                  f"display: {_group(g['display']['group'])}, β^∨ = {g['display']['beta_vee']}",
                  f"coker(β^∨) = {_group(g['coker_beta_vee'])}",
                  f"coker(β) = {_group(out['coker_beta'])}",
                  f"sequences exact: {out['sequences']['ok']}"]
    if report.command == "gerbe" and out:
        lines += _fan_lines(out["display_fan"], "new stacky fan (display)")
        lines += _fan_lines(out["stacky_fan"], "new stacky fan (canonical)")
        ks = out["kernel_sequence"]
        lines += [f"ν = {_diag_group(out['nu'])}",
                  f"|ker α~| = {ks['ker_alpha_order']} = |ν|·|μ| = {ks['nu_order']}·{ks['mu_order']}"]
        lines += _presentation_lines(out["presentation"])
    if report.command == "rigidify" and out:
        lines += _fan_lines(out["reduced_fan"], "reduced stacky fan")
    if report.command == "mu" and out:
        lines.append(f"μ = {_diag_group(out['mu'])}    |μ| = {out['mu_order']}")
    if report.command == "lemma" and out:
        lem = out["lemma"]
        lines.append(f"codim V = {lem['codim_V']}")
        for m in lem["coefficients"]:
            lines.append(f"ℤ/{m}: H¹ = {_group(lem['H1'][str(m)])}, H² = {_group(lem['H2'][str(m)])}")
        lines.append(f"pass: {lem['pass']}")
    if report.command == "snf" and out:
        lines += [f"D = {out['D']}", f"U = {out['U']}", f"V = {out['V']}"]
    for d in report.diagnostics:
        lines.append(f"! {d['code']}: {d['message']}")
    return "\n".join(lines) + "\n"


# -- entry point ------------------------------------------------------------


def _coeffs(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}")
    if any(v < 2 for v in values):
        raise argparse.ArgumentTypeError("coefficients must be >= 2")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricgerbe", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--strict-fan", action="store_true",
                        help="also check that cones meet in common faces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *positional, help):
        p = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            p.add_argument(arg, help="JSON file, or - for stdin")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "fan", help="validate a stacky fan")
    add("present", cmd_present, "fan", help="quotient presentation [Z/G]")
    add("gale-dual", cmd_gale_dual, "fan", help="Gale dual of beta and exactness checks")
    p = add("gerbe", cmd_gerbe, "fan", "extension", help="stacky fan of an induced gerbe")
    p.add_argument("--out", help="write the new stacky fan here")
    p = add("rigidify", cmd_rigidify, "fan", help="reduced stacky fan")
    p.add_argument("--out", help="write the reduced stacky fan here")
    add("mu", cmd_mu, "fan", help="generic stabilizer mu")
    p = add("lemma", cmd_lemma, "fan", help="check H^1(Z) = H^2(Z) = 0")
    p.add_argument("--coeff", type=_coeffs, help="coefficient moduli, comma separated (default 2)")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="largest n to enumerate")
    add("snf", cmd_snf, "matrix", help="Smith normal form of an integer matrix")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report = RunReport(args.command)
    try:
        args.func(args, report)
    except InputError as e:
        report.outputs = {}
        report.fail(EXIT_INPUT, Diagnostic("input", str(e)))
    except FanError as e:
        report.outputs = {}
        report.fail(EXIT_DOMAIN, *e.diagnostics)
    if args.pretty:
        sys.stdout.buffer.write(render_pretty(report).encode("utf-8"))
    else:
        sys.stdout.write(dumps(report.to_json()))
    sys.stdout.flush()
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
