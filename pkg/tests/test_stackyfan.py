import math
import random

import pytest

from randgen import p1_mu3, p2, random_stacky_fan
from toricgerbe.abgroup import FgAbGroup
from toricgerbe.stackyfan import (
    Fan,
    FanError,
    SchemaError,
    StackyFan,
    codim_V,
    fan_diagnostics,
    irrelevant_ideal,
    primitive_collections,
    quotient_presentation,
    validate_stacky_fan,
)


def _codes(report):
    return [d.code for d in report.diagnostics]


def test_p1_mu3_is_valid_strict():
    assert validate_stacky_fan(p1_mu3(), strict=True).valid
    assert validate_stacky_fan(p2(), strict=True).valid


def test_json_round_trip():
    x = p1_mu3()
    assert StackyFan.from_json(x.to_json()) == x


@pytest.mark.parametrize("obj", [
    [], {"N": {"rank": 1}}, {"N": {"rank": 1, "torsion": []}, "beta": [[1, 2]], "cones": []},
    {"N": {"rank": 1, "torsion": []}, "beta": [[1]], "cones": [0]},
])
def test_schema_errors(obj):
    with pytest.raises((SchemaError, ValueError)):
        StackyFan.from_json(obj)


def test_fan_diagnostics():
    assert _codes_list(Fan(2, ((0,), (5,)))) == ["index_out_of_range"]
    assert "nested_cones" in _codes_list(Fan(2, ((0,), (0, 1))))
    assert _codes_list(Fan(3, ((0,), (1,)))) == ["unused_ray"]
    assert "duplicate_index" in _codes_list(Fan(2, ((0, 0), (1,))))
    msg = fan_diagnostics(Fan(2, ((0,), (5,))))[0].message
    assert "cone 1" in msg


def _codes_list(fan):
    return [d.code for d in fan_diagnostics(fan)]


def test_invalid_stacky_fans():
    x = StackyFan.from_beta(FgAbGroup.free(2), [[1, 0], [2, 0]], [[0], [1]])
    assert "infinite_cokernel" in _codes(validate_stacky_fan(x))
    x = StackyFan.from_beta(FgAbGroup(1, (2,)), [[0, 1], [1, 0]], [[0], [1]])
    assert "zero_reduced_ray" in _codes(validate_stacky_fan(x))
    x = StackyFan.from_beta(FgAbGroup.free(2), [[1, 0], [2, 0], [0, 1]], [[0, 1], [2]])
    assert "dependent_cone" in _codes(validate_stacky_fan(x))


def test_strict_fan_axiom():
    # two 2-cones overlapping in their interiors
    x = StackyFan.from_beta(FgAbGroup.free(2), [[1, 0], [0, 1], [1, 1], [-1, -1]],
                            [[0, 1], [0, 2], [3]])
    assert validate_stacky_fan(x).valid
    assert "fan_axiom" in _codes(validate_stacky_fan(x, strict=True))


def test_irrelevant_ideal_and_codim():
    fan = p1_mu3().fan
    assert irrelevant_ideal(fan) == [(1,), (0,)]
    assert primitive_collections(fan) == [(0, 1)]
    assert codim_V(fan) == 2
    assert codim_V(p2().fan) == 3
    assert codim_V(Fan(2, ((0, 1),))) == math.inf
    with pytest.raises(FanError):
        codim_V(Fan(2, ((0,), (4,))))


def test_quotient_presentation_p1_mu3():
    q = quotient_presentation(p1_mu3())
    assert q.weight_matrix.to_list() == [[3, 3]]
    assert q.mu.cyclic_orders == (3,) and q.mu.torus_rank == 0
    assert q.G.torus_rank == 1
    assert q.excluded_codim == 2 and q.torus_rank_T == 1
    assert q.action_formula() == "λ·(z1,z2) = (λ^3 z1, λ^3 z2)"
    assert q.to_json()["mu_order"] == 3


def test_quotient_presentation_rejects_invalid():
    x = StackyFan.from_beta(FgAbGroup.free(2), [[1, 0], [2, 0]], [[0], [1]])
    with pytest.raises(FanError):
        quotient_presentation(x)


def test_canonical_equality():
    x = p1_mu3()
    y = StackyFan.from_beta(FgAbGroup(1, (3,)), [[1, 0], [-1, 2]], [[0], [1]])
    assert x.canonically_equal(y)
    z = StackyFan.from_beta(FgAbGroup(1, (3,)), [[1, 0], [-1, 0]], [[0], [1]])
    assert not x.canonically_equal(z)


@pytest.mark.parametrize("seed", range(25))
def test_random_presentation_properties(seed):
    x = random_stacky_fan(random.Random(seed))
    q = quotient_presentation(x)
    assert q.excluded_codim >= 2
    assert q.mu.order == q.gale.coker_beta_vee.order
    assert q.weight_matrix.cols == x.n
    assert quotient_presentation(x).to_json() == q.to_json()
