import json

import pytest

from uce_lab.fields import FieldConfig
from uce_lab.algebras import (
    AlgebraError, CoeffAlgebra, algebra_from_json, algebra_to_json,
    build_family, commutator_subspace, kahler_differentials, random_algebra,
    retarget, validate_algebra,
)

QQ = FieldConfig(0)

FAMILIES = ["ground_field", "dual_numbers", "truncated_poly(3)",
            "cyclic_group_algebra(3)", "full_matrix(2)",
            "direct_sum(full_matrix(2),dual_numbers)"]


class TestFamilies:
    def test_ground_field(self):
        g = build_family("ground_field", QQ)
        assert g.dim == 1
        assert (g.one() * g.one()).coords == g.unit

    def test_dual_numbers_defining_relation(self):
        d = build_family("dual_numbers", QQ)
        assert d.dim == 2
        eps = d.basis_element(1)
        assert (eps * eps).is_zero()

    def test_full_matrix_units(self):
        m = build_family("full_matrix(2)", QQ)
        assert m.dim == 4
        # E_ij * E_kl = delta_jk E_il
        E = [[m.basis_element(r * 2 + c) for c in range(2)] for r in range(2)]
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        prod = E[i][j] * E[k][l]
                        if j == k:
                            assert prod.coords == E[i][l].coords
                        else:
                            assert prod.is_zero()

    def test_cyclic_group_algebra(self):
        c = build_family("cyclic_group_algebra(3)", QQ)
        g1, g2 = c.basis_element(1), c.basis_element(2)
        assert (g1 * g2).coords == c.unit

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_all_families_validate(self, spec):
        assert validate_algebra(build_family(spec, QQ)) == []

    def test_unknown_family(self):
        with pytest.raises(AlgebraError):
            build_family("octonions", QQ)


class TestValidate:
    def test_injected_associativity_violation(self):
        t = build_family("truncated_poly(3)", QQ)
        mul = [[list(v) for v in row] for row in t.mul]
        mul[1][2] = list(t.unit)  # x * x^2 := 1
        bad = CoeffAlgebra(QQ, t.labels, t.unit, mul, validate=False)
        report = validate_algebra(bad)
        assert report
        assert any("x" in line for line in report)
        with pytest.raises(AlgebraError):
            CoeffAlgebra(QQ, t.labels, t.unit, mul)

    def test_unit_violation_reported(self):
        d = build_family("dual_numbers", QQ)
        mul = [[list(v) for v in row] for row in d.mul]
        mul[0][1] = [QQ.zero(), QQ.zero()]  # 1 * eps := 0
        bad = CoeffAlgebra(QQ, d.labels, d.unit, mul, validate=False)
        assert any("1*eps" in line for line in validate_algebra(bad))


class TestCommutatorSubspace:
    @pytest.mark.parametrize("spec", ["ground_field", "dual_numbers",
                                      "truncated_poly(3)", "cyclic_group_algebra(3)"])
    def test_commutative_families(self, spec):
        assert commutator_subspace(build_family(spec, QQ)).dim == 0

    def test_full_matrix_two(self):
        # [M2, M2] = trace-zero matrices
        assert commutator_subspace(build_family("full_matrix(2)", QQ)).dim == 3

    def test_direct_sum_blockwise(self):
        A = build_family("direct_sum(full_matrix(2),dual_numbers)", QQ)
        assert commutator_subspace(A).dim == 3

    def test_zero_iff_symmetric_tensor(self):
        for spec in FAMILIES:
            A = build_family(spec, QQ)
            assert (commutator_subspace(A).dim == 0) == A.is_commutative()


class TestKahler:
    def test_ground_field(self):
        dim, _ = kahler_differentials(build_family("ground_field", QQ))
        assert dim == 0

    def test_dual_numbers(self):
        # relation d(eps^2)=0 kills eps (x) d eps, leaving the class of d eps
        dim, reps = kahler_differentials(build_family("dual_numbers", QQ))
        assert dim == 1
        assert len(reps) == 1

    def test_truncated_poly_three(self):
        dim, _ = kahler_differentials(build_family("truncated_poly(3)", QQ))
        assert dim == 2  # dx and x dx; 3 x^2 dx = 0 in char 0

    def test_noncommutative_rejected(self):
        with pytest.raises(AlgebraError):
            kahler_differentials(build_family("full_matrix(2)", QQ))


class TestSerialization:
    def test_bit_exact_round_trip(self):
        A = build_family("direct_sum(full_matrix(2),dual_numbers)", QQ)
        blob = json.dumps(algebra_to_json(A), sort_keys=True)
        B = algebra_from_json(json.loads(blob))
        assert B == A
        assert json.dumps(algebra_to_json(B), sort_keys=True) == blob

    def test_rational_scalars_survive(self):
        one = QQ.one()
        half = QQ.coerce("1/2")
        A = CoeffAlgebra(QQ, ["u"], [QQ.coerce(2)],
                         [[[half]]], name="halved")  # u*u = u/2, unit 2u
        blob = algebra_to_json(A)
        assert blob["mul"][0][0][0] == "1/2"
        assert algebra_from_json(blob) == A
        assert (A.one() * A.one()).coords == A.unit

    def test_malformed_document(self):
        with pytest.raises(AlgebraError):
            algebra_from_json({"char": 0, "dim": 2, "labels": ["a"],
                               "unit": ["1"], "mul": []})

    def test_custom_file_family(self, tmp_path):
        A = build_family("dual_numbers", QQ)
        path = tmp_path / "alg.json"
        path.write_text(json.dumps(algebra_to_json(A)))
        B = build_family(f"custom_file({path})", QQ)
        assert B == A


class TestRandomAndRetarget:
    def test_twenty_seeded_random_algebras_validate(self):
        for seed in range(20):
            A = random_algebra(QQ, 4, seed)
            assert A.dim <= 4
            assert validate_algebra(A) == []

    def test_random_is_deterministic(self):
        a = algebra_to_json(random_algebra(QQ, 4, 11))
        b = algebra_to_json(random_algebra(QQ, 4, 11))
        assert a == b

    def test_retarget_to_prime_field(self):
        A = build_family("full_matrix(2)", QQ)
        B = retarget(A, FieldConfig(32003))
        assert B.field.characteristic == 32003
        assert validate_algebra(B) == []
