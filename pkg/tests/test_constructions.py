import random

import numpy as np
import pytest
from conftest import ALL_CODES, DIVISION_CODES

from detsum import NvdViolation, builtin, nvd_check, point_from_coeffs
from detsum.constructions import (
    CLI_NAMES,
    BuiltinCode,
    CyclicAlgebraSpec,
    CyclicFieldData,
    cyclic_algebra_lattice,
    diagonal_nf_lattice,
    infinite_place_ramified,
    lattice_from_algebra_block,
    quadratic_field,
    trivial_field,
)
from detsum.errors import InvalidFieldData, UnsupportedIndex
from detsum.exact import I, ONE, ZERO, GaussInt


def rand_z(rng, k, bound=6):
    return tuple(rng.randint(-bound, bound) for _ in range(k))


class TestFieldData:
    @pytest.mark.parametrize("a,base", [(5, "Qi"), (2, "Qi"), (-1, "Q"), (-3, "Q"), (3, "Q"), (-7, "Qi")])
    def test_quadratic_fields_validate(self, a, base):
        F = quadratic_field(a, base)
        F.validate(trials=100)
        x = F.one()
        for _ in range(F.degree):
            x = F.sigma(x)
        assert x == F.one()

    def test_golden_basis(self):
        F = quadratic_field(5, "Qi")
        phi = [ZERO, ONE]
        assert F.mul(phi, phi) == [ONE, ONE]  # phi^2 = phi + 1
        assert F.sigma(phi) == [ONE, GaussInt(-1)]  # sigma(phi) = 1 - phi

    def test_sqrt2_basis(self):
        F = quadratic_field(2, "Qi")
        r = [ZERO, ONE]
        assert F.mul(r, r) == [GaussInt(2), ZERO]
        assert F.sigma(r) == [ZERO, GaussInt(-1)]

    def test_embedding_permutation(self):
        F = quadratic_field(5, "Qi")
        rng = random.Random(1)
        for _ in range(50):
            x = F.random_element(rng)
            e = [F.embed(x, s) for s in range(2)]
            es = [F.embed(F.sigma(x), s) for s in range(2)]
            assert es == pytest.approx([e[1], e[0]], abs=1e-10)

    def test_broken_table_rejected(self):
        F = quadratic_field(5, "Qi")
        bad = CyclicFieldData(2, "Qi", F.mult, ((ONE, ZERO), (ZERO, ONE)), F.embeddings, "bad")
        with pytest.raises(InvalidFieldData):
            bad.validate()
        with pytest.raises(InvalidFieldData):
            diagonal_nf_lattice(bad)

    def test_bad_shapes(self):
        with pytest.raises(InvalidFieldData):
            CyclicFieldData(2, "Qi", (((ONE,),),), ((ONE,),), np.ones((1, 1)), "x")
        with pytest.raises(InvalidFieldData):
            CyclicFieldData(1, "R", (((ONE,),),), ((ONE,),), np.ones((1, 1)), "x")

    def test_nf_requires_qi_base(self):
        with pytest.raises(InvalidFieldData):
            diagonal_nf_lattice(quadratic_field(-1, "Q"))


class TestNumberFieldCodes:
    def test_trivial_is_gaussian(self):
        L = diagonal_nf_lattice(trivial_field())
        assert L.k == 2 and L.n == 1
        p = point_from_coeffs(L, (3, -2))
        assert p.det_exact == GaussInt(3, -2)

    def test_sqrt5_norm(self):
        L = builtin("nf-sqrt5")
        # sqrt 5 = 2 phi - 1
        p = point_from_coeffs(L, (-1, 0, 2, 0))
        assert p.det_exact == -5 and p.det_abs == 5

    def test_golden_ratio_unit(self):
        p = point_from_coeffs(builtin("nf-sqrt5"), (0, 0, 1, 0))
        assert p.det_exact == -1

    def test_ranks(self):
        assert builtin("nf-sqrt5").k == 4
        assert builtin("nf-sqrt2").k == 4


class TestAlgebraCodes:
    def test_builtin_shapes(self):
        assert (builtin(BuiltinCode.GAUSSIAN).k, builtin("gaussian").n) == (2, 1)
        for name in ("alamouti", "l1", "l2"):
            assert (builtin(name).k, builtin(name).n) == (4, 2)
        assert (builtin("golden-order").k, builtin("golden-order").n) == (8, 2)

    def test_l1_l2_isometric(self):
        np.testing.assert_array_equal(builtin("l1").gram, builtin("l2").gram)

    def test_alamouti_identity(self):
        p = point_from_coeffs(builtin("alamouti"), (1, 0, 0, 0))
        assert p.det_exact == 1
        np.testing.assert_allclose(p.matrix, np.eye(2))

    def test_l2_norm_form(self):
        rng = random.Random(2)
        L = builtin("l2")
        for _ in range(200):
            z = rand_z(rng, 4)
            nrd = z[0] ** 2 + z[1] ** 2 + 3 * (z[2] ** 2 + z[3] ** 2)
            assert point_from_coeffs(L, z).det_exact == nrd

    def test_l1_unit(self):
        assert point_from_coeffs(builtin("l1"), (2, 0, 1, 0)).det_exact == 1

    @pytest.mark.parametrize("name", ALL_CODES)
    def test_homomorphism(self, name):
        L = builtin(name)
        d = L.descriptor
        rng = random.Random(7)
        for _ in range(100):
            zx, zy = rand_z(rng, L.k, 4), rand_z(rng, L.k, 4)
            zxy = d.multiply(zx, zy)
            np.testing.assert_allclose(L.matrix(zx) @ L.matrix(zy), L.matrix(zxy), atol=1e-9)
            dx, dy, dxy = (point_from_coeffs(L, z).det_exact for z in (zx, zy, zxy))
            assert dxy == dx * dy

    def test_alamouti_orthogonality(self):
        rng = random.Random(3)
        L = builtin("alamouti")
        for _ in range(200):
            p = point_from_coeffs(L, rand_z(rng, 4, 20))
            assert p.det_abs == pytest.approx((p.frobenius / np.sqrt(2)) ** 2, rel=1e-9, abs=1e-9)

    def test_golden_gamma_is_i(self):
        L = builtin("golden-order")
        assert L.descriptor.spec.gamma == I

    def test_index_three_needs_field_data(self):
        fake = CyclicFieldData(
            3, "Qi", tuple(tuple(tuple(ONE if (a + b) % 3 == c else ZERO for c in range(3)) for b in range(3)) for a in range(3)),
            tuple(tuple(ONE if a == b else ZERO for b in range(3)) for a in range(3)), np.ones((3, 3)), "fake",
        )
        with pytest.raises(UnsupportedIndex):
            cyclic_algebra_lattice(CyclicAlgebraSpec(fake, I, "Qi"))

    def test_gamma_validation(self):
        with pytest.raises(InvalidFieldData):
            CyclicAlgebraSpec(quadratic_field(-1, "Q"), 0, "Q")
        with pytest.raises(InvalidFieldData):
            CyclicAlgebraSpec(quadratic_field(-1, "Q"), I, "Q")
        with pytest.raises(InvalidFieldData):
            CyclicAlgebraSpec(quadratic_field(-1, "Q"), 3, "Qi")


class TestRamification:
    def test_builtins(self):
        assert infinite_place_ramified(builtin("l2").descriptor.spec)
        assert not infinite_place_ramified(builtin("l1").descriptor.spec)
        assert infinite_place_ramified(builtin("alamouti").descriptor.spec)

    @pytest.mark.parametrize("a,g,want", [(-1, -3, True), (-1, 3, False), (2, -1, False), (-3, -2, True), (5, 7, False)])
    def test_sign_rule(self, a, g, want):
        spec = CyclicAlgebraSpec(quadratic_field(a, "Q"), g, "Q")
        assert infinite_place_ramified(spec) is want

    def test_needs_center_q(self):
        with pytest.raises(UnsupportedIndex):
            infinite_place_ramified(builtin("golden-order").descriptor.spec)


class TestNvd:
    def test_l1(self):
        rep = nvd_check(builtin("l1"), 30)
        assert rep.passed and rep.min_abs_det == 1.0

    def test_golden(self):
        rep = nvd_check(builtin("golden-order"), 8)
        assert rep.passed and rep.min_abs_det == 1.0

    def test_split_algebra(self):
        L = lattice_from_algebra_block({"a": -1, "gamma": 1, "center": "Q"})
        with pytest.raises(NvdViolation) as exc:
            nvd_check(L, 3)
        z = exc.value.coeffs
        assert point_from_coeffs(L, z).det_exact == 0

    @pytest.mark.parametrize("name", DIVISION_CODES[:3] + ("nf-sqrt5", "nf-sqrt2", "gaussian"))
    def test_builtins_pass(self, name):
        assert nvd_check(builtin(name), 20).min_abs_det == 1.0


def test_cli_names():
    assert CLI_NAMES == ("gaussian", "nf-sqrt5", "nf-sqrt2", "alamouti", "l1", "l2", "golden-order")
    assert builtin("L1") is builtin("l1")
    assert builtin("NF_QI_SQRT5") is builtin("nf-sqrt5")
