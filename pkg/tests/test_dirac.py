import numpy as np
import pytest

from dirac_torus import (
    assemble_block,
    block_spectrum,
    growth_sequence,
    inverse_norm_report,
    structure_checks,
)
from dirac_torus.dirac import (
    growth_multiplier,
    smallest_singular_value,
    truncation_stability,
    undeformed_block,
)
from dirac_torus.errors import CutoffTooSmall


def exact_spectrum(n, M):
    k = np.arange(-M, M + 1)
    r = np.sqrt(k * k + n * n)
    return np.sort(np.r_[r, -r])


class TestAssembly:
    @pytest.mark.parametrize("eta", [0.0, 0.5, 1.0])
    @pytest.mark.parametrize("n", [-2, 0, 3])
    def test_tracial_block_is_undeformed(self, rotation, eta, n):
        block = assemble_block(rotation, n, 16, eta)
        assert np.abs(block.matrix - undeformed_block(n, 16)).max() <= 1e-12

    def test_hermitian_and_chiral(self, sine_diffeo):
        mat = assemble_block(sine_diffeo, 2, 32, 0.5).matrix
        assert np.array_equal(mat, mat.conj().T)
        g = np.diag(np.r_[np.ones(65), -np.ones(65)])
        assert np.array_equal(g @ mat @ g, -mat)

    def test_rejects_small_cutoff(self, sine_diffeo):
        with pytest.raises(ValueError):
            assemble_block(sine_diffeo, 1, 4)

    def test_cutoff_tail_guard(self):
        from dirac_torus import CircleLift, GOLDEN, make_diffeo
        rough = make_diffeo(CircleLift(((1, 0.45, 0.0), (4, 0.13, 0.0))), GOLDEN)
        with pytest.raises(CutoffTooSmall):
            assemble_block(rough, 3, 8, 1.0)

    def test_growth_weighted_level_weight(self, sine_diffeo):
        growth = growth_sequence(sine_diffeo, 3, 1024)
        block = assemble_block(sine_diffeo, 3, 16, variant="growth_weighted", growth=growth)
        expected = sum(1.0 / growth[l] for l in range(1, 4))
        assert block.level_weight == pytest.approx(expected)
        assert growth_multiplier(-3, growth) == pytest.approx(-sum(1.0 / growth[l] for l in range(0, 3)))


class TestSpectrum:
    @pytest.mark.parametrize("n", range(-3, 4))
    def test_undeformed_exact(self, rotation, n):
        w = block_spectrum(assemble_block(rotation, n, 32)).eigenvalues
        assert np.abs(np.sort(w) - exact_spectrum(n, 32)).max() <= 1e-10

    def test_small_truncation_listing(self):
        # n = 2 with |k| <= 2: +-2, +-sqrt5 (twice), +-sqrt8 (twice)
        w = np.linalg.eigvalsh(undeformed_block(2, 2))
        expected = np.sort([s * v for s in (1, -1) for v in (2, 5 ** .5, 5 ** .5, 8 ** .5, 8 ** .5)])
        assert np.abs(np.sort(w) - expected).max() < 1e-14

    def test_kernel_at_level_zero(self, rotation):
        w = block_spectrum(assemble_block(rotation, 0, 16)).eigenvalues
        assert int((np.abs(w) < 1e-12).sum()) == 2

    @pytest.mark.parametrize("eta", [0.0, 0.5, 1.0])
    def test_symmetric_spectrum(self, sine_diffeo, eta):
        w = np.sort(block_spectrum(assemble_block(sine_diffeo, 2, 32, eta)).eigenvalues)
        assert np.abs(w + w[::-1]).max() <= 1e-9 * np.abs(w).max()

    def test_eta_endpoints_conjugate(self, sine_diffeo):
        a = block_spectrum(assemble_block(sine_diffeo, 1, 64, 0.0)).positive()
        b = block_spectrum(assemble_block(sine_diffeo, 1, 64, 1.0)).positive()
        interior = a <= 20
        assert np.abs(a[interior] - b[: interior.sum()]).max() <= 1e-6

    @pytest.mark.parametrize("n", [1, 2])
    def test_truncation_stability(self, sine_diffeo, n):
        assert truncation_stability(sine_diffeo, n, 32) <= 1e-8


class TestInverseNorm:
    def test_trivial_conjugator(self, rotation):
        for row in inverse_norm_report(rotation, [1, 2, 5, -3], 16):
            assert row.inverse_norm == pytest.approx(1 / abs(row.n), rel=1e-13)
            assert row.bound == pytest.approx(1 / abs(row.n), rel=1e-13)
            assert row.bound_satisfied

    def test_smallest_singular_value_oracle(self, sine_diffeo):
        block = assemble_block(sine_diffeo, 2, 32)
        w = np.abs(np.linalg.eigvalsh(block.matrix)).min()
        assert smallest_singular_value(block) == pytest.approx(w, rel=1e-10)

    def test_bound_holds_for_sine(self, sine_diffeo):
        rows = inverse_norm_report(sine_diffeo, range(1, 21), 64)
        assert all(r.bound_satisfied for r in rows)
        assert max(r.inverse_norm / r.bound for r in rows) <= 1.0

    def test_level_zero_rejected(self, sine_diffeo):
        with pytest.raises(ValueError):
            inverse_norm_report(sine_diffeo, [0, 1], 16)


class TestStructure:
    def test_trivial_conjugator(self, rotation):
        rep = structure_checks(rotation, N=1, M=16)
        assert rep.real_structure <= 1e-10 and rep.chirality <= 1e-10
        assert rep.grading_square == 0.0

    def test_generic(self, sine_diffeo):
        rep = structure_checks(sine_diffeo, N=2, M=32)
        assert rep.real_structure <= 1e-8
        assert rep.chirality <= 1e-8
        assert rep.modular_square <= 1e-8
