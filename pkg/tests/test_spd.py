import numpy as np
import pytest
import scipy.linalg

from isbci import spd
from conftest import rand_spd


def expm_series(a, terms=60):
    """Truncated-series matrix exponential, independent of the eigh path."""
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


class TestCovariance:
    def test_orthogonal_rows(self):
        e = np.array([[1.0, 1.0], [-1.0, 1.0]])
        assert np.allclose(spd.covariance(e), np.eye(2))

    def test_constant_channel(self):
        assert np.allclose(spd.covariance(np.array([[2.0, 2.0, 2.0, 2.0]])), [[4.0]])

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(5)
        e = rng.standard_normal((3, 5))
        c = spd.covariance(e)
        # naive per-entry dot-product sum
        for i in range(3):
            for j in range(3):
                expect = sum(e[i, t] * e[j, t] for t in range(5)) / 5
                assert abs(c[i, j] - expect) < 1e-12

    def test_shrinkage_yields_spd(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            e = rng.standard_normal((6, 8))
            assert spd.is_spd(spd.covariance(e, shrinkage=0.1))

    def test_centering_flag(self):
        rng = np.random.default_rng(8)
        e = rng.standard_normal((2, 50)) + 5.0
        centered = spd.covariance(e, center=True)
        ec = e - e.mean(axis=1, keepdims=True)
        assert np.allclose(centered, ec @ ec.T / 50)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="invalid samples"):
            spd.covariance(np.array([[1.0, np.nan]]))


class TestMatrixFunctions:
    def test_logm_identity(self):
        assert np.allclose(spd.logm(np.eye(3)), 0)

    def test_logm_diagonal(self):
        a = np.diag([np.e, np.e**2])
        assert np.allclose(spd.logm(a), np.diag([1.0, 2.0]))

    def test_exp_log_roundtrip_against_series(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = rand_spd(rng, 5)
            a = a / np.abs(a).max()  # keep the series oracle well-conditioned
            log_a = spd.logm(a)
            assert np.abs(expm_series(log_a) - a).max() < 1e-8
            assert np.abs(spd.expm(log_a) - a).max() < 1e-8

    def test_sqrtm_squares_back(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            a = rand_spd(rng, 16)
            r = spd.sqrtm(a)
            assert np.abs(r @ r - a).max() < 1e-8 * np.abs(a).max()
            assert np.abs(spd.invsqrtm(a) @ r - np.eye(16)).max() < 1e-8

    def test_not_positive_definite(self):
        with pytest.raises(ValueError, match="matrix not positive-definite"):
            spd.logm(np.diag([1.0, -1.0]))
        with pytest.raises(ValueError, match="matrix not positive-definite"):
            spd.invsqrtm(np.diag([1.0, 0.0]))

    def test_not_symmetric(self):
        with pytest.raises(ValueError, match="matrix not symmetric"):
            spd.logm(np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestMeanCovariance:
    def test_singleton(self):
        a = np.diag([2.0, 3.0])
        assert np.allclose(spd.mean_covariance([a], "riemannian"), a)
        assert np.allclose(spd.mean_covariance([a], "arithmetic"), a)

    def test_commuting_closed_form(self):
        mean = spd.mean_covariance([np.diag([2.0, 2.0]), np.diag([8.0, 18.0])])
        assert np.allclose(mean, np.diag([4.0, 6.0]), atol=1e-8)

    def test_geodesic_midpoint_symmetry(self):
        rng = np.random.default_rng(13)
        a = rand_spd(rng, 4)
        mean = spd.mean_covariance([a, np.linalg.inv(a)])
        assert np.abs(mean - np.eye(4)).max() < 1e-8

    def test_arithmetic_is_elementwise_average(self):
        rng = np.random.default_rng(14)
        mats = [rand_spd(rng, 3) for _ in range(4)]
        assert np.allclose(spd.mean_covariance(mats, "arithmetic"), np.mean(mats, axis=0))

    def test_divergence_error(self):
        rng = np.random.default_rng(15)
        mats = [rand_spd(rng, 3) for _ in range(3)]
        with pytest.raises(ValueError, match="mean iteration diverged"):
            spd.mean_covariance(mats, max_iter=0)

    def test_empty_list(self):
        with pytest.raises(ValueError, match="at least one"):
            spd.mean_covariance([])


class TestTangentProjection:
    def test_reference_maps_to_zero(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            c = rand_spd(rng, 5)
            assert np.abs(spd.tangent_project(c, c)).max() < 1e-10

    def test_identity_reference_collapses_to_logm(self):
        c_i = np.diag([np.e, 1.0])
        assert np.allclose(spd.tangent_project(c_i, np.eye(2)), np.diag([1.0, 0.0]))

    def test_matches_independent_scipy_path(self):
        # Second implementation: scipy's Pade-based logm/sqrtm/inv chain.
        rng = np.random.default_rng(17)
        for _ in range(5):
            c_i, c_m = rand_spd(rng, 4), rand_spd(rng, 4)
            root = scipy.linalg.sqrtm(c_m).real
            inv_root = scipy.linalg.inv(root)
            expect = root @ scipy.linalg.logm(inv_root @ c_i @ inv_root).real @ root
            assert np.abs(spd.tangent_project(c_i, c_m) - expect).max() < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            spd.tangent_project(np.eye(2), np.eye(3))


class TestVectorize:
    def test_row_concat(self):
        p = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert np.allclose(spd.vectorize(p), [1, 2, 2, 4])

    def test_upper_weighted(self):
        p = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert np.allclose(spd.vectorize(p, "upper-weighted"), [1, 2 * np.sqrt(2), 4])

    def test_paper_scale_length(self):
        rng = np.random.default_rng(18)
        g = rng.standard_normal((60, 60))
        p = g + g.T
        assert spd.vectorize(p).shape == (3600,)
        assert spd.vectorize(p, "upper-weighted").shape == (60 * 61 // 2,)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(19)
        g = rng.standard_normal((5, 5))
        p = g + g.T
        for scheme in ("row-concat", "upper-weighted"):
            back = spd.matrix_from_vector(spd.vectorize(p, scheme), scheme)
            assert np.allclose(back, p, atol=1e-12)


class TestBatchedPaths:
    def test_covariance_many_matches_scalar(self):
        rng = np.random.default_rng(30)
        trials = rng.standard_normal((7, 4, 20))
        batched = spd.covariance_many(trials, shrinkage=0.05)
        for i in range(7):
            assert np.allclose(batched[i], spd.covariance(trials[i], 0.05), atol=1e-14)

    def test_tangent_project_many_matches_scalar(self):
        rng = np.random.default_rng(31)
        covs = np.stack([rand_spd(rng, 4) for _ in range(6)])
        ref = rand_spd(rng, 4)
        batched = spd.tangent_project_many(covs, ref)
        for i in range(6):
            assert np.allclose(batched[i], spd.tangent_project(covs[i], ref), atol=1e-10)


class TestGeodesicDistance:
    def test_zero_at_equality(self):
        rng = np.random.default_rng(20)
        a = rand_spd(rng, 4)
        assert spd.geodesic_distance(a, a) < 1e-10

    def test_diagonal_case(self):
        assert abs(spd.geodesic_distance(np.eye(2), np.diag([np.e**2, 1.0])) - 2.0) < 1e-12

    def test_symmetry(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            a, b = rand_spd(rng, 4), rand_spd(rng, 4)
            assert abs(spd.geodesic_distance(a, b) - spd.geodesic_distance(b, a)) < 1e-10

    def test_matches_generalized_eigenvalue_oracle(self):
        rng = np.random.default_rng(22)
        for _ in range(5):
            a, b = rand_spd(rng, 5), rand_spd(rng, 5)
            expect = np.sqrt(np.sum(np.log(scipy.linalg.eigvalsh(b, a)) ** 2))
            assert abs(spd.geodesic_distance(a, b) - expect) < 1e-9


class TestMdm:
    def test_separates_obvious_classes(self):
        rng = np.random.default_rng(23)
        lo = [rand_spd(rng, 3, scale=1.0) for _ in range(10)]
        hi = [rand_spd(rng, 3, scale=50.0) for _ in range(10)]
        covs = np.array(lo + hi)
        labels = np.array([0] * 10 + [1] * 10)
        mdm = spd.MdmClassifier().fit(covs, labels)
        assert np.array_equal(mdm.predict(covs), labels)

    def test_unfitted(self):
        with pytest.raises(ValueError, match="not fitted"):
            spd.MdmClassifier().predict(np.eye(2)[None])
