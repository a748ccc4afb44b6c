import math

import numpy as np
import pytest

from calibrom.errors import ConfigurationError
from calibrom.reduction import (
    ParamScaler,
    center,
    compute_basis,
    eigendecompose_spsd,
    gram,
    numerical_rank,
    pod_basis,
    project,
    projection_error_spectrum,
    reconstruct,
)


# --- independent test oracles ------------------------------------------------


def brute_force_gram(sc):
    n, ns = sc.shape
    g = np.zeros((ns, ns))
    for i in range(ns):
        for j in range(ns):
            acc = 0.0
            for k in range(n):
                acc += sc[k, i] * sc[k, j]
            g[i, j] = acc / ns
    return g


def bisection_eigenvalues(a, tol=1e-12):
    """Roots of det(A - lambda I) located by scan + bisection; independent of
    the Jacobi path (determinant via LU)."""
    n = a.shape[0]
    radius = np.abs(a).sum(axis=1).max()
    lo, hi = -radius - 1.0, radius + 1.0

    def f(lam):
        return np.linalg.det(a - lam * np.eye(n))

    xs = np.linspace(lo, hi, 20001)
    fs = np.array([f(x) for x in xs])
    roots = []
    for i in range(len(xs) - 1):
        if fs[i] == 0.0:
            roots.append(xs[i])
        elif fs[i] * fs[i + 1] < 0:
            a_, b_ = xs[i], xs[i + 1]
            for _ in range(200):
                m = 0.5 * (a_ + b_)
                if f(a_) * f(m) <= 0:
                    b_ = m
                else:
                    a_ = m
                if b_ - a_ < tol:
                    break
            roots.append(0.5 * (a_ + b_))
    return sorted(roots, reverse=True)


def one_sided_jacobi_svd(a, sweeps=60, tol=1e-14):
    """Singular values by orthogonalizing column pairs; independent of the
    Gram eigendecomposition route."""
    u = a.copy().astype(float)
    n = u.shape[1]
    for _ in range(sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                g = u[:, p] @ u[:, q]
                if abs(g) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(zeta, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
        if not rotated:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


# --- center -------------------------------------------------------------------


def test_center_identical_columns():
    s = np.tile(np.array([[3.0], [5.0]]), (1, 2))
    mean, sc = center(s)
    assert np.array_equal(mean, [3.0, 5.0])
    assert np.all(sc == 0.0)


def test_center_two_columns():
    s = np.array([[1.0, 3.0], [1.0, 3.0]])
    mean, sc = center(s)
    assert np.array_equal(mean, [2.0, 2.0])
    assert np.array_equal(sc, [[-1.0, 1.0], [-1.0, 1.0]])


def test_center_row_sums_vanish():
    rng = np.random.default_rng(0)
    _, sc = center(rng.random((10, 5)))
    assert np.abs(sc.sum(axis=1)).max() <= 1e-12


# --- gram ----------------------------------------------------------------------


def test_gram_orthogonal_columns():
    ns = 4
    q, _ = np.linalg.qr(np.random.default_rng(1).random((20, ns)))
    sc = q * math.sqrt(ns)
    assert np.abs(gram(sc) - np.eye(ns)).max() < 1e-12


def test_gram_direct_arithmetic():
    sc = np.array([[2.0, 0.0], [0.0, 1.0]])
    assert np.allclose(gram(sc), [[2.0, 0.0], [0.0, 0.5]], atol=1e-15)


def test_gram_brute_force_oracle():
    rng = np.random.default_rng(2)
    sc = rng.random((40, 12))
    assert np.abs(gram(sc) - brute_force_gram(sc)).max() < 1e-13


# --- eigendecompose -------------------------------------------------------------


def test_eigendecompose_diagonal():
    vals, vecs = eigendecompose_spsd(np.diag([2.0, 1.0]))
    assert np.array_equal(vals, [2.0, 1.0])
    assert np.array_equal(vecs, np.eye(2))


def test_eigendecompose_textbook_2x2():
    vals, vecs = eigendecompose_spsd(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(vals, [3.0, 1.0], atol=1e-12)
    r = 1 / math.sqrt(2)
    assert np.allclose(vecs[:, 0], [r, r], atol=1e-12)
    assert np.allclose(vecs[:, 1], [r, -r], atol=1e-12)


def test_eigendecompose_reconstructs():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((20, 20))
    g = m @ m.T / 20
    vals, vecs = eigendecompose_spsd(g)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - g).max() < 1e-10
    assert np.abs(vecs.T @ vecs - np.eye(20)).max() < 1e-12
    assert np.all(np.diff(vals) <= 0)


def test_eigendecompose_bisection_oracle_5x5():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((5, 5))
    g = m @ m.T / 5
    vals, _ = eigendecompose_spsd(g)
    oracle = bisection_eigenvalues(g)
    assert len(oracle) == 5
    scale = max(vals)
    for mine, ref in zip(vals, oracle):
        assert abs(mine - ref) <= 1e-9 * scale


def test_eigendecompose_lapack_cross_check():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((30, 30))
    g = m @ m.T / 30
    vals, _ = eigendecompose_spsd(g)
    ref = np.sort(np.linalg.eigvalsh(g))[::-1]
    assert np.abs(vals - ref).max() < 1e-10 * ref[0]


def test_eigendecompose_requires_square():
    with pytest.raises(ValueError):
        eigendecompose_spsd(np.zeros((2, 3)))


# --- compute_basis ---------------------------------------------------------------


def test_rank_one_identity():
    rng = np.random.default_rng(6)
    s = rng.standard_normal(50)
    signs = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    sc = np.outer(s, signs)
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, 1)
    assert basis.n_modes == 1
    ns = signs.size
    coeffs = basis.modes.T @ sc  # 1 x ns
    approx = basis.modes @ coeffs
    assert np.abs(sc - approx).max() <= 1e-10 * np.abs(sc).max()
    sigma = basis.singular_values[0]
    assert abs(sigma - np.linalg.norm(sc) / math.sqrt(ns)) < 1e-10 * sigma


def test_full_rank_reconstruction():
    rng = np.random.default_rng(7)
    sc = rng.standard_normal((30, 8))
    vals, vecs = eigendecompose_spsd(gram(sc))
    rank = numerical_rank(vals, 30, 8)
    basis = compute_basis(sc, vals, vecs, rank, tol_rank=0.0)
    approx = basis.modes @ (basis.modes.T @ sc)
    assert np.linalg.norm(sc - approx) <= 1e-9 * np.linalg.norm(sc)


def test_singular_values_match_one_sided_jacobi_oracle():
    rng = np.random.default_rng(8)
    sc = rng.standard_normal((200, 30))
    ns = sc.shape[1]
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, 30, tol_rank=0.0)
    oracle = one_sided_jacobi_svd(sc / math.sqrt(ns))
    mine = basis.singular_values
    assert mine.size == 30
    assert np.abs(mine - oracle).max() <= 1e-8 * oracle[0]


def test_truncation_note_when_rank_short():
    sc = np.outer(np.arange(1.0, 6.0), [1.0, -1.0, 2.0, -2.0])  # rank 1
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, 3)
    assert basis.n_modes == 1
    assert basis.truncation_note is not None


# --- project / reconstruct -------------------------------------------------------


@pytest.fixture()
def random_basis():
    rng = np.random.default_rng(9)
    s = rng.standard_normal((40, 10)) + 5.0
    return pod_basis(s, 6), s


def test_project_mean_gives_zero(random_basis):
    basis, _ = random_basis
    c = project(basis, basis.mean_field)
    assert np.abs(c.raw).max() < 1e-10
    assert np.abs(c.standardized).max() < 1e-4  # raw zero scaled by small sigmas


def test_project_single_mode(random_basis):
    basis, _ = random_basis
    c = project(basis, basis.mean_field + basis.modes[:, 0])
    e1 = np.zeros(basis.n_modes)
    e1[0] = 1.0
    assert np.abs(c.raw - e1).max() < 1e-10


def test_standardized_times_sigma_is_raw_exactly(random_basis):
    basis, s = random_basis
    c = project(basis, s[:, 3])
    assert np.array_equal(c.standardized * basis.singular_values, c.raw)


def test_roundtrip_in_span(random_basis):
    basis, _ = random_basis
    rng = np.random.default_rng(10)
    x = basis.mean_field + basis.modes @ rng.standard_normal(basis.n_modes)
    back = reconstruct(basis, project(basis, x))
    assert np.abs(back - x).max() < 1e-10


def test_reconstruct_zero_coeffs(random_basis):
    basis, _ = random_basis
    assert np.array_equal(reconstruct(basis, np.zeros(basis.n_modes)), basis.mean_field)


def test_projection_residual_orthogonal(random_basis):
    basis, s = random_basis
    x = s[:, 0]
    resid = x - reconstruct(basis, project(basis, x))
    assert np.abs(basis.modes.T @ resid).max() < 1e-10


def test_projection_matches_tail_energy(random_basis):
    basis, s = random_basis
    lam = basis.energy_spectrum
    tail = lam[basis.n_modes :].sum() / lam.sum()
    _, sc = center(s)
    num = 0.0
    den = 0.0
    for j in range(s.shape[1]):
        r = s[:, j] - reconstruct(basis, project(basis, s[:, j]))
        num += float(r @ r)
        den += float(sc[:, j] @ sc[:, j])
    assert abs(num / den - tail) <= 0.1 * tail


def test_dimension_mismatch(random_basis):
    basis, _ = random_basis
    with pytest.raises(ValueError):
        project(basis, np.zeros(basis.n_dof + 1))
    with pytest.raises(ValueError):
        reconstruct(basis, np.zeros(basis.n_modes + 1))


# --- parameter scaling ------------------------------------------------------------


def test_scale_params_table_ranges():
    scaler = ParamScaler(("t_ambient", "htc"), np.array([288.0, 218.0]), np.array([298.0, 320.0]))
    assert np.allclose(scaler.scale((288.0, 218.0)), [-1.0, -1.0])
    assert np.allclose(scaler.scale((293.0, 269.0)), [0.0, 0.0])
    assert np.allclose(scaler.scale((298.0, 320.0)), [1.0, 1.0])


def test_scale_params_inverse_roundtrip():
    scaler = ParamScaler(("t_ambient", "htc"), np.array([288.0, 218.0]), np.array([298.0, 320.0]))
    rng = np.random.default_rng(11)
    for _ in range(20):
        mu = np.array([rng.uniform(288, 298), rng.uniform(218, 320)])
        back = scaler.unscale(scaler.scale(mu))
        assert np.abs(back - mu).max() < 1e-14 * 320


def test_scale_params_degenerate_range():
    with pytest.raises(ConfigurationError):
        ParamScaler(("a",), np.array([1.0]), np.array([1.0]))


# --- projection error spectrum ------------------------------------------------------


def test_spectrum_rank_one():
    rng = np.random.default_rng(12)
    s = np.outer(rng.standard_normal(30), rng.standard_normal(6)) + 3.0
    basis = pod_basis(s, 1)
    errs = projection_error_spectrum(basis, s)
    assert errs[-1] <= 1e-9


def test_spectrum_non_increasing_and_tail_match():
    rng = np.random.default_rng(13)
    s = rng.standard_normal((60, 12))
    basis = pod_basis(s, 8)
    errs = projection_error_spectrum(basis, s)
    assert np.all(np.diff(errs) <= 1e-12)
    lam = basis.energy_spectrum
    total = lam.sum()
    for l in range(1, basis.n_modes + 1):
        tail = lam[l:].sum() / total
        if tail > 1e-13:
            assert abs(errs[l - 1] ** 2 - tail) <= 0.1 * tail


def test_spectrum_matches_explicit_residuals():
    rng = np.random.default_rng(14)
    s = rng.standard_normal((25, 7)) + 1.0
    basis = pod_basis(s, 5)
    errs = projection_error_spectrum(basis, s)
    _, sc = center(s)
    den = float((sc * sc).sum())
    for l in range(1, 6):
        p = basis.modes[:, :l]
        resid = sc - p @ (p.T @ sc)
        explicit = math.sqrt(float((resid * resid).sum()) / den)
        assert abs(errs[l - 1] - explicit) < 1e-12


# --- invariants ----------------------------------------------------------------------


def test_orthonormality_invariant():
    rng = np.random.default_rng(15)
    for trial in range(5):
        s = rng.standard_normal((50, 10)) * (trial + 1)
        basis = pod_basis(s, 6)
        dev = np.abs(basis.modes.T @ basis.modes - np.eye(basis.n_modes)).max()
        assert dev <= 1e-10


def test_energy_ordering():
    rng = np.random.default_rng(16)
    basis = pod_basis(rng.standard_normal((50, 10)), 6)
    sig = basis.singular_values
    assert np.all(sig > 0)
    assert np.all(np.diff(sig) <= 0)


def test_column_permutation_leaves_subspace():
    rng = np.random.default_rng(17)
    s = rng.standard_normal((40, 9))
    basis_a = pod_basis(s, 5)
    perm = rng.permutation(9)
    basis_b = pod_basis(s[:, perm], 5)
    pa = basis_a.modes @ basis_a.modes.T
    pb = basis_b.modes @ basis_b.modes.T
    assert np.abs(pa - pb).max() <= 1e-9


def test_mode_sign_convention():
    rng = np.random.default_rng(18)
    basis = pod_basis(rng.standard_normal((30, 8)), 5)
    for j in range(basis.n_modes):
        col = basis.modes[:, j]
        nz = np.nonzero(col)[0]
        assert col[nz[0]] > 0
