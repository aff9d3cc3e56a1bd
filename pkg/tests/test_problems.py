import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singular_gmres.analysis import default_tol, is_range_symmetric, matrix_index, range_projector
from singular_gmres.densela import rank_with_tol
from singular_gmres.problems import (
    A12_LAYOUT_NOTE,
    N,
    Family,
    GpParams,
    ProblemInstance,
    RhsKind,
    RhsMode,
    alpha_sequence,
    beta_sequence,
    gen_gp_matrix,
    gen_index2_matrix,
    gen_rhs,
    jordan_block,
    make_problem,
    seeded_uniform,
)


def test_jordan_blocks():
    np.testing.assert_array_equal(jordan_block(1, 5.0), [[5.0]])
    np.testing.assert_array_equal(jordan_block(2, 0.0), [[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_array_equal(jordan_block(3, 2.0), [[2, 1, 0], [0, 2, 1], [0, 0, 2]])
    with pytest.raises(ValueError):
        jordan_block(0, 1.0)


def test_gp_corner_entries():
    a = gen_gp_matrix(GpParams(12, 12))
    assert a[0, 0] == 1.0
    assert a[30, 30] == 1e-12
    assert a.shape == (N, N)


def test_alpha_two():
    expected = 1e-12 + (14 / 15) * (1 - 1e-12) * 0.7
    assert alpha_sequence(12)[1] == pytest.approx(expected, rel=1e-15)
    assert alpha_sequence(12)[1] == pytest.approx(0.6533333333, abs=1e-10)


@given(st.floats(0.5, 20), st.floats(0.5, 20))
def test_sequences_positive_with_unit_first_entry(rho, gamma):
    al, be = alpha_sequence(rho), beta_sequence(gamma)
    assert al[0] == 1.0 and be[0] == 1.0
    assert np.all(al > 0) and np.all(be > 0)
    assert al[-1] == pytest.approx(10.0**-rho, rel=1e-12)
    assert be[-1] == pytest.approx(10.0**-gamma, rel=1e-12)


def test_gp_nonzero_count():
    # 16 Jordan blocks J2(alpha) and 16 J2(beta), three nonzeros each, plus
    # the 32 diagonal beta entries
    a = gen_gp_matrix()
    assert np.count_nonzero(a) == 16 * 3 + 32 + 16 * 3 == 128
    assert not a[64:].any()


def test_a12_layout():
    a = gen_gp_matrix()
    be = beta_sequence(12)
    a12 = a[:64, 64:]
    assert not a12[32:].any() and not a12[:, 32:].any()
    np.testing.assert_array_equal(a12[0:2, 0:2], jordan_block(2, be[0]))
    np.testing.assert_array_equal(a12[30:32, 30:32], jordan_block(2, be[15]))
    assert "64x64" in A12_LAYOUT_NOTE


def test_gp_rank_index_and_symmetry():
    a = gen_gp_matrix(GpParams(12, 12))
    assert rank_with_tol(a, default_tol(a)) == 64
    s = np.linalg.svd(a, compute_uv=False)
    assert np.count_nonzero(s > N * np.spacing(s[0])) == 64
    assert matrix_index(a) == 1
    assert not is_range_symmetric(a)


def test_index2_pattern():
    a = gen_index2_matrix(GpParams(12, 15))
    assert a[64, 65] == 1.0  # 1-based (65, 66)
    assert a[94, 95] == 1.0  # 1-based (95, 96)
    a22 = a[64:, 64:]
    assert not (a22 @ a22).any()
    assert np.count_nonzero(a) == 128 + 16


def test_index2_index_and_rank():
    a = gen_index2_matrix(GpParams(12, 15))
    assert matrix_index(a) == 2
    # rank 80 in exact arithmetic: sigma_80 is about 2e-17 and sigma_81 about 4e-30
    assert rank_with_tol(a, 1e-24) == 80
    # thirteen of the beta values sit near 1e-15, below n * ulp(sigma_1)
    assert rank_with_tol(a, default_tol(a)) == 66


def test_generators_bit_reproducible():
    np.testing.assert_array_equal(gen_gp_matrix(), gen_gp_matrix())
    np.testing.assert_array_equal(gen_index2_matrix(), gen_index2_matrix())
    np.testing.assert_array_equal(make_problem("gp", rhs=RhsMode.inconsistent()).b, make_problem("gp", rhs=RhsMode.inconsistent()).b)


def test_params_validation():
    with pytest.raises(ValueError):
        GpParams(0, 1)
    with pytest.raises(ValueError):
        RhsMode(RhsKind.INCONSISTENT, 0.0)


def test_seeded_uniform_contract():
    np.testing.assert_array_equal(seeded_uniform(50, 3), seeded_uniform(50, 3))
    assert not np.array_equal(seeded_uniform(50, 3), seeded_uniform(50, 4))
    u = seeded_uniform(10_000, 9)
    assert np.all((u > 0) & (u < 1))
    assert 0.45 < u.mean() < 0.55
    with pytest.raises(ValueError):
        seeded_uniform(0, 1)


@given(st.integers(0, 2**32), st.integers(1, 200))
def test_seeded_uniform_open_interval(seed, n):
    u = seeded_uniform(n, seed)
    assert np.all((u > 0) & (u < 1))


def test_rhs_identity_consistent():
    np.testing.assert_allclose(gen_rhs(np.eye(5)), np.ones(5) / np.sqrt(5), rtol=1e-15)


def test_rhs_noise_norm():
    a = gen_gp_matrix()
    b_con = gen_rhs(a, RhsMode.consistent())
    b_inc = gen_rhs(a, RhsMode.inconsistent(0.01, 5))
    assert np.linalg.norm(b_inc - b_con) == pytest.approx(0.01, rel=1e-13)
    assert np.linalg.norm(b_con) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("gen", [gen_gp_matrix, gen_index2_matrix])
def test_consistent_rhs_in_range(gen):
    a = gen()
    b = gen_rhs(a)
    p = range_projector(a)
    assert np.linalg.norm(b - p @ b) <= 1e-12


def test_rhs_degenerate():
    with pytest.raises(ValueError, match="A e = 0"):
        gen_rhs(np.array([[1.0, -1.0], [1.0, -1.0]]))


def test_make_problem_defaults_and_metadata():
    p = make_problem("index2")
    assert p.params == GpParams(12, 15)
    assert p.family is Family.INDEX2
    assert p.metadata["a12_layout"] == A12_LAYOUT_NOTE
    assert make_problem(Family.GP).params == GpParams(12, 12)
    with pytest.raises(ValueError):
        make_problem("custom")
    with pytest.raises(ValueError):
        ProblemInstance(np.ones((2, 3)), np.ones(2), Family.CUSTOM, None, RhsMode())
