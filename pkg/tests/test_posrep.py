import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from example_data import A, A_LIFT, B, B_LIFT, C, C_LIFT, D, D_LIFT, E, E_LIFT
from fhalanay import abs_part, delta, gamma_metzler, is_metzler, neg_part, pi_mat, pi_vec, pos_part

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_subnormal=False)


def matrices(rows=st.integers(1, 6), cols=st.integers(1, 6)):
    return st.tuples(rows, cols).flatmap(lambda s: arrays(float, s, elements=finite))


def square_matrices():
    return st.integers(1, 6).flatmap(lambda k: arrays(float, (k, k), elements=finite))


def test_parts_examples():
    np.testing.assert_array_equal(pos_part(B), [[0, 0.1], [0, 0.5]])
    np.testing.assert_array_equal(neg_part(np.zeros((2, 3))), np.zeros((2, 3)))
    np.testing.assert_array_equal(abs_part([[-1.0, 2.0]]), [[1.0, 2.0]])


def test_zero_entries_split_to_zero():
    m = np.array([[0.0, -0.0]])
    assert np.all(pos_part(m) == 0) and np.all(neg_part(m) == 0)
    assert not np.signbit(pos_part(m)).any()
    assert not np.signbit(neg_part(m)).any()


def test_delta_definition():
    np.testing.assert_array_equal(delta(1), [[1, -1]])
    np.testing.assert_array_equal(delta(2), [[1, 0, -1, 0], [0, 1, 0, -1]])
    with pytest.raises(ValueError):
        delta(0)
    with pytest.raises(ValueError):
        delta(1.5)


def test_pi_vec_examples():
    np.testing.assert_array_equal(pi_vec([1.0, -2.0]), [1, 0, 0, 2])
    np.testing.assert_array_equal(pi_vec([0.0, 0.0]), np.zeros(4))
    with pytest.raises(ValueError):
        pi_vec([[1.0]])


def test_example_lifted_matrices():
    np.testing.assert_array_equal(gamma_metzler(A), A_LIFT)
    np.testing.assert_array_equal(pi_mat(B), B_LIFT)
    np.testing.assert_array_equal(pi_mat(E), E_LIFT)
    np.testing.assert_array_equal(pi_mat(C), C_LIFT)
    np.testing.assert_array_equal(pi_mat(D), D_LIFT)


def test_gamma_of_diagonal():
    dg = np.diag([-1.0, 2.0, -3.0])
    g = gamma_metzler(dg)
    np.testing.assert_array_equal(g[:3, :3], dg)
    np.testing.assert_array_equal(g[3:, 3:], dg)
    np.testing.assert_array_equal(g[:3, 3:], 0)


def test_gamma_embeds_metzler_input():
    a = np.array([[-1.0, 0.3], [0.2, -2.0]])
    g = gamma_metzler(a)
    np.testing.assert_array_equal(g[:2, :2], a)
    np.testing.assert_array_equal(g[:2, 2:], 0)
    with pytest.raises(ValueError):
        gamma_metzler(np.ones((2, 3)))


def test_pi_mat_zero():
    np.testing.assert_array_equal(pi_mat(np.zeros((2, 3))), np.zeros((4, 6)))


def test_is_metzler():
    assert is_metzler([[-1.0, 0.0], [2.0, -3.0]])
    assert not is_metzler([[-1.0, -0.1], [2.0, -3.0]])
    assert not is_metzler(np.ones((2, 3)))


@given(matrices())
def test_decomposition(m):
    np.testing.assert_array_equal(pos_part(m) - neg_part(m), m)
    np.testing.assert_array_equal(pos_part(m) + neg_part(m), np.abs(m))
    assert np.all(pos_part(m) >= 0) and np.all(neg_part(m) >= 0)
    np.testing.assert_array_equal(pos_part(pos_part(m)), pos_part(m))


@given(st.integers(1, 8).flatmap(lambda k: arrays(float, k, elements=finite)))
def test_reconstruction_identity(w):
    lifted = pi_vec(w)
    assert np.all(lifted >= 0)
    np.testing.assert_array_equal(delta(w.size) @ lifted, w)


@given(matrices(), st.data())
def test_pi_mat_identity(m, data):
    x = data.draw(arrays(float, m.shape[1], elements=finite))
    lifted = pi_mat(m)
    assert np.all(lifted >= 0)
    np.testing.assert_allclose(delta(m.shape[0]) @ lifted @ pi_vec(x), m @ x, rtol=1e-13, atol=1e-13 * (1 + np.abs(m) @ np.abs(x)).max())


@given(square_matrices(), st.data())
def test_gamma_identity(a, data):
    x = data.draw(arrays(float, a.shape[0], elements=finite))
    g = gamma_metzler(a)
    assert is_metzler(g)
    np.testing.assert_allclose(delta(a.shape[0]) @ g @ pi_vec(x), a @ x, rtol=1e-13, atol=1e-13 * (1 + np.abs(a) @ np.abs(x)).max())


@given(matrices())
def test_column_sums_match_abs(m):
    np.testing.assert_allclose(pi_mat(m).sum(axis=0), np.tile(np.abs(m).sum(axis=0), 2), rtol=1e-14, atol=0)
