import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from vlift import kernels
from vlift.quantale import make_quantale

CHAIN = make_quantale({"kind": "lukasiewicz_chain", "n": 5})
T = CHAIN.tensor_table
H = CHAIN.hom_table


def _mats(rows, cols):
    return hnp.arrays(np.int64, st.tuples(rows, cols), elements=st.integers(0, 5))


dims = st.integers(0, 6)


def _brute_sup(X, Y):
    m, k = X.shape
    p = Y.shape[1]
    return np.array([[max([T[X[i, t], Y[t, j]] for t in range(k)], default=0) for j in range(p)] for i in range(m)],
                    dtype=np.int64).reshape(m, p)


def _brute_inf(X, Y):
    m, k = X.shape
    p = Y.shape[0]
    return np.array([[min([H[X[i, t], Y[j, t]] for t in range(k)], default=5) for j in range(p)] for i in range(m)],
                    dtype=np.int64).reshape(m, p)


@given(st.data(), dims, dims, dims)
def test_sup_tensor_backends_match_brute_force(data, m, k, p):
    X = data.draw(_mats(st.just(m), st.just(k)))
    Y = data.draw(_mats(st.just(k), st.just(p)))
    want = _brute_sup(X, Y)
    assert np.array_equal(kernels.sup_tensor_numpy(X, Y, T), want)
    assert np.array_equal(kernels.sup_tensor_numba(X, Y, T), want)


@given(st.data(), dims, dims, dims)
def test_inf_hom_backends_match_brute_force(data, m, k, p):
    X = data.draw(_mats(st.just(m), st.just(k)))
    Y = data.draw(_mats(st.just(p), st.just(k)))
    want = _brute_inf(X, Y)
    assert np.array_equal(kernels.inf_hom_numpy(X, Y, H, 5), want)
    assert np.array_equal(kernels.inf_hom_numba(X, Y, H, 5), want)


@given(st.data(), st.integers(1, 5))
def test_category_violation_backends_agree(data, n):
    M = data.draw(_mats(st.just(n), st.just(n)))
    a = kernels.category_violation_numpy(M, T, 5)
    b = kernels.category_violation_numba(M, T, 5)
    assert (a is None) == (b is None)


def test_category_violation_on_a_category():
    M = np.full((3, 3), 5, dtype=np.int64)
    assert kernels.category_violation_numpy(M, T, 5) is None
    assert kernels.category_violation_numba(M, T, 5) is None
    M[0, 0] = 4
    assert kernels.category_violation_numpy(M, T, 5) is not None


def test_large_inputs_cross_chunks():
    rng = np.random.default_rng(0)
    X = rng.integers(0, 6, (70, 90))
    Y = rng.integers(0, 6, (90, 80))
    assert np.array_equal(kernels.sup_tensor_numpy(X, Y, T), kernels.sup_tensor_numba(X, Y, T))
    assert np.array_equal(kernels.inf_hom_numpy(X, Y.T, H, 5), kernels.inf_hom_numba(X, Y.T, H, 5))


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("off", "numpy")])
def test_env_flag_selects_numpy(flag, expected):
    env = dict(os.environ, VLIFT_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from vlift import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected


def test_default_backend_uses_numba_when_available():
    if not kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    env = {k: v for k, v in os.environ.items() if k != "VLIFT_NUMBA"}
    out = subprocess.run(
        [sys.executable, "-c", "from vlift import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numba"


def test_numpy_fallback_runs_a_pipeline():
    code = (
        "from vlift import kernels, make_quantale\n"
        "from vlift.vcat import chain_category\n"
        "from vlift.vmod import identity_module, compose\n"
        "q = make_quantale('two'); A = chain_category(q, ['a', 'b', 'c'])\n"
        "R = identity_module(A); assert compose(R, R) == R\n"
        "print(kernels.BACKEND)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=dict(os.environ, VLIFT_NUMBA="0"),
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
