"""The numba and numpy backends run the same per-trial program."""

import os
import subprocess
import sys

import numpy as np
import pytest

from cvdense import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba backend not active")


def test_counter_streams_are_standard_normal():
    z = K._normals_np(K.seed_key(7), 0, 200_000)
    assert z.shape == (200_000, K.N_NORMALS)
    np.testing.assert_allclose(z.mean(axis=0), 0, atol=0.01)
    np.testing.assert_allclose(z.var(axis=0), 1, atol=0.01)
    c = np.corrcoef(z, rowvar=False) - np.eye(K.N_NORMALS)
    assert np.abs(c).max() < 0.01


def test_trial_draws_do_not_depend_on_range():
    key = K.seed_key(11)
    whole = K._normals_np(key, 0, 1000)
    part = K._normals_np(key, 400, 700)
    np.testing.assert_array_equal(whole[400:700], part)


def test_seeds_give_different_streams():
    a = K._normals_np(K.seed_key(1), 0, 100)
    b = K._normals_np(K.seed_key(2), 0, 100)
    assert not np.allclose(a, b)


@needs_numba
def test_normals_agree_across_backends():
    key = K.seed_key(42)
    np.testing.assert_allclose(K.normals_nb(key, 3, 5000), K._normals_np(key, 3, 5000), rtol=0, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("scheme", [K.DENSE_CODING, K.COHERENT_HOMODYNE, K.COHERENT_HETERODYNE])
def test_observables_agree_across_backends(scheme):
    key = K.seed_key(5)
    args = (scheme, 0.3, 1.5, 0.8, 4.0, key, 10, 3000)
    np.testing.assert_allclose(K.observables_nb(*args), K.observables_np(*args), rtol=0, atol=1e-12)


@needs_numba
def test_chunk_moments_agree_across_backends():
    key = K.seed_key(9)
    trials = 3 * K.CHUNK + 123
    a = K.chunk_moments_nb(K.DENSE_CODING, 0.2, 0.0, 0.9, 6.0, key, trials, 0, 4)
    b = K.chunk_moments_np(K.DENSE_CODING, 0.2, 0.0, 0.9, 6.0, key, trials, 0, 4)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[0].sum() == trials
    np.testing.assert_allclose(a[1], b[1], rtol=0, atol=1e-12)
    np.testing.assert_allclose(a[2], b[2], rtol=1e-10)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, CVDENSE_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from cvdense import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
