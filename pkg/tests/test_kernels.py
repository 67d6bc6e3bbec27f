import os
import subprocess
import sys

import numpy as np
import pytest

from zetasize import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def test_horner_paths_agree(rng):
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    z = rng.normal(size=(40, 7)) + 1j * rng.normal(size=(40, 7))
    a = K.horner_numpy(c, z)
    b = K.horner_numba(c, np.ascontiguousarray(z))
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_abs_product_paths_agree(rng):
    r = rng.normal(size=5) + 1j * rng.normal(size=5)
    z = rng.normal(size=300) + 1j * rng.normal(size=300)
    assert np.allclose(K.abs_product_numpy(z, r), K.abs_product_numba(z, r), rtol=1e-13)


@pytest.mark.parametrize("N", [1, 2, 5, 8])
def test_scale_table_paths_agree(rng, N):
    pts = 0.4 * (rng.normal(size=(25, N)) + 1j * rng.normal(size=(25, N)))
    pts[:, -1] = pts[:, 0]          # a repeated root in every set
    a, b = K.scale_table_numpy(pts), K.scale_table_numba(pts)
    assert np.array_equal(a == 0, b == 0)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_env_flag_disables_numba():
    code = "import zetasize._kernels as K; print(K.USE_NUMBA)"
    env = dict(os.environ, ZETASIZE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
