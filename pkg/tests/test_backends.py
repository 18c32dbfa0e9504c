"""The numba kernels and their numpy twins must agree exactly."""
import os
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest

from dslab import _accel, kernels, rng
from dslab.bclab import _fixed, _parse_mode, _point_rows
from dslab.dynsim import DynSystem, TargetSequence, _target_arrays
from dslab.numtheory import prime_factor_table
from dslab.unitcircle import _split_int

pytestmark = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")

NB, NP = kernels.backend("numba"), kernels.backend("numpy")


@pytest.mark.parametrize("A,B", [(0, 1), (1, 2), (2, 5), (3, 7)])
def test_counting_tables(A, B):
    ptr, val = prime_factor_table(300)
    assert np.array_equal(NB.iq_counts(300, A, B, ptr, val), NP.iq_counts(300, A, B, ptr, val))
    assert np.array_equal(NB.f_table(120, 15, A, B, ptr, val), NP.f_table(120, 15, A, B, ptr, val))


@pytest.mark.parametrize("A,B", [(0, 1), (1, 3), (2, 5)])
def test_hc_sweep(A, B):
    ptr, val = prime_factor_table(30)
    t1, s1 = NB.hc_sweep(30, A, B, ptr, val)
    t2, s2 = NP.hc_sweep(30, A, B, ptr, val)
    assert np.array_equal(t1, t2) and np.array_equal(s1, s2)


def test_arc_components():
    r = np.random.default_rng(0)
    n = 600
    den = r.integers(2000, 5000, n)
    lo = r.integers(-10**4, 10**4, n)
    hi = lo + r.integers(0, 6, n)
    lo, hi, den = _split_int(lo, hi, den)
    (f1, l1), (f2, l2) = NB.arc_components(lo, hi, den), NP.arc_components(lo, hi, den)
    assert len(f1) == len(f2) > 50
    # ties between equal endpoints may pick different indices, so compare values
    val = lambda num, idx: sorted(F(int(num[i]), int(den[i])) for i in idx)  # noqa: E731
    assert val(lo, f1) == val(lo, f2) and val(hi, l1) == val(hi, l2)


@pytest.mark.parametrize("mode", ["all_a", "coprime", ("residue", 1, 3), ("congruence", 1, 2, 0, 3)])
def test_mc_hits(mode):
    Q = 400
    W1, W2 = _point_rows(3, 40, 256, 0)
    qs, pint, plo, phi = [], [], [], []
    for q in range(1, Q + 1):
        vi, lo, hi = _fixed(F(1, 2 * q) if q % 11 else F(7, 3))
        qs.append(q), pint.append(vi), plo.append(lo), phi.append(hi)
    gi, glo, ghi = _fixed(F(1, 3))
    code, A, B, cr, ct, cs, cu = _parse_mode(mode)
    ptr, val = prime_factor_table(Q)
    args = (W1, W2, np.array(qs), np.array(pint), np.array(plo), np.array(phi), gi, glo, ghi,
            code, A, B, cr, ct, cu, cs, ptr, val)
    assert np.array_equal(NB.mc_hits(*args), NP.mc_hits(*args))


@pytest.mark.parametrize("b", [2, 8])
def test_orbit_hits(b):
    sys_ = DynSystem.times(b)
    N = 300
    t = TargetSequence.from_rule("1/(2n)", seed=4)
    W = rng.point_words(4, 20, (sys_.shift_bits * N + 64) // 64 + 2)
    arrs = _target_arrays(t, N)
    k = sys_.shift_bits
    assert np.array_equal(NB.orbit_hits(W, k, *arrs), NP.orbit_hits(W, k, *arrs))


def test_env_flag_selects_numpy():
    env = dict(os.environ, DSLAB_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import dslab.kernels as k; print(k.BACKEND, k.active.__name__)"],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out == ["numpy", "dslab.kernels._np"]
