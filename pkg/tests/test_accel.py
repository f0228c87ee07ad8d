"""Backend parity for the pairwise phase-sum kernel."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistres._accel import backend, phase_pairwise, phase_pairwise_numpy


def direct_sum(x, f, k):
    acc = 0.0 + 0.0j
    for i in range(len(x)):
        for j in range(len(x)):
            acc += f[i] * f[j] * np.exp(1j * k * abs(x[i] - x[j]))
    return acc


def test_backend_reports_a_known_name():
    assert backend() in ("numba", "numpy")


def test_backends_agree_on_a_large_input():
    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(-30, 30, size=4001))
    f = rng.standard_normal(4001) + 0j
    k = 1.7 + 0.0j
    fast = phase_pairwise(x, f, k)
    slow = phase_pairwise_numpy(x, f, k)
    assert fast == pytest.approx(slow, rel=1e-12)


def test_chunking_does_not_change_the_numpy_sum():
    rng = np.random.default_rng(5)
    x = np.sort(rng.uniform(-5, 5, size=257))
    f = (rng.standard_normal(257) + 1j * rng.standard_normal(257))
    k = 0.8 - 0.2j
    whole = phase_pairwise_numpy(x, f, k, chunk=10**6)
    pieces = phase_pairwise_numpy(x, f, k, chunk=37)
    assert whole == pytest.approx(pieces, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_kernel_matches_the_written_out_double_sum(data):
    n = data.draw(st.integers(min_value=1, max_value=12))
    x = np.array(sorted(data.draw(st.lists(
        st.floats(min_value=-4, max_value=4), min_size=n, max_size=n))))
    f = np.array(data.draw(st.lists(
        st.floats(min_value=-2, max_value=2), min_size=n, max_size=n)),
        dtype=complex)
    k = complex(data.draw(st.floats(min_value=0.1, max_value=3.0)),
                data.draw(st.floats(min_value=0.0, max_value=1.0)))
    want = direct_sum(x, f, k)
    assert phase_pairwise(x, f, k) == pytest.approx(want, abs=1e-9)
    assert phase_pairwise_numpy(x, f, k) == pytest.approx(want, abs=1e-9)


def test_environment_flag_forces_the_numpy_path():
    env = dict(os.environ, TWISTRES_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c",
         "from twistres._accel import backend; print(backend())"],
        capture_output=True, text=True, env=env)
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"
