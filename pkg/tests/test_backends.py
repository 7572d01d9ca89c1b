"""The compiled core and the pure-Python loop must agree bit for bit."""

import numpy as np
import pytest

from cltorus import (InitialCondition, NoiseKernel, OrderProfile, SimParams,
                     backend, gaussian, laplace, run_ensemble, uniform_sym)

HAVE_C = "c" in backend.available_backends()

pytestmark = pytest.mark.skipif(not HAVE_C, reason="compiled core not built")

BASES = [gaussian(1.0), laplace(0.8), uniform_sym(1.5)]


@pytest.mark.parametrize("base", BASES)
@pytest.mark.parametrize("mode", ["rescaled", "unscaled"])
def test_bit_identical_trajectories(base, mode):
    eps = 0.17
    params = SimParams(n_particles=24, lam=1.4, epsilon=eps, mode=mode, seed=1001,
                       t_end=1.0, snapshot_times=(0.0, 0.3, 1.0))
    kernel = NoiseKernel(base, eps)
    ic = InitialCondition.iid(OrderProfile.one_plus_cos())
    a = run_ensemble(params, ic, kernel, runs=12, backend_name="c")
    b = run_ensemble(params, ic, kernel, runs=12, backend_name="python")
    assert np.array_equal(a, b)


def test_bit_identical_with_wrapping_noise():
    # large eps exercises the rejection loop and angle wrapping paths
    eps = 2.2
    params = SimParams(n_particles=6, lam=1.0, epsilon=eps, seed=7, t_end=2.0,
                       snapshot_times=(2.0,))
    kernel = NoiseKernel(gaussian(1.3), eps)
    ic = InitialCondition.point_mass(1.0)
    a = run_ensemble(params, ic, kernel, runs=50, backend_name="c")
    b = run_ensemble(params, ic, kernel, runs=50, backend_name="python")
    assert np.array_equal(a, b)


@pytest.mark.parametrize("name", ["c", "python"])
def test_event_loop_rejection_cap(name):
    # a kernel whose window excludes nearly all noise mass trips the cap
    eps = 1e10
    params = SimParams(n_particles=4, lam=1.0, epsilon=eps, seed=0, t_end=1.0,
                       snapshot_times=(1.0,))
    kernel = NoiseKernel(uniform_sym(1.0), eps)
    with pytest.raises(RuntimeError, match="rejection"):
        run_ensemble(params, InitialCondition.point_mass(0.0), kernel, 1,
                     backend_name=name)


def test_resolve_backend():
    assert backend.resolve_backend("auto") in ("c", "python")
    assert backend.resolve_backend("python") == "python"
    with pytest.raises(ValueError):
        backend.resolve_backend("fortran")


def test_benchmark_smoke():
    import importlib.util
    import os
    path = os.path.join(os.path.dirname(__file__), "..", "benchmarks",
                        "benchmark_backends.py")
    spec = importlib.util.spec_from_file_location("benchmark_backends", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.run_benchmark(n_particles=32, t_end=0.1, runs=4, seed=0)
    names = {r["backend"] for r in rows}
    assert "python" in names and ("c" in names) == HAVE_C
    assert all(r["events_per_s"] > 0 for r in rows)
    assert all(r["identical"] for r in rows)
