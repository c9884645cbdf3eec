import importlib.util
from pathlib import Path


def test_benchmark_runs():
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.bench(steps=50, repeat=1)
    assert {r[0] for r in rows} == {"rk4_run", "dp45_step", "integrate"}
    assert all(r[2] > 0 for r in rows)
