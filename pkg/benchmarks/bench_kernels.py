"""Benchmark: compiled kernel backend vs the numpy reference.

Times the three hot kernels directly, then times a full random-action
environment rollout under each backend (separate subprocesses, selected
via ECOMARL_KERNELS). Run:  python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np

from ecomarl import kernels
from ecomarl.kernels import reference


def _time(fn, repeats=5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels() -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(0)
    n = 200_000
    x = rng.uniform(-1000, 1000, n)
    y = rng.uniform(-1000, 1000, n)
    z = rng.uniform(0, 500, n)
    px = rng.uniform(-50, 50, 5000)
    py = rng.uniform(-50, 50, 5000)
    rewards = rng.normal(size=100_000)
    values = rng.normal(size=100_000)
    dones = rng.random(100_000) < 0.001

    rows = []
    rows.append(
        (
            "fbm3 (200k points, 4 octaves)",
            _time(lambda: reference.fbm3(x, y, z, 7, 4, 2.0, 0.5)),
            _time(lambda: kernels.fbm3(x, y, z, 7, 4, 2.0, 0.5)),
        )
    )
    # many small batches: the per-call regime the envs actually hit
    xs = x[:16]
    ys = y[:16]
    zs = z[:16]
    rows.append(
        (
            "fbm3 (5000 calls x 16 points)",
            _time(lambda: [reference.fbm3(xs, ys, zs, 7, 4, 2.0, 0.5) for _ in range(5000)]),
            _time(lambda: [kernels.fbm3(xs, ys, zs, 7, 4, 2.0, 0.5) for _ in range(5000)]),
        )
    )
    rows.append(
        (
            "raster_counts (5k points, 42x42)",
            _time(lambda: [reference.raster_counts(px, py, 0, 0, 1, 0, 42, 10.0) for _ in range(200)]),
            _time(lambda: [kernels.raster_counts(px, py, 0, 0, 1, 0, 42, 10.0) for _ in range(200)]),
        )
    )
    rows.append(
        (
            "gae_backward (100k transitions)",
            _time(lambda: reference.gae_backward(rewards, values, dones, 0.99, 0.95, 0.0)),
            _time(lambda: kernels.gae_backward(rewards, values, dones, 0.99, 0.95, 0.0)),
        )
    )
    return rows


_ROLLOUT_SNIPPET = """
import json, time
import numpy as np
from ecomarl import kernels, make_env, EnvConfig
from ecomarl.core.spaces import Actions

env = make_env(EnvConfig(env_id="aws", task=0, level_or_pattern=5, seed=3))
spec = env.spec
rng = np.random.default_rng(0)
env.reset(3)
start = time.perf_counter()
for _ in range(300):
    acts = Actions(
        continuous=rng.uniform(-1, 1, (spec.agent_count, spec.continuous_actions)),
        discrete=np.stack([rng.integers(0, b, spec.agent_count) for b in spec.discrete_branches], axis=1),
    )
    env.step(acts)
print(json.dumps({"backend": kernels.BACKEND, "seconds": time.perf_counter() - start}))
"""


def bench_rollout() -> dict[str, float]:
    out = {}
    for backend in ("reference", "native"):
        env = os.environ.copy()
        env["ECOMARL_KERNELS"] = backend
        proc = subprocess.run(
            [sys.executable, "-c", _ROLLOUT_SNIPPET], capture_output=True, text=True, env=env
        )
        if proc.returncode != 0:
            print(f"  ({backend} rollout unavailable: {proc.stderr.strip().splitlines()[-1]})")
            continue
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        assert payload["backend"] == backend
        out[backend] = payload["seconds"]
    return out


def main() -> None:
    print(f"active backend: {kernels.BACKEND}\n")
    header = f"{'kernel':38} {'reference':>12} {'native':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, ref_t, nat_t in bench_kernels():
        speedup = ref_t / nat_t if nat_t > 0 else float("inf")
        print(f"{name:38} {ref_t * 1e3:>10.2f}ms {nat_t * 1e3:>10.2f}ms {speedup:>8.1f}x")

    print("\nfull env rollout (aws, 300 steps):")
    rollout = bench_rollout()
    for backend, seconds in rollout.items():
        print(f"  {backend:10} {seconds * 1e3:8.1f} ms  ({300 / seconds:7.1f} steps/s)")
    if len(rollout) == 2:
        print(f"  end-to-end speedup: {rollout['reference'] / rollout['native']:.2f}x")


if __name__ == "__main__":
    main()
