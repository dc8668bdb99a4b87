"""Euler-Maruyama Monte Carlo for the log price.

    Y_{n+1} = Y_n - 1/2 v(Y_n) dt + sqrt(v(Y_n) dt) Z_n,   v = a^2 + eps eta(Y)

Random numbers: numpy's Philox4x64 counter-based generator.  Paths are cut
into fixed-size chunks and chunk c draws from SeedSequence(seed).spawn(...)[c],
so estimates depend on (seed, chunk_size) but not on the worker count.
Several eps values can be driven by the same normals (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

DEFAULT_CHUNK = 1 << 15


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 200_000
    dt: float = 1e-3
    seed: int = 12345
    antithetic: bool = True
    chunk_size: int = DEFAULT_CHUNK
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 100:
            raise ValueError("n_paths must be at least 100")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.antithetic and self.chunk_size % 2:
            raise ValueError("chunk_size must be even with antithetic sampling")


@dataclass
class McEstimate:
    price: float
    std_error: float
    n_paths: int
    dt: float
    seed: int


def _chunks(cfg):
    sizes = []
    left = cfg.n_paths
    while left > 0:
        sizes.append(min(cfg.chunk_size, left))
        left -= sizes[-1]
    if cfg.antithetic:
        sizes = [s + (s % 2) for s in sizes]
    seqs = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    return list(zip(sizes, seqs))


def _n_steps(t, dt):
    if dt > t * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds maturity {t}")
    return max(1, int(round(t / dt)))


def _run_chunk(a, y, t, n_steps, eps_values, eta, antithetic, size, seq):
    rng = np.random.Generator(np.random.Philox(seq))
    dt = t / n_steps
    sq = math.sqrt(dt)
    a2 = a * a
    ys = np.full((len(eps_values), size), float(y))
    eps_col = np.asarray(eps_values, dtype=float)[:, None]
    half = size // 2
    for _ in range(n_steps):
        if antithetic:
            z = rng.standard_normal(half)
            z = np.concatenate([z, -z])
        else:
            z = rng.standard_normal(size)
        v = a2 + eps_col * eta(ys)
        ys += -0.5 * v * dt + np.sqrt(v) * (sq * z)
    return ys


def simulate_terminal(params, t, cfg, eps_values=None, eta=None):
    """Terminal log prices, shape (len(eps_values), n_paths).

    With antithetic sampling each chunk stores its base paths first and their
    mirrored partners second.
    """
    if eps_values is None:
        eps_values = [params.eps]
    if eta is None:
        beta = params.beta

        def eta(x):
            return np.exp(beta * x)

    n_steps = _n_steps(t, cfg.dt)
    jobs = _chunks(cfg)

    def run(job):
        size, seq = job
        return _run_chunk(params.a, params.y, t, n_steps, eps_values, eta,
                          cfg.antithetic, size, seq)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return parts, cfg.antithetic


def _samples(values_parts, antithetic):
    """Per-path (or per-antithetic-pair) samples in fixed chunk order."""
    out = []
    for v in values_parts:
        if antithetic:
            h = v.shape[-1] // 2
            out.append(0.5 * (v[..., :h] + v[..., h:]))
        else:
            out.append(v)
    return np.concatenate(out, axis=-1)


def _estimate(samples, cfg):
    n = samples.shape[-1]
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(n))
    return McEstimate(mean, se, cfg.n_paths, cfg.dt, cfg.seed)


def simulate_calls(params, t, ks, cfg, eta=None):
    """Call estimates for several log strikes from one set of paths."""
    parts, anti = simulate_terminal(params, t, cfg, eta=eta)
    res = []
    for k in ks:
        pay = [np.maximum(np.exp(p[0]) - math.exp(k), 0.0) for p in parts]
        res.append(_estimate(_samples(pay, anti), cfg))
    return res


def simulate_call(params, t, k, cfg, eta=None):
    return simulate_calls(params, t, [k], cfg, eta=eta)[0]


def martingale_check(params, t, cfg):
    """Estimate of E[e^{Y_t}], which should equal e^y."""
    parts, anti = simulate_terminal(params, t, cfg)
    return _estimate(_samples([np.exp(p[0]) for p in parts], anti), cfg)


def eps_sensitivity(params, t, k, cfg, d_eps, eta=None):
    """(C(eps + d_eps) - C(eps)) / d_eps with common random numbers."""
    if not d_eps > 0:
        raise ValueError("d_eps must be positive")
    if params.eps > 0 and d_eps > params.eps:
        raise ValueError("d_eps must not exceed eps")
    parts, anti = simulate_terminal(
        params, t, cfg, eps_values=[params.eps, params.eps + d_eps], eta=eta
    )
    diff = [
        (np.maximum(np.exp(p[1]) - math.exp(k), 0.0)
         - np.maximum(np.exp(p[0]) - math.exp(k), 0.0)) / d_eps
        for p in parts
    ]
    return _estimate(_samples(diff, anti), cfg)
