"""Seeded synthetic dictionary-recovery problems.

Random numbers come from numpy's PCG64 generator seeded with ``seed``.  The
stream is consumed in a fixed order:

1. ``Phi``: ``m x n`` standard normals (row-major), then column-normalised;
2. ``J``: ``rng.choice(n, p, replace=False)``, sorted;
3. per-column supports: ``argsort(rng.random((p, L)), axis=0)[:k]`` indexes
   into ``J``;
4. magnitudes: ``rng.uniform(0.2, 1.0, (k, L))``;
5. signs: ``rng.random((k, L)) < 0.5`` gives ``-1``;
6. noise: ``rng.standard_normal((m, L))``, drawn only when ``noise_std > 0``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .linop import DenseDictionary
from .matio import read_matrix, write_matrix

MAG_LOW, MAG_HIGH = 0.2, 1.0


@dataclass
class PlantedProblem:
    phi: DenseDictionary
    J: np.ndarray
    X_true: np.ndarray
    Y: np.ndarray
    seed: int
    k: int
    p: int
    noise_std: float = 0.0

    @property
    def m(self):
        return self.phi.m

    @property
    def n(self):
        return self.phi.n

    @property
    def L(self):
        return self.Y.shape[1]


def gen_problem(m, n, p, k, L, seed, noise_std=0.0) -> PlantedProblem:
    if not (1 <= k <= p <= n):
        raise PreconditionError(f"need 1 <= k <= p <= n, got k={k}, p={p}, n={n}")
    if not k < m:
        raise PreconditionError(f"need k < m, got k={k}, m={m}")
    if L < 1:
        raise PreconditionError(f"need L >= 1, got L={L}")
    if noise_std < 0:
        raise PreconditionError(f"noise_std must be >= 0, got {noise_std}")

    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.standard_normal((m, n))
    phi = DenseDictionary(raw)
    J = np.sort(rng.choice(n, p, replace=False))
    rows = J[np.argsort(rng.random((p, L)), axis=0)[:k]]  # (k, L)
    mags = rng.uniform(MAG_LOW, MAG_HIGH, (k, L))
    signs = np.where(rng.random((k, L)) < 0.5, -1.0, 1.0)

    X = np.zeros((n, L))
    X[rows, np.arange(L)[None, :]] = mags * signs
    Y = phi.matrix @ X
    if noise_std > 0:
        Y = Y + noise_std * rng.standard_normal((m, L))
    return PlantedProblem(phi, J, X, Y, seed, k, p, float(noise_std))


def recovery_success(problem: PlantedProblem, selected) -> bool:
    sel = np.sort(np.asarray(list(selected), dtype=int))
    return sel.shape == problem.J.shape and bool(np.all(sel == problem.J))


def write_problem(out_dir: str | os.PathLike, problem: PlantedProblem) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "phi.txt", problem.phi.matrix)
    write_matrix(out / "Y.txt", problem.Y)
    write_matrix(out / "Xtrue.txt", problem.X_true)
    meta = {
        "m": problem.m,
        "n": problem.n,
        "p": problem.p,
        "k": problem.k,
        "L": problem.L,
        "seed": problem.seed,
        "noise_std": repr(problem.noise_std),
        "J": ",".join(str(j) for j in problem.J.tolist()),
    }
    (out / "meta.txt").write_text("".join(f"{key}={val}\n" for key, val in meta.items()))


def read_meta(path: str | os.PathLike) -> dict:
    meta = {}
    for line in Path(path).read_text().splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            key, _, val = line.partition("=")
            meta[key.strip()] = val.strip()
    return meta


def read_problem(in_dir: str | os.PathLike) -> PlantedProblem:
    d = Path(in_dir)
    meta = read_meta(d / "meta.txt")
    J = np.array([int(v) for v in meta["J"].split(",") if v], dtype=int)
    return PlantedProblem(
        phi=DenseDictionary(read_matrix(d / "phi.txt"), normalize=False),
        J=J,
        X_true=read_matrix(d / "Xtrue.txt"),
        Y=read_matrix(d / "Y.txt"),
        seed=int(meta["seed"]),
        k=int(meta["k"]),
        p=int(meta["p"]),
        noise_std=float(meta["noise_std"]),
    )
