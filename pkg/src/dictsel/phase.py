"""Phase-transition sweeps over (delta = p/n, rho = k/m).

Trial ``t`` of cell ``c`` (cells numbered row-major over ``deltas x rhos``)
draws its problem with seed ``SeedSequence([seed, c, t]).generate_state(1)[0]``.
All constraint modes are run on the same problem, so mode comparisons are
paired.  Results are aggregated in (cell, trial) order regardless of how the
work was scheduled, so the output does not depend on ``jobs``.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datagen import gen_problem, recovery_success
from .solver import SolverConfig, select
from .sparsity import ConstraintMode, ModelParams

DEFAULT_DELTAS = (0.125, 0.25, 0.375, 0.5, 0.625, 0.75)
DEFAULT_RHOS = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
CSV_COLUMNS = ("mode", "delta", "rho", "p", "k", "trials", "successes", "rate")


def trial_seed(seed: int, cell_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, cell_index, trial]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class PhaseCell:
    delta: float
    rho: float
    p: int
    k: int
    feasible: bool


@dataclass
class PhaseGrid:
    m: int
    n: int
    L: int
    deltas: list
    rhos: list
    trials: int
    modes: list
    cells: list  # PhaseCell, row-major over deltas x rhos
    successes: dict = field(default_factory=dict)  # mode -> (len(deltas), len(rhos)) int array
    # mode -> number of objective increases seen across all trials (expected 0)
    monotone_violations: dict = field(default_factory=dict)

    def success_rate(self, mode) -> np.ndarray:
        mode = ConstraintMode(mode)
        rate = self.successes[mode] / self.trials
        for idx, cell in enumerate(self.cells):
            if not cell.feasible:
                rate[np.unravel_index(idx, rate.shape)] = np.nan
        return rate

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        shape = (len(self.deltas), len(self.rhos))
        for mode in self.modes:
            for idx, cell in enumerate(self.cells):
                if cell.feasible:
                    s = int(self.successes[mode][np.unravel_index(idx, shape)])
                    row = (self.trials, s, repr(s / self.trials))
                else:
                    row = (0, 0, "nan")
                w.writerow((mode.value, repr(cell.delta), repr(cell.rho), cell.p, cell.k) + row)
        return buf.getvalue()


def dominant_rows(grid: PhaseGrid, threshold: float = 0.5, mode=ConstraintMode.KP) -> list[int]:
    """Delta rows where ``mode``'s cells with rate >= threshold strictly contain
    the union of the other modes' cells with rate >= threshold."""
    mode = ConstraintMode(mode)
    good = {md: np.nan_to_num(grid.success_rate(md), nan=-1.0) >= threshold for md in grid.modes}
    others = [md for md in grid.modes if md is not mode]
    union = np.zeros_like(good[mode])
    for md in others:
        union |= good[md]
    rows = []
    for i in range(len(grid.deltas)):
        mine, theirs = good[mode][i], union[i]
        if np.all(mine >= theirs) and np.any(mine & ~theirs):
            rows.append(i)
    return rows


def make_cells(m, n, deltas, rhos) -> list[PhaseCell]:
    cells = []
    for d in deltas:
        for r in rhos:
            p = int(round(d * n))
            k = int(round(r * m))
            feasible = 1 <= k <= p and k < m and p < n
            cells.append(PhaseCell(float(d), float(r), p, k, feasible))
    return cells


def _run_trial(task):
    m, n, L, p, k, seed, modes, solver_kw = task
    prob = gen_problem(m, n, p, k, L, seed)
    out = []
    for mode in modes:
        cfg = SolverConfig(params=ModelParams(k, p), mode=mode, **solver_kw)
        rep = select(prob.phi, prob.Y, cfg)
        ups = int(np.count_nonzero(np.diff(rep.objective_trace) > 0))
        out.append((recovery_success(prob, rep.selected), ups))
    return out


def run_phase(
    m: int,
    n: int,
    L: int,
    deltas=DEFAULT_DELTAS,
    rhos=DEFAULT_RHOS,
    trials: int = 20,
    seed: int = 0,
    modes=tuple(ConstraintMode),
    jobs: int = 1,
    **solver_kw,
) -> PhaseGrid:
    if not deltas or not rhos:
        raise ValueError("phase grid must be nonempty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    modes = [ConstraintMode(md) for md in modes]
    cells = make_cells(m, n, deltas, rhos)
    tasks, owners = [], []
    for ci, cell in enumerate(cells):
        if not cell.feasible:
            continue
        for t in range(trials):
            tasks.append((m, n, L, cell.p, cell.k, trial_seed(seed, ci, t), modes, solver_kw))
            owners.append(ci)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        results = [_run_trial(t) for t in tasks]

    shape = (len(deltas), len(rhos))
    succ = {md: np.zeros(shape, dtype=int) for md in modes}
    ups = {md: 0 for md in modes}
    for ci, res in zip(owners, results):
        pos = np.unravel_index(ci, shape)
        for md, (ok, n_up) in zip(modes, res):
            succ[md][pos] += int(ok)
            ups[md] += n_up
    return PhaseGrid(m, n, L, list(deltas), list(rhos), trials, modes, cells, succ, ups)


def gnuplot_script(csv_name: str, mode: str) -> str:
    return (
        "set datafile separator ','\n"
        f"set title 'exact recovery rate ({mode})'\n"
        "set xlabel 'delta = p/n'\nset ylabel 'rho = k/m'\n"
        "set cbrange [0:1]\nset palette gray negative\n"
        f"plot '{csv_name}' using (strcol(1) eq '{mode}' ? $2 : 1/0):3:8 "
        "with points pt 5 ps 3 palette notitle\n"
    )
