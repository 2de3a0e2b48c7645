"""Seeded statistical experiments tying chains to projections.

Everything is driven by a plain-text config with a mandatory seed; each
trajectory draws from its own counter-based stream, so outputs are
byte-identical across runs.  Walk/projection coupling is done incrementally:
an AxisTracker maintains the reduced word and its overlap with an axis line,
making the per-step projection distance O(1) amortized instead of a fresh
projection per step.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chains import InvariantKernel, MarkovKernel, branch_swap, push_forward, srw, trajectory_rng
from .groups import FreeGroup, GroupError, GroupModel, Word, ball, model_from_descriptor, parse_word
from .projections import Axis, _line_data, axis_of, coset_distance, enumerate_cosets
from .spaces import CayleyTree, OrbitMap, identity_orbit


class ExperimentError(ValueError):
    """Invalid experiment configuration."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "F2"
    kernel: str = "srw"
    g: str = "a"
    threshold: int = 4
    c_grid: tuple[float, ...] = (4.0,)
    n_grid: tuple[int, ...] = (50, 100, 200, 400)
    samples: int = 1000
    seed: int | None = None
    window_cap: int = 10

    def require_seed(self) -> int:
        if self.seed is None:
            raise ExperimentError("stochastic experiments require an explicit seed")
        return self.seed

    def to_text(self) -> str:
        return (
            f"model = {self.model}\n"
            f"kernel = {self.kernel}\n"
            f"g = {self.g}\n"
            f"T = {self.threshold}\n"
            f"C = {','.join(str(c) for c in self.c_grid)}\n"
            f"n = {','.join(str(n) for n in self.n_grid)}\n"
            f"samples = {self.samples}\n"
            f"seed = {self.seed}\n"
            f"window_cap = {self.window_cap}\n"
        )

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Key = value lines; '#' starts a comment; overrides win."""
    values: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExperimentError(f"bad config line {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    cfg = ExperimentConfig()
    mapping = {
        "model": ("model", str),
        "kernel": ("kernel", str),
        "g": ("g", str),
        "T": ("threshold", int),
        "C": ("c_grid", lambda s: tuple(float(x) for x in s.split(","))),
        "n": ("n_grid", lambda s: tuple(int(x) for x in s.split(","))),
        "samples": ("samples", int),
        "seed": ("seed", lambda s: None if s == "None" else int(s)),
        "window_cap": ("window_cap", int),
    }
    for key, val in values.items():
        if key not in mapping:
            raise ExperimentError(f"unknown config key {key!r}")
        attr, conv = mapping[key]
        cfg = replace(cfg, **{attr: conv(val)})
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def resolve_kernel(model: GroupModel, spec: str) -> MarkovKernel:
    if spec == "srw":
        return srw(model)
    if spec.startswith("lazy:"):
        return srw(model, stay=Fraction(spec.split(":", 1)[1]))
    if spec == "srw-branch-swap":
        if not isinstance(model, FreeGroup):
            raise ExperimentError("branch-swap push-forward needs a free group")
        return push_forward(srw(model), branch_swap(model))
    raise ExperimentError(f"unknown kernel spec {spec!r}")


def resolve_setup(config: ExperimentConfig) -> tuple[GroupModel, OrbitMap, MarkovKernel, Axis]:
    model = model_from_descriptor(config.model)
    if not isinstance(model, FreeGroup):
        raise ExperimentError("experiments are shipped for free-group Cayley trees")
    tree = CayleyTree(model)
    orbit = identity_orbit(tree)
    kernel = resolve_kernel(model, config.kernel)
    axis = axis_of(tree, parse_word(model, config.g))
    return model, orbit, kernel, axis


# ---------------------------------------------------------------------------
# fast coupled walks


class AxisTracker:
    """Incrementally tracked projection of a walking word onto an axis line.

    Maintains the reduced letters of anchor^-1 * w and the overlap lengths
    with the two line directions; pushes and pops are O(1), and the nearest
    coset positions follow from the overlap and the coset phase.
    """

    def __init__(self, model: GroupModel, axis: Axis, start: Word):
        self.model = model
        anchor, direction, phase = _line_data(model, axis.root.letters, axis.rep.letters)
        self.q = len(direction)
        self.dir = direction
        self.phase = phase
        self.stack = list((anchor.inverse() * start).letters)
        self.fwd = 0
        while self.fwd < len(self.stack) and self.stack[self.fwd] == direction[self.fwd % self.q]:
            self.fwd += 1
        self.bwd = 0
        while self.bwd < len(self.stack) and self.stack[self.bwd] == -direction[(-1 - self.bwd) % self.q]:
            self.bwd += 1

    def push(self, letter: int) -> None:
        if self.stack and self.stack[-1] == -letter:
            self.stack.pop()
            n = len(self.stack)
            self.fwd = min(self.fwd, n)
            self.bwd = min(self.bwd, n)
            return
        n = len(self.stack)
        self.stack.append(letter)
        if self.fwd == n and letter == self.dir[n % self.q]:
            self.fwd += 1
        if self.bwd == n and letter == -self.dir[(-1 - n) % self.q]:
            self.bwd += 1

    def positions(self) -> tuple[int, ...]:
        """Positions of the nearest coset points along the line."""
        t_star = self.fwd if self.fwd > 0 else -self.bwd
        m0 = t_star - ((t_star - self.phase) % self.q)
        m1 = m0 + self.q
        d0, d1 = t_star - m0, m1 - t_star
        if d0 < d1:
            return (m0,)
        if d1 < d0:
            return (m1,)
        return (m0, m1)

    def spread_against(self, base: tuple[int, ...]) -> int:
        pos = self.positions() + base
        return max(pos) - min(pos)

    def differs_from(self, base: tuple[int, ...]) -> bool:
        return self.positions() != base


class FreeWalk:
    """Letter-stack walk matching InvariantKernel.step increments exactly."""

    def __init__(self, kernel: InvariantKernel, start: Word, seed: int, index: int):
        if not isinstance(kernel.model, FreeGroup):
            raise ExperimentError("fast walks require a free group")
        self.kernel = kernel
        self.increments = [s.letters for s, _ in kernel.measure]
        self.cum = kernel._measure_cum()
        self.stack = list(start.letters)
        self.rng = trajectory_rng(seed, index)
        self.trackers: list[AxisTracker] = []

    def attach(self, tracker: AxisTracker) -> None:
        self.trackers.append(tracker)

    def steps(self, count: int) -> None:
        us = self.rng.random(count)
        for u in us:
            idx = min(int(np.searchsorted(self.cum, u, side="right")), len(self.increments) - 1)
            for letter in self.increments[idx]:
                if self.stack and self.stack[-1] == -letter:
                    self.stack.pop()
                else:
                    self.stack.append(letter)
                for tr in self.trackers:
                    tr.push(letter)

    @property
    def radius(self) -> int:
        return len(self.stack)

    def word(self) -> Word:
        return Word(self.kernel.model, tuple(self.stack))


def _base_positions(model: GroupModel, axis: Axis, p: Word) -> tuple[int, ...]:
    return tuple(AxisTracker(model, axis, p).positions())


# ---------------------------------------------------------------------------
# drift oracle


def drift_oracle_free_srw(n: int, rank: int = 2) -> float:
    """Exact expected distance-to-start rate of the SRW on a free group.

    Radial birth-death dynamic programming: from radius r >= 1 the walk
    moves out with probability (2k-1)/2k and in with probability 1/2k.
    """
    deg = 2 * rank
    up, down = (deg - 1) / deg, 1 / deg
    probs = np.zeros(n + 1)
    probs[0] = 1.0
    for _ in range(n):
        nxt = np.zeros_like(probs)
        nxt[1] += probs[0]
        nxt[2:] += probs[1:-1] * up
        nxt[0:-2] += probs[1:-1] * down
        nxt[-1] += probs[-1]  # absorbing guard; never reached for steps < n
        probs = nxt
    return float(np.dot(probs, np.arange(n + 1))) / n


# ---------------------------------------------------------------------------
# linear progress


@dataclass(frozen=True)
class ProgressRow:
    n: int
    c: float
    probability: float
    std_error: float
    successes: int


@dataclass(frozen=True)
class FailureFit:
    slope: float | None
    r_squared: float | None
    cells_used: int
    excluded: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class ProgressResult:
    config: ExperimentConfig
    rows: tuple[ProgressRow, ...]
    drifts: tuple[tuple[int, float], ...]
    fit: FailureFit

    def csv(self) -> str:
        lines = [
            f"# config={self.config.digest()} seed={self.config.seed} version=0.1.0",
            "n,C,probability,std_error,successes,samples",
        ]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.c:.10g},{r.probability:.10g},{r.std_error:.10g},{r.successes},{self.config.samples}"
            )
        return "\n".join(lines) + "\n"


def _fit_log_linear(points: list[tuple[int, float]]) -> tuple[float, float] | None:
    if len(points) < 2:
        return None
    xs = np.array([n for n, _ in points], dtype=float)
    ys = np.log([v for _, v in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def linear_progress_experiment(config: ExperimentConfig) -> ProgressResult:
    """Monte Carlo estimates of P[d_X(o, w_n) >= n/C] with one shared
    trajectory ensemble recorded at the n-grid checkpoints."""
    seed = config.require_seed()
    model, orbit, kernel, _ = resolve_setup(config)
    grid = sorted(config.n_grid)
    n_max = grid[-1]
    dists = np.zeros((config.samples, len(grid)), dtype=np.int64)
    if isinstance(kernel, InvariantKernel):
        for i in range(config.samples):
            walk = FreeWalk(kernel, model.identity(), seed, i)
            prev = 0
            for j, n in enumerate(grid):
                walk.steps(n - prev)
                prev = n
                dists[i, j] = walk.radius
    else:
        from .chains import simulate

        for i in range(config.samples):
            traj = simulate(kernel, model.identity(), n_max, seed, index=i)
            for j, n in enumerate(grid):
                dists[i, j] = len(traj.states[n])
    rows = []
    for j, n in enumerate(grid):
        col = dists[:, j]
        for c in config.c_grid:
            hits = int(np.sum(col >= n / c))
            p_hat = hits / config.samples
            se = math.sqrt(max(p_hat * (1 - p_hat), 1e-12) / config.samples)
            rows.append(ProgressRow(n, c, p_hat, se, hits))
    drifts = tuple((n, float(dists[:, j].mean()) / n) for j, n in enumerate(grid))
    # failure-probability decay, cells with at least 10 failures
    fit_cells = []
    excluded = []
    for r in rows:
        failures = config.samples - r.successes
        if failures >= 10:
            fit_cells.append((r.n, failures / config.samples))
        else:
            excluded.append((r.n, r.c))
    fitted = _fit_log_linear(fit_cells)
    fit = FailureFit(
        fitted[0] if fitted else None,
        fitted[1] if fitted else None,
        len(fit_cells),
        tuple(excluded),
    )
    return ProgressResult(config, tuple(rows), drifts, fit)


# ---------------------------------------------------------------------------
# bounded projections


@dataclass(frozen=True)
class BoundedProjectionResult:
    config: ExperimentConfig
    cells: tuple[tuple[Word, Word], ...]
    n_list: tuple[int, ...]
    bound: float
    table: dict
    min_probability: float

    def csv(self) -> str:
        lines = [
            f"# config={self.config.digest()} seed={self.config.seed} version=0.1.0",
            "cell,p,h,n,probability",
        ]
        for (ci, n), prob in sorted(self.table.items()):
            p, h = self.cells[ci]
            lines.append(f"{ci},{p},{h},{n},{prob:.10g}")
        return "\n".join(lines) + "\n"


def default_projection_cells(config: ExperimentConfig, count: int = 20) -> list[tuple[Word, Word]]:
    model, orbit, _, axis = resolve_setup(config)
    rng = np.random.default_rng(config.require_seed() ^ 0x9E3779B9)
    starts = ball(model, model.identity(), 2)
    shifts = ball(model, model.identity(), 4)
    cells: list[tuple[Word, Word]] = []
    seen = set()
    while len(cells) < count:
        p = starts[int(rng.integers(len(starts)))]
        h = shifts[int(rng.integers(len(shifts)))]
        key = (p.letters, axis.translate(h).rep.letters)
        if key in seen:
            continue
        seen.add(key)
        cells.append((p, h))
    return cells


def bounded_projection_experiment(
    config: ExperimentConfig,
    cells: Sequence[tuple[Word, Word]] | None = None,
    n_list: Sequence[int] | None = None,
    bound: float = 2.0,
) -> BoundedProjectionResult:
    """Per-cell probability that the walk's projection stays near its start.

    Each cell fixes a start p and a coset translate h; the estimated quantity
    is P[d_{h<root>}(p, w_n) <= bound] for every n in the grid, re-using one
    ensemble per cell via checkpoints.
    """
    seed = config.require_seed()
    model, orbit, kernel, axis = resolve_setup(config)
    if not isinstance(kernel, InvariantKernel):
        raise ExperimentError("bounded-projection experiment needs an invariant kernel")
    if cells is None:
        cells = default_projection_cells(config)
    ns = tuple(sorted(n_list if n_list is not None else (10, 25, 50, 100, 200)))
    table: dict = {}
    for ci, (p, h) in enumerate(cells):
        cell_axis = axis.translate(h)
        base = _base_positions(model, cell_axis, p)
        hits = np.zeros(len(ns), dtype=np.int64)
        for i in range(config.samples):
            walk = FreeWalk(kernel, p, seed + 1000 * ci, i)
            tracker = AxisTracker(model, cell_axis, p)
            walk.attach(tracker)
            prev = 0
            for j, n in enumerate(ns):
                walk.steps(n - prev)
                prev = n
                if tracker.spread_against(base) <= bound:
                    hits[j] += 1
        for j, n in enumerate(ns):
            table[(ci, n)] = hits[j] / config.samples
    min_prob = min(table.values())
    return BoundedProjectionResult(config, tuple(cells), ns, bound, table, float(min_prob))


# ---------------------------------------------------------------------------
# tail curves


@dataclass(frozen=True)
class TailCurve:
    config: ExperimentConfig
    o: Word
    p: Word
    n: int
    t_values: tuple[int, ...]
    g_counts: tuple[int, ...]
    f_counts: tuple[int, ...]
    samples: int
    c_fit: float | None
    c_envelope: float | None
    c_prime: float | None

    def g(self) -> np.ndarray:
        return np.array(self.g_counts) / self.samples

    def f(self) -> np.ndarray:
        return np.array(self.f_counts) / self.samples

    def envelope_ok(self, min_successes: int = 10) -> bool:
        if self.c_prime is None:
            return False
        g = self.g()
        for t, cnt in zip(self.t_values, self.g_counts):
            if cnt >= min_successes and g[t] > 2 * math.exp(-t / self.c_prime) + 1e-12:
                return False
        return True

    def csv(self) -> str:
        lines = [
            f"# config={self.config.digest()} seed={self.config.seed} version=0.1.0 "
            f"o={self.o} p={self.p} n={self.n} Cprime={self.c_prime}",
            "t,g,f,g_count,f_count,samples",
        ]
        g, f = self.g(), self.f()
        for t in self.t_values:
            lines.append(
                f"{t},{g[t]:.10g},{f[t]:.10g},{self.g_counts[t]},{self.f_counts[t]},{self.samples}"
            )
        return "\n".join(lines) + "\n"


def tail_experiment(
    config: ExperimentConfig,
    o: Word | None = None,
    p: Word | None = None,
    n: int = 200,
    t_max: int | None = None,
) -> TailCurve:
    """Estimate g(t) = P[some partial sum >= t] and f(t) = P[final sum >= t].

    Both curves are computed on the same trajectory ensemble, so the
    containment g >= f holds exactly sample-by-sample.  The reported C' is
    the larger of the least-squares decay fit of g and the minimal constant
    making the 2 exp(-t/C') envelope hold at every cell with enough
    successes.
    """
    seed = config.require_seed()
    model, orbit, kernel, axis = resolve_setup(config)
    if not isinstance(kernel, InvariantKernel):
        raise ExperimentError("tail experiment needs an invariant kernel")
    if o is None:
        o = model.identity()
    if p is None:
        p = parse_word(model, "b a^5 b")
    record = enumerate_cosets(orbit, parse_word(model, config.g), o, p, config.threshold)
    if not record.certified:
        raise ExperimentError("coset enumeration must be certified for tail sums")
    axes = [e.axis for e in record.entries]
    bases = [_base_positions(model, ax, p) for ax in axes]
    if t_max is None:
        t_max = 3 * n // 4
    g_counts = np.zeros(t_max + 1, dtype=np.int64)
    f_counts = np.zeros(t_max + 1, dtype=np.int64)
    for i in range(config.samples):
        walk = FreeWalk(kernel, p, seed, i)
        trackers = [AxisTracker(model, ax, p) for ax in axes]
        for tr in trackers:
            walk.attach(tr)
        running_max = 0
        final = 0
        for _ in range(n):
            walk.steps(1)
            total = 0
            for tr, base in zip(trackers, bases):
                if tr.differs_from(base):
                    total += tr.spread_against(base)
            running_max = max(running_max, total)
            final = total
        g_counts[: min(running_max, t_max) + 1] += 1
        f_counts[: min(final, t_max) + 1] += 1
    g_hat = g_counts / config.samples
    fit_pts = [(t, g_hat[t]) for t in range(1, t_max + 1) if g_counts[t] >= 10]
    fitted = _fit_log_linear(fit_pts)
    c_fit = -1.0 / fitted[0] if fitted and fitted[0] < 0 else None
    c_env = None
    env_candidates = [
        t / math.log(2 / g_hat[t]) for t, _ in fit_pts if g_hat[t] < 2
    ]
    if env_candidates:
        c_env = max(env_candidates)
    c_prime: float | None
    if c_fit is not None and c_env is not None:
        c_prime = max(c_fit, c_env)
    else:
        c_prime = c_fit if c_fit is not None else c_env
    return TailCurve(
        config,
        o,
        p,
        n,
        tuple(range(t_max + 1)),
        tuple(int(x) for x in g_counts),
        tuple(int(x) for x in f_counts),
        config.samples,
        c_fit,
        c_env,
        c_prime,
    )


# ---------------------------------------------------------------------------
# recursion check


@dataclass(frozen=True)
class RecursionVerdict:
    t: int
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class RecursionReport:
    verdicts: tuple[RecursionVerdict, ...]
    implied_c: float | None
    fitted_c: float | None

    @property
    def pass_fraction(self) -> float:
        if not self.verdicts:
            return 1.0
        return sum(v.passed for v in self.verdicts) / len(self.verdicts)


def recursion_check(curve: TailCurve, gap: int, eps: float) -> RecursionReport:
    """Check eps * g(t) <= f(t - gap) - f(t + gap) at 95% confidence per t.

    The implied decay constant 2*gap / log(1 + eps) is reported next to the
    curve's fitted constant.
    """
    if gap < 1:
        raise ExperimentError("gap must be >= 1")
    ts = [t for t in curve.t_values if t - gap >= 0 and t + gap <= curve.t_values[-1]]
    if not ts:
        raise ExperimentError("curve does not cover [t - gap, t + gap]")
    g, f = curve.g(), curve.f()
    nsamp = curve.samples
    verdicts = []
    for t in ts:
        lhs = eps * g[t]
        rhs = f[t - gap] - f[t + gap]
        se_lhs = eps * math.sqrt(max(g[t] * (1 - g[t]), 0) / nsamp)
        se_rhs = math.sqrt(
            max(f[t - gap] * (1 - f[t - gap]), 0) / nsamp
            + max(f[t + gap] * (1 - f[t + gap]), 0) / nsamp
        )
        passed = lhs <= rhs + 1.96 * (se_lhs + se_rhs)
        verdicts.append(RecursionVerdict(t, float(lhs), float(rhs), bool(passed)))
    implied = 2 * gap / math.log(1 + eps) if eps > 0 else None
    return RecursionReport(tuple(verdicts), implied, curve.c_prime)
