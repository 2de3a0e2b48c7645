"""Markov chains with bounded jumps on group models, and bijective QIs.

Kernels come in three flavours: group-invariant step laws (random walks),
push-forwards of a kernel through a bijective quasi-isometry, and local rules
(a bounded-radius state classifier choosing among finitely many step laws).
Transition probabilities are exact fractions; sampling converts the ordered
cumulative law to floats once, and every trajectory draws from its own
counter-based stream, so runs are reproducible independently of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import FreeGroup, GroupError, GroupModel, Word, ball, word_distance


class ChainError(ValueError):
    """Invalid kernel construction or query."""


class WitnessError(ChainError):
    """No symmetry witness constructor applies to the chain."""


# ---------------------------------------------------------------------------
# bijective quasi-isometries


class BijectiveQI:
    """Base class for the shipped bijective self-quasi-isometries."""

    model: GroupModel
    claimed_nu: float

    def apply(self, w: Word) -> Word:
        raise NotImplementedError

    def inverse(self) -> "BijectiveQI":
        raise NotImplementedError

    def __call__(self, w: Word) -> Word:
        return self.apply(w)

    def check_bijective(self, radius: int = 4) -> bool:
        pts = ball(self.model, self.model.identity(), radius)
        images = [self.apply(w) for w in pts]
        if len(set(images)) != len(images):
            return False
        inv = self.inverse()
        return all(inv.apply(img) == w for w, img in zip(pts, images))

    def measured_qi_constants(self, radius: int = 4) -> float:
        """Smallest nu with d/nu - nu <= d(images) <= nu*d + nu on the ball."""
        pts = ball(self.model, self.model.identity(), radius)
        nu = 1.0
        for i in range(len(pts)):
            fi = self.apply(pts[i])
            for j in range(i + 1, len(pts)):
                d = word_distance(self.model, pts[i], pts[j])
                fd = word_distance(self.model, fi, self.apply(pts[j]))
                if fd > d:
                    # need nu*d + nu >= fd
                    nu = max(nu, fd / (d + 1))
                if fd < d:
                    # need d/nu - nu <= fd, i.e. nu^2 + fd*nu - d >= 0
                    nu = max(nu, (-fd + (fd * fd + 4 * d) ** 0.5) / 2)
        return nu


@dataclass(frozen=True)
class LeftTranslation(BijectiveQI):
    model: GroupModel
    g: Word
    claimed_nu: float = 1.0

    def apply(self, w: Word) -> Word:
        return self.g * w

    def inverse(self) -> "LeftTranslation":
        return LeftTranslation(self.model, self.g.inverse())


@dataclass(frozen=True)
class GeneratorPermutation(BijectiveQI):
    """An automorphism permuting the standard generators (free/abelian only)."""

    model: GroupModel
    images: tuple[int, ...]  # images[i] = signed letter that generator i+1 maps to
    claimed_nu: float = 1.0

    def __post_init__(self):
        if sorted(abs(i) for i in self.images) != list(range(1, self.model.rank + 1)):
            raise ChainError("generator images must form a signed permutation")

    def apply(self, w: Word) -> Word:
        out = tuple(
            self.images[ell - 1] if ell > 0 else -self.images[-ell - 1] for ell in w.letters
        )
        return Word(self.model, self.model.normalize(out))

    def inverse(self) -> "GeneratorPermutation":
        inv = [0] * self.model.rank
        for i, img in enumerate(self.images):
            inv[abs(img) - 1] = (i + 1) if img > 0 else -(i + 1)
        return GeneratorPermutation(self.model, tuple(inv))


@dataclass(frozen=True)
class FiniteSwap(BijectiveQI):
    """Transposes finitely many explicit element pairs, identity elsewhere.

    A bounded-displacement bijection; it is (1, 2*max displacement)-quasi
    isometric and acts as the identity at infinity.
    """

    model: GroupModel
    pairs: tuple[tuple[Word, Word], ...]

    def __post_init__(self):
        seen: set = set()
        for a, b in self.pairs:
            if a == b or a in seen or b in seen:
                raise ChainError("swap table entries must be disjoint")
            seen.add(a)
            seen.add(b)

    @property
    def claimed_nu(self) -> float:  # type: ignore[override]
        disp = max(word_distance(self.model, a, b) for a, b in self.pairs)
        return 1 + 2 * disp

    @property
    def displacement(self) -> int:
        return max(word_distance(self.model, a, b) for a, b in self.pairs)

    def apply(self, w: Word) -> Word:
        for a, b in self.pairs:
            if w == a:
                return b
            if w == b:
                return a
        return w

    def inverse(self) -> "FiniteSwap":
        return self


@dataclass(frozen=True)
class CompositionQI(BijectiveQI):
    """parts[0] applied last (usual composition order)."""

    model: GroupModel
    parts: tuple[BijectiveQI, ...]

    @property
    def claimed_nu(self) -> float:  # type: ignore[override]
        nu = 1.0
        for p in self.parts:
            nu = nu * p.claimed_nu + p.claimed_nu
        return nu

    def apply(self, w: Word) -> Word:
        for p in reversed(self.parts):
            w = p.apply(w)
        return w

    def inverse(self) -> "CompositionQI":
        return CompositionQI(self.model, tuple(p.inverse() for p in reversed(self.parts)))


@dataclass(frozen=True)
class BranchSwap(BijectiveQI):
    """Transposes the subtrees of words starting with two positive generators.

    The depth-1 table {i <-> j} is repeated equivariantly below the swapped
    vertices: a word i*u maps to j*sigma(u), with sigma the letterwise
    relabel i <-> j.  This is a tree automorphism of the Cayley tree, hence
    an exact isometry, but neither a translation nor a group automorphism
    (words starting with an inverse generator are fixed).
    """

    model: FreeGroup
    i: int = 1
    j: int = 2
    claimed_nu: float = 1.0

    def __post_init__(self):
        if not isinstance(self.model, FreeGroup):
            raise ChainError("branch swaps live on free groups")
        if self.i == self.j or min(self.i, self.j) < 1 or max(self.i, self.j) > self.model.rank:
            raise ChainError("branch swap needs two distinct positive generators")

    def _sigma(self, letters: tuple[int, ...]) -> tuple[int, ...]:
        table = {self.i: self.j, self.j: self.i, -self.i: -self.j, -self.j: -self.i}
        return tuple(table.get(l, l) for l in letters)

    def apply(self, w: Word) -> Word:
        ls = w.letters
        if ls and ls[0] in (self.i, self.j):
            head = self.j if ls[0] == self.i else self.i
            return Word(self.model, (head,) + self._sigma(ls[1:]))
        return w

    def inverse(self) -> "BranchSwap":
        return self


def branch_swap(model: FreeGroup, i: int = 1, j: int = 2) -> BranchSwap:
    """Depth-1 branch swap transposing the subtrees of generators i and j."""
    return BranchSwap(model, i, j)


# ---------------------------------------------------------------------------
# kernels


class MarkovKernel:
    """Base: a step law per state, with jumps contained in a finite set."""

    model: GroupModel

    def law(self, state: Word) -> list[tuple[Word, Fraction]]:
        """Ordered (target, probability) pairs; probabilities sum to 1."""
        raise NotImplementedError

    def jump_bound(self, radius: int = 3) -> int:
        """Max jump length over a sample window of states."""
        best = 0
        for st in ball(self.model, self.model.identity(), radius):
            for tgt, _ in self.law(st):
                best = max(best, word_distance(self.model, st, tgt))
        return best

    def law_dict(self, state: Word) -> dict[Word, Fraction]:
        out: dict[Word, Fraction] = {}
        for tgt, pr in self.law(state):
            out[tgt] = out.get(tgt, Fraction(0)) + pr
        return out

    def _cumulative(self, state: Word):
        pairs = self.law(state)
        cum = np.cumsum([float(p) for _, p in pairs])
        cum[-1] = 1.0
        return pairs, cum

    def step(self, state: Word, u: float) -> Word:
        pairs, cum = self._cumulative(state)
        idx = int(np.searchsorted(cum, u, side="right"))
        idx = min(idx, len(pairs) - 1)
        return pairs[idx][0]


@dataclass(frozen=True)
class InvariantKernel(MarkovKernel):
    """Group-invariant chain: one fixed measure on an ordered jump set."""

    model: GroupModel
    measure: tuple[tuple[Word, Fraction], ...]

    def __post_init__(self):
        total = sum(p for _, p in self.measure)
        if total != 1:
            raise ChainError(f"step measure sums to {total}, not 1")
        if any(p < 0 for _, p in self.measure):
            raise ChainError("negative probability")

    @property
    def jump_set(self) -> tuple[Word, ...]:
        return tuple(s for s, _ in self.measure)

    def law(self, state: Word) -> list[tuple[Word, Fraction]]:
        return [(state * s, p) for s, p in self.measure]

    def step(self, state: Word, u: float) -> Word:
        # inverse-CDF over the ordered jump set: the chosen increment does not
        # depend on the state, which makes invariance exact pathwise
        cum = self._measure_cum()
        idx = min(int(np.searchsorted(cum, u, side="right")), len(self.measure) - 1)
        return state * self.measure[idx][0]

    def _measure_cum(self):
        cum = getattr(self, "_cum_cache", None)
        if cum is None:
            cum = np.cumsum([float(p) for _, p in self.measure])
            cum[-1] = 1.0
            object.__setattr__(self, "_cum_cache", cum)
        return cum


def make_invariant(model: GroupModel, weights: dict[Word, Fraction]) -> InvariantKernel:
    items = sorted(weights.items(), key=lambda kv: kv[0].sort_key())
    return InvariantKernel(model, tuple(items))


def srw(model: GroupModel, stay: Fraction = Fraction(0)) -> InvariantKernel:
    """Simple random walk, uniform on generators and inverses; optional laziness."""
    gens = []
    for g in model.generators():
        gens.extend([g, g.inverse()])
    move = (1 - stay) / len(gens)
    weights = {s: move for s in gens}
    if stay:
        weights[model.identity()] = stay
    return make_invariant(model, weights)


@dataclass(frozen=True)
class PushForwardKernel(MarkovKernel):
    """Image of a chain under a bijective QI: q(g, h) = p(f^-1 g, f^-1 h)."""

    base: MarkovKernel
    qi: BijectiveQI

    def __post_init__(self):
        if not self.qi.check_bijective(3):
            raise ChainError("push-forward map is not bijective on the check window")

    @property
    def model(self) -> GroupModel:  # type: ignore[override]
        return self.base.model

    def law(self, state: Word) -> list[tuple[Word, Fraction]]:
        src = self.qi.inverse().apply(state)
        out: dict[Word, Fraction] = {}
        order: list[Word] = []
        for tgt, p in self.base.law(src):
            img = self.qi.apply(tgt)
            if img not in out:
                out[img] = Fraction(0)
                order.append(img)
            out[img] += p
        return [(t, out[t]) for t in order]


@dataclass(frozen=True)
class LocalRuleKernel(MarkovKernel):
    """State-classified chain: a bounded-radius classifier picks the law."""

    model: GroupModel
    classifier: Callable[[Word], object]
    table: tuple[tuple[object, tuple[tuple[Word, Fraction], ...]], ...]

    def law(self, state: Word) -> list[tuple[Word, Fraction]]:
        key = self.classifier(state)
        for k, measure in self.table:
            if k == key:
                return [(state * s, p) for s, p in measure]
        raise ChainError(f"classifier produced unknown key {key!r}")


def push_forward(kernel: MarkovKernel, qi: BijectiveQI) -> PushForwardKernel:
    """Push a chain through a bijective QI; jump bound re-verified on a window."""
    out = PushForwardKernel(kernel, qi)
    out.jump_bound(2)  # raises early if the law machinery is inconsistent
    return out


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    seed: int
    index: int
    start: Word
    states: tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.states) - 1

    def validate(self, kernel: MarkovKernel) -> bool:
        for s, t in zip(self.states, self.states[1:]):
            if all(p == 0 or tgt != t for tgt, p in kernel.law(s)):
                return False
        return True

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "seed": self.seed,
                "index": self.index,
                "start": str(self.start),
                "n": len(self),
                "states": [str(s) for s in self.states],
            }
        )


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based per-trajectory stream: independent of scheduling order."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def simulate(kernel: MarkovKernel, start: Word, n: int, seed: int, index: int = 0) -> Trajectory:
    rng = trajectory_rng(seed, index)
    us = rng.random(n)
    states = [start]
    cur = start
    for i in range(n):
        cur = kernel.step(cur, us[i])
        states.append(cur)
    return Trajectory(seed, index, start, tuple(states))


# ---------------------------------------------------------------------------
# tameness diagnostics


@dataclass(frozen=True)
class IrreducibilityResult:
    target: Word
    eps: Fraction
    k: int
    base_points: tuple[Word, ...]


def check_irreducibility(
    kernel: MarkovKernel, s: Word, k_max: int, base_points: Sequence[Word] | None = None
) -> IrreducibilityResult:
    """Exact k-step probabilities of reaching g*s from sampled base points g."""
    model = kernel.model
    if base_points is None:
        base_points = [model.identity()] + [g for g in model.generators()]
    best: tuple[Fraction, int] | None = None
    for k in range(1, k_max + 1):
        worst: Fraction | None = None
        for g in base_points:
            target = g * s
            dist: dict[Word, Fraction] = {g: Fraction(1)}
            for _ in range(k):
                nxt: dict[Word, Fraction] = {}
                for st, pr in dist.items():
                    for tgt, p in kernel.law(st):
                        if p:
                            nxt[tgt] = nxt.get(tgt, Fraction(0)) + pr * p
                dist = nxt
            pr = dist.get(target, Fraction(0))
            worst = pr if worst is None else min(worst, pr)
        if worst and (best is None or worst > best[0]):
            best = (worst, k)
    if best is None:
        raise ChainError(f"no positive probability of the step {s} within {k_max} steps")
    return IrreducibilityResult(s, best[0], best[1], tuple(base_points))


def _is_uniform_free_walk(kernel: MarkovKernel) -> tuple[bool, Fraction]:
    """Detect an SRW (optionally lazy) on a free group, for the radial DP."""
    if not isinstance(kernel, InvariantKernel) or not isinstance(kernel.model, FreeGroup):
        return False, Fraction(0)
    stay = Fraction(0)
    move: set[Fraction] = set()
    expected = {(i,) for i in range(1, kernel.model.rank + 1)} | {
        (-i,) for i in range(1, kernel.model.rank + 1)
    }
    seen = set()
    for s, p in kernel.measure:
        if s.is_identity():
            stay = p
        elif s.letters in expected:
            move.add(p)
            seen.add(s.letters)
        else:
            return False, Fraction(0)
    if seen != expected or len(move) != 1:
        return False, Fraction(0)
    return True, stay


def _radial_sup(kernel: InvariantKernel, n: int, stay: Fraction) -> Fraction:
    """Exact sup_h P[w_n = h] for a (lazy) SRW on a free group."""
    k = kernel.model.rank
    deg = 2 * k
    move = 1 - stay
    up_from_zero = move
    up = move * Fraction(deg - 1, deg)
    down = move * Fraction(1, deg)
    probs = {0: Fraction(1)}
    for _ in range(n):
        nxt: dict[int, Fraction] = {}

        def add(r, p):
            if p:
                nxt[r] = nxt.get(r, Fraction(0)) + p

        for r, p in probs.items():
            add(r, p * stay)
            if r == 0:
                add(1, p * up_from_zero)
            else:
                add(r + 1, p * up)
                add(r - 1, p * down)
        probs = nxt
    best = Fraction(0)
    for r, p in probs.items():
        count = 1 if r == 0 else deg * (deg - 1) ** (r - 1)
        best = max(best, p / count)
    return best


@dataclass(frozen=True)
class DecayReport:
    entries: tuple[tuple[int, float, str], ...]  # (n, sup estimate, method)
    rho_head: float | None
    rho_tail: float | None
    rho_hat: float | None
    verdict: str


def estimate_nonamenability(
    kernel: MarkovKernel,
    n_list: Sequence[int],
    samples: int = 0,
    seed: int = 0,
    support_cap: int = 60000,
) -> DecayReport:
    """Exact sup of point probabilities where feasible, Monte Carlo beyond.

    Fits log sup against n on the first and second halves of the grid; the
    verdict is "consistent with nonamenability" when the tail rate stays
    below 0.97 and does not drift upward, which is a fitted proxy for the
    uniform exponential decay required of a tame chain, never a proof.
    """
    if not n_list:
        raise ChainError("n_list must be nonempty")
    model = kernel.model
    radial, stay = _is_uniform_free_walk(kernel)
    grid = sorted(set(n_list))
    entries: list[tuple[int, float, str]] = []
    if radial:
        for n in grid:
            entries.append((n, float(_radial_sup(kernel, n, stay)), "exact-radial"))
    else:
        # one incremental pass, snapshotting the sup at each grid point
        dist: dict[Word, Fraction] | None = {model.identity(): Fraction(1)}
        exact: dict[int, float] = {}
        step = 0
        for n in grid:
            if dist is None:
                break
            while step < n:
                nxt: dict[Word, Fraction] = {}
                for st, pr in dist.items():
                    for tgt, p in kernel.law(st):
                        if p:
                            nxt[tgt] = nxt.get(tgt, Fraction(0)) + pr * p
                dist = nxt
                step += 1
                if len(dist) > support_cap:
                    dist = None
                    break
            if dist is not None:
                exact[n] = float(max(dist.values()))
        for n in grid:
            if n in exact:
                entries.append((n, exact[n], "exact-dp"))
            elif samples:
                hits = 0
                start = model.identity()
                for i in range(samples):
                    traj = simulate(kernel, start, n, seed, index=i)
                    if traj.states[-1] == start:
                        hits += 1
                entries.append((n, hits / samples, "mc-return"))
            else:
                entries.append((n, float("nan"), "skipped"))

    def fit(pairs: list[tuple[int, float]]) -> float | None:
        pairs = [(n, v) for n, v in pairs if v and v == v]
        if len(pairs) < 2:
            return None
        xs = np.array([n for n, _ in pairs], dtype=float)
        ys = np.log([v for _, v in pairs])
        slope = np.polyfit(xs, ys, 1)[0]
        return float(np.exp(slope))

    usable = [(n, v) for n, v, m in entries if m != "skipped"]
    half = len(usable) // 2
    rho_head = fit(usable[: half + 1])
    rho_tail = fit(usable[half:])
    rho_hat = fit(usable)
    monotone = all(a[1] >= b[1] for a, b in zip(usable, usable[1:]))
    if rho_tail is None:
        verdict = "inconclusive"
    elif rho_tail >= 0.97 or not monotone:
        verdict = f"inconclusive (tail rate {rho_tail:.3f}; amenable-like trend)"
    else:
        verdict = "consistent with nonamenability"
    return DecayReport(tuple(entries), rho_head, rho_tail, rho_hat, verdict)


# ---------------------------------------------------------------------------
# quasi-homogeneity


@dataclass(frozen=True)
class WitnessReport:
    checked_states: tuple[Word, ...]
    exact: bool


def quasi_homogeneity_witness(
    kernel: MarkovKernel, p: Word, q: Word, sample_states: Sequence[Word] | None = None
) -> tuple[BijectiveQI, WitnessReport]:
    """A bijective QI carrying p to q that pushes the chain to itself.

    Invariant chains use the left translation by q p^-1; push-forwards
    conjugate that translation through the defining QI.  Local-rule chains
    carry no declared symmetry, so no constructor applies.
    """
    model = kernel.model
    if isinstance(kernel, InvariantKernel):
        phi: BijectiveQI = LeftTranslation(model, q * p.inverse())
    elif isinstance(kernel, PushForwardKernel) and isinstance(kernel.base, InvariantKernel):
        psi = kernel.qi
        psi_inv = psi.inverse()
        t = psi_inv.apply(q) * psi_inv.apply(p).inverse()
        phi = CompositionQI(model, (psi, LeftTranslation(model, t), psi_inv))
    else:
        raise WitnessError("no witness constructor for chains without declared symmetry")
    if phi.apply(p) != q:
        raise WitnessError("constructed map does not carry p to q")  # pragma: no cover
    if sample_states is None:
        pts = ball(model, model.identity(), 2)
        sample_states = pts[:: max(1, len(pts) // 20)][:20]
    exact = True
    for o in sample_states:
        pushed = {}
        for tgt, pr in kernel.law(o):
            img = phi.apply(tgt)
            pushed[img] = pushed.get(img, Fraction(0)) + pr
        if pushed != kernel.law_dict(phi.apply(o)):
            exact = False
    return phi, WitnessReport(tuple(sample_states), exact)


# ---------------------------------------------------------------------------
# projections under QIs, and reachability


@dataclass(frozen=True)
class ComparisonResult:
    fitted_a: float
    witness: Word
    pairs: tuple[tuple[int, int], ...]


def qi_projection_comparison(
    orbit, qi: BijectiveQI, axis, p_prime: Word, sample: Sequence[Word], window: int = 16
) -> ComparisonResult:
    """Fit the smallest A with d_image(f p', f h) > d_axis(p', h)/A - A.

    The image of the axis under the QI is handled as an explicit point set,
    grown until the sampled projections stabilize.
    """
    from .projections import coset_distance, project_to_set

    p = qi.apply(p_prime)

    def image_pts(wdw: int) -> list[Word]:
        return [qi.apply(pt) for pt in axis.points(wdw)]

    def spread_on_image(wdw: int, h: Word) -> int:
        pts = image_pts(wdw)
        pa = project_to_set(orbit, p, pts).points
        pb = project_to_set(orbit, qi.apply(h), pts).points
        from .projections import _diam_x

        return _diam_x(orbit, set(pa) | set(pb))

    best_a = 1.0
    witness = p_prime
    pairs = []
    for h in sample:
        u = coset_distance(orbit, axis, p_prime, h)
        v = spread_on_image(window, h)
        if spread_on_image(2 * window, h) != v:
            v = spread_on_image(4 * window, h)
        pairs.append((u, v))
        a_h = (-v + (v * v + 4 * u) ** 0.5) / 2
        if a_h > best_a:
            best_a = a_h
            witness = h
    return ComparisonResult(best_a, witness, tuple(pairs))


@dataclass(frozen=True)
class ReachResult:
    t: int
    probability: Fraction
    eps0: float
    table: tuple[tuple[int, Fraction], ...]


def reach_probability(
    kernel: MarkovKernel, p: Word, q: Word, steps_factor: int = 3, support_cap: int = 300000
) -> ReachResult:
    """Exact best probability of standing at p within steps_factor * d steps.

    Dynamic programming from q with dead-state pruning: states that cannot
    reach p in the remaining steps are dropped, which keeps the support near
    min(ball(q, t), ball(p, T - t)).
    """
    model = kernel.model
    d = word_distance(model, p, q)
    if d > 6:
        raise ChainError("exact reachability DP is limited to d <= 6")
    horizon = max(1, d * steps_factor)
    dist: dict[Word, Fraction] = {q: Fraction(1)}
    table: list[tuple[int, Fraction]] = [(0, Fraction(1) if d == 0 else Fraction(0))]
    for t in range(1, horizon + 1):
        nxt: dict[Word, Fraction] = {}
        remaining = horizon - t
        for st, pr in dist.items():
            for tgt, pp in kernel.law(st):
                if pp and word_distance(model, tgt, p) <= remaining:
                    nxt[tgt] = nxt.get(tgt, Fraction(0)) + pr * pp
        dist = nxt
        if len(dist) > support_cap:
            raise ChainError("reachability DP budget exceeded")
        table.append((t, dist.get(p, Fraction(0))))
    best_t, best_p = max(table, key=lambda tp: (tp[1], -tp[0]))
    eps0 = float(best_p) ** (1.0 / d) if d > 0 and best_p > 0 else float(best_p > 0 or d == 0)
    return ReachResult(best_t, best_p, eps0, tuple(table))
