"""Finite-window Morse certificates and incompatibility witnesses.

Morse-ness quantifies over all quasi-geodesics, which is not finitely
checkable, so certificates here are explicitly scoped to a window around the
segment and a grid of quasi-geodesic parameters.  For the (1, 0) cell the
search is exact: all window-confined geodesics between all pairs of segment
vertices are swept by dynamic programming on the geodesic DAG.  Other cells
use a layered reachability relaxation (prefix and suffix feasibility against
the anchor pair), whose value upper-bounds the true windowed detour; when a
reconstructed path validates as a genuine quasi-geodesic attaining the value,
the cell is marked as a found witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .groups import GeodesicPath, GroupError, GroupModel, Word, ball, geodesic, word_distance
from .projections import _diam_x, project_to_set
from .spaces import OrbitMap, space_distance


def tree_gauge(lam: float, eps: float) -> int:
    """Reference gauge: on trees, (lam, eps)-quasi-geodesic excursions are
    capped near lam*eps/2, plus slack linear in lam."""
    return int(lam * eps // 2) + int(lam)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CellResult:
    max_detour: int
    status: str  # "certified-on-window" | "witness-found" | "skipped"
    witness: tuple[Word, ...] | None = None


@dataclass(frozen=True)
class MorseCertificate:
    segment: tuple[Word, ...]
    window: int
    cells: dict

    def table(self) -> dict:
        return {k: v.max_detour for k, v in self.cells.items()}

    def gauge(self) -> Callable[[float, float], int]:
        """Interpolating gauge: the max recorded detour over dominated cells."""

        def m(lam: float, eps: float) -> int:
            vals = [
                v.max_detour
                for (l, e), v in self.cells.items()
                if l >= lam and e >= eps and v.status != "skipped"
            ]
            if not vals:
                raise GroupError(f"no certified cell dominates ({lam}, {eps})")
            return min(vals)

        return m

    def to_csv(self) -> str:
        lines = ["lambda,eps,maxDetour,status"]
        for (l, e), v in sorted(self.cells.items()):
            lines.append(f"{l},{e},{v.max_detour},{v.status}")
        return "\n".join(lines) + "\n"


def _window_vertices(model: GroupModel, segment: Sequence[Word], window: int) -> dict:
    pad = ball(model, model.identity(), window, cap=max(10, window))
    out: dict[Word, int] = {}
    for v in segment:
        for u in pad:
            cand = v * u
            if cand not in out:
                out[cand] = min(word_distance(model, cand, s) for s in segment)
    return out


def _exact_geodesic_cell(model: GroupModel, segment: Sequence[Word], window: int, verts: dict) -> CellResult:
    """Max detour over all window-confined geodesics between segment vertices."""
    best = 0
    best_path: tuple[Word, ...] | None = None
    gens = [Word(model, (s,)) for i in range(1, model.rank + 1) for s in (i, -i)]
    for ai in range(len(segment)):
        for bi in range(ai + 1, len(segment)):
            x, y = segment[ai], segment[bi]
            dxy = word_distance(model, x, y)
            dag = {
                v: word_distance(model, x, v)
                for v in verts
                if word_distance(model, x, v) + word_distance(model, v, y) == dxy
            }
            order = sorted(dag, key=dag.get, reverse=True)
            f: dict[Word, int] = {}
            arg: dict[Word, Word | None] = {}
            for v in order:
                f[v] = verts[v]
                arg[v] = None
                for g in gens:
                    u = v * g
                    if u in dag and dag[u] == dag[v] + 1 and f[u] > f[v]:
                        f[v] = f[u]
                        arg[v] = u
            if x in f and f[x] > best:
                best = f[x]
                path = [x]
                cur: Word | None = x
                while arg.get(cur) is not None:
                    cur = arg[cur]
                    path.append(cur)
                best_path = tuple(path)
    status = "witness-found" if best >= window else "certified-on-window"
    return CellResult(best, status, best_path)


def _is_quasi_geodesic(model: GroupModel, path: Sequence[Word], lam: float, eps: float) -> bool:
    for i in range(len(path)):
        for j in range(i + 1, len(path)):
            d = word_distance(model, path[i], path[j])
            gap = j - i
            if d > lam * gap + eps or d < gap / lam - eps:
                return False
    return True


def _relaxed_cell(
    model: GroupModel,
    segment: Sequence[Word],
    window: int,
    verts: dict,
    lam: float,
    eps: float,
    anchors: Sequence[tuple[int, int]],
    state_budget: int,
) -> CellResult:
    gens = [Word(model, (s,)) for i in range(1, model.rank + 1) for s in (i, -i)]
    neighbors = {v: [v * g for g in gens if v * g in verts] for v in verts}
    best = 0
    best_path: tuple[Word, ...] | None = None
    for ai, bi in anchors:
        x, y = segment[ai], segment[bi]
        dxy = word_distance(model, x, y)
        t_max = int(lam * (dxy + eps))
        if t_max * len(verts) > state_budget:
            return CellResult(0, "skipped", None)
        dx = {v: word_distance(model, x, v) for v in verts}
        dy = {v: word_distance(model, v, y) for v in verts}
        # layered prefix/suffix feasibility: necessary conditions against
        # the anchors only (a relaxation of the full pair condition)
        fwd = [set() for _ in range(t_max + 1)]
        fwd[0].add(x)
        for i in range(1, t_max + 1):
            for v in fwd[i - 1]:
                for u in neighbors[v]:
                    if dx[u] <= i and dx[u] >= i / lam - eps:
                        fwd[i].add(u)
        bwd = [set() for _ in range(t_max + 1)]
        bwd[0].add(y)
        for j in range(1, t_max + 1):
            for v in bwd[j - 1]:
                for u in neighbors[v]:
                    if dy[u] <= j and dy[u] >= j / lam - eps:
                        bwd[j].add(u)
        reach_i: dict[Word, int] = {}
        for i in range(t_max + 1):
            for v in fwd[i]:
                reach_i.setdefault(v, i)
        reach_j: dict[Word, int] = {}
        for j in range(t_max + 1):
            for v in bwd[j]:
                reach_j.setdefault(v, j)
        for v in verts:
            if v in reach_i and v in reach_j and reach_i[v] + reach_j[v] <= t_max:
                if verts[v] > best:
                    best = verts[v]
                    fpath = _trace(x, v, reach_i[v], fwd, neighbors)
                    bpath = _trace(y, v, reach_j[v], bwd, neighbors)
                    best_path = tuple(fpath + list(reversed(bpath))[1:])
    if best_path is not None and _is_quasi_geodesic(model, best_path, lam, eps):
        status = "witness-found"
    else:
        status = "certified-on-window"
        if best >= window:
            status = "witness-found"  # window-limited: detour reaches the rim
    return CellResult(best, status, best_path)


def _trace(src: Word, tgt: Word, steps: int, layers, neighbors) -> list[Word]:
    path = [tgt]
    cur = tgt
    for i in range(steps - 1, -1, -1):
        for v in layers[i]:
            if cur in neighbors[v]:
                path.append(v)
                cur = v
                break
    return list(reversed(path))


def morse_certificate(
    model: GroupModel,
    segment: GeodesicPath | Sequence[Word],
    grid: Sequence[tuple[float, float]],
    window: int,
    state_budget: int = 2_000_000,
) -> MorseCertificate:
    """Window-scoped detour table over a grid of quasi-geodesic parameters."""
    seg = tuple(segment.vertices if isinstance(segment, GeodesicPath) else segment)
    if len(seg) < 2:
        raise GroupError("segment must have at least two vertices")
    verts = _window_vertices(model, seg, window)
    cells: dict = {}
    n = len(seg) - 1
    anchors = [(0, n), (0, n // 2), (n // 2, n)] if n >= 2 else [(0, n)]
    for lam, eps in grid:
        if lam < 1 or eps < 0:
            raise GroupError("grid cells need lambda >= 1 and eps >= 0")
        if (lam, eps) == (1, 0):
            cells[(lam, eps)] = _exact_geodesic_cell(model, seg, window, verts)
        else:
            cells[(lam, eps)] = _relaxed_cell(
                model, seg, window, verts, lam, eps, anchors, state_budget
            )
    # detour tables must be monotone in both parameters
    keys = sorted(cells)
    for a in keys:
        for b in keys:
            if a[0] <= b[0] and a[1] <= b[1]:
                if (
                    cells[a].status != "skipped"
                    and cells[b].status != "skipped"
                    and cells[a].max_detour > cells[b].max_detour
                ):
                    raise GroupError(f"non-monotone certificate between {a} and {b}")
    return MorseCertificate(seg, window, cells)


# ---------------------------------------------------------------------------
# detectability


@dataclass(frozen=True)
class DetectabilityResult:
    lambda_best: float
    verdict: str  # "parametrized-qg" | "degenerate"
    image_diameter: int


def detectability_check(orbit: OrbitMap, segment: GeodesicPath | Sequence[Word]) -> DetectabilityResult:
    """Least lambda making the orbit image a parametrized (lambda, lambda)-QG."""
    seg = tuple(segment.vertices if isinstance(segment, GeodesicPath) else segment)
    imgs = [orbit(v) for v in seg]
    diam = 0
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            diam = max(diam, space_distance(orbit.space, imgs[i], imgs[j]))
    if diam <= 2:
        return DetectabilityResult(float("inf"), "degenerate", diam)
    lam = 1.0
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            d = space_distance(orbit.space, imgs[i], imgs[j])
            gap = j - i
            lam = max(lam, d / (gap + 1))
            lam = max(lam, (-d + math.sqrt(d * d + 4 * gap)) / 2)
    return DetectabilityResult(lam, "parametrized-qg", diam)


# ---------------------------------------------------------------------------
# incompatibility witnesses


@dataclass(frozen=True)
class IncompatibilityWitness:
    mu: tuple[Word, ...]
    params: tuple[float, float]
    point: Word
    margin: int
    kappa: int
    prefix_bound: int

    def revalidate(self, model: GroupModel, beta: Sequence[Word], gauge) -> bool:
        k, c = self.params
        if not _is_quasi_geodesic(model, self.mu, k, c):
            return False
        d = min(word_distance(model, self.point, b) for b in beta)
        return d - (gauge(k, c + 2 * self.kappa) + 2 * self.kappa) == self.margin


def _extreme_geodesic(model: GroupModel, x: Word, y: Word, reverse: bool) -> list[Word]:
    """Greedy geodesic preferring the largest (or smallest) next letter."""
    letters = sorted(
        [s for i in range(1, model.rank + 1) for s in (i, -i)],
        key=lambda ell: (abs(ell), 0 if ell > 0 else 1),
        reverse=reverse,
    )
    path = [x]
    cur = x
    remaining = word_distance(model, cur, y)
    while remaining > 0:
        for s in letters:
            cand = cur * Word(model, (s,))
            if word_distance(model, cand, y) == remaining - 1:
                cur = cand
                break
        path.append(cur)
        remaining -= 1
    return path


def incompatibility_witness(
    model: GroupModel,
    beta: Sequence[Word],
    gauge: Callable[[float, float], int],
    kappa: int,
    prefix_bound: int,
    budget: int = 4000,
) -> IncompatibilityWitness | None:
    """Search for a geodesic detour witnessing incompatibility of the ray.

    Candidates are the two extreme geodesics (corner paths, in flat pieces)
    between every pair of ray vertices within the prefix bound; the witness
    margin is the excess of the detour point's distance to the whole supplied
    ray over the gauge threshold.  Returns the max-margin witness, or None if
    no candidate in the family has positive margin within the budget.
    """
    if len(beta) <= prefix_bound:
        raise GroupError("ray prefix shorter than the requested bound")
    threshold = gauge(1, 0 + 2 * kappa) + 2 * kappa
    best: IncompatibilityWitness | None = None
    examined = 0
    for i in range(prefix_bound + 1):
        for j in range(i + 2, prefix_bound + 1):
            if examined >= budget:
                return best
            examined += 1
            for reverse in (False, True):
                mu = _extreme_geodesic(model, beta[i], beta[j], reverse)
                for p in mu:
                    d = min(word_distance(model, p, b) for b in beta)
                    margin = d - threshold
                    if margin > 0 and (best is None or margin > best.margin):
                        best = IncompatibilityWitness(
                            tuple(mu), (1, 0), p, margin, kappa, prefix_bound
                        )
    return best


def diagonal_crossing_ray(model: GroupModel, flat_size: int = 6, tail: int = 12) -> list[Word]:
    """The shipped ray: staircase across a flat to (n, n), then z-powers.

    Requires a free product whose first factor is 2-abelian and whose second
    factor is Z (generators x, y, z).
    """
    verts = [model.identity()]
    letters = []
    for k in range(flat_size):
        letters.append(1)
        verts.append(Word(model, model.normalize(tuple(letters))))
        letters.append(2)
        verts.append(Word(model, model.normalize(tuple(letters))))
    for _ in range(tail):
        letters.append(3)
        verts.append(Word(model, model.normalize(tuple(letters))))
    return verts


# ---------------------------------------------------------------------------
# mutual projections


@dataclass(frozen=True)
class MutualProjectionResult:
    diam_first_on_second: tuple[int, int]  # (group diameter, space diameter)
    diam_second_on_first: tuple[int, int]
    stabilized: bool
    same_ray: bool


def mutual_projection_check(
    orbit: OrbitMap, alpha: Sequence[Word], beta: Sequence[Word]
) -> MutualProjectionResult:
    """Diameters of the mutual projections of two ray prefixes.

    Projections use the space metric; both the group diameter and the space
    diameter of each projection set are reported.  In degenerate directions
    (rays whose orbit image is bounded) projections tie across many vertices
    and the group diameter is not meaningful, while the space diameter is.
    Stabilization compares the answer against dropping the last quarter of
    each prefix window.
    """
    model = orbit.group

    def proj_union(src: Sequence[Word], tgt: Sequence[Word]) -> set[Word]:
        out: set[Word] = set()
        for v in src:
            out.update(project_to_set(orbit, v, list(tgt)).points)
        return out

    def diam_g(pts: set[Word]) -> int:
        pl = list(pts)
        best = 0
        for i in range(len(pl)):
            for j in range(i + 1, len(pl)):
                best = max(best, word_distance(model, pl[i], pl[j]))
        return best

    ab = proj_union(beta, alpha)  # projection of beta onto alpha
    ba = proj_union(alpha, beta)
    k_a = max(1, 3 * len(alpha) // 4)
    k_b = max(1, 3 * len(beta) // 4)
    ab_short = proj_union(beta[:k_b], alpha)
    ba_short = proj_union(alpha[:k_a], beta)
    stabilized = ab == ab_short and ba == ba_short
    overlap = len(set(alpha) & set(beta))
    same_ray = overlap > min(len(alpha), len(beta)) // 2
    return MutualProjectionResult(
        (diam_g(ab), _diam_x(orbit, ab)),
        (diam_g(ba), _diam_x(orbit, ba)),
        stabilized,
        same_ray,
    )
