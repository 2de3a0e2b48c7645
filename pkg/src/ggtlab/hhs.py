"""Domain posets with orthogonality, iterative coning, and factored balls.

Skeletons are user-supplied data: a finite set of domains with a nesting
partial order, a symmetric orthogonality relation on incomparable pairs, and
per-domain unboundedness flags.  The coning schedule repeatedly removes the
downward closure of the union of all maximum-size cliques of the
orthogonality graph until no edges remain; each round is recorded.

A region map ties removed domains to coset families of a concrete group
model, so the schedule can be materialized as a coned-off ball (the factored
ball).  Fibre parallelism of two points is probed through the flat-direction
coset slices named by the region map.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import networkx as nx

from .groups import DirectProduct, FreeProduct, GroupError, GroupModel, Word, ball, word_distance
from .spaces import CosetFamily, FiniteGraphSpace, cone_off


class SkeletonError(ValueError):
    """Invalid skeleton data."""


# ---------------------------------------------------------------------------
# skeletons


@dataclass(frozen=True)
class HHSSkeleton:
    domains: tuple[str, ...]
    maximal: str
    nesting: frozenset  # pairs (child, parent), transitively closed
    orth: frozenset  # frozensets {u, v}
    unbounded: frozenset

    def validate(self) -> None:
        dset = set(self.domains)
        if self.maximal not in dset:
            raise SkeletonError("maximal domain not listed")
        for c, p in self.nesting:
            if c not in dset or p not in dset:
                raise SkeletonError(f"nesting pair ({c}, {p}) uses unknown domains")
            if c == p:
                raise SkeletonError("nesting must be strict")
        for d in dset - {self.maximal}:
            if (d, self.maximal) not in self.nesting:
                raise SkeletonError(f"{d} is not nested below the maximal domain")
        if any((self.maximal, d) in self.nesting for d in dset):
            raise SkeletonError("maximal domain nested below another domain")
        for pair in self.orth:
            if len(pair) != 2:
                raise SkeletonError("orthogonality pairs join two distinct domains")
            u, v = sorted(pair)
            if u not in dset or v not in dset:
                raise SkeletonError("orthogonality uses unknown domains")
            if (u, v) in self.nesting or (v, u) in self.nesting:
                raise SkeletonError(f"orthogonal pair {u}, {v} is nesting-comparable")
        if not self.unbounded <= dset:
            raise SkeletonError("unbounded flags reference unknown domains")

    def is_nested(self, child: str, parent: str) -> bool:
        return child == parent or (child, parent) in self.nesting

    def downward_closure(self, seed: Sequence[str]) -> frozenset:
        out = set(seed)
        for c, p in self.nesting:
            if p in out:
                out.add(c)
        changed = True
        while changed:
            changed = False
            for c, p in self.nesting:
                if p in out and c not in out:
                    out.add(c)
                    changed = True
        return frozenset(out)


def make_skeleton(
    domains: Sequence[str],
    maximal: str,
    nesting_pairs: Sequence[tuple[str, str]] = (),
    orth_pairs: Sequence[tuple[str, str]] = (),
    unbounded: Sequence[str] | None = None,
) -> HHSSkeleton:
    """Build and validate a skeleton; nesting under the maximal domain and
    transitive closure are filled in automatically."""
    pairs = set(nesting_pairs)
    for d in domains:
        if d != maximal:
            pairs.add((d, maximal))
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs and a != d:
                    pairs.add((a, d))
                    changed = True
    sk = HHSSkeleton(
        tuple(domains),
        maximal,
        frozenset(pairs),
        frozenset(frozenset(p) for p in orth_pairs),
        frozenset(unbounded if unbounded is not None else domains),
    )
    sk.validate()
    return sk


def parse_skeleton(text: str) -> HHSSkeleton:
    """Line format: ``domain NAME [unbounded|bounded]``, ``nest A B``,
    ``orth A B``, ``maximal NAME``; # starts a comment."""
    domains: list[str] = []
    unbounded: list[str] = []
    nest: list[tuple[str, str]] = []
    orth: list[tuple[str, str]] = []
    maximal: str | None = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "domain":
            domains.append(parts[1])
            if "bounded" not in parts[2:]:
                unbounded.append(parts[1])
        elif parts[0] == "nest":
            nest.append((parts[1], parts[2]))
        elif parts[0] == "orth":
            orth.append((parts[1], parts[2]))
        elif parts[0] == "maximal":
            maximal = parts[1]
        else:
            raise SkeletonError(f"unknown directive {parts[0]!r}")
    if maximal is None:
        raise SkeletonError("skeleton file must declare a maximal domain")
    return make_skeleton(domains, maximal, nest, orth, unbounded)


def skeleton_to_text(sk: HHSSkeleton) -> str:
    lines = [f"maximal {sk.maximal}"]
    for d in sk.domains:
        flag = "" if d in sk.unbounded else " bounded"
        lines.append(f"domain {d}{flag}")
    for c, p in sorted(sk.nesting):
        if p != sk.maximal:
            lines.append(f"nest {c} {p}")
    for pair in sorted(map(sorted, sk.orth)):
        lines.append(f"orth {pair[0]} {pair[1]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# orthogonality graph and schedules


@dataclass(frozen=True)
class OrthGraph:
    vertices: tuple[str, ...]
    edges: frozenset

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(sorted(e)) for e in self.edges)
        return g

    def isolated(self) -> tuple[str, ...]:
        touched = {v for e in self.edges for v in e}
        return tuple(v for v in self.vertices if v not in touched)


def orthogonality_graph(sk: HHSSkeleton, restrict: frozenset | None = None) -> OrthGraph:
    """Edges join orthogonal pairs whose coordinate directions are both
    unbounded; bounded domains stay isolated vertices."""
    sk.validate()
    doms = tuple(d for d in sk.domains if restrict is None or d in restrict)
    dset = set(doms)
    edges = frozenset(
        pair
        for pair in sk.orth
        if set(pair) <= dset and all(v in sk.unbounded for v in pair)
    )
    return OrthGraph(doms, edges)


@dataclass(frozen=True)
class RoundRecord:
    index: int
    largest_cliques: tuple[tuple[str, ...], ...]
    removed: frozenset
    remaining: frozenset
    remaining_edges: frozenset


@dataclass(frozen=True)
class ConingSchedule:
    skeleton: HHSSkeleton
    rounds: tuple[RoundRecord, ...]
    removed_total: frozenset

    @property
    def termination_round(self) -> int:
        return len(self.rounds)

    def removed_through(self, round_index: int) -> frozenset:
        out: set[str] = set()
        for r in self.rounds[:round_index]:
            out |= r.removed
        return frozenset(out)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rounds": [
                    {
                        "index": r.index,
                        "largestCliques": [list(c) for c in r.largest_cliques],
                        "removed": sorted(r.removed),
                        "remaining": sorted(r.remaining),
                    }
                    for r in self.rounds
                ],
                "removedTotal": sorted(self.removed_total),
            }
        )


def _clique_number(og: OrthGraph) -> int:
    return max(len(c) for c in nx.find_cliques(og.graph()))


def coning_schedule(sk: HHSSkeleton) -> ConingSchedule:
    """Iteratively remove the downward closure of all maximum cliques.

    The clique number strictly decreases each round (every clique of the old
    maximum size met a removed domain), so at most clique-number many rounds
    occur; the final orthogonality graph is edgeless.
    """
    sk.validate()
    current = frozenset(sk.domains)
    rounds: list[RoundRecord] = []
    og = orthogonality_graph(sk, current)
    omega = _clique_number(og) if og.edges else 1
    prev_omega = omega
    idx = 0
    while og.edges:
        g = og.graph()
        cliques = [tuple(sorted(c)) for c in nx.find_cliques(g) if len(c) >= 2]
        top = max(len(c) for c in cliques)
        largest = tuple(sorted(c for c in cliques if len(c) == top))
        union = {d for c in largest for d in c}
        removed = sk.downward_closure(sorted(union)) & current
        current = current - removed
        idx += 1
        og = orthogonality_graph(sk, current)
        new_omega = _clique_number(og) if og.edges else 1
        if new_omega >= prev_omega:
            raise SkeletonError("clique number failed to decrease")  # pragma: no cover
        prev_omega = new_omega
        rounds.append(RoundRecord(idx, largest, removed, current, og.edges))
        if idx > omega:
            raise SkeletonError("schedule exceeded the clique-number bound")  # pragma: no cover
    return ConingSchedule(sk, tuple(rounds), frozenset(sk.domains) - current)


def random_skeleton(seed: int, max_domains: int = 12) -> HHSSkeleton:
    """A random valid skeleton for property tests."""
    import numpy as np

    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_domains))
    names = [f"D{i}" for i in range(n)]
    maximal = "S"
    domains = [maximal] + names
    nest: list[tuple[str, str]] = []
    for i, d in enumerate(names):
        if i > 0 and rng.random() < 0.3:
            nest.append((d, names[int(rng.integers(0, i))]))
    sk0 = make_skeleton(domains, maximal, nest, (), domains)
    orth = []
    for i in range(n):
        for j in range(i + 1, n):
            u, v = names[i], names[j]
            if sk0.is_nested(u, v) or sk0.is_nested(v, u):
                continue
            if rng.random() < 0.35:
                orth.append((u, v))
    unbounded = [maximal] + [d for d in names if rng.random() < 0.8]
    return make_skeleton(domains, maximal, nest, orth, unbounded)


# ---------------------------------------------------------------------------
# shipped skeletons and region maps


@dataclass(frozen=True)
class Region:
    """A coset family for a removed domain, with optional fibre data."""

    family: CosetFamily
    parallelism_fibers: Callable[[Word, int], list[Word]] | None = None


def _strip_factor(model: FreeProduct, factor: int, w: Word) -> tuple[int, ...]:
    runs = model.syllables(w.letters)
    if runs and runs[-1][0] == factor:
        runs = runs[:-1]
    return tuple(l for _, seg in runs for l in seg)


def product_free_skeleton() -> HHSSkeleton:
    """Toy skeleton of (Z^2 * Z) x Z: flat conjugates and the two line
    families, each orthogonal to the central direction."""
    return make_skeleton(
        domains=("S", "U", "W", "V"),
        maximal="S",
        orth_pairs=(("U", "V"), ("W", "V")),
        unbounded=("S", "U", "W", "V"),
    )


def product_free_regions(model: DirectProduct) -> dict[str, Region]:
    """Region map for (Z^2 * Z) x Z: U = flat slices, W = z-line slices,
    V = central lines.  Parallelism fibres are the flat-direction slices."""
    if not isinstance(model, DirectProduct) or not isinstance(model.left, FreeProduct):
        raise GroupError("region map expects a free-product-by-Z model")
    left = model.left
    c = model.central_index

    def left_letters(w: Word) -> tuple[int, ...]:
        ls, _ = model.split(w.letters)
        return ls

    def u_key(w: Word):
        ls, k = model.split(w.letters)
        return (_strip_factor(left, 0, Word(left, ls)), k)

    def w_key(w: Word):
        ls, k = model.split(w.letters)
        return (_strip_factor(left, 1, Word(left, ls)), k)

    def v_key(w: Word):
        return left_letters(w)

    def flat_fiber(x: Word, radius: int) -> list[Word]:
        flat_rank = left.factors[0].rank
        sub = [
            Word(model, model.normalize(x.letters + w2.letters))
            for w2 in _abelian_ball(model, flat_rank, radius)
        ]
        return sub

    return {
        "U": Region(CosetFamily("flat x central slices", u_key), flat_fiber),
        "W": Region(CosetFamily("z-line slices", w_key)),
        "V": Region(CosetFamily("central lines", v_key)),
    }


def _abelian_ball(model: GroupModel, rank: int, radius: int) -> list[Word]:
    """Words of the ambient model using only the first `rank` generators."""
    out = [model.identity()]
    frontier = [model.identity()]
    seen = {model.identity().letters}
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for i in range(1, rank + 1):
                for s in (i, -i):
                    u = Word(model, model.normalize(w.letters + (s,)))
                    if u.letters not in seen:
                        seen.add(u.letters)
                        nxt.append(u)
        frontier = nxt
        out.extend(nxt)
    return out


def fibered_tree_skeleton() -> HHSSkeleton:
    """Toy skeleton of F2 x Z: the tree direction and the fibre direction."""
    return make_skeleton(
        domains=("S", "A", "V"),
        maximal="S",
        orth_pairs=(("A", "V"),),
        unbounded=("S", "A", "V"),
    )


def fibered_tree_regions(model: DirectProduct) -> dict[str, Region]:
    """Region map for F2 x Z: only the fibre family V = {g} x Z is assigned.

    The tree-direction domain A has no region here (its product structure is
    a single unbounded tree slice), so factoring with this map cones the
    fibres only; fibre parallelism checks are not available (the flats of A
    are not two-sided)."""

    def v_key(w: Word):
        ls, _ = model.split(w.letters)
        return ls

    return {"V": Region(CosetFamily("tree fibres", v_key))}


def figure_skeleton() -> HHSSkeleton:
    """Abstract example whose schedule passes through three coning rounds.

    The orthogonality graph starts as a 4-clique, a disjoint triangle, a
    disjoint edge and an isolated unbounded vertex; rounds peel them off in
    order of clique size, and the final edgeless graph retains an unbounded
    non-maximal domain."""
    blocks = [("A", "B", "C", "D"), ("E", "F", "G"), ("H", "I")]
    orth = []
    for block in blocks:
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                orth.append((block[i], block[j]))
    return make_skeleton(
        domains=("S", "A", "B", "C", "D", "E", "F", "G", "H", "I", "J"),
        maximal="S",
        orth_pairs=orth,
        unbounded=("S", "A", "B", "C", "D", "E", "F", "G", "H", "I", "J"),
    )


# ---------------------------------------------------------------------------
# factored balls


def factored_ball(
    model: GroupModel,
    radius: int,
    schedule: ConingSchedule,
    round_index: int,
    region_map: dict[str, Region],
    cap: int = 10,
) -> FiniteGraphSpace:
    """Ball of the model with the regions of all removed domains coned.

    ``round_index`` counts completed rounds: 0 cones nothing, and the full
    schedule is ``schedule.termination_round``.  Removed domains without a
    region are skipped with a warning.
    """
    removed = schedule.removed_through(round_index)
    families = []
    for d in sorted(removed):
        if d in region_map:
            families.append(region_map[d].family)
        else:
            warnings.warn(f"removed domain {d!r} has no region; skipped")
    graph = cone_off(model, radius, families, cap=cap)
    graph.metadata["round"] = round_index
    graph.metadata["regions_coned"] = tuple(f.label for f in families)
    return graph


# ---------------------------------------------------------------------------
# fibre parallelism


@dataclass(frozen=True)
class ParallelismVerdict:
    verdict: str  # "same product region" | "far" | "inconclusive"
    hausdorff_sweep: tuple[tuple[int, int], ...]
    fiber_diameters: tuple[int, int]


def fiber_parallelism_check(
    model: GroupModel,
    factored: FiniteGraphSpace,
    x: Word,
    y: Word,
    bound: int,
    region_map: dict[str, Region],
    sweep: Sequence[int] = (2, 4, 6),
) -> ParallelismVerdict:
    """Probe whether two points sit in a common product region.

    Truncated flat-direction fibres through x and y are compared: bounded
    factored diameter of each fibre plus a Hausdorff distance (in the word
    metric) that stabilizes across the sweep means "same product region";
    strictly growing Hausdorff distance means "far".
    """
    fiber_fn = None
    for region in region_map.values():
        if region.parallelism_fibers is not None:
            fiber_fn = region.parallelism_fibers
            key_fn = region.family.class_key
            break
    if fiber_fn is None:
        raise GroupError("region map carries no parallelism fibre descriptor")
    if x not in factored or y not in factored:
        raise GroupError("points must lie in the factored ball")
    if x == y:
        return ParallelismVerdict("same product region", (), (0, 0))

    def hausdorff(a: list[Word], b: list[Word]) -> int:
        d_ab = max(min(word_distance(model, u, v) for v in b) for u in a)
        d_ba = max(min(word_distance(model, u, v) for v in a) for u in b)
        return max(d_ab, d_ba)

    hs = []
    for r in sweep:
        fx = fiber_fn(x, r)
        fy = fiber_fn(y, r)
        hs.append((r, hausdorff(fx, fy)))

    def fiber_diam(p: Word) -> int:
        pts = [v for v in fiber_fn(p, max(sweep)) if v in factored]
        if len(pts) <= 1:
            return 0
        keys = {key_fn(v) for v in pts}
        if len(keys) == 1:
            return 1  # one coned coset
        base = factored.distances_from(pts[0])
        return max(base[v] for v in pts if v in base)

    dx, dy = fiber_diam(x), fiber_diam(y)
    values = [h for _, h in hs]
    growing = all(b > a for a, b in zip(values, values[1:]))
    stable = len(values) >= 2 and values[-1] == values[-2]
    if stable and dx <= bound and dy <= bound:
        return ParallelismVerdict("same product region", tuple(hs), (dx, dy))
    if growing:
        return ParallelismVerdict("far", tuple(hs), (dx, dy))
    return ParallelismVerdict("inconclusive", tuple(hs), (dx, dy))
