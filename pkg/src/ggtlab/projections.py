"""Nearest-point projections onto axes, coset distance sums, and pivots.

An *axis* is the coset h<r> of a cyclic subgroup generated by a cyclically
reduced primitive root, viewed as a point set {h r^n x0} in a space model.
Projections return the full set of nearest points; coset distances follow the
diameter-of-union convention

    d_A(x, y) = diam_X( proj_A(x) ∪ proj_A(y) ),

while the hypothesis/conclusion sides of the two-sided projection alternative
use plain point-set distance (min over pairs), which is the sharp convention
on trees.

On Cayley trees of free groups projections are computed analytically from
word overlaps (the line through a coset is re-anchored at its vertex nearest
the identity, where the parameterization is cancellation-free).  On other
tree models projections are computed by a certified window scan: the scan
radius is enlarged until the linear growth of the axis provably dominates the
best distance found.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .groups import (
    DirectProduct,
    FreeGroup,
    FreeProduct,
    GeodesicPath,
    GroupError,
    GroupModel,
    Word,
    ball,
    geodesic,
    word_distance,
)
from .spaces import (
    BassSerreTree,
    CayleyTree,
    OrbitMap,
    SpaceError,
    left_component,
    space_distance,
)


class NotLoxodromicError(GroupError):
    """The element fixes a point (or is elliptic) in the chosen space model."""


class CertificationError(RuntimeError):
    """A windowed search could not certify completeness of its answer."""


# ---------------------------------------------------------------------------
# axes


def _cyclic_reduce_free(letters: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return (conjugator letters, cyclically reduced core) in a free group."""
    conj: list[int] = []
    core = list(letters)
    while len(core) >= 2 and core[0] == -core[-1]:
        conj.append(core[0])
        core = core[1:-1]
    return tuple(conj), tuple(core)


def _primitive_period(seq: Sequence) -> int:
    """Smallest period p dividing len(seq) with seq = block^(len/p)."""
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and all(seq[i] == seq[i % p] for i in range(n)):
            return p
    return n  # pragma: no cover


def _min_word(a: Word, b: Word) -> Word:
    return a if a.sort_key() <= b.sort_key() else b


@dataclass(frozen=True)
class Axis:
    """The coset rep·<root> of a cyclic subgroup on a primitive root.

    ``root`` is canonical (the smaller of r and r^-1 in length-lex order) and
    ``rep`` is the minimal element of the coset, so equal point sets compare
    equal.
    """

    model: GroupModel
    root: Word
    rep: Word

    @property
    def spacing(self) -> int:
        return len(self.root)

    def point(self, n: int) -> Word:
        return self.rep * self.root**n

    def points(self, window: int) -> list[Word]:
        out = [self.rep]
        fwd = bwd = self.rep
        for _ in range(window):
            fwd = fwd * self.root
            bwd = bwd * self.root.inverse()
            out.append(fwd)
            out.append(bwd)
        return out

    def translate(self, g: Word) -> "Axis":
        return make_axis(self.model, self.root, g * self.rep)

    def __str__(self) -> str:
        return f"{self.rep}<{self.root}>"


def _canonical_root(model: GroupModel, r: Word) -> Word:
    return _min_word(r, r.inverse())


def coset_rep_key(model: GroupModel, root: Word, h: Word) -> tuple[int, ...]:
    """Letters of the minimal element of the coset h<root>."""
    q = max(1, len(root))
    n_max = 2 * (len(h) // q) + 2
    best = h
    fwd = bwd = h
    for _ in range(n_max):
        fwd = fwd * root
        bwd = bwd * root.inverse()
        for cand in (fwd, bwd):
            if cand.sort_key() < best.sort_key():
                best = cand
    return best.letters


def make_axis(model: GroupModel, root: Word, rep: Word) -> Axis:
    root = _canonical_root(model, root)
    return Axis(model, root, Word(model, coset_rep_key(model, root, rep)))


def axis_of(space, g: Word) -> Axis:
    """Axis data of a loxodromic element: primitive root and canonical coset.

    Raises NotLoxodromicError when g fixes a point of the space model (for
    instance an element of a vertex factor acting on a Bass-Serre tree).
    """
    if g.is_identity():
        raise NotLoxodromicError("the identity is not loxodromic")
    model = g.model
    if isinstance(space, CayleyTree):
        if model != space.model:
            raise GroupError("axis_of: model mismatch")
        conj, core = _cyclic_reduce_free(g.letters)
        p = _primitive_period(core)
        root = Word(model, core[:p])
        return make_axis(model, root, Word(model, model.normalize(conj)))
    if isinstance(space, BassSerreTree):
        if isinstance(model, DirectProduct):
            return _axis_direct_product(space, g)
        if model != space.model:
            raise GroupError("axis_of: model mismatch")
        return _axis_free_product(space.model, g)
    raise SpaceError(f"axis_of not supported on {space!r}")


def _axis_free_product(model: FreeProduct, g: Word) -> Axis:
    conj = model.identity()
    cur = g
    while True:
        runs = model.syllables(cur.letters)
        if len(runs) < 2:
            raise NotLoxodromicError(
                f"{g} is conjugate into a free-product factor; it fixes a vertex"
            )
        if runs[0][0] != runs[-1][0]:
            break
        head = Word(model, runs[0][1])
        conj = conj * head
        cur = head.inverse() * cur * head
    runs = model.syllables(cur.letters)
    m = len(runs)
    root = cur
    for d in range(2, m, 2):
        if m % d == 0:
            cand = Word(model, tuple(l for _, seg in runs[:d] for l in seg))
            if cand ** (m // d) == cur:
                root = cand
                break
    return make_axis(model, root, conj)


def _axis_direct_product(space: BassSerreTree, g: Word) -> Axis:
    """Axis of (u, k) in G x Z acting on the Bass-Serre tree of G."""
    import math

    model: DirectProduct = g.model
    if space.model != model.left:
        raise GroupError("axis_of: Bass-Serre tree does not match the left factor")
    u = left_component(model, g)
    if u.is_identity():
        raise NotLoxodromicError(f"{g} acts trivially on the quotient tree")
    inner = _axis_free_product(model.left, u)  # raises if elliptic
    _, k = model.split(g.letters)
    # write u = rep * root^m_signed * rep^-1 (rep may be any coset element)
    core = inner.rep.inverse() * u * inner.rep
    m = max(1, len(core) // max(1, len(inner.root)))
    if inner.root**m == core:
        m_signed = m
    elif inner.root**-m == core:
        m_signed = -m
    else:  # pragma: no cover - defensive
        raise GroupError("power extraction failed in direct-product axis")
    j = abs(m_signed) if k == 0 else math.gcd(abs(m_signed), abs(k))

    def embed(w: Word, t: int) -> Word:
        c = model.central_index
        tail = tuple([c if t > 0 else -c] * abs(t))
        return Word(model, model.normalize(w.letters + tail))

    inner_piece = inner.rep * inner.root ** (m_signed // j) * inner.rep.inverse()
    root = embed(inner_piece, k // j)
    return make_axis(model, root, embed(inner.rep, 0))


# ---------------------------------------------------------------------------
# analytic projection on Cayley trees


def _lcp(a: Sequence[int], b: Sequence[int]) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


@lru_cache(maxsize=4096)
def _line_data(model: GroupModel, root_letters: tuple[int, ...], rep_letters: tuple[int, ...]):
    """Anchor the line of a coset at its vertex nearest the identity.

    Returns (anchor Word, direction letters, phase) such that the line's
    vertex at position t is anchor * spell(t) without cancellation, and the
    coset points sit at positions ≡ phase (mod |root|).
    """
    q = len(root_letters)
    rep = Word(model, rep_letters)

    def vertex(t: int) -> Word:
        if t >= 0:
            seg = tuple(root_letters[i % q] for i in range(t))
        else:
            seg = tuple(-root_letters[i % q] for i in range(-1, t - 1, -1))
        return Word(model, model.normalize(rep_letters + seg))

    t0 = 0
    cur = rep
    nxt = vertex(1)
    if len(nxt) < len(cur):
        while len(nxt) < len(cur):
            t0 += 1
            cur, nxt = nxt, vertex(t0 + 1)
    else:
        prv = vertex(-1)
        while len(prv) < len(cur):
            t0 -= 1
            cur, prv = prv, vertex(t0 - 1)
    anchor = cur
    dir_plus = tuple(root_letters[(t0 + i) % q] for i in range(q))
    dir_minus = tuple(-root_letters[(t0 - 1 - i) % q] for i in range(q))
    phase_plus = (-t0) % q
    key = lambda d: tuple((abs(l), 0 if l > 0 else 1) for l in d)  # noqa: E731
    if key(dir_plus) <= key(dir_minus):
        return anchor, dir_plus, phase_plus
    return anchor, dir_minus, (t0 % q)


def _line_vertex(model: GroupModel, anchor: Word, direction: tuple[int, ...], t: int) -> Word:
    q = len(direction)
    if t >= 0:
        seg = tuple(direction[i % q] for i in range(t))
    else:
        seg = tuple(-direction[i % q] for i in range(-1, t - 1, -1))
    # cancellation-free by the anchoring, but normalize defensively
    return Word(model, model.normalize(anchor.letters + seg))


def _project_cayley(model: GroupModel, axis: Axis, x: Word) -> tuple[tuple[Word, ...], int]:
    anchor, direction, phase = _line_data(model, axis.root.letters, axis.rep.letters)
    q = len(direction)
    w = (anchor.inverse() * x).letters
    fwd_spell = tuple(direction[i % q] for i in range(len(w)))
    fwd = _lcp(w, fwd_spell)
    if fwd == 0:
        bwd_spell = tuple(-direction[i % q] for i in range(-1, -len(w) - 1, -1))
        t_star = -_lcp(w, bwd_spell)
    else:
        t_star = fwd
    d_line = len(w) - abs(t_star)
    m0 = t_star - ((t_star - phase) % q)
    m1 = m0 + q
    d0, d1 = abs(t_star - m0), abs(t_star - m1)
    if d0 < d1:
        best = [m0]
    elif d1 < d0:
        best = [m1]
    else:
        best = [m0, m1]
    pts = tuple(sorted((_line_vertex(model, anchor, direction, m) for m in best), key=Word.sort_key))
    return pts, d_line + min(d0, d1)


# ---------------------------------------------------------------------------
# projection values


@dataclass(frozen=True)
class ProjectionValue:
    source: Word
    target: str
    points: tuple[Word, ...]
    distance: int
    method: str
    window: int | None = None

    def __iter__(self):
        return iter(self.points)


def _orbit_spacing(orbit: OrbitMap, axis: Axis) -> int:
    s = space_distance(orbit.space, orbit(axis.rep), orbit(axis.rep * axis.root))
    if s == 0:
        raise NotLoxodromicError(f"axis {axis} has zero translation length in the space")
    return s


def project_to_set(orbit: OrbitMap, x: Word, target) -> ProjectionValue:
    """Full nearest-point set of an axis or a finite set of group elements.

    For axes on Cayley trees the projection is computed analytically; on
    other models a window scan is used, with the window grown until the axis
    has provably escaped past the best distance found.
    """
    if isinstance(target, Axis):
        if isinstance(orbit.space, CayleyTree) and orbit.name == "identity":
            pts, dist = _project_cayley(orbit.group, target, x)
            return ProjectionValue(x, str(target), pts, dist, "analytic")
        return _project_axis_scan(orbit, x, target)
    pts = list(target)
    if not pts:
        raise SpaceError("cannot project to an empty set")
    px = orbit(x)
    dists = [space_distance(orbit.space, px, orbit(p)) for p in pts]
    m = min(dists)
    chosen = tuple(sorted((p for p, d in zip(pts, dists) if d == m), key=Word.sort_key))
    return ProjectionValue(x, f"set[{len(pts)}]", chosen, m, "scan-finite")


def _project_axis_scan(orbit: OrbitMap, x: Word, axis: Axis) -> ProjectionValue:
    tau = _orbit_spacing(orbit, axis)
    px = orbit(x)
    d_rep = space_distance(orbit.space, px, orbit(axis.rep))
    n_max = (2 * d_rep + 2) // tau + 2
    best = d_rep
    chosen = [axis.rep]
    fwd = bwd = axis.rep
    for _ in range(n_max):
        for step in (1, -1):
            if step == 1:
                fwd = fwd * axis.root
                cand = fwd
            else:
                bwd = bwd * axis.root.inverse()
                cand = bwd
            d = space_distance(orbit.space, px, orbit(cand))
            if d < best:
                best, chosen = d, [cand]
            elif d == best:
                chosen.append(cand)
    pts = tuple(sorted(set(chosen), key=Word.sort_key))
    return ProjectionValue(x, str(axis), pts, best, "scan-axis", window=n_max)


def projection_of_set(orbit: OrbitMap, pts: Iterable[Word], target) -> frozenset[Word]:
    """Union of the projections of a finite set of elements."""
    out: set[Word] = set()
    for p in pts:
        out.update(project_to_set(orbit, p, target).points)
    return frozenset(out)


def project_axis_onto(
    orbit: OrbitMap, src: Axis, target, window: int = 8, cap: int = 512
) -> tuple[frozenset[Word], bool, int]:
    """Projection of a whole axis, grown until the point set stabilizes."""
    prev: frozenset[Word] | None = None
    w = window
    while w <= cap:
        cur = projection_of_set(orbit, src.points(w), target)
        if prev is not None and cur == prev:
            return cur, True, w
        prev = cur
        w *= 2
    return prev if prev is not None else frozenset(), False, w // 2


def _diam_x(orbit: OrbitMap, pts: Iterable[Word]) -> int:
    pl = [orbit(p) for p in pts]
    best = 0
    for i in range(len(pl)):
        for j in range(i + 1, len(pl)):
            best = max(best, space_distance(orbit.space, pl[i], pl[j]))
    return best


def _setdist_x(orbit: OrbitMap, a: Iterable[Word], b: Iterable[Word]) -> int:
    pa = [orbit(p) for p in a]
    pb = [orbit(p) for p in b]
    return min(space_distance(orbit.space, u, v) for u in pa for v in pb)


def coset_distance(orbit: OrbitMap, axis: Axis, x, y) -> int:
    """diam_X of the union of the projections of x and y onto the axis.

    x and y may be single elements or finite iterables of elements.
    """
    xs = [x] if isinstance(x, Word) else list(x)
    ys = [y] if isinstance(y, Word) else list(y)
    union = set(projection_of_set(orbit, xs, axis)) | set(projection_of_set(orbit, ys, axis))
    return _diam_x(orbit, union)


def strong_projection(orbit: OrbitMap, axis: Axis, x: Word) -> ProjectionValue:
    """Equivariant nearest-point projection; exact on tree models.

    On trees the nearest-point set itself is equivariant (left translations
    are graph automorphisms), so this coincides with project_to_set; on other
    models the value is still returned but flagged, since the stronger
    projection identity is only checked, not guaranteed.
    """
    val = project_to_set(orbit, x, axis)
    if isinstance(orbit.space, (CayleyTree, BassSerreTree)):
        return val
    import warnings

    warnings.warn("strong_projection on a non-tree model: property checked, not guaranteed")
    return val


# ---------------------------------------------------------------------------
# two-sided projection alternative


@dataclass(frozen=True)
class AlternativeReport:
    checked: int
    violations: tuple
    bound: int

    @property
    def ok(self) -> bool:
        return not self.violations


def behrstock_alternative(
    orbit: OrbitMap, a1: Axis, a2: Axis, xs: Sequence[Word], bound: int = 2
) -> AlternativeReport:
    """Check: far projection on one axis forces a close projection on the other.

    Hypothesis and conclusion both use point-set distance (min over pairs);
    a violation is an x that is far on both sides.
    """
    p12, _, _ = project_axis_onto(orbit, a2, a1)
    p21, _, _ = project_axis_onto(orbit, a1, a2)
    violations = []
    for x in xs:
        q1 = project_to_set(orbit, x, a1).points
        if _setdist_x(orbit, q1, p12) > bound:
            q2 = project_to_set(orbit, x, a2).points
            if _setdist_x(orbit, q2, p21) > bound:
                violations.append(x)
    return AlternativeReport(len(xs), tuple(violations), bound)


def strong_alternative_violations(
    orbit: OrbitMap, a1: Axis, a2: Axis, xs: Sequence[Word], bound: int = 2
) -> list[Word]:
    """Exact-identification form: far on a1 forces proj onto a2 to equal the gate."""
    p12, _, _ = project_axis_onto(orbit, a2, a1)
    p21, _, _ = project_axis_onto(orbit, a1, a2)
    bad = []
    for x in xs:
        q1 = project_to_set(orbit, x, a1).points
        if _setdist_x(orbit, q1, p12) > bound:
            q2 = frozenset(project_to_set(orbit, x, a2).points)
            if q2 != p21:
                bad.append(x)
    return bad


# ---------------------------------------------------------------------------
# coset enumeration and distance-formula sums


@dataclass(frozen=True)
class CosetEntry:
    axis: Axis
    value: int
    position: int
    proj_o: tuple[Word, ...]
    proj_p: tuple[Word, ...]


@dataclass
class CosetRecord:
    """All cosets of <root(g)> where two points project >= threshold apart."""

    orbit: OrbitMap
    g: Word
    o: Word
    p: Word
    threshold: int
    entries: list[CosetEntry]
    certified: bool
    search: dict = field(default_factory=dict)

    def axes(self) -> list[Axis]:
        return [e.axis for e in self.entries]

    def to_jsonl(self) -> str:
        lines = []
        for i, e in enumerate(self.entries):
            lines.append(
                json.dumps(
                    {
                        "cosetRep": str(e.axis.rep),
                        "root": str(e.axis.root),
                        "value": e.value,
                        "orderIndex": i,
                        "projections": {
                            "o": [str(w) for w in e.proj_o],
                            "p": [str(w) for w in e.proj_p],
                        },
                    }
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")


def enumerate_cosets(orbit: OrbitMap, g: Word, o: Word, p: Word, threshold: int, window: int | None = None) -> CosetRecord:
    """Cosets h<root(g)> with projection distance of (o, p) at least threshold.

    On a Cayley tree with the identity orbit map, candidates are drawn from a
    small neighbourhood of the geodesic [o, p]: a coset whose projections of
    o and p are >= threshold apart must cross that geodesic, so the search is
    certified complete whenever threshold exceeds the coset point spacing
    plus rounding.  Otherwise a ball of the given window radius is scanned
    and the record is flagged partial.
    """
    if threshold < 1:
        raise GroupError("threshold must be >= 1")
    model = orbit.group
    base = axis_of(orbit.space, g)
    root = base.root
    q = len(root)
    tree_exact = isinstance(orbit.space, CayleyTree) and orbit.name == "identity"
    certified = tree_exact and threshold > 2 * (q // 2) and threshold >= (q - 1) + 2 * (q // 2)
    seen: set[tuple[int, ...]] = set()
    axes: list[Axis] = []

    def add_candidate(w: Word):
        key = coset_rep_key(model, root, w)
        if key not in seen:
            seen.add(key)
            axes.append(Axis(model, root, Word(model, key)))

    if tree_exact:
        rho0 = q // 2 + 1
        pad = ball(model, model.identity(), rho0, cap=max(rho0, 10))
        for v in geodesic(model, o, p):
            for u in pad:
                add_candidate(v * u)
        if window is not None and not certified:
            for w in ball(model, model.identity(), window, cap=max(window, 10)):
                add_candidate(w)
            certified = False
    else:
        w = window if window is not None else word_distance(model, o, p) + threshold
        for cand in ball(model, model.identity(), w, cap=max(w, 10)):
            add_candidate(cand)
        certified = False

    entries = []
    for ax in axes:
        po = project_to_set(orbit, o, ax)
        pp = project_to_set(orbit, p, ax)
        value = _diam_x(orbit, set(po.points) | set(pp.points))
        if value >= threshold:
            entries.append((ax, value, po.points, pp.points))

    geo = geodesic(model, o, p).vertices
    geo_imgs = [orbit(v) for v in geo]

    def position(pts: tuple[Word, ...]) -> int:
        img = orbit(pts[0])
        dists = [space_distance(orbit.space, img, gv) for gv in geo_imgs]
        return dists.index(min(dists))

    full = [
        CosetEntry(ax, value, position(po), po, pp) for ax, value, po, pp in entries
    ]
    full.sort(key=lambda e: (e.position, e.axis.rep.sort_key()))
    return CosetRecord(
        orbit,
        g,
        o,
        p,
        threshold,
        full,
        certified,
        search={"kind": "geodesic-neighbourhood" if tree_exact else "ball", "window": window},
    )


def distance_formula_sum(record: CosetRecord, x: Word, y: Word) -> int:
    """Sum of coset distances of (x, y) over the record's cosets where the
    projections of x and y actually differ."""
    if not record.certified:
        raise CertificationError("distance-formula sums require a certified coset record")
    orbit = record.orbit
    total = 0
    for e in record.entries:
        px = project_to_set(orbit, x, e.axis).points
        py = project_to_set(orbit, y, e.axis).points
        if set(px) != set(py):
            total += _diam_x(orbit, set(px) | set(py))
    return total


@dataclass(frozen=True)
class OrderReport:
    pairs: int
    disagreements: tuple

    @property
    def consistent(self) -> bool:
        return not self.disagreements


def linear_order(record: CosetRecord, bound: int = 2) -> tuple[list[CosetEntry], OrderReport]:
    """Entries ordered along [o, p], with the four order criteria cross-checked.

    For every ordered pair the report evaluates: (1) o projects far from the
    later coset's shadow on the earlier one, (2) o and the earlier coset have
    identical projections on the later one, (3) p projects far from the
    earlier coset's shadow on the later one, (4) p and the later coset have
    identical projections on the earlier one.  Any disagreement among the
    four is recorded (data, not an error).
    """
    orbit = record.orbit
    entries = record.entries
    disagreements = []
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            a_i, a_j = entries[i].axis, entries[j].axis
            shadow_ij, _, _ = project_axis_onto(orbit, a_j, a_i)  # a_j seen on a_i
            shadow_ji, _, _ = project_axis_onto(orbit, a_i, a_j)
            c1 = _diam_x(orbit, set(entries[i].proj_o) | set(shadow_ij)) > bound
            c2 = frozenset(entries[j].proj_o) == shadow_ji
            c3 = _diam_x(orbit, set(entries[j].proj_p) | set(shadow_ji)) > bound
            c4 = frozenset(entries[i].proj_p) == shadow_ij
            if not (c1 and c2 and c3 and c4):
                disagreements.append(((i, j), (c1, c2, c3, c4)))
    n = len(entries)
    return entries, OrderReport(n * (n - 1) // 2, tuple(disagreements))


@dataclass(frozen=True)
class LowerBoundResult:
    lhs: int
    rhs: float
    passed: bool


def lower_bound_check(orbit: OrbitMap, g: Word, a: Word, b: Word, threshold: int) -> LowerBoundResult:
    """Check d_X(a x0, b x0) >= half the distance-formula sum of (a, b)."""
    record = enumerate_cosets(orbit, g, a, b, threshold)
    lhs = space_distance(orbit.space, orbit(a), orbit(b))
    rhs = 0.5 * distance_formula_sum(record, a, b)
    return LowerBoundResult(lhs, rhs, lhs >= rhs)


# ---------------------------------------------------------------------------
# pivot search


@dataclass(frozen=True)
class PivotResult:
    pivot: Word
    values: tuple[int, int]
    passed: bool
    examined: int


def default_independent_loxodromics(model: GroupModel) -> tuple[Word, Word]:
    """Two loxodromics with distinct axes, used to seed pivot searches."""
    if isinstance(model, FreeGroup) and model.rank >= 2:
        g = model.generators()
        return g[0], g[1]
    if isinstance(model, FreeProduct) and len(model.factors) == 2:
        gens = model.generators()
        f0 = model.factors[0].rank
        if f0 >= 2:
            return gens[0] * gens[f0], gens[1] * gens[f0]
        return gens[0] * gens[f0], gens[0].inverse() * gens[f0]
    raise GroupError(f"no default loxodromic pair shipped for {model.describe()}")


def pivot(
    orbit: OrbitMap,
    alpha: GeodesicPath,
    q: Word,
    h_axis: Axis,
    s: int,
    bound: int = 4,
    seeds: tuple[Word, Word] | None = None,
) -> PivotResult:
    """Search a small ball for a translate that uncouples a path from an axis.

    Returns q' with d(p, q') <= s minimizing the larger of (i) the projection
    spread of the translated path on the axis together with p, and (ii) the
    projection spread of the axis on the translated path together with q'.
    The search tries powers of the model's independent loxodromics first and
    then the whole ball, stopping early once both values are <= bound.
    """
    model = orbit.group
    p = alpha.vertices[0]
    if q not in set(alpha.vertices):
        raise GroupError("pivot: q must lie on the path")
    if seeds is None:
        seeds = default_independent_loxodromics(model)

    def values(qp: Word) -> tuple[int, int]:
        t = qp * q.inverse()
        moved = [t * v for v in alpha.vertices]
        proj_path = projection_of_set(orbit, moved, h_axis)
        proj_p = project_to_set(orbit, p, h_axis).points
        v1 = _diam_x(orbit, set(proj_path) | set(proj_p))
        axis_pts = h_axis.points(max(8, 2 * (len(p) + len(q) + s)))
        proj_axis = projection_of_set(orbit, axis_pts, moved)
        proj_qp = project_to_set(orbit, qp, moved).points
        v2 = _diam_x(orbit, set(proj_axis) | set(proj_qp))
        return v1, v2

    candidates: list[Word] = [p]
    for g0 in seeds:
        j = 1
        while j * len(g0) <= s:
            candidates.append(p * g0**j)
            candidates.append(p * g0**-j)
            j += 1
    for w in ball(model, model.identity(), s, cap=max(s, 10)):
        candidates.append(p * w)

    seen: set[tuple[int, ...]] = set()
    best: tuple[int, tuple[int, int], Word] | None = None
    examined = 0
    for qp in candidates:
        if qp.letters in seen or word_distance(model, p, qp) > s:
            continue
        seen.add(qp.letters)
        v = values(qp)
        examined += 1
        score = max(v)
        if best is None or score < best[0]:
            best = (score, v, qp)
        if score <= bound:
            return PivotResult(qp, v, True, examined)
    assert best is not None
    return PivotResult(best[2], best[1], False, examined)


# ---------------------------------------------------------------------------
# axis pools


def line_signature(axis: Axis):
    """A key identifying the hull line of an axis (ignoring the coset phase)."""
    anchor, direction, _ = _line_data(axis.model, axis.root.letters, axis.rep.letters)
    return (anchor.letters, direction)


def translate_axis_pool(
    tree: CayleyTree, g: Word, count: int, seed: int, element_radius: int = 5
) -> list[Axis]:
    """Distinct random translates h·<root(g)> of one elementary closure.

    The sharp two-sided projection constants (and the exact identification of
    far projections with the gate shadow) hold for translates of a single
    cyclic coset family; mixed-root pools genuinely violate the exact
    identification on trees, e.g. the axes a<a b^-1> and e<a> share the edge
    from a to a^2, and points far out on the first project to {a} while the
    first axis' shadow on the second is {a, a^2}.
    """
    import numpy as np

    model = tree.model
    base = axis_of(tree, g)
    rng = np.random.default_rng(seed)
    candidates = ball(model, model.identity(), element_radius)
    pool: list[Axis] = []
    seen = set()
    while len(pool) < count:
        h = candidates[int(rng.integers(len(candidates)))]
        ax = base.translate(h)
        key = (ax.root.letters, ax.rep.letters)
        if key not in seen:
            seen.add(key)
            pool.append(ax)
    return pool


def default_axis_pool(
    tree: CayleyTree,
    count: int,
    seed: int,
    max_root_len: int = 2,
    element_radius: int = 5,
    distinct_lines: bool = True,
) -> list[Axis]:
    """A reproducible pool of axes with short roots and pairwise distinct lines.

    Roots longer than two letters are excluded because translates of such
    axes can overlap along segments comparable to the root length, which
    breaks the sharp two-sided projection constants that hold for short
    roots on trees.
    """
    import numpy as np

    model = tree.model
    rng = np.random.default_rng(seed)
    pool: list[Axis] = []
    seen_axes = set()
    seen_lines = set()
    candidates = [w for w in ball(model, model.identity(), element_radius) if not w.is_identity()]
    while len(pool) < count:
        w = candidates[int(rng.integers(len(candidates)))]
        try:
            ax = axis_of(tree, w)
        except NotLoxodromicError:  # pragma: no cover - free groups have none
            continue
        if len(ax.root) > max_root_len:
            continue
        key = (ax.root.letters, ax.rep.letters)
        if key in seen_axes:
            continue
        if distinct_lines:
            sig = line_signature(ax)
            if sig in seen_lines:
                continue
            seen_lines.add(sig)
        seen_axes.add(key)
        pool.append(ax)
    return pool
