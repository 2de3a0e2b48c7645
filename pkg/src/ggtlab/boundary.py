"""Ends of trees: eventually periodic rays, centers of ideal triples, and
cross-ratios.

Boundary points are restricted to eventually periodic rays (finite prefix
plus repeating block), so every ideal line is finitely describable and the
center of an ideal triple is an exact tree median.  Descriptors are
canonicalized (shortest prefix, minimal period), making equality of boundary
points a plain data comparison.  Only free-group Cayley trees are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .groups import FreeGroup, GroupError, Word, word_distance


class BoundaryError(GroupError):
    """Invalid boundary-point data or coincident points."""


@dataclass(frozen=True)
class BoundaryPoint:
    """The end of the ray prefix * period^infinity, in canonical form."""

    model: FreeGroup
    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def vertex(self, t: int) -> Word:
        """The t-th vertex of the geodesic ray from the identity."""
        if t < 0:
            raise BoundaryError("ray parameter must be >= 0")
        need = t + len(self.prefix) + 2 * len(self.period)
        reps = need // len(self.period) + 2
        letters = self.model.normalize(self.prefix + self.period * reps)
        return Word(self.model, letters[:t])

    def __str__(self) -> str:
        pre = Word(self.model, self.prefix)
        per = Word(self.model, self.period)
        return f"{'' if pre.is_identity() else pre}.({per})"


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def make_boundary_point(model: FreeGroup, prefix: Word, period: Word) -> BoundaryPoint:
    """Canonicalize a descriptor: minimal eventual period, shortest prefix."""
    if not isinstance(model, FreeGroup):
        raise BoundaryError("boundary points live on free-group trees")
    if period.is_identity():
        raise BoundaryError("period must be nontrivial")
    horizon = len(prefix) + 4 * len(period) + 8
    reps = horizon // len(period) + 2
    letters = model.normalize(prefix.letters + period.letters * reps)
    if len(letters) < horizon:
        raise BoundaryError(f"{prefix}*({period})^inf collapses; not a ray")
    window = letters[: len(prefix) + 3 * len(period) + 6]
    for p in _divisors(len(period)):
        # earliest point after which the spelling is p-periodic
        t0 = len(window) - p
        while t0 > 0 and window[t0 - 1] == window[t0 - 1 + p]:
            t0 -= 1
        if all(
            window[i] == window[i + p] for i in range(t0, len(window) - p)
        ) and t0 + 2 * p <= len(window):
            return BoundaryPoint(model, window[:t0], window[t0 : t0 + p])
    raise BoundaryError("could not extract an eventual period")  # pragma: no cover


def parse_boundary_point(model: FreeGroup, text: str) -> BoundaryPoint:
    """Parse ``prefix.(period)``, e.g. ``b.(a)`` for b a^inf; prefix optional."""
    from .groups import parse_word

    text = text.strip()
    if "(" not in text or not text.endswith(")"):
        raise BoundaryError(f"bad boundary descriptor {text!r}")
    head, _, tail = text.partition("(")
    head = head.rstrip(".").strip()
    prefix = parse_word(model, head) if head else model.identity()
    period = parse_word(model, tail[:-1])
    return make_boundary_point(model, prefix, period)


# ---------------------------------------------------------------------------
# centers and cross-ratios


@dataclass(frozen=True)
class CenterSet:
    points: tuple[Word, ...]
    bound: int
    diameter: int


def _stable_median(model: FreeGroup, a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, t0: int):
    def median_at(t: int) -> Word:
        av, bv, cv = a.vertex(t), b.vertex(t), c.vertex(t)
        dab = word_distance(model, av, bv)
        dac = word_distance(model, av, cv)
        dbc = word_distance(model, bv, cv)
        k = (dab + dac - dbc) // 2
        w = (av.inverse() * bv).letters
        return Word(model, model.normalize(av.letters + w[:k]))

    t = t0
    m = median_at(t)
    for _ in range(8):
        m2 = median_at(t + 3)
        if m2 == m:
            return m
        m, t = m2, t + 3
    raise BoundaryError("median failed to stabilize")  # pragma: no cover


def _descriptor_size(p: BoundaryPoint) -> int:
    return len(p.prefix) + len(p.period)


def tripod_centers(
    model: FreeGroup, a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, bound: int = 0
) -> CenterSet:
    """Centers of an ideal triple: the exact tree median, thickened by a
    radius-`bound` ball intersected with the three ideal lines."""
    pts = (a, b, c)
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i] == pts[j]:
                raise BoundaryError("boundary points of a triple must be distinct")
    t0 = 2 * max(_descriptor_size(p) for p in pts) + 8
    m = _stable_median(model, a, b, c, t0)
    if bound == 0:
        return CenterSet((m,), 0, 0)
    horizon = t0 + bound + 4
    line_pts: set[Word] = set()
    for p, q in ((a, b), (b, c), (a, c)):
        pv, qv = p.vertex(horizon), q.vertex(horizon)
        w = (pv.inverse() * qv).letters
        cur = pv
        line_pts.add(cur)
        for ell in w:
            cur = cur * Word(model, (ell,))
            line_pts.add(cur)
    chosen = tuple(
        sorted((v for v in line_pts if word_distance(model, v, m) <= bound), key=Word.sort_key)
    )
    diam = 0
    for i in range(len(chosen)):
        for j in range(i + 1, len(chosen)):
            diam = max(diam, word_distance(model, chosen[i], chosen[j]))
    return CenterSet(chosen, bound, diam)


def cross_ratio(
    model: FreeGroup,
    a: BoundaryPoint,
    b: BoundaryPoint,
    c: BoundaryPoint,
    d: BoundaryPoint,
    bound: int = 0,
) -> int:
    """diam( centers(a,b,c) ∪ centers(a,d,c) ), an exact integer on trees."""
    for p, q in ((a, b), (a, c), (a, d), (b, c), (b, d), (c, d)):
        if p == q:
            raise BoundaryError("cross-ratio needs four distinct boundary points")
    m1 = tripod_centers(model, a, b, c, bound)
    m2 = tripod_centers(model, a, d, c, bound)
    union = list(dict.fromkeys(m1.points + m2.points))
    diam = 0
    for i in range(len(union)):
        for j in range(i + 1, len(union)):
            diam = max(diam, word_distance(model, union[i], union[j]))
    return diam


# ---------------------------------------------------------------------------
# distortion under bijective QIs


@dataclass(frozen=True)
class DistortionResult:
    lambda_prime: float
    eps_prime: int
    witness: tuple | None
    skipped: int
    pairs: tuple[tuple[int, int], ...]


def _image_median(model: FreeGroup, qi, a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, t0: int) -> Word:
    """Median of the images of ray truncations, stabilized over the horizon."""

    def median_at(t: int) -> Word:
        av, bv, cv = qi.apply(a.vertex(t)), qi.apply(b.vertex(t)), qi.apply(c.vertex(t))
        dab = word_distance(model, av, bv)
        dac = word_distance(model, av, cv)
        dbc = word_distance(model, bv, cv)
        k = (dab + dac - dbc) // 2
        w = (av.inverse() * bv).letters
        return Word(model, model.normalize(av.letters + w[:k]))

    t = t0
    m = median_at(t)
    for _ in range(10):
        m2 = median_at(t + 3)
        if m2 == m:
            return m
        m, t = m2, t + 3
    raise BoundaryError("image median failed to stabilize")


def cross_ratio_distortion(model: FreeGroup, qi, quadruples: Sequence[tuple]) -> DistortionResult:
    """Fit the additive distortion of cross-ratios under a bijective QI.

    Image cross-ratios are recomputed from scratch: the centers of the image
    ideal triples are medians of QI-images of deep ray truncations.  The
    reported pair is (1, eps') with eps' the largest observed excess; the
    multiplicative constant stays 1 for every shipped QI kind.
    """
    eps = 0
    witness = None
    skipped = 0
    pairs: list[tuple[int, int]] = []
    for quad in quadruples:
        a, b, c, d = quad
        try:
            base = cross_ratio(model, a, b, c, d)
            t0 = 2 * max(_descriptor_size(p) for p in quad) + 8
            m1 = _image_median(model, qi, a, b, c, t0)
            m2 = _image_median(model, qi, a, d, c, t0)
            img = word_distance(model, m1, m2)
        except BoundaryError:
            skipped += 1
            continue
        pairs.append((base, img))
        if img - base > eps:
            eps = img - base
            witness = quad
    return DistortionResult(1.0, eps, witness, skipped, tuple(pairs))


def random_boundary_points(model: FreeGroup, count: int, seed: int) -> list[BoundaryPoint]:
    """Distinct random eventually periodic rays with short descriptors."""
    import numpy as np

    from .groups import ball

    rng = np.random.default_rng(seed)
    prefixes = ball(model, model.identity(), 2)
    periods = [w for w in ball(model, model.identity(), 2) if not w.is_identity()]
    periods = [w for w in periods if not w.letters or w.letters[0] != -w.letters[-1]]
    out: list[BoundaryPoint] = []
    seen: set = set()
    while len(out) < count:
        pre = prefixes[int(rng.integers(len(prefixes)))]
        per = periods[int(rng.integers(len(periods)))]
        try:
            bp = make_boundary_point(model, pre, per)
        except BoundaryError:
            continue
        key = (bp.prefix, bp.period)
        if key not in seen:
            seen.add(key)
            out.append(bp)
    return out
