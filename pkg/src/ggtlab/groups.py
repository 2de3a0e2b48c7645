"""Concrete finitely generated groups with exact normal forms and word metrics.

Four families are supported, all with solvable word problem and an exact
geodesic length function:

* free groups  (normal form: free reduction),
* free abelian groups  (normal form: sorted exponent vector, l^1 metric),
* free products of the above  (normal form: alternating syllables),
* direct products  G x Z  (normal form: componentwise).

Elements are stored as tuples of signed 1-based generator indices, always in
canonical normal form, and for every shipped family the geodesic word length
equals the length of the canonical letter tuple.  Generating sets are fixed to
the standard ones so that all metric computations are exact and reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class GroupError(ValueError):
    """Invalid group-theoretic input (bad letters, model mismatch, ...)."""


class BallCapError(GroupError):
    """A ball enumeration exceeded its configured radius cap."""


DEFAULT_RADIUS_CAP = 10

_FREE_NAME_POOL = "abcdfghjklmn"
_ABELIAN_NAME_POOL = "xyzwuv"
_CENTRAL_NAME_POOL = "tsr"


# ---------------------------------------------------------------------------
# models


class GroupModel:
    """Base class: a concrete group with a fixed ordered generating set."""

    generator_names: tuple[str, ...]

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def normalize(self, letters: Sequence[int]) -> tuple[int, ...]:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def validate_letters(self, letters: Sequence[int]) -> None:
        n = self.rank
        for ell in letters:
            if ell == 0 or abs(ell) > n:
                raise GroupError(f"letter {ell} does not index a generator of {self.describe()}")

    def identity(self) -> "Word":
        return Word(self, ())

    def generators(self) -> list["Word"]:
        return [Word(self, (i + 1,)) for i in range(self.rank)]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<{type(self).__name__} {self.describe()}>"


@dataclass(frozen=True, repr=False)
class FreeGroup(GroupModel):
    generator_names: tuple[str, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise GroupError("free group needs rank >= 1")

    def normalize(self, letters: Sequence[int]) -> tuple[int, ...]:
        self.validate_letters(letters)
        stack: list[int] = []
        for ell in letters:
            if stack and stack[-1] == -ell:
                stack.pop()
            else:
                stack.append(ell)
        return tuple(stack)

    def describe(self) -> str:
        return f"F{self.rank}"


@dataclass(frozen=True, repr=False)
class FreeAbelian(GroupModel):
    generator_names: tuple[str, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise GroupError("free abelian group needs rank >= 1")

    def normalize(self, letters: Sequence[int]) -> tuple[int, ...]:
        self.validate_letters(letters)
        exps = [0] * self.rank
        for ell in letters:
            exps[abs(ell) - 1] += 1 if ell > 0 else -1
        out: list[int] = []
        for i, e in enumerate(exps):
            out.extend([i + 1 if e > 0 else -(i + 1)] * abs(e))
        return tuple(out)

    def describe(self) -> str:
        return "Z" if self.rank == 1 else f"Z^{self.rank}"


@dataclass(frozen=True, repr=False)
class FreeProduct(GroupModel):
    """Free product of >= 2 factors; generators are globally indexed."""

    factors: tuple[GroupModel, ...]
    generator_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if len(self.factors) < 2:
            raise GroupError("free product needs >= 2 factors")
        names = tuple(n for f in self.factors for n in f.generator_names)
        if len(set(names)) != len(names):
            raise GroupError("generator names collide across factors")
        object.__setattr__(self, "generator_names", names)
        offsets, off = [], 0
        for f in self.factors:
            offsets.append(off)
            off += f.rank
        object.__setattr__(self, "_offsets", tuple(offsets))

    def factor_of(self, letter: int) -> int:
        idx = abs(letter) - 1
        offs = self._offsets
        for i in range(len(self.factors) - 1, -1, -1):
            if idx >= offs[i]:
                return i
        raise GroupError(f"letter {letter} out of range")

    def _to_local(self, letter: int, fi: int) -> int:
        off = self._offsets[fi]
        return letter - off if letter > 0 else letter + off

    def _to_global(self, letter: int, fi: int) -> int:
        off = self._offsets[fi]
        return letter + off if letter > 0 else letter - off

    def normalize(self, letters: Sequence[int]) -> tuple[int, ...]:
        self.validate_letters(letters)
        # stack of syllables (factor index, locally-normalized local letters)
        stack: list[tuple[int, tuple[int, ...]]] = []
        for ell in letters:
            fi = self.factor_of(ell)
            loc = self._to_local(ell, fi)
            if stack and stack[-1][0] == fi:
                merged = self.factors[fi].normalize(stack[-1][1] + (loc,))
                stack.pop()
                if merged:
                    stack.append((fi, merged))
            else:
                stack.append((fi, (loc,)))
        out: list[int] = []
        for fi, loc in stack:
            out.extend(self._to_global(l, fi) for l in loc)
        return tuple(out)

    def syllables(self, letters: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
        """Split canonical letters into (factor index, global letters) runs."""
        runs: list[tuple[int, tuple[int, ...]]] = []
        cur: list[int] = []
        cur_f = -1
        for ell in letters:
            fi = self.factor_of(ell)
            if fi != cur_f and cur:
                runs.append((cur_f, tuple(cur)))
                cur = []
            cur_f = fi
            cur.append(ell)
        if cur:
            runs.append((cur_f, tuple(cur)))
        return runs

    def describe(self) -> str:
        return " * ".join(
            f"({f.describe()})" if isinstance(f, (FreeProduct, DirectProduct)) else f.describe()
            for f in self.factors
        )


@dataclass(frozen=True, repr=False)
class DirectProduct(GroupModel):
    """G x Z with a central generator appended after G's generators."""

    left: GroupModel
    central_name: str
    generator_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if self.central_name in self.left.generator_names:
            raise GroupError("central generator name collides with left factor")
        object.__setattr__(self, "generator_names", self.left.generator_names + (self.central_name,))

    @property
    def central_index(self) -> int:
        return self.rank  # 1-based letter value of the central generator

    def split(self, letters: Sequence[int]) -> tuple[tuple[int, ...], int]:
        """Return (left-factor letters, central exponent)."""
        c = self.central_index
        left = tuple(l for l in letters if abs(l) != c)
        exp = sum(1 if l == c else -1 for l in letters if abs(l) == c)
        return left, exp

    def normalize(self, letters: Sequence[int]) -> tuple[int, ...]:
        self.validate_letters(letters)
        left, exp = self.split(letters)
        c = self.central_index
        out = list(self.left.normalize(left))
        out.extend([c if exp > 0 else -c] * abs(exp))
        return tuple(out)

    def describe(self) -> str:
        inner = self.left.describe()
        if isinstance(self.left, (FreeProduct, DirectProduct)):
            inner = f"({inner})"
        return f"{inner} x Z"


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """A group element in canonical normal form for its model."""

    model: GroupModel
    letters: tuple[int, ...]

    def __len__(self) -> int:
        # geodesic word length; for all shipped models this is the canonical
        # letter count
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if other.model != self.model:
            raise GroupError("cannot multiply words from different models")
        return Word(self.model, self.model.normalize(self.letters + other.letters))

    def inverse(self) -> "Word":
        inv = tuple(-l for l in reversed(self.letters))
        return Word(self.model, self.model.normalize(inv))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.model.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_identity(self) -> bool:
        return not self.letters

    def sort_key(self):
        """Length-lexicographic key; positive letters sort before inverses."""
        return (len(self.letters), tuple((abs(l), 0 if l > 0 else 1) for l in self.letters))

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        names = self.model.generator_names
        parts: list[str] = []
        i = 0
        while i < len(self.letters):
            j = i
            while j < len(self.letters) and self.letters[j] == self.letters[i]:
                j += 1
            n = j - i
            sign = 1 if self.letters[i] > 0 else -1
            name = names[abs(self.letters[i]) - 1]
            exp = sign * n
            parts.append(name if exp == 1 else f"{name}^{exp}")
            i = j
        return " ".join(parts)


def normal_form(model: GroupModel, raw: Sequence[int]) -> Word:
    """Canonical word for an arbitrary sequence of signed generator letters."""
    return Word(model, model.normalize(tuple(raw)))


def word_distance(model: GroupModel, g: Word, h: Word) -> int:
    """Word metric d(g, h) = |g^-1 h| for the model's standard generators."""
    if g.model != model or h.model != model:
        raise GroupError("word_distance: model mismatch")
    return len((g.inverse() * h).letters)


def _step_words(model: GroupModel, w: Word) -> Iterator[Word]:
    for i in range(1, model.rank + 1):
        for s in (i, -i):
            yield Word(model, model.normalize(w.letters + (s,)))


def ball(model: GroupModel, center: Word, radius: int, cap: int = DEFAULT_RADIUS_CAP) -> list[Word]:
    """All h with d(center, h) <= radius, in length-lexicographic order."""
    if radius < 0:
        raise GroupError("radius must be >= 0")
    if radius > cap:
        raise BallCapError(f"radius {radius} exceeds cap {cap}; pass cap= to raise it")
    if center.model != model:
        raise GroupError("ball: model mismatch")
    seen = {center.letters}
    frontier = [center]
    out = [center]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for v in _step_words(model, w):
                if v.letters not in seen:
                    seen.add(v.letters)
                    nxt.append(v)
        frontier = nxt
        out.extend(nxt)
    out.sort(key=Word.sort_key)
    return out


def sphere(model: GroupModel, center: Word, radius: int, cap: int = DEFAULT_RADIUS_CAP) -> list[Word]:
    """All h with d(center, h) == radius exactly."""
    b = ball(model, center, radius, cap=cap)
    return [w for w in b if word_distance(model, center, w) == radius]


@dataclass(frozen=True)
class GeodesicPath:
    """A unit-speed geodesic: consecutive vertices differ by one generator."""

    vertices: tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def __iter__(self) -> Iterator[Word]:
        return iter(self.vertices)


_LETTER_ORDER_KEY = lambda ell: (abs(ell), 0 if ell > 0 else 1)  # noqa: E731


def geodesic(model: GroupModel, g: Word, h: Word) -> GeodesicPath:
    """A geodesic from g to h, greedy with lexicographically least next letter."""
    if g.model != model or h.model != model:
        raise GroupError("geodesic: model mismatch")
    path = [g]
    cur = g
    remaining = word_distance(model, cur, h)
    letters = sorted(
        [s for i in range(1, model.rank + 1) for s in (i, -i)], key=_LETTER_ORDER_KEY
    )
    while remaining > 0:
        for s in letters:
            cand = Word(model, model.normalize(cur.letters + (s,)))
            if word_distance(model, cand, h) == remaining - 1:
                cur = cand
                break
        else:  # pragma: no cover - cannot happen in a connected Cayley graph
            raise GroupError("no distance-decreasing step found")
        path.append(cur)
        remaining -= 1
    return GeodesicPath(tuple(path))


# ---------------------------------------------------------------------------
# parsing


def _allocate_names(spec_tree, used: set[str]) -> GroupModel:
    """Instantiate a parsed model tree, drawing generator names from pools."""

    def take(pool: str, count: int) -> tuple[str, ...]:
        out = []
        for ch in pool:
            if ch not in used:
                used.add(ch)
                out.append(ch)
                if len(out) == count:
                    return tuple(out)
        raise GroupError("generator name pool exhausted")

    kind = spec_tree[0]
    if kind == "free":
        return FreeGroup(take(_FREE_NAME_POOL, spec_tree[1]))
    if kind == "abelian":
        return FreeAbelian(take(_ABELIAN_NAME_POOL, spec_tree[1]))
    if kind == "freeprod":
        return FreeProduct(tuple(_allocate_names(t, used) for t in spec_tree[1]))
    if kind == "directz":
        left = _allocate_names(spec_tree[1], used)
        return DirectProduct(left, take(_CENTRAL_NAME_POOL, 1)[0])
    raise GroupError(f"unknown model kind {kind}")  # pragma: no cover


def _tokenize_model(text: str) -> list[str]:
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()*":
            toks.append(ch)
            i += 1
        elif ch == "x" and (i + 1 == len(text) or not text[i + 1].isalnum()):
            toks.append("x")
            i += 1
        else:
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "^"):
                j += 1
            toks.append(text[i:j])
            i = j
    return toks


def parse_model(text: str) -> GroupModel:
    """Parse a compact descriptor: ``F2``, ``Z^2 * Z``, ``(Z^2 * Z) x Z``.

    ``*`` builds free products, ``x`` builds a direct product with Z (the
    right operand must be Z).  Generator names are assigned from fixed pools:
    free factors get a, b, c, ...; abelian factors get x, y, z, ...; the
    central Z of a direct product gets t.
    """
    toks = _tokenize_model(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def atom():
        nonlocal pos
        t = peek()
        if t == "(":
            pos += 1
            node = expr()
            if peek() != ")":
                raise GroupError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return node
        if t is None:
            raise GroupError(f"unexpected end of descriptor {text!r}")
        pos += 1
        if t.startswith("F") and t[1:].isdigit():
            return ("free", int(t[1:]))
        if t == "Z":
            return ("abelian", 1)
        if t.startswith("Z^") and t[2:].isdigit():
            return ("abelian", int(t[2:]))
        raise GroupError(f"cannot parse model atom {t!r}")

    def expr():
        nonlocal pos
        node = atom()
        while peek() in ("*", "x"):
            op = peek()
            pos += 1
            rhs = atom()
            if op == "*":
                if node[0] == "freeprod":
                    node = ("freeprod", node[1] + [rhs])
                else:
                    node = ("freeprod", [node, rhs])
            else:
                if rhs != ("abelian", 1):
                    raise GroupError("direct products are only supported as G x Z")
                node = ("directz", node)
        return node

    tree = expr()
    if pos != len(toks):
        raise GroupError(f"trailing tokens in model descriptor {text!r}")
    return _allocate_names(tree, set())


@lru_cache(maxsize=None)
def model_from_descriptor(text: str) -> GroupModel:
    """Cached parse so that equal descriptors give identical model objects."""
    return parse_model(text)


def parse_word(model: GroupModel, text: str) -> Word:
    """Parse whitespace-separated letters with ^ powers, e.g. ``b a^5 b``."""
    text = text.strip()
    if text in ("", "e", "1"):
        return model.identity()
    name_to_idx = {n: i + 1 for i, n in enumerate(model.generator_names)}
    raw: list[int] = []
    for tok in text.split():
        if "^" in tok:
            name, _, p = tok.partition("^")
            try:
                power = int(p)
            except ValueError:
                raise GroupError(f"bad power in token {tok!r}") from None
        else:
            name, power = tok, 1
        if name not in name_to_idx:
            raise GroupError(f"unknown generator {name!r} for model {model.describe()}")
        idx = name_to_idx[name]
        raw.extend([idx if power > 0 else -idx] * abs(power))
    return normal_form(model, raw)
