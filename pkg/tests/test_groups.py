"""Normal forms, word metrics, balls and geodesics on the shipped models."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggtlab.groups import (
    BallCapError,
    GroupError,
    Word,
    ball,
    geodesic,
    model_from_descriptor,
    normal_form,
    parse_model,
    parse_word,
    sphere,
    word_distance,
)

from conftest import w
from oracles import abelian2_ball_size, free_ball_size, naive_ball


# --- parsing -------------------------------------------------------------


def test_model_descriptors_roundtrip():
    for text in ["F2", "Z^2", "Z^2 * Z", "(Z^2 * Z) x Z", "F2 x Z"]:
        m = parse_model(text)
        assert m.describe() == text


def test_generator_name_allocation(f2, z2z, z2z_by_z):
    assert f2.generator_names == ("a", "b")
    assert z2z.generator_names == ("x", "y", "z")
    assert z2z_by_z.generator_names == ("x", "y", "z", "t")


def test_parse_rejects_garbage():
    with pytest.raises(GroupError):
        parse_model("Q8")
    with pytest.raises(GroupError):
        parse_model("F2 x F2")
    with pytest.raises(GroupError):
        parse_model("(Z^2 * Z")


def test_parse_word_and_str(f2):
    word = parse_word(f2, "b a^5 b")
    assert str(word) == "b a^5 b"
    assert len(word) == 7
    assert parse_word(f2, "e").is_identity()
    with pytest.raises(GroupError):
        parse_word(f2, "c^2")


# --- normal forms --------------------------------------------------------


def test_free_reduction(f2):
    assert normal_form(f2, (1, -1, 2)) == w(f2, "b")


def test_abelian_commuting_sort(z2):
    assert normal_form(z2, (1, 2, 1)) == w(z2, "x^2 y")


def test_free_product_cross_syllable_cancellation(z2z):
    # x z z^-1 y collapses to the single syllable xy
    assert normal_form(z2z, (1, 3, -3, 2)) == w(z2z, "x y")
    assert z2z.syllables(w(z2z, "x y").letters) == [(0, (1, 2))]


def test_direct_product_normal_form(z2z_by_z):
    word = normal_form(z2z_by_z, (4, 1, -4, 2, 4))
    assert word == w(z2z_by_z, "x y t")


def test_normal_form_idempotent_examples(f2, z2, z2z):
    for model, raw in [(f2, (1, 1, -1, 2)), (z2, (2, 1, -2)), (z2z, (3, 1, -3, 3))]:
        word = normal_form(model, raw)
        assert normal_form(model, word.letters) == word


def test_unknown_letter_rejected(f2):
    with pytest.raises(GroupError):
        normal_form(f2, (3,))


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12))
@settings(max_examples=150, deadline=None)
def test_normal_form_idempotent_free(letters):
    f2 = model_from_descriptor("F2")
    word = normal_form(f2, letters)
    assert normal_form(f2, word.letters) == word


@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=12))
@settings(max_examples=150, deadline=None)
def test_normal_form_represents_same_element_free_product(letters):
    # multiplying letter by letter must agree with one-shot normalization
    m = model_from_descriptor("Z^2 * Z")
    word = normal_form(m, letters)
    step = m.identity()
    for ell in letters:
        step = step * Word(m, (ell,))
    assert step == word


# --- word metric ----------------------------------------------------------


def test_distance_examples(f2, z2, z2z):
    assert word_distance(f2, f2.identity(), w(f2, "a b a^-1")) == 3
    assert word_distance(z2, z2.identity(), w(z2, "x^3 y^-2")) == 5
    assert word_distance(z2z, z2z.identity(), w(z2z, "x y z x")) == 4


def test_distance_against_bfs_radius(z2z):
    # BFS over the Cayley graph: every element of the radius-4 ball has
    # word length equal to its BFS depth
    e = z2z.identity()
    depths = {e: 0}
    frontier = [e]
    for d in range(1, 5):
        nxt = []
        for v in frontier:
            for i in range(1, z2z.rank + 1):
                for s in (i, -i):
                    u = v * Word(z2z, (s,))
                    if u not in depths:
                        depths[u] = d
                        nxt.append(u)
        frontier = nxt
    for word, d in depths.items():
        assert word_distance(z2z, e, word) == d


def test_metric_axioms_small_balls(f2, z2, z2z):
    for model in (f2, z2, z2z):
        pts = ball(model, model.identity(), 2)
        for g, h in itertools.combinations(pts[:12], 2):
            assert word_distance(model, g, h) == word_distance(model, h, g)
        for g, h, k in itertools.combinations(pts[:9], 3):
            assert word_distance(model, g, k) <= word_distance(model, g, h) + word_distance(
                model, h, k
            )


def test_left_invariance_random(f2, z2z, z2z_by_z):
    import numpy as np

    rng = np.random.default_rng(7)
    for model in (f2, z2z, z2z_by_z):
        pts = ball(model, model.identity(), 3)
        for _ in range(1000):
            g, a, b = (pts[int(i)] for i in rng.integers(0, len(pts), 3))
            assert word_distance(model, g * a, g * b) == word_distance(model, a, b)


# --- balls ----------------------------------------------------------------


def test_ball_counts(f2, z2):
    assert len(ball(f2, f2.identity(), 1)) == 5
    assert len(ball(f2, f2.identity(), 2)) == 17
    assert len(ball(z2, z2.identity(), 2)) == 13


def test_ball_against_formula_oracle(f2, z2):
    for r in range(5):
        assert len(ball(f2, f2.identity(), r)) == free_ball_size(2, r)
        assert len(ball(z2, z2.identity(), r)) == abelian2_ball_size(r)


def test_ball_against_naive_bfs(z2z):
    got = set(ball(z2z, z2z.identity(), 3))
    assert got == naive_ball(z2z, z2z.identity(), 3)


def test_ball_order_deterministic(f2):
    b = ball(f2, f2.identity(), 2)
    assert b == sorted(b, key=Word.sort_key)
    assert b[0].is_identity()
    assert str(b[1]) == "a"


def test_ball_cap(f2):
    with pytest.raises(BallCapError):
        ball(f2, f2.identity(), 11)
    assert len(ball(f2, f2.identity(), 11, cap=11)) == free_ball_size(2, 11)


def test_sphere(f2):
    assert len(sphere(f2, f2.identity(), 3)) == 36


# --- geodesics --------------------------------------------------------


def test_geodesic_examples(f2, z2, z2z):
    p1 = geodesic(f2, f2.identity(), w(f2, "a b"))
    assert [str(v) for v in p1] == ["e", "a", "a b"]
    p2 = geodesic(z2, z2.identity(), w(z2, "x y"))
    assert [str(v) for v in p2] == ["e", "x", "x y"]
    p3 = geodesic(z2z, z2z.identity(), w(z2z, "x z"))
    assert [str(v) for v in p3] == ["e", "x", "x z"]


def test_geodesic_lengths_exhaustive(z2z):
    e = z2z.identity()
    for target in ball(z2z, e, 3):
        path = geodesic(z2z, e, target)
        assert len(path) == word_distance(z2z, e, target)
        assert path.vertices[0] == e and path.vertices[-1] == target
        for u, v in zip(path.vertices, path.vertices[1:]):
            assert word_distance(z2z, u, v) == 1
