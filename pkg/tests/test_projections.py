"""Axes, projections, coset distance sums, linear order, and pivots."""

import json

import pytest

from ggtlab.groups import ball, geodesic, word_distance
from ggtlab.projections import (
    Axis,
    CertificationError,
    NotLoxodromicError,
    axis_of,
    behrstock_alternative,
    coset_distance,
    default_axis_pool,
    distance_formula_sum,
    enumerate_cosets,
    line_signature,
    linear_order,
    lower_bound_check,
    make_axis,
    pivot,
    project_axis_onto,
    project_to_set,
    projection_of_set,
    strong_alternative_violations,
    strong_projection,
    translate_axis_pool,
)
from ggtlab.spaces import space_distance

from conftest import w
from oracles import scan_axis_projection


# --- axes -------------------------------------------------------------------


def test_axis_of_power(f2, f2_tree):
    ax = axis_of(f2_tree, w(f2, "a^2"))
    assert str(ax.root) == "a" and ax.rep.is_identity()


def test_axis_of_conjugate(f2, f2_tree):
    ax = axis_of(f2_tree, w(f2, "b a^2 b^-1"))
    assert str(ax.root) == "a" and str(ax.rep) == "b"


def test_axis_elliptic_on_bass_serre(z2z, bs_tree):
    with pytest.raises(NotLoxodromicError):
        axis_of(bs_tree, w(z2z, "x"))
    with pytest.raises(NotLoxodromicError):
        axis_of(bs_tree, w(z2z, "x z x^-1"))


def test_axis_equality_is_coset_equality(f2, f2_tree):
    a1 = axis_of(f2_tree, w(f2, "a"))
    a2 = make_axis(f2, w(f2, "a"), w(f2, "a^3"))
    assert a1 == a2
    assert a1 != a1.translate(w(f2, "b"))


def test_interleaved_cosets_share_a_line(f2, f2_tree):
    # <a b> and a<b a> are disjoint cosets interleaved along one line
    a1 = axis_of(f2_tree, w(f2, "a b"))
    a2 = make_axis(f2, w(f2, "b a"), w(f2, "a"))
    assert a1 != a2
    assert line_signature(a1) == line_signature(a2)


# --- projections --------------------------------------------------------------


def test_projection_examples(f2, f2_tree, f2_orbit):
    ax = axis_of(f2_tree, w(f2, "a"))
    assert [str(p) for p in project_to_set(f2_orbit, w(f2, "b a b"), ax).points] == ["e"]
    assert [str(p) for p in project_to_set(f2_orbit, w(f2, "a^4 b"), ax).points] == ["a^4"]


def test_projection_is_retraction(f2, f2_tree, f2_orbit):
    for root_text, rep_text in [("a", "e"), ("a b", "b^2")]:
        ax = make_axis(f2, w(f2, root_text), w(f2, rep_text))
        for n in range(-4, 5):
            x = ax.point(n)
            val = project_to_set(f2_orbit, x, ax)
            assert val.points == (x,) and val.distance == 0


def test_projection_matches_scan_oracle(f2, f2_tree, f2_orbit):
    pool = default_axis_pool(f2_tree, 6, seed=2, max_root_len=4)
    for ax in pool:
        for x in ball(f2, f2.identity(), 4):
            got = set(project_to_set(f2_orbit, x, ax).points)
            want, dist = scan_axis_projection(f2, ax, x)
            assert got == want
            assert project_to_set(f2_orbit, x, ax).distance == dist


def test_projection_coarse_lipschitz_on_tree(f2, f2_tree, f2_orbit):
    # adjacent points project at distance <= 1 (slope-1 on trees)
    ax = make_axis(f2, w(f2, "a b"), w(f2, "b"))
    for x in ball(f2, f2.identity(), 4):
        px = projection_of_set(f2_orbit, [x], ax)
        for g in f2.generators():
            py = projection_of_set(f2_orbit, [x * g], ax)
            spread = max(
                space_distance(f2_tree, u, v) for u in px | py for v in px | py
            )
            assert spread <= max(2, 1 + len(ax.root))


def test_bass_serre_projection_scan(z2z, bs_tree, bs_orbit):
    ax = axis_of(bs_tree, w(z2z, "x z"))
    val = project_to_set(bs_orbit, w(z2z, "z^3"), ax)
    assert val.method == "scan-axis"
    assert val.distance == 2


# --- coset distances -----------------------------------------------------------


def test_coset_distance_examples(f2, f2_tree, f2_orbit):
    ax = axis_of(f2_tree, w(f2, "a"))
    assert coset_distance(f2_orbit, ax, w(f2, "a^3"), w(f2, "b a^-2")) == 3
    assert coset_distance(f2_orbit, ax, w(f2, "b a b"), w(f2, "b a b")) == 0
    bax = ax.translate(w(f2, "b"))
    assert coset_distance(f2_orbit, bax, f2.identity(), w(f2, "b a^5 b")) == 5


# --- strong projections ----------------------------------------------------------


def test_strong_projection_equivariance(f2, f2_tree, f2_orbit):
    ax = axis_of(f2_tree, w(f2, "a"))
    g, x = w(f2, "a b"), w(f2, "b^2")
    lhs = strong_projection(f2_orbit, ax.translate(g), g * x).points
    rhs = tuple(sorted((g * p for p in strong_projection(f2_orbit, ax, x).points), key=lambda u: u.sort_key()))
    assert lhs == rhs


def test_far_point_projects_to_gate(f2, f2_tree, f2_orbit):
    ax = axis_of(f2_tree, w(f2, "a"))
    bax = ax.translate(w(f2, "b"))
    shadow, certified, _ = project_axis_onto(f2_orbit, bax, ax)
    assert certified and {str(p) for p in shadow} == {"e"}
    assert set(project_to_set(f2_orbit, w(f2, "b a^3"), ax).points) == set(shadow)


def test_behrstock_translate_pool_small(f2, f2_tree, f2_orbit):
    pool = translate_axis_pool(f2_tree, w(f2, "a"), 6, seed=9)
    xs = ball(f2, f2.identity(), 4)
    for i in range(len(pool)):
        for j in range(len(pool)):
            if i == j:
                continue
            rep = behrstock_alternative(f2_orbit, pool[i], pool[j], xs, bound=2)
            assert rep.ok
            assert not strong_alternative_violations(f2_orbit, pool[i], pool[j], xs, bound=2)


def test_strong_identification_fails_for_mixed_roots(f2, f2_tree, f2_orbit):
    # documented counterexample: far points on a<a b^-1> project to {a} on
    # <a>, while the full shadow is {a, a^2}
    a1 = make_axis(f2, w(f2, "a b^-1"), w(f2, "a"))
    a2 = axis_of(f2_tree, w(f2, "a"))
    xs = [w(f2, "a b a^-1 b a^-1")]
    assert strong_alternative_violations(f2_orbit, a1, a2, xs, bound=2)


# --- coset records ---------------------------------------------------------------


def test_enumerate_example(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^5 b"), 4)
    assert rec.certified
    assert [(str(e.axis.rep), e.value) for e in rec.entries] == [("b", 5)]


def test_enumerate_empty_threshold_above_distance(f2, f2_orbit):
    o, p = f2.identity(), w(f2, "b a b")
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), o, p, word_distance(f2, o, p) + 3)
    assert rec.entries == []
    rec2 = enumerate_cosets(f2_orbit, w(f2, "a"), o, o, 1)
    assert rec2.entries == []


def test_enumerate_complete_vs_ball_bruteforce(f2, f2_orbit, f2_tree):
    # every coset meeting the radius-9 ball is checked directly
    from ggtlab.projections import coset_rep_key
    from ggtlab.groups import Word

    o, p = f2.identity(), w(f2, "b a^5 b")
    root = axis_of(f2_tree, w(f2, "a")).root
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), o, p, 4)
    found = {(e.axis.root.letters, e.axis.rep.letters) for e in rec.entries}
    brute = set()
    for h in ball(f2, f2.identity(), 9, cap=9):
        key = coset_rep_key(f2, root, h)
        if (root.letters, key) in brute or (root.letters, key) in found:
            continue
        ax = Axis(f2, root, Word(f2, key))
        if coset_distance(f2_orbit, ax, o, p) >= 4:
            brute.add((root.letters, key))
    assert not brute  # nothing beyond the certified enumeration


def test_jsonl_serialization(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^5 b"), 4)
    lines = rec.to_jsonl().strip().splitlines()
    obj = json.loads(lines[0])
    assert obj["cosetRep"] == "b" and obj["value"] == 5 and obj["orderIndex"] == 0


def test_distance_formula_sum(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^5 b"), 4)
    assert distance_formula_sum(rec, f2.identity(), w(f2, "b a^5 b")) == 5
    assert distance_formula_sum(rec, w(f2, "a b"), w(f2, "a b")) == 0


def test_distance_formula_requires_certification(f2, bs_orbit, z2z):
    rec = enumerate_cosets(bs_orbit, w(z2z, "x z"), z2z.identity(), w(z2z, "z x z"), 2, window=4)
    assert not rec.certified
    with pytest.raises(CertificationError):
        distance_formula_sum(rec, z2z.identity(), w(z2z, "z"))


def test_triangle_inequality_instance(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^5 b"), 4)
    x, y, z = w(f2, "a^2"), w(f2, "b a^3"), w(f2, "b a^5 b a")
    assert distance_formula_sum(rec, x, z) <= distance_formula_sum(
        rec, x, y
    ) + distance_formula_sum(rec, y, z)


# --- linear order -----------------------------------------------------------------


def test_linear_order_single_coset(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^5 b"), 4)
    entries, report = linear_order(rec)
    assert len(entries) == 1 and report.consistent


def test_linear_order_two_cosets(f2, f2_orbit):
    rec = enumerate_cosets(f2_orbit, w(f2, "a"), f2.identity(), w(f2, "b a^4 b^2 a^4 b"), 3)
    entries, report = linear_order(rec)
    assert [str(e.axis.rep) for e in entries] == ["b", "b a^4 b^2"]
    assert report.consistent


# --- lower bound ------------------------------------------------------------------


def test_lower_bound_examples(f2, f2_orbit):
    e = f2.identity()
    res0 = lower_bound_check(f2_orbit, w(f2, "a"), e, e, 4)
    assert (res0.lhs, res0.rhs, res0.passed) == (0, 0.0, True)
    res = lower_bound_check(f2_orbit, w(f2, "a"), e, w(f2, "b a^5 b"), 4)
    assert (res.lhs, res.rhs, res.passed) == (7, 2.5, True)


# --- pivot ------------------------------------------------------------------------


def test_pivot_zero_when_already_far(f2, f2_tree, f2_orbit):
    far_axis = axis_of(f2_tree, w(f2, "a")).translate(w(f2, "b a b"))
    alpha = geodesic(f2, f2.identity(), w(f2, "b^-4"))
    res = pivot(f2_orbit, alpha, w(f2, "b^-4"), far_axis, s=3)
    assert res.passed and res.pivot == f2.identity()


def test_pivot_b_powers_uncouple_a_axis(f2, f2_tree, f2_orbit):
    ax = axis_of(f2_tree, w(f2, "a"))
    alpha = geodesic(f2, f2.identity(), w(f2, "a^8"))
    res = pivot(f2_orbit, alpha, w(f2, "a^8"), ax, s=3, bound=2)
    assert res.passed
    assert abs(res.pivot.letters[0]) == 2  # a b-power move
    assert max(res.values) <= 2


def test_pivot_bass_serre(z2z, bs_tree, bs_orbit):
    from ggtlab.groups import geodesic as geo

    ax_yz = axis_of(bs_tree, w(z2z, "y z"))
    alpha = geo(z2z, z2z.identity(), w(z2z, "x z x z"))
    res = pivot(bs_orbit, alpha, w(z2z, "x z x z"), ax_yz, s=4, bound=4)
    assert res.passed and max(res.values) <= 4
