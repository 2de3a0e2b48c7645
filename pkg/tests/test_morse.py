"""Morse certificates, detectability, incompatibility, mutual projections."""

import pytest

from ggtlab.groups import GroupError, Word, geodesic, word_distance
from ggtlab.morse import (
    detectability_check,
    diagonal_crossing_ray,
    incompatibility_witness,
    morse_certificate,
    mutual_projection_check,
    tree_gauge,
)
from ggtlab.projections import axis_of
from ggtlab.spaces import bass_serre_orbit

from conftest import w
from oracles import naive_ball


# --- certificates -------------------------------------------------------------


def test_tree_segment_geodesic_cell_zero(f2):
    seg = geodesic(f2, f2.identity(), w(f2, "a^6"))
    cert = morse_certificate(f2, seg, [(1, 0)], window=4)
    cell = cert.cells[(1, 0)]
    assert cell.max_detour == 0 and cell.status == "certified-on-window"


def test_tree_random_segments_geodesic_cell_zero(f2):
    import numpy as np

    rng = np.random.default_rng(12)
    pts = sorted(naive_ball(f2, f2.identity(), 5), key=Word.sort_key)
    for _ in range(50):
        a, b = (pts[int(i)] for i in rng.integers(0, len(pts), 2))
        if a == b:
            continue
        cert = morse_certificate(f2, geodesic(f2, a, b), [(1, 0)], window=3)
        assert cert.cells[(1, 0)].max_detour == 0


def test_staircase_corner_detour(z2):
    # corner path through (6, 0) realizes the max detour of 6
    seg = []
    letters = []
    seg.append(z2.identity())
    for _ in range(6):
        letters.append(1)
        seg.append(Word(z2, z2.normalize(tuple(letters))))
        letters.append(2)
        seg.append(Word(z2, z2.normalize(tuple(letters))))
    cert = morse_certificate(z2, seg, [(1, 0)], window=7)
    cell = cert.cells[(1, 0)]
    assert cell.max_detour == 6
    # either corner path realizes the detour
    assert w(z2, "x^6") in cell.witness or w(z2, "y^6") in cell.witness


def test_free_product_z_segment(z2z):
    seg = geodesic(z2z, z2z.identity(), w(z2z, "z^6"))
    cert = morse_certificate(z2z, seg, [(1, 0)], window=3)
    assert cert.cells[(1, 0)].max_detour == 0


def test_certificate_monotone_and_gauge(f2):
    seg = geodesic(f2, f2.identity(), w(f2, "a^5"))
    grid = [(1, 0), (1, 2), (2, 0), (2, 2)]
    cert = morse_certificate(f2, seg, grid, window=3)
    t = cert.table()
    assert t[(1, 0)] <= t[(1, 2)] <= t[(2, 2)]
    assert t[(1, 0)] <= t[(2, 0)] <= t[(2, 2)]
    g = cert.gauge()
    assert g(1, 0) >= t[(1, 0)]


def test_tree_excursions_bounded_by_reference_gauge(f2):
    # quasi-geodesic cells on a tree segment stay within the shipped gauge
    seg = geodesic(f2, f2.identity(), w(f2, "a^6"))
    cert = morse_certificate(f2, seg, [(1, 2), (2, 2)], window=4)
    for (lam, eps), cell in cert.cells.items():
        assert cell.max_detour <= tree_gauge(lam, eps)


# --- detectability ----------------------------------------------------------------


def test_detectability_identity_orbit(f2, f2_orbit):
    seg = geodesic(f2, f2.identity(), w(f2, "a b a^-1 b"))
    res = detectability_check(f2_orbit, seg)
    assert res.verdict == "parametrized-qg" and res.lambda_best == 1.0


def test_detectability_z_powers(z2z, bs_orbit):
    seg = geodesic(z2z, z2z.identity(), w(z2z, "z^6"))
    res = detectability_check(bs_orbit, seg)
    assert res.verdict == "degenerate"
    # alternating generator mix makes the image an unbounded quasi-geodesic
    seg2 = [v for v in diagonal_crossing_ray(z2z, flat_size=1, tail=0)]
    mixed = []
    cur = z2z.identity()
    mixed.append(cur)
    for t in ("x", "z", "x", "z", "x", "z"):
        cur = cur * w(z2z, t)
        mixed.append(cur)
    res2 = detectability_check(bs_orbit, mixed)
    assert res2.verdict == "parametrized-qg" and res2.lambda_best <= 2.0


def test_detectability_flat_segment_degenerate(z2z, bs_orbit):
    seg = geodesic(z2z, z2z.identity(), w(z2z, "x y x y"))
    assert detectability_check(bs_orbit, seg).verdict == "degenerate"


# --- incompatibility ----------------------------------------------------------------


def test_no_witness_on_tree_ray(f2):
    beta = [w(f2, f"a^{k}") if k else f2.identity() for k in range(12)]
    assert incompatibility_witness(f2, beta, tree_gauge, kappa=1, prefix_bound=10) is None


def test_diagonal_crossing_witness(z2z):
    beta = diagonal_crossing_ray(z2z, flat_size=6, tail=12)
    wit = incompatibility_witness(z2z, beta, tree_gauge, kappa=1, prefix_bound=24)
    assert wit is not None
    assert wit.margin >= 1
    assert wit.revalidate(z2z, beta, tree_gauge)
    assert min(word_distance(z2z, wit.point, b) for b in beta) == 6


def test_witness_needs_window(z2z):
    beta = diagonal_crossing_ray(z2z, flat_size=6, tail=12)
    assert incompatibility_witness(z2z, beta, tree_gauge, kappa=1, prefix_bound=2) is None


def test_prefix_too_short(z2z):
    with pytest.raises(GroupError):
        incompatibility_witness(z2z, [z2z.identity()], tree_gauge, 1, 10)


# --- mutual projections ---------------------------------------------------------------


def test_mutual_projection_orthogonal_rays(f2, f2_orbit):
    alpha = [w(f2, f"a^{k}") if k else f2.identity() for k in range(10)]
    beta = [w(f2, f"b^{k}") if k else f2.identity() for k in range(10)]
    res = mutual_projection_check(f2_orbit, alpha, beta)
    assert res.diam_first_on_second == (0, 0)
    assert res.diam_second_on_first == (0, 0)
    assert res.stabilized and not res.same_ray


def test_mutual_projection_same_ray_flagged(f2, f2_orbit):
    alpha = [w(f2, f"a^{k}") if k else f2.identity() for k in range(10)]
    res = mutual_projection_check(f2_orbit, alpha, alpha)
    assert res.same_ray
    assert res.diam_first_on_second[0] == 9  # grows with the window


def test_mutual_projection_parallel_translate(f2, f2_orbit):
    alpha = [w(f2, f"a^{k}") if k else f2.identity() for k in range(10)]
    beta = [w(f2, "b") * v for v in alpha]
    res = mutual_projection_check(f2_orbit, alpha, beta)
    assert max(res.diam_first_on_second) <= 2
    assert max(res.diam_second_on_first) <= 2
