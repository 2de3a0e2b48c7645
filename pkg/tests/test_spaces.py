"""Tree distances, hyperbolicity defects, coning, and fibre separation."""

import itertools

import pytest

from ggtlab.groups import Word, ball, word_distance
from ggtlab.spaces import (
    BassSerreTree,
    CayleyTree,
    FiniteGraphSpace,
    SpaceError,
    bass_serre_orbit,
    cone_off,
    cyclic_coset_family,
    delta_estimate,
    fibre_separation_profile,
    first_factor_orbit,
    identity_orbit,
    left_component,
    space_distance,
)

from conftest import w
from oracles import bs_tree_adjacency, cayley_graph_adjacency, graph_bfs


# --- distances -------------------------------------------------------------


def test_cayley_tree_distance(f2, f2_tree):
    assert space_distance(f2_tree, f2.identity(), w(f2, "a b")) == 2


def test_bass_serre_examples(z2z, bs_tree):
    va = bs_tree.vertex(0, z2z.identity())
    assert space_distance(bs_tree, va, bs_tree.vertex(0, w(z2z, "z"))) == 2
    assert space_distance(bs_tree, va, bs_tree.vertex(0, w(z2z, "x"))) == 0
    assert space_distance(bs_tree, va, bs_tree.vertex(1, z2z.identity())) == 1
    assert space_distance(bs_tree, va, bs_tree.vertex(1, w(z2z, "x"))) == 1


def test_bass_serre_against_bfs(z2z, bs_tree):
    adj = bs_tree_adjacency(bs_tree, 5)
    root = bs_tree.vertex(0, z2z.identity())
    dist = graph_bfs(adj, root)
    for v, d in dist.items():
        assert space_distance(bs_tree, root, v) == d
    # also from a non-root source
    src = bs_tree.vertex(1, w(z2z, "x z"))
    dist = graph_bfs(adj, src)
    for v, d in list(dist.items())[:200]:
        assert space_distance(bs_tree, src, v) == d


def test_finite_graph_space_path():
    g = FiniteGraphSpace(
        vertices=("u", "v", "w"), base_adjacency={"u": ["v"], "v": ["u", "w"], "w": ["v"]}
    )
    assert space_distance(g, "u", "w") == 2
    with pytest.raises(SpaceError):
        space_distance(g, "u", "missing")


def test_cayley_tree_formula_vs_bfs(f2, f2_tree):
    adj = cayley_graph_adjacency(f2, 5)
    e = f2.identity()
    dist = graph_bfs(adj, e)
    for v, d in dist.items():
        assert space_distance(f2_tree, e, v) == d


# --- orbit maps -------------------------------------------------------------


def test_orbit_equivariance_bass_serre(z2z, bs_tree, bs_orbit):
    pts = ball(z2z, z2z.identity(), 3)
    for g in pts[:20]:
        for h in pts[:20]:
            assert bs_orbit(g * h) == bs_tree.translate(g, bs_orbit(h))


def test_orbit_lipschitz_constants(f2_orbit, bs_orbit):
    assert f2_orbit.measured_lipschitz(2) == 1
    assert bs_orbit.measured_lipschitz(2) == 2


def test_first_factor_orbit(f2xz):
    inner = identity_orbit(CayleyTree(f2xz.left))
    orbit = first_factor_orbit(f2xz, inner)
    word = w(f2xz, "a t^3 b")
    assert orbit(word) == w(f2xz.left, "a b")
    assert left_component(f2xz, word) == w(f2xz.left, "a b")


# --- hyperbolicity ----------------------------------------------------------


def test_delta_zero_on_trees(f2, f2_tree):
    pts = ball(f2, f2.identity(), 3)
    est = delta_estimate(f2_tree, pts)
    assert est.exhaustive and est.value == 0.0


def test_delta_six_cycle():
    verts = tuple(range(6))
    adj = {i: [(i + 1) % 6, (i - 1) % 6] for i in verts}
    g = FiniteGraphSpace(vertices=verts, base_adjacency=adj)
    est = delta_estimate(g, verts)
    assert est.exhaustive and est.value == 1.0


def test_delta_grows_on_z2_grid(z2):
    from ggtlab.spaces import cone_off

    pts2 = [v for v in ball(z2, z2.identity(), 2)]
    pts4 = [v for v in ball(z2, z2.identity(), 4)]
    graph2 = cone_off(z2, 2, [])
    graph4 = cone_off(z2, 4, [])
    d2 = delta_estimate(graph2, pts2).value
    d4 = delta_estimate(graph4, pts4).value
    assert d4 > d2 > 0


def test_delta_needs_four_points(f2, f2_tree):
    with pytest.raises(SpaceError):
        delta_estimate(f2_tree, ball(f2, f2.identity(), 0))


# --- coning -----------------------------------------------------------------


def test_cone_single_coset(f2):
    fam = cyclic_coset_family(f2, w(f2, "a"), single_rep=f2.identity())
    coned = cone_off(f2, 3, [fam])
    assert coned.distance(w(f2, "a^3"), w(f2, "a^-3")) == 1
    # identity coning leaves word distances intact
    plain = cone_off(f2, 3, [])
    for u in list(plain.vertices)[:25]:
        assert plain.distance(f2.identity(), u) == word_distance(f2, f2.identity(), u)


def test_cone_never_increases_distance(f2):
    fam = cyclic_coset_family(f2, w(f2, "a"))
    coned = cone_off(f2, 3, [fam])
    e = f2.identity()
    dmap = coned.distances_from(e)
    for u in coned.vertices:
        assert dmap[u] <= word_distance(f2, e, u)


def test_cone_all_z2_conjugates(z2z):
    def z2_class(word: Word):
        runs = z2z.syllables(word.letters)
        if runs and runs[-1][0] == 0:
            runs = runs[:-1]
        return tuple(l for _, seg in runs for l in seg)

    from ggtlab.spaces import CosetFamily

    fam = CosetFamily("Z^2 cosets", z2_class)
    coned = cone_off(z2z, 5, [fam], cap=5)
    assert coned.distance(z2z.identity(), w(z2z, "x y z")) == 2


def test_cone_warns_on_trivial_family(f2):
    fam = cyclic_coset_family(f2, w(f2, "a"), single_rep=w(f2, "b^9 a b^9"))
    with pytest.warns(UserWarning):
        cone_off(f2, 2, [fam])


def test_serialize_roundtrip_line_format():
    g = FiniteGraphSpace(vertices=("p", "q"), base_adjacency={"p": ["q"], "q": ["p"]})
    text = g.serialize()
    assert text.splitlines() == ["p: q", "q: p"]


def test_clique_bfs_matches_expanded_bfs(f2):
    fam = cyclic_coset_family(f2, w(f2, "a"))
    coned = cone_off(f2, 3, [fam])
    adj = coned.expanded_adjacency()
    for src in list(coned.vertices)[:10]:
        assert coned.distances_from(src) == graph_bfs(adj, src)


# --- fibre separation --------------------------------------------------------


def test_fibre_separation_identity_orbit_bounded(f2, f2_orbit):
    x = f2.identity()
    y = w(f2, "a b a b")
    prof = fibre_separation_profile(f2_orbit, x, y, r=1, s=2, truncations=[4, 6, 8])
    assert prof.verdict == "bounded"


def test_fibre_separation_fibered_growing(f2xz):
    # fibres are {g} x Z; for adjacent base points the s-thickened fibre of x
    # meets the fibre of y in a whole line, so the truncated diameter grows
    inner = identity_orbit(CayleyTree(f2xz.left))
    orbit = first_factor_orbit(f2xz, inner)
    x = f2xz.left.identity()
    y = w(f2xz.left, "a")
    prof = fibre_separation_profile(orbit, x, y, r=0, s=1, truncations=[4, 6, 8])
    assert prof.verdict == "growing"
    diams = prof.diameters()
    assert diams[0] < diams[1] < diams[2]


def test_fibre_separation_bass_serre_far_vertices(z2z, bs_tree, bs_orbit):
    x = bs_tree.vertex(0, z2z.identity())
    y = bs_tree.vertex(0, w(z2z, "z x z x^-1 z"))
    assert space_distance(bs_tree, x, y) == 6
    prof = fibre_separation_profile(bs_orbit, x, y, r=1, s=2, truncations=[4, 6])
    assert prof.verdict == "bounded"


def test_fibre_separation_precondition(f2, f2_orbit):
    with pytest.raises(SpaceError):
        fibre_separation_profile(f2_orbit, f2.identity(), w(f2, "a"), r=1, s=1, truncations=[4])
