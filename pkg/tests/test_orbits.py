"""Marked G-sets, Schreier balls, boundary edges and the coset action."""

import json

import pytest

from amenlab.errors import CapExceeded, ValidationError
from amenlab.orbits import (boundary_edges, build_ball, coset_canonical,
                            coset_contains, make_gset)


class TestCayleyBalls:
    def test_free_group_ball_sizes(self):
        graph = build_ball(make_gset("cayley:free:2"), 3)
        by_depth = {}
        for depth in graph.depths.values():
            by_depth[depth] = by_depth.get(depth, 0) + 1
        assert by_depth == {0: 1, 1: 4, 2: 12, 3: 36}

    def test_z2_ball_sizes(self):
        graph = build_ball(make_gset("cayley:z:2"), 2)
        assert len(graph.depths) == 13  # 1 + 4 + 8

    def test_grigorchuk_small_ball(self):
        graph = build_ball(make_gset("cayley:grigorchuk"), 2)
        assert len(graph.depths) == 11

    def test_basilica_small_ball(self):
        graph = build_ball(make_gset("cayley:basilica"), 2)
        # a, b have infinite order and ab^-1 etc. are all distinct here
        assert graph.depths[graph.base_key] == 0
        assert len(graph.depths) == 1 + 4 + 12

    def test_vertex_cap(self):
        with pytest.raises(CapExceeded):
            build_ball(make_gset("cayley:free:2"), 6, cap_vertices=100)


class TestCosetAction:
    gset = make_gset("coset:f2")

    def test_membership(self):
        group = self.gset.group
        assert coset_contains(group.parse("a"))
        assert coset_contains(group.parse("b a b^-1"))
        assert coset_contains(group.parse("b^2 a b^-2 a^-1"))
        assert not coset_contains(group.parse("b"))
        assert not coset_contains(group.parse("b^-1 a b"))

    def test_canonical_keys_on_the_ray(self):
        group = self.gset.group
        assert coset_canonical(group.parse("a b a b a^-2")) == \
            group.parse("b^2")

    def test_ball_radius_two_has_seven_cosets(self):
        # ray: H, Hb, Hb^2; hanging tree: Hb^-1, Hb^-2, Hb^-1 a, Hb^-1 a^-1
        graph = build_ball(self.gset, 2)
        assert len(graph.depths) == 7

    def test_interval_boundary_is_two(self):
        graph = build_ball(self.gset, 8)
        interval = [tuple(((1, 1),) * k) for k in range(5)]
        edges = boundary_edges(graph, interval)
        assert len(edges) == 2

    def test_a_edges_are_loops_on_the_ray(self):
        for k in range(5):
            key = tuple(((1, 1),) * k)
            assert self.gset.act(key, (0, 1)) == key


class TestBoundary:
    def test_rejects_shell_subsets(self):
        graph = build_ball(make_gset("cayley:z:1"), 3)
        shell = [v for v, d in graph.depths.items() if d == 3]
        with pytest.raises(ValidationError):
            boundary_edges(graph, shell[:1])

    def test_rejects_foreign_vertices(self):
        graph = build_ball(make_gset("cayley:z:1"), 3)
        with pytest.raises(ValidationError):
            boundary_edges(graph, [((0, 1),) * 10])

    def test_interval_in_z(self):
        graph = build_ball(make_gset("cayley:z:1"), 6)
        interval = [graph.gset.group.power(((0, 1),), k) for k in range(-2, 3)]
        assert len(boundary_edges(graph, interval)) == 2


class TestSerialization:
    def test_json_is_deterministic(self):
        a = build_ball(make_gset("cayley:z:1"), 2).to_json()
        b = build_ball(make_gset("cayley:z:1"), 2).to_json()
        assert a == b
        payload = json.loads(a)
        assert payload["radius"] == 2
        assert len(payload["vertices"]) == 5

    def test_orbit_gset(self):
        gset = make_gset("orbit:grigorchuk:depth=3")
        graph = build_ball(gset, 8)
        # the level-3 action is transitive: all 8 vertices appear
        assert len(graph.depths) == 8


def test_unknown_specs_rejected():
    for spec in ("cayley:nope", "orbit:grigorchuk", "orbit:basilica:depth=0",
                 "coset:f3"):
        with pytest.raises(ValidationError):
            make_gset(spec)
