"""Marked G-sets and their Schreier/Cayley graphs.

A ``MarkedGSet`` is an action oracle: canonical vertex keys plus a right
action of the generators.  ``build_ball`` materializes the labeled ball around
the basepoint; ``boundary_edges`` counts outgoing edges, refusing sets that
touch the outer BFS shell (whose neighborhoods are unknown).

Registered specs:

* ``cayley:<group>``     regular action on itself (any registered group,
                         including ``grigorchuk`` and ``basilica``)
* ``orbit:<family>:depth=<d>[:base=<w>]``  action on tree level d
* ``coset:f2``           H\\F2 with H = <b^m a b^-m : m >= 0>

The coset action uses the fact that the subgroup graph of H folds to a b-ray
with an a-loop at every vertex; hence canonical coset keys are b^k (k >= 0)
together with the reduced words starting with b^-1, and membership of a
reduced word in H amounts to all prefix b-sums being >= 0 with total 0.
"""

from __future__ import annotations

import json
from typing import Callable, Dict, List, Optional, Tuple

from . import selfsim
from .errors import CapExceeded, ValidationError, check_vertex_count
from .groups import Letter, MarkedGroup, Word, _free_reduce


class MarkedGSet:
    """A right action with canonical vertex keys."""

    def __init__(self, spec: str, names: Tuple[str, ...],
                 involutions: Tuple[bool, ...], base_key,
                 act_letter: Callable, show_key: Callable,
                 group: Optional[MarkedGroup] = None,
                 family: Optional[str] = None):
        self.spec = spec
        self.names = names
        self.involutions = involutions
        self.base_key = base_key
        self._act_letter = act_letter
        self.show_key = show_key
        self.group = group
        self.family = family

    def act(self, key, letter: Letter):
        gen, sign = letter
        if not 0 <= gen < len(self.names) or sign not in (1, -1):
            raise ValidationError(f"bad letter {letter!r}")
        if self.involutions[gen]:
            sign = 1
        return self._act_letter(key, (gen, sign))

    def act_word(self, key, word: Word):
        for letter in word:
            key = self.act(key, letter)
        return key

    def edge_letters(self) -> Tuple[Letter, ...]:
        out: list[Letter] = []
        for gen in range(len(self.names)):
            out.append((gen, 1))
            if not self.involutions[gen]:
                out.append((gen, -1))
        return tuple(out)

    def letter_name(self, letter: Letter) -> str:
        gen, sign = letter
        return self.names[gen] if sign == 1 else f"{self.names[gen]}^-1"

    def parse_word(self, text: str) -> Word:
        out: list[Letter] = []
        for token in text.split():
            if token == "1":
                continue
            name, _, exp_text = token.partition("^")
            if name not in self.names:
                raise ValidationError(f"unknown generator {name!r}")
            gen = self.names.index(name)
            exp = int(exp_text) if exp_text else 1
            sign = 1 if exp >= 0 else -1
            out.extend((gen, sign) for _ in range(abs(exp)))
        return tuple(out)

    def __repr__(self):
        return f"MarkedGSet({self.spec!r})"


class SchreierGraph:
    """A labeled BFS ball: vertices with depths, edges (src, gen, dst)."""

    def __init__(self, gset: MarkedGSet, radius: int,
                 depths: Dict, edges: List[Tuple]):
        self.gset = gset
        self.radius = radius
        self.depths = depths
        self.edges = edges
        self.base_key = gset.base_key
        self._out: Dict = {}
        for src, letter, dst in edges:
            self._out.setdefault(src, []).append((letter, dst))

    @property
    def vertices(self):
        return self.depths.keys()

    def interior(self):
        """Vertices whose whole neighborhood lies inside the ball."""
        return [v for v, d in self.depths.items() if d <= self.radius - 1]

    def is_interior(self, key) -> bool:
        return key in self.depths and self.depths[key] <= self.radius - 1

    def out_edges(self, key):
        return self._out.get(key, [])

    def to_json(self) -> str:
        show = self.gset.show_key
        vertices = sorted(
            ({"key": show(v), "depth": d} for v, d in self.depths.items()),
            key=lambda entry: (entry["depth"], entry["key"]),
        )
        edges = sorted(
            (
                {
                    "src": show(src),
                    "gen": self.gset.letter_name(letter),
                    "dst": show(dst),
                }
                for src, letter, dst in self.edges
            ),
            key=lambda e: (e["src"], e["gen"], e["dst"]),
        )
        payload = {
            "group": self.gset.spec,
            "basepoint": show(self.base_key),
            "radius": self.radius,
            "vertices": vertices,
            "edges": edges,
        }
        return json.dumps(payload, sort_keys=True)


# -- coset action H\F2 ----------------------------------------------------

_A, _B = 0, 1


def coset_canonical(word: Word) -> Word:
    """Canonical key of the coset H w (shortest representative).

    Keys are b^k for the ray and reduced words starting with b^-1 for the
    hanging tree.
    """
    word = _free_reduce(word)
    on_ray = True
    ray = 0
    tree: list[Letter] = []
    for letter in word:
        gen, sign = letter
        if on_ray:
            if gen == _A:
                continue  # a-loops along the whole nonnegative ray
            if sign == 1:
                ray += 1
            elif ray > 0:
                ray -= 1
            else:
                on_ray = False
                tree = [(_B, -1)]
        else:
            if tree and tree[-1] == (gen, -sign):
                tree.pop()
                if not tree:
                    on_ray = True
                    ray = 0
            else:
                tree.append(letter)
    if on_ray:
        return tuple((_B, 1) for _ in range(ray))
    return tuple(tree)


def coset_contains(word: Word) -> bool:
    """Membership of a word in H = <b^m a b^-m : m >= 0>."""
    return coset_canonical(word) == ()


# -- gset construction ------------------------------------------------------

def make_gset(spec: str) -> MarkedGSet:
    spec = spec.strip()
    if spec.startswith("cayley:"):
        return _make_cayley(spec, spec[len("cayley:"):])
    if spec == "coset:f2":
        group = MarkedGroup.from_spec("coset:f2")

        def act(key, letter):
            return coset_canonical(key + (letter,))

        return MarkedGSet(
            spec, group.names, group.involutions, (), act,
            show_key=lambda key: "H" if not key else "H " + group.show(key),
            group=group,
        )
    if spec.startswith("orbit:"):
        return _make_orbit(spec)
    raise ValidationError(f"unknown gset spec {spec!r}")


def _make_cayley(spec: str, group_spec: str) -> MarkedGSet:
    if group_spec in (selfsim.GRIGORCHUK, selfsim.BASILICA):
        return _make_selfsim_cayley(spec, group_spec)
    group = MarkedGroup.from_spec(group_spec)

    def act(key, letter):
        return group.compose(key, (letter,))

    return MarkedGSet(
        spec, group.names, group.involutions, group.identity, act,
        show_key=group.show, group=group,
    )


class _SelfsimCanonicalizer:
    """Dedup of tree automorphisms by action signature.

    For the a,b,c,d group the signature match is verified by the exact
    equality oracle; a mismatch would mean the signature depth is too small
    and raises instead of returning a wrong key.
    """

    def __init__(self, family: str, depth: int):
        self.family = family
        self.depth = depth
        self.table: Dict[Tuple[str, ...], selfsim.TreeAutomorphism] = {}

    def canon(self, g: selfsim.TreeAutomorphism) -> selfsim.TreeAutomorphism:
        sig = selfsim.signature(g, self.depth)
        known = self.table.get(sig)
        if known is None:
            self.table[sig] = g
            return g
        if self.family == selfsim.GRIGORCHUK:
            if not selfsim.equals_selfsim(g, known):
                raise CapExceeded(
                    f"signature depth {self.depth} is too small to "
                    "separate distinct elements"
                )
        return known


def _make_selfsim_cayley(spec: str, family: str) -> MarkedGSet:
    if family == selfsim.GRIGORCHUK:
        names = ("a", "b", "c", "d")
        involutions = (True, True, True, True)
        depth = 8
        gens = [selfsim.grigorchuk(n) for n in names]
    else:
        names = ("a", "b")
        involutions = (False, False)
        depth = 12
        gens = [selfsim.basilica(n) for n in names]
    canonicalizer = _SelfsimCanonicalizer(family, depth)
    identity = canonicalizer.canon(
        selfsim.grigorchuk("") if family == selfsim.GRIGORCHUK
        else selfsim.basilica("")
    )

    def act(key, letter):
        gen, sign = letter
        step = gens[gen] if sign == 1 else gens[gen].inverse()
        return canonicalizer.canon(key * step)

    return MarkedGSet(
        spec, names, involutions, identity, act,
        show_key=lambda g: g.show(), family=family,
    )


def _make_orbit(spec: str) -> MarkedGSet:
    parts = spec.split(":")
    if len(parts) < 3:
        raise ValidationError(f"bad orbit spec {spec!r}")
    family = parts[1]
    if family not in (selfsim.GRIGORCHUK, selfsim.BASILICA):
        raise ValidationError(f"unknown self-similar family {family!r}")
    depth = None
    base = None
    for part in parts[2:]:
        name, _, value = part.partition("=")
        if name == "depth":
            depth = int(value)
        elif name == "base":
            base = value
        else:
            raise ValidationError(f"bad orbit option {part!r}")
    if depth is None or depth < 1:
        raise ValidationError("orbit spec needs depth=<positive integer>")
    if base is None:
        base = "0" * depth
    if len(base) != depth or any(ch not in "01" for ch in base):
        raise ValidationError("orbit base must be a 0/1 word of the given depth")
    if family == selfsim.GRIGORCHUK:
        names = ("a", "b", "c", "d")
        involutions = (True, True, True, True)
        gens = [selfsim.grigorchuk(n) for n in names]
    else:
        names = ("a", "b")
        involutions = (False, False)
        gens = [selfsim.basilica(n) for n in names]

    def act(key, letter):
        gen, sign = letter
        step = gens[gen] if sign == 1 else gens[gen].inverse()
        return selfsim.act_on_word(step, key)

    return MarkedGSet(
        spec, names, involutions, base, act,
        show_key=lambda key: key, family=family,
    )


# -- ball construction -------------------------------------------------------

def build_ball(gset: MarkedGSet, radius: int,
               cap_vertices: Optional[int] = None) -> SchreierGraph:
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    letters = gset.edge_letters()
    depths: Dict = {gset.base_key: 0}
    frontier = [gset.base_key]
    for depth in range(1, radius + 1):
        new: list = []
        for v in frontier:
            for letter in letters:
                w = gset.act(v, letter)
                if w not in depths:
                    depths[w] = depth
                    new.append(w)
        if cap_vertices is not None and len(depths) > cap_vertices:
            raise CapExceeded(
                f"ball construction exceeded {cap_vertices} vertices",
                partial=len(depths),
            )
        check_vertex_count(len(depths), "ball construction")
        frontier = new
    edges: List[Tuple] = []
    for v, depth in depths.items():
        for letter in letters:
            w = gset.act(v, letter)
            if w in depths:
                edges.append((v, letter, w))
    return SchreierGraph(gset, radius, depths, edges)


def boundary_edges(graph: SchreierGraph, subset) -> List[Tuple]:
    """Edges leaving ``subset``; loops never counted.

    The subset must avoid the outer shell of the ball, otherwise the outgoing
    edge count would be unsound.
    """
    members = set(subset)
    for v in members:
        if v not in graph.depths:
            raise ValidationError("subset contains a vertex outside the ball")
        if not graph.is_interior(v):
            raise ValidationError(
                "subset touches the outer shell; build a larger ball"
            )
    out = []
    for v in members:
        for letter, w in graph.out_edges(v):
            if w not in members and w != v:
                out.append((v, letter, w))
    return out
