"""Rooted-tree automorphism groups via wreath recursion.

Two families act on the binary rooted tree {0,1}*:

* the four-generator torsion group of intermediate growth with generators
  a, b, c, d (all involutions, with b c d = 1), canonicalized through the
  wreath recursion a -> <<1,1>> swap, b -> <<a,c>>, c -> <<a,d>>, d -> <<1,b>>;
* the two-generator "basilica" group with generators a, b whose recursion is
  a -> <<1,b>> swap, b -> <<1,a>> id.

All actions are right actions written functionally: ``act_on_word(g, x)``
returns the image of the vertex x, and (x0 x1...) g = (x0 pi_g) (x1...) g_{x0},
with sections indexed by the input letter.  The product rule is
(g h)_x = g_x h_{x pi_g}, pi_{g h} = pi_g pi_h.

Equality in the a,b,c,d group is exact by recursive descent (the sections of a
reduced word of letter length n have length at most (n+1)/2, so the recursion
terminates); basilica equality is certified only to a finite depth and its
verdict carries an ``approximate`` flag.
"""

from __future__ import annotations

import json
import threading
from typing import Dict, Optional, Tuple

from .errors import CapExceeded, ValidationError

GRIGORCHUK = "grigorchuk"
BASILICA = "basilica"

_MEMO_CAP = 1_000_000

# Klein four-group fusion table for the letters b, c, d (xy = z cyclically,
# xx = identity), used to keep words in reduced syllable form.
_FUSE = {
    ("b", "c"): "d", ("c", "b"): "d",
    ("b", "d"): "c", ("d", "b"): "c",
    ("c", "d"): "b", ("d", "c"): "b",
}

# Wreath recursion for the a,b,c,d group: letter -> (section0, section1, swap).
_GRIG_TABLE = {
    "a": ("", "", True),
    "b": ("a", "c", False),
    "c": ("a", "d", False),
    "d": ("", "b", False),
}


class TreeAutomorphism:
    """A word over self-similar generators with lazy wreath decomposition."""

    __slots__ = ("family", "word", "_decomp")

    def __init__(self, family: str, word):
        if family == GRIGORCHUK:
            if not isinstance(word, str):
                raise ValidationError("grigorchuk words are strings over abcd")
            word = grig_reduce(word)
        elif family == BASILICA:
            word = _basilica_reduce(tuple(word))
        else:
            raise ValidationError(f"unknown self-similar family {family!r}")
        self.family = family
        self.word = word
        self._decomp = None

    def __repr__(self):
        return f"TreeAutomorphism({self.family}, {self.show()!r})"

    def __eq__(self, other):
        return (
            isinstance(other, TreeAutomorphism)
            and self.family == other.family
            and self.word == other.word
        )

    def __hash__(self):
        return hash((self.family, self.word))

    def show(self) -> str:
        if self.family == GRIGORCHUK:
            return self.word or "1"
        if not self.word:
            return "1"
        return " ".join(n if s == 1 else f"{n}^-1" for n, s in self.word)

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        if self.family != other.family:
            raise ValidationError("cannot multiply across families")
        if self.family == GRIGORCHUK:
            return TreeAutomorphism(GRIGORCHUK, self.word + other.word)
        return TreeAutomorphism(BASILICA, self.word + other.word)

    def inverse(self) -> "TreeAutomorphism":
        if self.family == GRIGORCHUK:
            # all four generators are involutions
            return TreeAutomorphism(GRIGORCHUK, self.word[::-1])
        return TreeAutomorphism(
            BASILICA, tuple((n, -s) for n, s in reversed(self.word))
        )


class WreathDecomposition:
    """Sections at the two subtrees plus the root permutation."""

    __slots__ = ("sections", "swap")

    def __init__(self, sections: Tuple[TreeAutomorphism, TreeAutomorphism],
                 swap: bool):
        self.sections = sections
        self.swap = swap

    @property
    def root_perm(self) -> str:
        return "swap" if self.swap else "id"

    def __repr__(self):
        s0, s1 = self.sections
        return f"<<{s0.show()}, {s1.show()}>> {self.root_perm}"


def grig_reduce(text: str) -> str:
    """Reduced syllable form: cancel aa and fuse adjacent b,c,d letters."""
    stack: list[str] = []
    for ch in text:
        if ch not in "abcd":
            raise ValidationError(f"bad letter {ch!r} for the a,b,c,d group")
        while True:
            if not stack:
                stack.append(ch)
                break
            top = stack[-1]
            if ch == top:
                stack.pop()
                break
            if ch != "a" and top != "a":
                stack.pop()
                ch = _FUSE[(top, ch)]
                continue
            stack.append(ch)
            break
    return "".join(stack)


def _basilica_reduce(word) -> Tuple[Tuple[str, int], ...]:
    stack: list[Tuple[str, int]] = []
    for name, sign in word:
        if name not in ("a", "b") or sign not in (1, -1):
            raise ValidationError(f"bad basilica letter {(name, sign)!r}")
        if stack and stack[-1] == (name, -sign):
            stack.pop()
        else:
            stack.append((name, sign))
    return tuple(stack)


def grigorchuk(text: str) -> TreeAutomorphism:
    """Build a group element from a string like ``"abad"`` (1 = identity)."""
    if text in ("", "1"):
        return TreeAutomorphism(GRIGORCHUK, "")
    return TreeAutomorphism(GRIGORCHUK, text)


def basilica(text: str) -> TreeAutomorphism:
    """Build a basilica element from tokens like ``"a b^-1 a"`` (1 = identity)."""
    word: list[Tuple[str, int]] = []
    for token in text.split():
        if token == "1":
            continue
        name, _, exp_text = token.partition("^")
        exp = int(exp_text) if exp_text else 1
        sign = 1 if exp >= 0 else -1
        word.extend((name, sign) for _ in range(abs(exp)))
    return TreeAutomorphism(BASILICA, tuple(word))


# -- wreath decomposition ----------------------------------------------

_BASILICA_TABLE = {
    ("a", 1): ((), (("b", 1),), True),
    ("a", -1): ((("b", -1),), (), True),
    ("b", 1): ((), (("a", 1),), False),
    ("b", -1): ((), (("a", -1),), False),
}


def wreath_decompose(g: TreeAutomorphism) -> WreathDecomposition:
    if g._decomp is not None:
        return g._decomp
    if g.family == GRIGORCHUK:
        s0, s1 = [], []
        swap = False
        for ch in g.word:
            h0, h1, hswap = _GRIG_TABLE[ch]
            if swap:
                h0, h1 = h1, h0
            s0.append(h0)
            s1.append(h1)
            swap ^= hswap
        decomp = WreathDecomposition(
            (
                TreeAutomorphism(GRIGORCHUK, "".join(s0)),
                TreeAutomorphism(GRIGORCHUK, "".join(s1)),
            ),
            swap,
        )
    else:
        s0: list = []
        s1: list = []
        swap = False
        for letter in g.word:
            h0, h1, hswap = _BASILICA_TABLE[letter]
            if swap:
                h0, h1 = h1, h0
            s0.extend(h0)
            s1.extend(h1)
            swap ^= hswap
        decomp = WreathDecomposition(
            (
                TreeAutomorphism(BASILICA, tuple(s0)),
                TreeAutomorphism(BASILICA, tuple(s1)),
            ),
            swap,
        )
    g._decomp = decomp
    return decomp


def act_on_word(g: TreeAutomorphism, x: str) -> str:
    """Image of the tree vertex ``x`` (a word over 0/1) under ``g``."""
    for ch in x:
        if ch not in "01":
            raise ValidationError(f"tree vertices are 0/1 words, got {x!r}")
    if not x or not g.word:
        return x
    decomp = wreath_decompose(g)
    first = int(x[0])
    image_first = first ^ decomp.swap
    return str(image_first) + act_on_word(decomp.sections[first], x[1:])


def signature(g: TreeAutomorphism, depth: int) -> Tuple[str, ...]:
    """The full action on level ``depth``, as a tuple of image words."""
    leaves = _level(depth)
    return tuple(act_on_word(g, x) for x in leaves)


def _level(depth: int):
    if depth == 0:
        return ("",)
    return tuple(
        format(i, f"0{depth}b") for i in range(1 << depth)
    )


# -- exact equality for the a,b,c,d group -------------------------------

class _IdentityMemo:
    def __init__(self):
        self.table: Dict[str, bool] = {}
        self.lock = threading.Lock()

    def get(self, key):
        return self.table.get(key)

    def put(self, key, value):
        with self.lock:
            if len(self.table) >= _MEMO_CAP:
                raise CapExceeded(
                    f"equality memo exceeded {_MEMO_CAP} entries",
                    partial=len(self.table),
                )
            self.table[key] = value


_identity_memo = _IdentityMemo()


def _grig_is_identity(word: str) -> bool:
    if not word:
        return True
    if len(word) == 1:
        return False
    cached = _identity_memo.get(word)
    if cached is not None:
        return cached
    decomp = wreath_decompose(TreeAutomorphism(GRIGORCHUK, word))
    if decomp.swap:
        result = False
    else:
        result = (
            _grig_is_identity(decomp.sections[0].word)
            and _grig_is_identity(decomp.sections[1].word)
        )
    _identity_memo.put(word, result)
    return result


class EqualityVerdict:
    """Equality answer; ``approximate`` marks depth-bounded certification."""

    __slots__ = ("equal", "approximate", "depth")

    def __init__(self, equal: bool, approximate: bool, depth: Optional[int]):
        self.equal = equal
        self.approximate = approximate
        self.depth = depth

    def __bool__(self):
        return self.equal

    def __repr__(self):
        tag = f"to depth {self.depth}" if self.approximate else "exact"
        return f"EqualityVerdict({self.equal}, {tag})"


def equals_selfsim(g: TreeAutomorphism, h: TreeAutomorphism,
                   depth: int = 16) -> EqualityVerdict:
    if g.family != h.family:
        raise ValidationError("cannot compare across families")
    product = g * h.inverse()
    if g.family == GRIGORCHUK:
        return EqualityVerdict(_grig_is_identity(product.word), False, None)
    equal = all(act_on_word(product, x) == x for x in _level(depth))
    return EqualityVerdict(equal, True, depth)


def is_identity(g: TreeAutomorphism, depth: int = 16) -> EqualityVerdict:
    if g.family == GRIGORCHUK:
        return EqualityVerdict(_grig_is_identity(g.word), False, None)
    equal = all(act_on_word(g, x) == x for x in _level(depth))
    return EqualityVerdict(equal, True, depth)


# -- eta norm ------------------------------------------------------------

def _eta_root() -> float:
    """Real root of X^3 + X^2 + X - 2 by Newton iteration to 1e-12."""
    x = 0.8
    for _ in range(100):
        f = x * x * x + x * x + x - 2.0
        fp = 3.0 * x * x + 2.0 * x + 1.0
        step = f / fp
        x -= step
        if abs(step) < 1e-15:
            break
    return x


ETA = _eta_root()

_LETTER_NORMS = {
    "a": 1.0 - ETA ** 3,
    "b": ETA ** 3,
    "c": 1.0 - ETA ** 2,
    "d": 1.0 - ETA,
}


def eta_norm(g: TreeAutomorphism) -> float:
    """Canonical-word upper bound for the contraction norm.

    The value is the letter-norm sum of the reduced syllable word, which is an
    upper bound on the minimum over all factorizations.
    """
    if g.family != GRIGORCHUK:
        raise ValidationError("eta_norm is defined for the a,b,c,d group only")
    return sum(_LETTER_NORMS[ch] for ch in g.word)


# -- sigma endomorphism ---------------------------------------------------

_SIGMA = {"a": "aca", "b": "d", "c": "b", "d": "c"}


def sigma_apply(g: TreeAutomorphism) -> TreeAutomorphism:
    """The substitution a -> a c a, b -> d, c -> b, d -> c, letterwise."""
    if g.family != GRIGORCHUK:
        raise ValidationError("sigma is defined for the a,b,c,d group only")
    return TreeAutomorphism(GRIGORCHUK, "".join(_SIGMA[ch] for ch in g.word))


# -- element order ---------------------------------------------------------

def element_order(g: TreeAutomorphism, max_order: int,
                  depth: int = 16) -> Optional[int]:
    """Least k <= max_order with g^k = 1, or None if no such k is found."""
    if max_order < 1:
        raise ValidationError("max_order must be >= 1")
    running = g
    for k in range(1, max_order + 1):
        if is_identity(running, depth=depth):
            return k
        running = running * g
    return None


# -- portrait export --------------------------------------------------------

def portrait(g: TreeAutomorphism, depth: int) -> dict:
    """JSON-ready portrait: root permutation plus children to ``depth``."""
    node = {"rootPerm": wreath_decompose(g).root_perm if g.word else "id"}
    if depth > 0:
        decomp = wreath_decompose(g)
        node["rootPerm"] = decomp.root_perm
        node["children"] = [
            portrait(decomp.sections[0], depth - 1),
            portrait(decomp.sections[1], depth - 1),
        ]
    return node


def portrait_json(g: TreeAutomorphism, depth: int) -> str:
    return json.dumps(portrait(g, depth), sort_keys=True)
