"""Words, normal forms and equality oracles for the basic group families.

A word is a tuple of letters; a letter is a pair (generator index, sign) with
sign +1 or -1.  The empty tuple is the identity.  Every family below has a
complete normal form, so ``equals`` is decided by comparing canonical keys.

Registered families:

* ``free:k``      free group of rank k
* ``z:d``         free abelian group of rank d
* ``lamplighter`` (Z/2) wr Z, generators a (lamp toggle, involution), t (move)
* ``dihedral``    infinite dihedral group, two involutions x, y
* ``coset:f2``    the free group F2 marked for the coset action H\\F2
* ``zmod:n[,m,...]``  finite product of cyclic groups Z/n x Z/m x ...
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

from .errors import ValidationError

Letter = Tuple[int, int]
Word = Tuple[Letter, ...]

_FREE_NAMES = "abcdefghijklmnopqrstuvwxyz"
_ABELIAN_NAMES = ["x", "y", "z", "w"]


def _free_reduce(letters: Iterable[Letter]) -> Word:
    stack: list[Letter] = []
    for gen, sign in letters:
        if stack and stack[-1][0] == gen and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((gen, sign))
    return tuple(stack)


class LamplighterElement:
    """A lamplighter group element: finite lamp support plus a position."""

    __slots__ = ("lamp_support", "position")

    def __init__(self, lamp_support: Iterable[int], position: int):
        self.lamp_support = frozenset(lamp_support)
        self.position = position

    def __eq__(self, other):
        return (
            isinstance(other, LamplighterElement)
            and self.lamp_support == other.lamp_support
            and self.position == other.position
        )

    def __hash__(self):
        return hash((self.lamp_support, self.position))

    def __repr__(self):
        lamps = sorted(self.lamp_support)
        return f"LamplighterElement(lamps={lamps}, position={self.position})"


class MarkedGroup:
    """A finite generating set plus normal-form and equality oracles.

    Instances are immutable; all operations are pure.
    """

    def __init__(self, family: str, rank: int, names: Sequence[str],
                 involutions: Sequence[bool],
                 mods: Optional[Sequence[int]] = None):
        self.family = family
        self.rank = rank
        self.names = tuple(names)
        self.involutions = tuple(involutions)
        self.mods = None if mods is None else tuple(mods)

    # -- construction -------------------------------------------------

    @staticmethod
    def from_spec(spec: str) -> "MarkedGroup":
        spec = spec.strip()
        if spec.startswith("free:"):
            k = _parse_rank(spec[5:], "free rank")
            if k > len(_FREE_NAMES):
                raise ValidationError(f"free rank at most {len(_FREE_NAMES)}")
            return MarkedGroup("free", k, _FREE_NAMES[:k], [False] * k)
        if spec.startswith("z:"):
            d = _parse_rank(spec[2:], "abelian rank")
            if d <= len(_ABELIAN_NAMES):
                names = _ABELIAN_NAMES[:d]
            else:
                names = [f"x{i + 1}" for i in range(d)]
            return MarkedGroup("z", d, names, [False] * d)
        if spec == "lamplighter":
            return MarkedGroup("lamplighter", 2, ["a", "t"], [True, False])
        if spec == "dihedral":
            return MarkedGroup("dihedral", 2, ["x", "y"], [True, True])
        if spec == "coset:f2":
            return MarkedGroup("coset-f2", 2, ["a", "b"], [False, False])
        if spec.startswith("zmod:"):
            try:
                mods = [int(part) for part in spec[5:].split(",")]
            except ValueError:
                raise ValidationError(f"bad finite group spec {spec!r}")
            if not mods or any(m < 1 for m in mods):
                raise ValidationError("zmod moduli must be >= 1")
            d = len(mods)
            if d <= len(_ABELIAN_NAMES):
                names = _ABELIAN_NAMES[:d]
            else:
                names = [f"x{i + 1}" for i in range(d)]
            return MarkedGroup("zmod", d, names, [m == 2 for m in mods], mods)
        raise ValidationError(f"unknown group spec {spec!r}")

    # -- word plumbing ------------------------------------------------

    @property
    def identity(self) -> Word:
        return ()

    def validate(self, word: Word):
        for gen, sign in word:
            if not 0 <= gen < self.rank:
                raise ValidationError(f"unknown generator index {gen}")
            if sign not in (1, -1):
                raise ValidationError(f"bad letter sign {sign}")

    def generator(self, index: int, sign: int = 1) -> Word:
        if not 0 <= index < self.rank:
            raise ValidationError(f"unknown generator index {index}")
        return ((index, sign),)

    def parse(self, text: str) -> Word:
        """Parse space-separated tokens ``name`` or ``name^exp``; "1" = identity."""
        out: list[Letter] = []
        for token in text.split():
            if token == "1":
                continue
            name, _, exp_text = token.partition("^")
            if name not in self.names:
                raise ValidationError(f"unknown generator {name!r}")
            gen = self.names.index(name)
            if exp_text:
                try:
                    exp = int(exp_text)
                except ValueError:
                    raise ValidationError(f"bad exponent in token {token!r}")
            else:
                exp = 1
            sign = 1 if exp >= 0 else -1
            out.extend((gen, sign) for _ in range(abs(exp)))
        return self.normal_form(tuple(out))

    def show(self, word: Word) -> str:
        if not word:
            return "1"
        parts = []
        i = 0
        while i < len(word):
            gen, sign = word[i]
            j = i
            while j < len(word) and word[j] == (gen, sign):
                j += 1
            exp = (j - i) * sign
            name = self.names[gen]
            if exp == 1:
                parts.append(name)
            else:
                parts.append(f"{name}^{exp}")
            i = j
        return " ".join(parts)

    # -- normal forms -------------------------------------------------

    def normal_form(self, word: Word) -> Word:
        self.validate(word)
        if self.family in ("free", "coset-f2"):
            return _free_reduce(word)
        if self.family == "z":
            exps = [0] * self.rank
            for gen, sign in word:
                exps[gen] += sign
            out: list[Letter] = []
            for gen, e in enumerate(exps):
                sign = 1 if e >= 0 else -1
                out.extend((gen, sign) for _ in range(abs(e)))
            return tuple(out)
        if self.family == "zmod":
            exps = [0] * self.rank
            for gen, sign in word:
                exps[gen] = (exps[gen] + sign) % self.mods[gen]
            out = []
            for gen, e in enumerate(exps):
                out.extend((gen, 1) for _ in range(e))
            return tuple(out)
        if self.family == "lamplighter":
            elt = self.lamplighter_element(word)
            return self._lamplighter_word(elt)
        if self.family == "dihedral":
            stack: list[int] = []
            for gen, _sign in word:  # both generators are involutions
                if stack and stack[-1] == gen:
                    stack.pop()
                else:
                    stack.append(gen)
            return tuple((gen, 1) for gen in stack)
        raise ValidationError(f"no normal form for family {self.family}")

    def lamplighter_element(self, word: Word) -> LamplighterElement:
        """Evaluate a word left-to-right in (Z/2) wr Z."""
        if self.family != "lamplighter":
            raise ValidationError("lamplighter_element needs the lamplighter family")
        self.validate(word)
        lamps: set[int] = set()
        pos = 0
        for gen, sign in word:
            if gen == 0:  # a: toggle the lamp at the current position
                lamps.symmetric_difference_update({pos})
            else:  # t: move
                pos += sign
        return LamplighterElement(lamps, pos)

    def _lamplighter_word(self, elt: LamplighterElement) -> Word:
        out: list[Letter] = []
        here = 0

        def travel(target: int):
            nonlocal here
            sign = 1 if target >= here else -1
            out.extend((1, sign) for _ in range(abs(target - here)))
            here = target

        for lamp in sorted(elt.lamp_support):
            travel(lamp)
            out.append((0, 1))
        travel(elt.position)
        return tuple(out)

    # -- group operations ---------------------------------------------

    def compose(self, w1: Word, w2: Word) -> Word:
        return self.normal_form(tuple(w1) + tuple(w2))

    def invert(self, word: Word) -> Word:
        self.validate(word)
        return self.normal_form(tuple((g, -s) for g, s in reversed(word)))

    def conjugate(self, word: Word, by: Word) -> Word:
        return self.compose(self.compose(self.invert(by), word), by)

    def commutator(self, w1: Word, w2: Word) -> Word:
        return self.compose(
            self.compose(self.invert(w1), self.invert(w2)),
            self.compose(w1, w2),
        )

    def power(self, word: Word, n: int) -> Word:
        if n < 0:
            return self.power(self.invert(word), -n)
        result = self.identity
        base = self.normal_form(word)
        while n:
            if n & 1:
                result = self.compose(result, base)
            base = self.compose(base, base)
            n >>= 1
        return result

    def equals(self, w1: Word, w2: Word) -> bool:
        return self.key(w1) == self.key(w2)

    def key(self, word: Word):
        """Canonical hashable key of the element represented by ``word``."""
        if self.family == "lamplighter":
            elt = self.lamplighter_element(word)
            return (tuple(sorted(elt.lamp_support)), elt.position)
        if self.family == "z":
            exps = [0] * self.rank
            for gen, sign in word:
                exps[gen] += sign
            return tuple(exps)
        if self.family == "zmod":
            exps = [0] * self.rank
            for gen, sign in word:
                exps[gen] = (exps[gen] + sign) % self.mods[gen]
            return tuple(exps)
        return self.normal_form(word)

    def length(self, word: Word) -> int:
        """Word length metric: letter count of the normal form."""
        return len(self.normal_form(word))

    # -- graph plumbing -----------------------------------------------

    def edge_letters(self) -> Tuple[Letter, ...]:
        """Symmetrized generator letters: one per involution, two otherwise."""
        out: list[Letter] = []
        for gen in range(self.rank):
            out.append((gen, 1))
            if not self.involutions[gen]:
                out.append((gen, -1))
        return tuple(out)

    def letter_name(self, letter: Letter) -> str:
        gen, sign = letter
        name = self.names[gen]
        return name if sign == 1 else f"{name}^-1"

    def __repr__(self):
        return f"MarkedGroup({self.family}, rank={self.rank})"


def _parse_rank(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ValidationError(f"bad {what}: {text!r}")
    if value < 1:
        raise ValidationError(f"{what} must be positive")
    return value
