"""Wreath recursion, exact equality, the eta norm and the sigma substitution
for the self-similar tree automorphism groups."""

import pytest

from amenlab.errors import ValidationError
from amenlab.selfsim import (ETA, TreeAutomorphism, act_on_word, basilica,
                             element_order, equals_selfsim, eta_norm,
                             grig_reduce, grigorchuk, is_identity, portrait,
                             sigma_apply, signature, wreath_decompose,
                             _LETTER_NORMS)


def syllable_words(max_len):
    """Reduced syllable words: no aa, no two adjacent letters from {b,c,d}."""
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        new = []
        for w in frontier:
            for ch in "abcd":
                if w and (w[-1] == ch or (w[-1] != "a" and ch != "a")):
                    continue
                new.append(w + ch)
        out.extend(new)
        frontier = new
    return out


class TestReduction:
    def test_cancellation_and_fusion(self):
        assert grig_reduce("aa") == ""
        assert grig_reduce("bc") == "d"
        assert grig_reduce("bcd") == ""
        assert grig_reduce("abbd") == "ad"

    def test_rejects_bad_letters(self):
        with pytest.raises(ValidationError):
            grig_reduce("abe")


class TestWreathRecursion:
    def test_generator_sections(self):
        table = {
            "a": ("1", "1", "swap"),
            "b": ("a", "c", "id"),
            "c": ("a", "d", "id"),
            "d": ("1", "b", "id"),
        }
        for letter, (s0, s1, perm) in table.items():
            d = wreath_decompose(grigorchuk(letter))
            assert (d.sections[0].show(), d.sections[1].show(),
                    d.root_perm) == (s0, s1, perm)

    def test_action_is_a_right_action(self):
        g = grigorchuk("abad")
        h = grigorchuk("cad")
        for depth in range(1, 9):
            for x in (format(i, f"0{depth}b") for i in range(1 << depth)):
                assert act_on_word(g * h, x) == act_on_word(h, act_on_word(g, x))

    def test_action_agrees_with_recursion(self):
        # the recursive decomposition and the direct first-letter rule agree
        g = grigorchuk("badacab")
        d = wreath_decompose(g)
        for x in (format(i, "08b") for i in range(256)):
            first = int(x[0]) ^ d.swap
            expected = str(first) + act_on_word(d.sections[int(x[0])], x[1:])
            assert act_on_word(g, x) == expected


class TestRelations:
    def test_generator_involutions(self):
        for letter in "abcd":
            g = grigorchuk(letter)
            assert is_identity(g * g).equal
            assert not is_identity(g).equal

    def test_bcd_is_trivial(self):
        assert is_identity(grigorchuk("bcd")).equal

    def test_ad_has_order_four(self):
        assert element_order(grigorchuk("ad"), 16) == 4

    def test_torsion_in_small_ball(self):
        for word in ("ab", "ac", "abad", "bada"):
            order = element_order(grigorchuk(word), 16)
            assert order is not None and order & (order - 1) == 0


class TestEtaNorm:
    def test_letter_values(self):
        assert abs(ETA ** 3 + ETA ** 2 + ETA - 2.0) < 1e-12
        assert abs(eta_norm(grigorchuk("b")) - ETA ** 3) < 1e-12
        assert abs(eta_norm(grigorchuk("d")) - (1.0 - ETA)) < 1e-12

    def test_fusion_never_increases_the_norm(self):
        for x, y in (("b", "c"), ("b", "d"), ("c", "d")):
            fused = grig_reduce(x + y)
            assert _LETTER_NORMS[fused] <= \
                _LETTER_NORMS[x] + _LETTER_NORMS[y] + 1e-12

    def test_section_contraction(self):
        """Both sections together shrink the norm by the factor eta, up to
        the additive norm of a, on every reduced syllable word."""
        bound_slack = 1e-9
        for w in syllable_words(8):
            g = grigorchuk(w)
            if g.word != w:
                continue
            d = wreath_decompose(g)
            lhs = eta_norm(d.sections[0]) + eta_norm(d.sections[1])
            rhs = ETA * (eta_norm(g) + _LETTER_NORMS["a"])
            assert lhs <= rhs + bound_slack, w


class TestSigma:
    def test_letter_images(self):
        assert sigma_apply(grigorchuk("a")).show() == "aca"
        assert sigma_apply(grigorchuk("b")).show() == "d"
        assert sigma_apply(grigorchuk("c")).show() == "b"
        assert sigma_apply(grigorchuk("d")).show() == "c"

    def test_sigma_kills_relators(self):
        for relator in ("aa", "bb", "cc", "dd", "bcd", "adadadad"):
            assert is_identity(sigma_apply(grigorchuk(relator))).equal

    def test_sigma_image_sections(self):
        # the first-level section of sigma(g) at vertex 1 recovers g
        for word in ("a", "b", "ab", "abad"):
            image = sigma_apply(grigorchuk(word))
            d = wreath_decompose(image)
            assert equals_selfsim(d.sections[1], grigorchuk(word)).equal


class TestBasilica:
    def test_generator_recursion(self):
        da = wreath_decompose(basilica("a"))
        assert (da.sections[0].show(), da.sections[1].show(),
                da.root_perm) == ("1", "b", "swap")
        db = wreath_decompose(basilica("b"))
        assert (db.sections[0].show(), db.sections[1].show(),
                db.root_perm) == ("1", "a", "id")

    def test_equality_is_depth_certified(self):
        verdict = equals_selfsim(basilica("a b"), basilica("a b"))
        assert verdict.equal and verdict.approximate and verdict.depth == 16

    def test_torsion_free_sample(self):
        assert element_order(basilica("a"), 20) is None
        assert element_order(basilica("a b^-1"), 20) is None

    def test_inverse(self):
        g = basilica("a b^-1 a")
        assert is_identity(g * g.inverse()).equal


def test_signature_and_portrait_shapes():
    g = grigorchuk("ab")
    assert len(signature(g, 4)) == 16
    tree = portrait(g, 2)
    assert tree["rootPerm"] == "swap"
    assert len(tree["children"]) == 2


def test_cross_family_operations_rejected():
    with pytest.raises(ValidationError):
        grigorchuk("a") * basilica("a")
    with pytest.raises(ValidationError):
        eta_norm(basilica("a"))
    with pytest.raises(ValidationError):
        sigma_apply(basilica("a"))
