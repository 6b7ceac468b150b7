import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from conftest import ncpolys, raw_symbol_words
from fwlab.ncalg import (
    NCPoly,
    Word,
    adjoint,
    anticommutator,
    beta_atom,
    beta_conjugate,
    commutator,
    e_atom,
    even_odd_split,
    from_word,
    identity_part,
    m_scalar,
    mul,
    normalize,
    o_atom,
    one,
    poly_from_json_obj,
    poly_to_json_obj,
    scalar,
    truncate,
    zero,
)

W = 8


def test_beta_push_single():
    # O*beta -> -beta*O
    assert from_word("OB") == from_word("BO", coeff=-1)


def test_beta_sandwich_even_atom():
    # beta*E*beta -> E
    assert from_word("BEB") == e_atom()


def test_beta_sandwich_cancels_square():
    # beta*O*beta*O + O*O -> 0
    assert (from_word("BOBO") + from_word("OO")).is_zero


def test_mul_beta_odd_square():
    bo = from_word("BO", m_power=-1)
    assert mul(bo, bo, W) == from_word("OO", m_power=-2, coeff=-1)


def test_mul_identity_truncates():
    p = from_word("EO", m_power=-1) + from_word("O", coeff=F(1, 3))
    assert mul(one(), p, 2) == truncate(p, 2)
    assert mul(one(), p, W) == p


def test_mul_drops_overweight():
    # E/m * O/m has weight 3
    assert mul(
        from_word("E", m_power=-1), from_word("O", m_power=-1), 2
    ).is_zero


def test_commutator_self_is_zero():
    assert commutator(e_atom(), e_atom(), W).is_zero


def test_anticommutator_beta_betao():
    assert anticommutator(beta_atom(), from_word("BO"), W).is_zero


def test_commutator_free_atoms_do_not_reduce():
    o2 = from_word("OO")
    got = commutator(o2, e_atom(), W)
    assert got == from_word("OOE") - from_word("EOO")


def test_even_odd_split_dirac():
    h = from_word("B", m_power=1) + e_atom() + o_atom()
    even, odd = even_odd_split(h)
    assert even == from_word("B", m_power=1) + e_atom()
    assert odd == o_atom()


def test_even_odd_split_beta_oe():
    p = from_word("BOE")
    even, odd = even_odd_split(p)
    assert even.is_zero
    assert odd == p


def test_even_odd_split_zero():
    even, odd = even_odd_split(zero())
    assert even.is_zero and odd.is_zero


def test_identity_part():
    p = from_word("B", m_power=1) + e_atom() + scalar(3)
    assert identity_part(p) == from_word("B", m_power=1) + scalar(3)


def test_weight_examples():
    assert Word(0, "EO", -2).weight == 3
    assert Word(1, "OO", -2).weight == 2
    assert Word(1, "", 1).weight == 0


# -- rewrite confluence -----------------------------------------------------------


def _random_order_normalize(symbols: str, seed: int):
    """One-step rewrites applied in random order: the confluence oracle."""
    rng = random.Random(seed)
    state = [(F(1), list(symbols), 0)]  # (coeff, symbols, m_power)
    # repeatedly pick an applicable local rule anywhere until normal form
    changed = True
    while changed:
        changed = False
        coeff, seq, m_power = state[0]
        sites = []
        for i in range(len(seq) - 1):
            a, b = seq[i], seq[i + 1]
            if a == "B" and b == "B":
                sites.append(("BB", i))
            elif a != "B" and b == "B":
                sites.append(("push", i))
        if sites:
            rule, i = rng.choice(sites)
            if rule == "BB":
                del seq[i : i + 2]
            else:
                a = seq[i]
                seq[i], seq[i + 1] = seq[i + 1], a
                if a == "O":
                    coeff = -coeff
            state[0] = (coeff, seq, m_power)
            changed = True
    coeff, seq, m_power = state[0]
    return NCPoly({Word(len([c for c in seq if c == "B"]), "".join(c for c in seq if c != "B"), m_power): coeff})


@given(raw_symbol_words())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_normalize_confluent(symbols):
    reference = from_word(symbols)
    for seed in (1, 2, 3):
        assert _random_order_normalize(symbols, seed) == reference


@given(ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_normalize_idempotent(p):
    assert normalize(normalize(p)) == normalize(p)


# -- algebra laws -----------------------------------------------------------------


@given(ncpolys(), ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_parity_closure(a, b):
    a_even, a_odd = even_odd_split(a)
    b_even, b_odd = even_odd_split(b)
    assert mul(a_odd, b_odd, W).odd_part().is_zero
    assert mul(a_odd, b_even, W).even_part().is_zero
    assert mul(a_even, b_even, W).odd_part().is_zero


@given(ncpolys(), ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_truncation_coherence(a, b):
    full = mul(a, b, 64)  # large enough to be untruncated for these sizes
    for w in (0, 1, 2, 3, 5):
        assert mul(a, b, w) == truncate(full, w)


@given(ncpolys(), ncpolys(), ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_ring_axioms_at_fixed_weight(a, b, c):
    w = 6
    assert mul(a, b + c, w) == mul(a, b, w) + mul(a, c, w)
    assert mul(a + b, c, w) == mul(a, c, w) + mul(b, c, w)
    assert mul(mul(a, b, w), c, w) == mul(a, mul(b, c, w), w)


@given(ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_split_matches_beta_conjugation(p):
    even, odd = even_odd_split(p)
    conj = beta_conjugate(p)
    assert even == (p + conj) * F(1, 2)
    assert odd == (p - conj) * F(1, 2)
    assert even + odd == p


@given(ncpolys(), ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_adjoint_antihomomorphism(a, b):
    assert adjoint(mul(a, b, 64)) == mul(adjoint(b), adjoint(a), 64)
    assert adjoint(adjoint(a)) == a


@given(ncpolys())
@settings(max_examples=200, deadline=None, derandomize=True)
def test_json_roundtrip(p):
    assert poly_from_json_obj(poly_to_json_obj(p)) == p


def test_json_form_is_sorted_and_stringly():
    p = from_word("OO", m_power=-2, coeff=F(-1, 2)) + e_atom() + beta_atom()
    obj = poly_to_json_obj(p)
    assert [entry["coeff"] for entry in obj] == ["1/1", "-1/2", "1/1"]
    keys = [(entry["beta"], entry["word"], entry["m_power"]) for entry in obj]
    assert keys == sorted(keys)


def test_mul_rejects_negative_weight():
    with pytest.raises(ValueError):
        mul(one(), one(), -1)


def test_m_scalar_is_central():
    p = from_word("BOE", coeff=F(2, 3))
    assert mul(m_scalar(2), p, W) == mul(p, m_scalar(2), W)


def test_from_word_rejects_unknown_symbols():
    with pytest.raises(ValueError):
        from_word("BEOX")
