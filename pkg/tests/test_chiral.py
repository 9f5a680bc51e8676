import itertools
import random
from fractions import Fraction

import pytest

from chiralis.chiral import (
    ONE,
    TAGS1,
    TAGS2,
    WP,
    chain1_canonical,
    chain2,
    check_nabla_boundary,
    check_q0_degeneration,
    check_s2_d2,
    d1,
    d1_general,
    d2,
    d2_general,
    d2_via_expansion,
    gr_complex,
    h1_q0,
    nabla,
    raw_to_chain1,
)
from chiralis.classical import c2_algebra, gr_algebra, hk1, kaehler_dims
from chiralis.coeffring import QSeries, Scalar, ZLaurent
from chiralis.elliptic import eisenstein, g2, wp, wp_laurent, zeta_t
from chiralis.vertex import heisenberg, l_mode, mode_action, virasoro

X = ((0, -1),)
XX = ((0, -1), (0, -1))
VAC = ()


def states_up_to(V, W):
    out = []
    for w in range(W + 1):
        out += sorted(V.basis(w))
    return out


def triples_up_to(V, W):
    basis = states_up_to(V, W)
    return [t for t in itertools.product(basis, repeat=3)
            if sum(V.monomial_weight(m) for m in t) <= W]


# -- canonical forms -------------------------------------------------------

def test_chain2_swap_relation():
    V = heisenberg()
    # out-of-order pair gets swapped with the tag parity
    c = chain2(V, [(XX, X, X, "zeta", 1)])
    assert c == {(X, XX, X, "zeta"): QSeries.of(1)}
    c = chain2(V, [(XX, X, X, "wp_u", 1)])
    # wp(u) swaps to wp(v) with a plain sign
    assert c == {(X, XX, X, "wp_v"): QSeries.of(-1)}


def test_chain2_diagonal_even_tags_vanish():
    V = heisenberg()
    assert chain2(V, [(X, X, VAC, "1", 1)]) == {}
    assert chain2(V, [(X, X, X, "wp_uv", 3)]) == {}
    assert chain2(V, [(X, X, X, "wpwp", 1)]) == {}
    # odd tags pair with themselves trivially and survive
    kept = chain2(V, [(X, X, X, "zeta", 1)])
    assert kept == {(X, X, X, "zeta"): QSeries.of(1)}


def test_chain1_canonical_kills_translates():
    V = heisenberg()
    tx = ((0, -2),)  # the translate of x
    assert chain1_canonical(V, {(tx, X, ONE): QSeries.of(1)}) == {}
    # wp-tagged terms carry no relation
    kept = chain1_canonical(V, {(tx, X, WP): QSeries.of(1)})
    assert kept == {(tx, X, WP): QSeries.of(1)}
    # xx is not a translate, so it stays (possibly rewritten)
    kept = chain1_canonical(V, {(XX, X, ONE): QSeries.of(1)})
    assert kept


def test_chain1_canonical_square_uses_shifted_translation():
    # in the square structure the relation is (L_0 + L_{-1}) a (x) b (x) 1
    V = heisenberg()
    tx = ((0, -2),)
    src = l_mode(0, V.state({X: 1})) + l_mode(-1, V.state({X: 1}))
    chain = {}
    for m, c in src.terms.items():
        chain[(m, X, ONE)] = QSeries.of(c)
    assert chain1_canonical(V, chain, "square") == {}
    assert chain1_canonical(V, {(tx, X, ONE): QSeries.of(1)}, "square") != {}


# -- degree-1 boundary -----------------------------------------------------

def test_d1_constant_tag_is_zero_mode():
    V = heisenberg()
    out = d1(V, {(XX, X, ONE): QSeries.of(1)}, "round", 8)
    want = mode_action(V.state({XX: 1}), 0, V.state({X: 1}))
    assert {m for m, c in out.items() if c} == set(want.terms)
    for m, c in want.terms.items():
        assert out[m].q0() == c


def test_d1_wp_tag_matches_termwise_kernel_expansion():
    # omega (x) omega (x) wp in the Virasoro algebra: the kernel
    # t**-2 + G_2 + 3 G_4 t**2 + 5 G_6 t**4 + ... pairs mode by mode
    V = virasoro(Fraction(1, 2))
    om = ((0, -1),)
    N = 8
    out = d1(V, {(om, om, WP): QSeries.of(1)}, "round", N)
    a = V.state({om: 1})
    acc = {}
    kernel = [(-2, QSeries.of(1)), (0, g2(N))]
    for n in range(1, 3):
        kernel.append((2 * n, eisenstein(n + 1, N) * (2 * n + 1)))
    for e, coeff in kernel:
        img = mode_action(a, e, a)
        for m, c in img.terms.items():
            prev = acc.get(m, QSeries.of(0))
            acc[m] = prev + coeff * c
    acc = {m: c for m, c in acc.items() if c}
    assert out == acc


def test_d1_square_constant_tag():
    from chiralis.zhu import sq_mode
    V = heisenberg()
    out = d1(V, {(XX, X, ONE): QSeries.of(1)}, "square", 8)
    want = sq_mode(V.state({XX: 1}), 0, V.state({X: 1}))
    assert set(out) == set(want.terms)


# -- the square-zero identity ----------------------------------------------

@pytest.mark.parametrize("structure", ["round", "square"])
def test_d1_d2_vanishes_heisenberg(structure):
    V = heisenberg()
    for tr in triples_up_to(V, 4):
        for tag in TAGS2:
            ch = {(tr[0], tr[1], tr[2], tag): QSeries.of(1)}
            out = d1(V, d2(V, ch, structure, 6, canonical=False), structure, 6)
            assert not any(out.values()), (tr, tag, structure)


@pytest.mark.parametrize("structure", ["round", "square"])
def test_d1_d2_vanishes_virasoro(structure):
    V = virasoro(Fraction(1, 2))
    for tr in triples_up_to(V, 5):
        for tag in TAGS2:
            ch = {(tr[0], tr[1], tr[2], tag): QSeries.of(1)}
            out = d1(V, d2(V, ch, structure, 6, canonical=False), structure, 6)
            assert not any(out.values()), (tr, tag, structure)


def test_d2_linear_combination():
    V = heisenberg()
    ch = chain2(V, [(X, XX, X, "zeta", Fraction(2, 3)),
                    (VAC, X, X, "wp_uv", -1)])
    out = d1(V, d2(V, ch, "round", 6), "round", 6)
    assert not any(out.values())


def test_s2_swap_commutes_with_d2():
    V = heisenberg()
    for tag in TAGS2:
        for structure in ("round", "square"):
            rep = check_s2_d2(V, XX, X, X, tag, structure, 6)
            assert rep["ok"], (tag, structure, rep)


# -- expansion oracle for the tagged boundary ------------------------------

def test_d2_matches_expansion_route():
    V = heisenberg()
    for tag in TAGS2:
        for tr in ((X, X, X), (XX, X, X), (X, X, XX)):
            lhs = d2_via_expansion(V, tr[0], tr[1], tr[2], tag, order=6)
            rhs = d2(V, {(tr[0], tr[1], tr[2], tag): QSeries.of(1)},
                     "round", 6)
            assert lhs == rhs, (tag, tr)


def test_d2_matches_expansion_route_virasoro():
    V = virasoro(Fraction(1, 2))
    om = ((0, -1),)
    for tag in TAGS2:
        lhs = d2_via_expansion(V, om, om, om, tag, order=6)
        rhs = d2(V, {(om, om, om, tag): QSeries.of(1)}, "round", 6)
        assert lhs == rhs, tag


# -- several marked points -------------------------------------------------

def collapse_zero(V, states, terms, trust):
    c1 = d2_general(V, states, terms, 6)
    tot = {}
    for key, tlist in c1.items():
        for k2, tl2 in d1_general(V, key, tlist, 6).items():
            tot.setdefault(k2, []).extend(tl2)
    for k2, tl2 in tot.items():
        acc = None
        for coeff, factors in tl2:
            assert len(factors) <= 1
            if factors:
                g = next(iter(factors.values())) * coeff
            else:
                g = ZLaurent.constant(coeff, ("t",), trust * 2)
            if g.vars != ("t",):
                g = g.with_vars(("t",))
            acc = g if acc is None else acc + g
        if acc is not None and acc.clip(trust).entries:
            return k2, acc
    return None


def test_two_marked_points_square_zero():
    V = heisenberg()
    W = 20
    w = wp(W, 6)
    z = zeta_t(W, 6)
    cases = [
        ((X, X, X, X), [(QSeries.of(1), {(0, 1): w})]),
        ((X, X, X, X), [(QSeries.of(1), {(0, 2): w, (1, 3): w})]),
        ((XX, X, X, X), [(QSeries.of(1), {(0, 1): z, (2, 3): w})]),
        ((X, XX, X, X), [(QSeries.of(1), {(0, 3): w, (1, 2): z})]),
    ]
    for states, terms in cases:
        assert collapse_zero(V, states, terms, 10) is None


def test_two_marked_points_random_kernels():
    V = heisenberg()
    W = 20
    rng = random.Random(11)
    kernels = [wp(W, 6), zeta_t(W, 6)]
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    basis = states_up_to(V, 2)
    for _ in range(6):
        states = tuple(basis[rng.randrange(len(basis))] for _ in range(4))
        factors = {}
        for p in rng.sample(pairs, rng.randint(1, 2)):
            factors[p] = kernels[rng.randrange(2)]
        terms = [(QSeries.of(rng.randint(1, 3)), factors)]
        assert collapse_zero(V, states, terms, 10) is None, (states, factors)


def test_window_exhausted_raises():
    V = heisenberg()
    tiny = wp(3, 4)
    with pytest.raises(ValueError, match="window exhausted"):
        d2_general(V, (XX, XX, XX), [(QSeries.of(1), {(0, 2): tiny, (1, 2): tiny})], 4)


# -- raw kernels into tagged chains ----------------------------------------

def test_raw_to_chain1_trades_higher_poles():
    V = heisenberg()
    N, W = 8, 10
    a, b = V.state({X: 1}), V.state({X: 1})
    got = raw_to_chain1(V, [(a, b, wp_laurent(3, W, N), 1)], "round", N)
    # wp_3 = (1/2) T a (x) b (x) wp_2 and wp_2 = wp - G_2
    tx = ((0, -2),)
    want = {(tx, X, WP): QSeries.of(Fraction(1, 2)),
            (tx, X, ONE): g2(N) * Fraction(-1, 2)}
    want = chain1_canonical(V, want, "round")
    assert got == want


def test_raw_to_chain1_rejects_residue():
    V = heisenberg()
    a, b = V.state({X: 1}), V.state({X: 1})
    bare = ZLaurent.monomial(("t",), (-1,), 1, 8)
    with pytest.raises(ValueError, match="elliptic span"):
        raw_to_chain1(V, [(a, b, bare, 1)], "round", 8)


# -- connection ------------------------------------------------------------

def test_nabla_degree0_vacuum_gives_conformal_vector():
    V = heisenberg()
    out = nabla(V, {VAC: QSeries.of(1)})
    assert out == {XX: QSeries.of(Fraction(1, 2))}


def test_nabla_degree0_generator():
    # nabla(x (x) 1) = omega_(-1)x - G_2 x; the G_2 series starts
    # P^2 (1/12 - 2q - 6q^2 - ...)
    V = heisenberg()
    out = nabla(V, {X: QSeries.of(1)})
    assert out[((0, -3),)].q0() == 1
    assert out[((0, -1), (0, -1), (0, -1))].q0() == Fraction(1, 2)
    series = out[X]
    assert series.coeff(0) == Scalar.pi(2, Fraction(1, 12))
    assert series.coeff(1) == Scalar.pi(2, -2)
    assert series.coeff(2) == Scalar.pi(2, -6)


def test_nabla_degree1_requires_cycle():
    V = heisenberg()
    with pytest.raises(ValueError, match="cycle required"):
        nabla(V, {(X, X, WP): QSeries.of(1)})


def test_nabla_preserves_cycles():
    V = heisenberg()
    for key in ((X, X, ONE), (VAC, X, WP), (VAC, VAC, WP)):
        out = nabla(V, {key: QSeries.of(1)})
        bd = d1(V, out, "round", 16)
        assert not any(bd.values()), key


def test_nabla_boundary_preimage_identity():
    rep = check_nabla_boundary(heisenberg(), 4, order=8)
    assert rep["ok"], rep["fails"]
    rep = check_nabla_boundary(virasoro(Fraction(1, 2)), 4, order=8)
    assert rep["ok"], rep["fails"]


# -- associated graded complex ---------------------------------------------

def test_gr_complex_against_classical_tables():
    for V in (heisenberg(), virasoro(Fraction(1, 2))):
        W = 6
        rep = gr_complex(V, W)
        assert rep["sub2"]["dd_zero"]
        A = gr_algebra(V, W + 2)
        R = c2_algebra(V, W + 2)
        assert rep["sub2"]["h1"] == hk1(A, W)
        assert rep["sub1"]["h1"] == kaehler_dims(R, W)
        c2d = R.dims(W)
        conv = [sum(c2d[i] * c2d[w - i] for i in range(w + 1))
                for w in range(W + 1)]
        assert rep["sub1"]["pair_quotient"] == conv
        assert rep["sub2"]["h0"] == c2d


def test_gr_complex_heisenberg_values():
    rep = gr_complex(heisenberg(), 7)
    assert rep["sub2"]["h1"] == [0] * 8
    assert rep["sub1"]["h1"] == [0, 1, 1, 1, 1, 1, 1, 1]
    assert rep["sub1"]["pair_quotient"] == [1, 2, 3, 4, 5, 6, 7, 8]


# -- q = 0 fibre -----------------------------------------------------------

def test_h1_q0_square_matches_hochschild():
    rep = h1_q0(heisenberg(), 4, structure="square", order=2, margin=2)
    assert rep["d1d2_zero"]
    assert rep["h0"] == [1, 1, 1, 1, 1]
    assert rep["h1"] == [0, 1, 1, 1, 1]
    assert rep["comparison"]["stable"]
    assert rep["comparison"]["ok"] is True


def test_h1_q0_corrupted_sign_is_detected():
    rep = h1_q0(heisenberg(), 4, structure="square", order=2, margin=2,
                corrupt="wp_uv")
    assert not rep["d1d2_zero"]
    assert rep["comparison"]["ok"] is False


def test_q0_degeneration_to_circle_product():
    assert check_q0_degeneration(heisenberg(), 5)["ok"]
    assert check_q0_degeneration(virasoro(Fraction(1, 2)), 5)["ok"]
