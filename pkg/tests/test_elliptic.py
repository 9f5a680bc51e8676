"""Eisenstein, Weierstrass and Fourier kernels and their identities."""

from fractions import Fraction

import pytest

from chiralis.coeffring import Scalar, QSeries, ZLaurent, q_log_derivative
from chiralis.elliptic import (
    bernoulli, two_zeta, sigma, eisenstein, g2,
    wp_laurent, zeta_t, wp, wp_prime, wp_bar,
    pk_fourier, pk_ratio, q0_limit_functions, binomial_kernel,
    dbar_operator, d_operator_t, q_derivative_series, reduce_elliptic,
    check_delta_identities, check_p_symmetry, check_pk_diff, check_wp_diff,
    PI, HALF_PI,
)


# -- independent oracles ---------------------------------------------------

def divisor_sum(k, n):
    """sigma_k(n) enumerated as products d*e = n (independent of the module)."""
    total = 0
    for d in range(1, n + 1):
        for e in range(1, n // d + 1):
            if d * e == n:
                total += d ** k
    return total


FROZEN_BERNOULLI = {
    0: Fraction(1), 1: Fraction(-1, 2), 2: Fraction(1, 6), 4: Fraction(-1, 30),
    6: Fraction(1, 42), 8: Fraction(-1, 30), 10: Fraction(5, 66),
    12: Fraction(-691, 2730),
}


def test_bernoulli_frozen():
    for n, v in FROZEN_BERNOULLI.items():
        assert bernoulli(n) == v
    assert bernoulli(3) == 0 and bernoulli(5) == 0


def test_two_zeta():
    assert two_zeta(1) == Scalar.pi(2, Fraction(-1, 12))
    assert two_zeta(2) == Scalar.pi(4, Fraction(1, 720))
    assert two_zeta(3) == Scalar.pi(6, Fraction(-1, 30240))


def test_eisenstein_against_divisor_oracle():
    order = 20
    for k in (1, 2, 3):
        G = eisenstein(k, order)
        assert G.weight == 2 * k
        assert G.coeff(0) == two_zeta(k)
        fact = 1
        for i in range(1, 2 * k):
            fact *= i
        for n in range(1, order + 1):
            want = Scalar.pi(2 * k, Fraction(2 * divisor_sum(2 * k - 1, n), fact))
            assert G.coeff(n) == want


def test_eisenstein_tail_values():
    G2, G4 = eisenstein(1), eisenstein(2)
    assert G2.coeff(0) / Scalar.pi(2) == Fraction(-1, 12)
    assert G2.coeff(1) / Scalar.pi(2) == 2
    assert G2.coeff(2) / Scalar.pi(2) == 6
    assert G2.coeff(3) / Scalar.pi(2) == 8
    assert G4.coeff(1) / Scalar.pi(4) == Fraction(1, 3)
    assert G4.coeff(2) / Scalar.pi(4) == 3
    assert (G2 * G4).weight == 6
    with pytest.raises(ValueError):
        eisenstein(0)


# -- Weierstrass kernels ---------------------------------------------------

def test_wp1_structure():
    p1 = wp_laurent(1, window=10, order=8)
    assert p1.coeff((-1,)) == 1
    assert p1.coeff((1,)).is_zero()       # no t-linear term in wp_1
    assert p1.coeff((3,)) == -eisenstein(2, 8)
    assert p1.coeff((5,)) == -eisenstein(3, 8)
    assert p1.coeff((2,)).is_zero()


def test_wp2_structure():
    p2 = wp_laurent(2, window=10, order=8)
    assert p2.coeff((-2,)) == 1
    assert p2.coeff((0,)).is_zero()       # the constant lives in wp = wp_2 + g_2
    assert p2.coeff((2,)) == eisenstein(2, 8) * 3
    assert p2.coeff((4,)) == eisenstein(3, 8) * 5


def test_zeta_and_normalized():
    z = zeta_t(window=10, order=8)
    assert z.coeff((-1,)) == 1
    assert z.coeff((1,)) == -g2(8)
    assert z.coeff((3,)) == -eisenstein(2, 8)
    w = wp(window=10, order=8)
    assert w.coeff((0,)) == g2(8)
    assert w.coeff((-2,)) == 1
    assert wp_bar(1, 10, 8).coeff((0,)) == HALF_PI
    assert wp_bar(2, 10, 8) == w
    assert wp_bar(3, 10, 8) == wp_laurent(3, 10, 8)


def test_wp_differential_chain():
    for k in range(1, 6):
        assert check_wp_diff(k, window=12, order=8)["ok"]
    # -d wp_1/dt = wp_2 spelled out
    lhs = wp_laurent(1, 12, 8).ddz("t") * Fraction(-1)
    p2 = wp_laurent(2, 12, 8)
    for n in range(-10, 11):
        assert lhs.coeff((n,)) == p2.coeff((n,))


def test_wp_prime():
    wpp = wp_prime(window=10, order=8)
    assert wpp.coeff((-3,)) == -2
    assert wpp.coeff((1,)) == eisenstein(2, 8) * 6     # 2n(2n+1) at n=1


# -- Fourier series --------------------------------------------------------

def test_p1_coefficients():
    P1 = pk_fourier(1, "inner", window=8, order=8)
    geo = QSeries({n: 1 for n in range(9)}, prec=9)
    assert P1.coeff((1,)) == geo * PI
    assert P1.coeff((-1,)) == (geo - 1) * (-PI)
    assert P1.coeff((2,)) == QSeries({2 * m: 1 for m in range(5)}, prec=9) * PI


def test_p2_z1_coefficient():
    P2 = pk_fourier(2, "inner", window=6, order=6)
    # z**1: P**2 * 1/(1-q)
    assert P2.coeff((1,)) == QSeries({n: 1 for n in range(7)}, prec=7) * Scalar.pi(2)
    # z**-1: (+1) P**2 q/(1-q)
    assert P2.coeff((-1,)) == QSeries({n: 1 for n in range(1, 7)}, prec=7) * Scalar.pi(2)


def test_delta_identities():
    for k in range(1, 7):
        assert check_delta_identities(k, window=16, order=16)["ok"]


def test_delta_identity_negative_control():
    P = pk_fourier(1, "inner", window=6, order=6)
    bad = P + ZLaurent.monomial(("z",), (3,), coeff=QSeries.monomial(2, 1, prec=7), window=6)
    rep = check_delta_identities(1, window=6, order=6, P=bad)
    assert not rep["ok"]
    assert rep["detail"]["exponent"] == 3


def test_p_symmetry():
    for k in range(1, 7):
        assert check_p_symmetry(k, window=16, order=16)["ok"]
    P = pk_fourier(2, "inner", window=6, order=6)
    bad = P + ZLaurent.monomial(("z",), (2,), coeff=QSeries.monomial(1, 1, prec=7), window=6)
    assert not check_p_symmetry(2, window=6, order=6, P=bad)["ok"]


def test_pk_diff():
    for k in range(1, 6):
        assert check_pk_diff(k, window=12, order=12)["ok"]


def test_outer_domain():
    inner = pk_fourier(1, "inner", window=6, order=8)
    outer = pk_fourier(1, "outer", window=6, order=8)
    assert outer == inner.subst_q("z", 1)


# -- q=0 limits ------------------------------------------------------------

def _exp_pi_t(order):
    """e**(P t) as a power series in t (QSeries used as a t-container)."""
    fact = 1
    coeffs = {}
    for j in range(order + 1):
        if j:
            fact *= j
        coeffs[j] = Scalar.pi(j, Fraction(1, fact))
    return QSeries(coeffs, prec=order + 1)


def _tseries_of_laurent_q0(f, bound):
    """q=0 image of a one-variable Laurent as a t-container QSeries."""
    return QSeries({e: f.coeff((e,)).q0() for (e,) in f.entries
                    if abs(e) <= bound}, prec=bound + 1)


def test_q0_kernels_shape():
    star, circ = q0_limit_functions(window=8)
    assert star.coeff((-1,)) == 1 and star.coeff((0,)) == 1
    assert circ.coeff((-2,)) == 1 and circ.coeff((-1,)) == 1
    k3 = binomial_kernel(3, 1, window=8)
    assert k3.coeff((1,)) == 3 and k3.coeff((2,)) == 1


def test_wp_q0_equals_exponential_kernel():
    # wp(t, q=0) = P**2 E/(E-1)**2 with E = e**(P t): the circle-product kernel
    T = 12
    E = _exp_pi_t(T + 4)
    em1 = E - 1
    kernel = E * em1.invert(order=T + 2) * em1.invert(order=T + 2) * Scalar.pi(2)
    lhs = _tseries_of_laurent_q0(wp(window=T, order=4), T - 1)
    for e in range(-2, T - 1):
        assert lhs.coeff(e) == kernel.coeff(e), e


def test_zeta_q0_equals_star_kernel():
    # zeta(t, 0) + pi*i = P E/(E-1)
    T = 12
    E = _exp_pi_t(T + 4)
    kernel = E * (E - 1).invert(order=T + 2) * PI
    z0 = _tseries_of_laurent_q0(zeta_t(window=T, order=4), T - 1)
    target = z0 + HALF_PI
    for e in range(-1, T - 1):
        assert target.coeff(e) == kernel.coeff(e), e


# -- derivative operators --------------------------------------------------

def test_dbar_trivial_cases():
    F = ZLaurent.constant(QSeries.of(1, prec=9), ("z0", "z1"), window=8)
    assert dbar_operator(F, order=8).is_zero()
    G4 = eisenstein(2, 8)
    F = ZLaurent.constant(G4, ("z0", "z1"), window=8)
    out = dbar_operator(F, order=8)
    assert out.coeff((0, 0)) == q_log_derivative(G4) * Scalar.pi(2)


def test_dbar_window_guard():
    F = ZLaurent.monomial(("z0", "z1"), (8, -8), window=8)
    with pytest.raises(ValueError, match="window exhausted"):
        dbar_operator(F)


def _collapse_ratio(F, num, den, window):
    """Rewrite a two-variable object supported on exponents (-e, e) as a
    one-variable Laurent in z = z_num/z_den; asserts pure ratio dependence."""
    i_num = F.vars.index(num)
    i_den = F.vars.index(den)
    out = ZLaurent(("z",), window=window)
    for exps, v in F.entries.items():
        assert exps[i_num] == -exps[i_den]
        out.entries[(exps[i_num],)] = v
    return out


def test_dbar_matches_termwise_derivative_of_wp2():
    # Reduce D wp_2 (computed on the t-side) against wp_2, wp_4 and compare
    # with the Fourier-side operator applied to P_2(z1/z0) - g_2.
    W, N = 16, 10
    Dp2 = d_operator_t(wp_laurent(2, W, N), order=N)
    alpha, gammas, rem = reduce_elliptic(Dp2, order=N)
    assert set(gammas) <= {2, 4}
    assert rem.clip(W - 4).is_zero()

    # Entries of F beyond the clip bound feed back into exponents |e| <= 5
    # only at q-order >= data_bound + 1 - |e|, so compare below that.
    data_bound = 12
    F = (pk_ratio(2, "z1", "z0", ("z0", "z1"), window=W, order=N)
         - ZLaurent.constant(g2(N), ("z0", "z1"), window=W)).clip(data_bound)
    got = dbar_operator(F, order=N)

    p2 = pk_fourier(2, "inner", W, N)
    p4 = pk_fourier(4, "inner", W, N)
    want = (ZLaurent.constant(alpha, ("z",), W)
            + (p2 - ZLaurent.constant(g2(N), ("z",), W)) * gammas.get(2, QSeries.zero())
            + p4 * gammas.get(4, QSeries.zero()))
    got1 = _collapse_ratio(got, "z1", "z0", W)
    for e in range(-5, 6):
        prec = data_bound + 1 - abs(e)
        assert got1.coeff((e,)).truncate(prec) == want.coeff((e,)).truncate(prec), e


def test_reduce_elliptic_roundtrip():
    W, N = 12, 6
    f = (wp_laurent(3, W, N) * eisenstein(1, N)
         + wp_laurent(2, W, N) * Fraction(5)
         + ZLaurent.constant(eisenstein(2, N), ("t",), W))
    alpha, gammas, rem = reduce_elliptic(f, order=N)
    assert rem.is_zero()
    assert alpha == eisenstein(2, N)
    assert gammas[3] == eisenstein(1, N)
    assert gammas[2] == QSeries.of(5)


def test_wp_products_reduce_with_zero_remainder():
    # wp_2 * wp_2 is elliptic with a single pole: remainder must vanish
    W, N = 16, 8
    p2 = wp_laurent(2, W, N)
    alpha, gammas, rem = reduce_elliptic(p2 * p2, order=N)
    assert rem.clip(W - 6).is_zero()
    # classical: wp_2**2 = wp_4 + 5 G_4 (pole parts and constants force it)
    assert gammas.get(4) == QSeries.of(1)
    assert not gammas.get(2)
    assert not gammas.get(3)
    assert alpha == eisenstein(2, N) * 5
