"""Elliptic special functions as exact formal expansions.

Eisenstein series G_{2k}(q), Weierstrass kernels wp_k(t) and zeta(t) as
t-Laurent objects with q-series coefficients, the Fourier series P_k(z,q)
on the inner and outer annuli, their q=0 limit kernels, and the mixed
tau/translation derivative operator.  All identities among these are
executable checks here.

Conventions: P is the formal symbol for 2*pi*i.  G_{2k} carries the scalar
P**(2k) in its coefficients; its constant term is two times the zeta value
2*zeta(2k) = -P**(2k) * B_{2k} / (2k)!.
"""

from fractions import Fraction
from math import comb

from .coeffring import (
    Scalar, QSeries, ZLaurent, DEFAULT_ORDER, DEFAULT_WINDOW, q_log_derivative,
)

PI = Scalar.pi()             # 2*pi*i
HALF_PI = Scalar.pi(1, Fraction(1, 2))   # pi*i


# -- Bernoulli numbers and Eisenstein series -------------------------------

_BERNOULLI = [Fraction(1)]


def bernoulli(n):
    """B_n with B_1 = -1/2, by the convolution recurrence."""
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        # sum_{j=0}^{m} binom(m+1, j) B_j = 0
        s = sum(comb(m + 1, j) * _BERNOULLI[j] for j in range(m))
        _BERNOULLI.append(Fraction(-s, m + 1))
    return _BERNOULLI[n]


def two_zeta(k):
    """2*zeta(2k) as a Scalar: -P**(2k) B_{2k} / (2k)!."""
    if k < 1:
        raise ValueError("need k >= 1")
    num = -bernoulli(2 * k)
    den = 1
    for i in range(1, 2 * k + 1):
        den *= i
    return Scalar.pi(2 * k, num / den)


def sigma(k, n):
    """Divisor power sum sigma_k(n)."""
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


_EISENSTEIN = {}


def eisenstein(k, order=DEFAULT_ORDER):
    """G_{2k}(q) to the given q-order, weight tag 2k.

    Constant term 2*zeta(2k); the q**n coefficient is
    2 P**(2k) / (2k-1)! * sigma_{2k-1}(n).
    """
    if k < 1:
        raise ValueError("need k >= 1")
    key = (k, order)
    got = _EISENSTEIN.get(key)
    if got is not None:
        return got
    fact = 1
    for i in range(1, 2 * k):
        fact *= i
    coeffs = {Fraction(0): two_zeta(k)}
    for n in range(1, order + 1):
        coeffs[Fraction(n)] = Scalar.pi(2 * k, Fraction(2 * sigma(2 * k - 1, n), fact))
    out = QSeries(coeffs, prec=order + 1, offset=0, weight=2 * k)
    _EISENSTEIN[key] = out
    return out


def g2(order=DEFAULT_ORDER):
    """The weight-2 quasi-modular Eisenstein series (equals G_2)."""
    return eisenstein(1, order)


# -- Weierstrass Laurent kernels ------------------------------------------

_WP = {}


def wp_laurent(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """wp_k(t): t**(-k) plus the tail
    (-1)**k sum_{n>=1} binom(2n+1, k-1) G_{2n+2}(q) t**(2n+2-k),
    as a one-variable t-Laurent with QSeries coefficients."""
    if k < 1:
        raise ValueError("need k >= 1")
    key = (k, window, order)
    got = _WP.get(key)
    if got is not None:
        return got
    sign = (-1) ** k
    entries = {}
    if k <= window:
        entries[(-k,)] = QSeries.of(1)
    n = 1
    while 2 * n + 2 - k <= window:
        e = 2 * n + 2 - k
        if abs(e) <= window:
            c = comb(2 * n + 1, k - 1)
            if c:
                entries[(e,)] = eisenstein(n + 1, order) * Fraction(sign * c)
        n += 1
    out = ZLaurent(("t",), entries, window=window)
    _WP[key] = out
    return out


def zeta_t(window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """zeta(t, tau) = wp_1(t) - g_2(tau) t."""
    z = wp_laurent(1, window, order)
    return z - ZLaurent(("t",), {(1,): g2(order)}, window=window)


def wp(window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """The two-pole tag kernel wp = wp_2 + g_2 (normalized Weierstrass)."""
    return wp_laurent(2, window, order) + ZLaurent.constant(g2(order), ("t",), window)


def wp_prime(window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """d/dt of wp_2 (= d/dt of wp, the additive constant drops)."""
    return wp_laurent(2, window, order).ddz("t")


def wp_bar(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """Normalized kernels: k=1 -> zeta + pi*i, k=2 -> wp_2 + g_2, else wp_k."""
    if k == 1:
        return zeta_t(window, order) + ZLaurent.constant(HALF_PI, ("t",), window)
    if k == 2:
        return wp(window, order)
    return wp_laurent(k, window, order)


def t_shift_pow(kernel, j):
    """x**j * kernel(x): exponent shift by j on a one-variable Laurent."""
    var = kernel.vars[0]
    return kernel.mul_var_power(var, j)


# -- Fourier series P_k ----------------------------------------------------

_PK = {}


def pk_fourier(k, domain="inner", window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """P_k(z, q) on the annulus |q| < |z| < 1 (inner), or the same series
    with z replaced by z q (outer).

    Inner coefficients: z**n (n >= 1) gets P**k/(k-1)! * n**(k-1)/(1-q**n),
    z**(-n) gets (-1)**k P**k/(k-1)! * n**(k-1) q**n/(1-q**n), both expanded
    geometrically to the q-order.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if domain not in ("inner", "outer"):
        raise ValueError("domain must be 'inner' or 'outer'")
    key = (k, domain, window, order)
    got = _PK.get(key)
    if got is not None:
        return got
    fact = 1
    for i in range(1, k):
        fact *= i
    front = Fraction(1, fact)
    entries = {}
    for n in range(1, window + 1):
        nk = n ** (k - 1)
        plus = {}
        minus = {}
        m = 0
        while n * m <= order:
            if m >= 0:
                plus[Fraction(n * m)] = Scalar.pi(k, front * nk)
            if m >= 1:
                minus[Fraction(n * m)] = Scalar.pi(k, front * nk * (-1) ** k)
            m += 1
        entries[(n,)] = QSeries(plus, prec=order + 1, offset=0)
        entries[(-n,)] = QSeries(minus, prec=order + 1, offset=0)
    out = ZLaurent(("z",), entries, window=window)
    if domain == "outer":
        out = out.subst_q("z", 1)
    _PK[key] = out
    return out


def pk_ratio(k, num, den, vars, window=DEFAULT_WINDOW, order=DEFAULT_ORDER, shift=0):
    """P_k(z_num / z_den, q) embedded into the variable list ``vars``;
    with shift=1 the argument is z_num * q / z_den."""
    base = pk_fourier(k, "inner", window, order)
    vars = tuple(vars)
    i, j = vars.index(num), vars.index(den)
    out = ZLaurent(vars, window=window)
    for (e,), v in base.entries.items():
        exps = [0] * len(vars)
        exps[i] += e
        exps[j] -= e
        if shift:
            v = v.shift(Fraction(shift * e))
        out.entries[tuple(exps)] = v
    return out


# -- q = 0 limit kernels ---------------------------------------------------

def binomial_kernel(delta, pole, window=DEFAULT_WINDOW):
    """w**(-pole) (1+w)**delta as a w-Laurent (delta a nonnegative integer)."""
    entries = {}
    for j in range(0, min(delta, window + pole) + 1):
        e = j - pole
        if abs(e) <= window:
            entries[(e,)] = QSeries.of(comb(delta, j))
    return ZLaurent(("w",), entries, window=window)


def q0_limit_functions(window=DEFAULT_WINDOW):
    """The two q=0 product kernels: w**(-1)(1+w) and w**(-2)(1+w).

    These are the weight-1 instances of the * and circle kernels
    w**(-1)(1+w)**Delta and w**(-2)(1+w)**Delta; use binomial_kernel for
    general Delta.
    """
    return binomial_kernel(1, 1, window), binomial_kernel(1, 2, window)


# -- derivative operators --------------------------------------------------

def q_derivative_series(f):
    """(2*pi*i)**2 q d/dq applied to every coefficient of a Laurent object."""
    pi2 = Scalar.pi(2)
    return f.map_series(lambda s: q_log_derivative(s) * pi2)


def dbar_operator(F, order=DEFAULT_ORDER):
    """The mixed derivative in Fourier coordinates.

    One variable z (a ratio of consecutive points):
        (2 pi i)**2 q d/dq F + (P_1(z,q) + pi i) (2 pi i) z dF/dz.
    Variables z_0..z_n:
        (2 pi i)**2 q d/dq F
        - sum_{i<n} (P_1(z_n/z_i, q) + pi i) (2 pi i) z_i dF/dz_i.

    Raises "window exhausted" when F already touches the window boundary,
    since the P_1 multiplications would then wrap lost exponents.
    """
    W = F.window
    for exps in F.entries:
        if any(abs(e) >= W for e in exps):
            raise ValueError("window exhausted")
    out = q_derivative_series(F)
    if len(F.vars) == 1:
        z = F.vars[0]
        p1 = pk_fourier(1, "inner", W, order).rename({"z": z})
        out = out + (p1 + ZLaurent.constant(HALF_PI, (z,), W)) * F.zddz(z) * PI
        return out
    last = F.vars[-1]
    for zi in F.vars[:-1]:
        p1 = pk_ratio(1, last, zi, F.vars, W, order)
        out = out - (p1 + ZLaurent.constant(HALF_PI, F.vars, W)) * F.zddz(zi) * PI
    return out


def d_operator_t(f, order=DEFAULT_ORDER):
    """The same operator on one-variable t-Laurent data:
    (2 pi i)**2 q d/dq f - zeta(t) df/dt."""
    W = f.window
    var = f.vars[0]
    z = zeta_t(W, order).rename({"t": var})
    return q_derivative_series(f) - z * f.ddz(var)


# -- reduction of elliptic one-variable kernels ----------------------------

def reduce_elliptic(f, order=DEFAULT_ORDER):
    """Write a one-variable elliptic kernel as
    alpha + sum_{k>=2} gamma_k wp_k, by triangular elimination on the
    principal part.  Returns (alpha, {k: gamma_k}, remainder); the remainder
    is zero (within the window) exactly when f lies in that span.
    A nonzero t**(-1) coefficient is left in the remainder.
    """
    W = f.window
    var = f.vars[0]
    rem = f.rename({var: "t"}) if var != "t" else f
    gammas = {}
    pole = min((e for (e,) in rem.entries), default=0)
    for k in range(-pole, 1, -1):
        if k < 2:
            break
        c = rem.coeff((-k,))
        if c:
            gammas[k] = c
            rem = rem - wp_laurent(k, W, order) * c
    alpha = rem.coeff((0,))
    rem = rem - ZLaurent.constant(alpha, ("t",), W)
    if var != "t":
        rem = rem.rename({"t": var})
    return alpha, gammas, rem


# -- identity checks -------------------------------------------------------

def _report(ok, name, detail=None):
    return {"ok": ok, "check": name, "detail": detail}


def check_delta_identities(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER, P=None):
    """P_k(z,q) - P_k(zq,q) equals 2 pi i (sum_n z**n - 1) for k=1 and
    P**k/(k-1)! sum_n n**(k-1) z**n for k >= 2, on the window."""
    if P is None:
        P = pk_fourier(k, "inner", window, order)
    shifted = P.subst_q("z", 1)
    lhs = P - shifted
    fact = 1
    for i in range(1, k):
        fact *= i
    for n in range(-window, window + 1):
        got = lhs.coeff((n,))
        if k == 1:
            want = QSeries.of(PI) if n != 0 else QSeries.zero()
        else:
            want = QSeries.of(Scalar.pi(k, Fraction(n ** (k - 1), fact))) if n != 0 else QSeries.zero()
        if got != want:
            return _report(False, "delta-identity k=%d" % k,
                           {"exponent": n, "got": repr(got), "want": repr(want)})
    return _report(True, "delta-identity k=%d" % k)


def check_p_symmetry(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER, P=None):
    """P_k(1/z, q) = (-1)**k P_k(zq, q) coefficientwise."""
    if P is None:
        P = pk_fourier(k, "inner", window, order)
    flipped = ZLaurent(("z",), {(-e,): v for (e,), v in P.entries.items()},
                       window=P.window)
    rhs = P.subst_q("z", 1) * Fraction((-1) ** k)
    for n in range(-window, window + 1):
        if flipped.coeff((n,)) != rhs.coeff((n,)):
            return _report(False, "P-symmetry k=%d" % k, {"exponent": n})
    return _report(True, "P-symmetry k=%d" % k)


def check_pk_diff(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """P_{k+1} = (2 pi i / k) z d/dz P_k."""
    lhs = pk_fourier(k + 1, "inner", window, order)
    rhs = pk_fourier(k, "inner", window, order).zddz("z") * (Scalar.pi(1, Fraction(1, k)))
    ok = lhs == rhs
    return _report(ok, "pk-diff k=%d" % k)


def check_wp_diff(k, window=DEFAULT_WINDOW, order=DEFAULT_ORDER):
    """wp_{k+1} = -(1/k) d wp_k / dt."""
    lhs = wp_laurent(k + 1, window, order)
    rhs = wp_laurent(k, window, order).ddz("t") * Fraction(-1, k)
    # the derivative loses the top window exponent; compare inside
    inner = window - 1
    for n in range(-inner, inner + 1):
        if lhs.coeff((n,)) != rhs.coeff((n,)):
            return _report(False, "wp-diff k=%d" % k, {"exponent": n})
    return _report(True, "wp-diff k=%d" % k)
