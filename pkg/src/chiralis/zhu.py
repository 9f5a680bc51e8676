"""Square-bracket vertex structure, Zhu's circle/star products and the
filtered Zhu algebra.

The bracket change of coordinates expands the kernel
(log(1+z))**m (1+z)**(wt a - 1) exactly over Fraction, so a_[m]b lands
in the algebra with a power P**(-m-1) of the formal period P = 2 pi i
in its coefficients.  Everything downstream (circle/star, the filtered
quotient, the commutator identity) is then exact rational data.
"""

from fractions import Fraction
from math import comb

from .coeffring import Scalar
from .linalg import Echelon
from .vertex import State, _bump, binom, l_mode, mode_action, sign_pow


# -- bracket kernel --------------------------------------------------------

_KERNELS = {}


def _mul(p, q, deg):
    out = [Fraction(0)] * (deg + 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if i + j > deg:
                break
            out[i + j] += a * b
    return out


def _inv(p, deg):
    # power series inverse, p[0] must be a unit
    out = [Fraction(0)] * (deg + 1)
    out[0] = 1 / p[0]
    for k in range(1, deg + 1):
        s = sum(p[i] * out[k - i] for i in range(1, min(k, len(p) - 1) + 1))
        out[k] = -s / p[0]
    return out


def _pow(p, e, deg):
    out = [Fraction(0)] * (deg + 1)
    out[0] = Fraction(1)
    for _ in range(e):
        out = _mul(out, p, deg)
    return out


def bracket_kernel(m, delta, order):
    """{k: coefficient of z**k in (log(1+z))**m (1+z)**delta}, k <= order."""
    key = (m, delta, order)
    got = _KERNELS.get(key)
    if got is None:
        deg = order - m
        if deg < 0:
            got = {}
        else:
            u = [Fraction(sign_pow(i), i + 1) for i in range(deg + 1)]
            p = _pow(u, m, deg) if m >= 0 else _pow(_inv(u, deg), -m, deg)
            b = [Fraction(binom(delta, i)) for i in range(deg + 1)]
            p = _mul(p, b, deg)
            got = {i + m: c for i, c in enumerate(p) if c}
        _KERNELS[key] = got
    return got


# -- square-bracket modes --------------------------------------------------

def sq_mode(a, m, b):
    """a_[m] b.  Coefficients carry the period power P**(-m-1)."""
    space = b.space
    algebra = getattr(space, "algebra", space)
    cache = algebra.__dict__.setdefault("_sq_cache", {})
    pim = Scalar.pi(-m - 1)
    out = {}
    for ma, ca in a.terms.items():
        wa = algebra.monomial_weight(ma)
        for mb, cb in b.terms.items():
            key = (ma, m, mb)
            got = cache.get(key)
            if got is None:
                order = wa + space._key_weight(mb) - 1
                acc = {}
                for k, ck in bracket_kernel(m, wa - 1, order).items():
                    for mono, c in space._composite_mode(ma, k, mb).items():
                        _bump(acc, mono, ck * c)
                got = acc
                cache[key] = got
            w = ca * cb
            for mono, c in got.items():
                _bump(out, mono, (w * c) * pim)
    return State(space, space.reduce_terms(out))


def sq_f_product(a, f, b, order=None):
    """a_[f] b = sum_e f_e a_[e] b for a one-variable Laurent kernel.

    f may be a one-variable ZLaurent (q-series entries land in the
    coefficients), an {exponent: coeff} dict, or the name of an elliptic
    kernel: "wp<k>", "zeta", or "zeta_bar"; ``order`` then sets the
    q-truncation of the kernel coefficients.
    """
    top = a.max_weight() + b.max_weight()
    if isinstance(f, str):
        from . import elliptic
        from .coeffring import DEFAULT_ORDER
        if order is None:
            order = DEFAULT_ORDER
        window = max(top, 0) + 2
        if f.startswith("wp"):
            f = elliptic.wp_laurent(int(f[2:]), window, order)
        elif f == "zeta":
            f = elliptic.zeta_t(window, order)
        elif f == "zeta_bar":
            f = elliptic.wp_bar(1, window, order)
        else:
            raise ValueError("unknown kernel %r" % (f,))
    if hasattr(f, "entries"):
        if len(f.vars) != 1:
            raise ValueError("kernel must be one-variable")
        items = [(e[0], s) for e, s in f.entries.items()]
    else:
        items = list(f.items())
    out = {}
    for n, fn in items:
        if n >= top:
            continue
        for mono, c in sq_mode(a, n, b).terms.items():
            _bump(out, mono, fn * c)
    return State(b.space, out)


def omega_tilde(V):
    """P**2 (omega - (c/24) vacuum): the conformal vector of the bracket
    structure."""
    shifted = V.omega() - (V.central_charge / 24) * V.vacuum()
    return shifted * Scalar.pi(2)


def sq_translate(a):
    """The bracket translation operator 2 pi i (L_0 + L_{-1})."""
    return (l_mode(0, a) + l_mode(-1, a)) * Scalar.pi(1)


def check_sq_borcherds(a, b, c, i, j, k):
    """Borcherds identity evaluated entirely in square-bracket modes."""
    space = c.space
    wa, wb = a.max_weight(), b.max_weight()
    wc = c.max_weight()
    left = State(space)
    s = 0
    while True:
        if (i >= 0 and s > i) or k + s > wa + wb - 1:
            break
        cs = binom(i, s)
        if cs:
            left = left + cs * sq_mode(sq_mode(a, k + s, b), i + j - s, c)
        s += 1
    right = State(space)
    s = 0
    while True:
        first = j + s <= wb + wc - 1
        second = i + s <= wa + wc - 1
        if (k >= 0 and s > k) or not (first or second):
            break
        cs = binom(k, s) * sign_pow(s)
        if cs:
            if first:
                right = right + cs * sq_mode(a, i + k - s, sq_mode(b, j + s, c))
            if second:
                right = right - cs * sign_pow(k) * sq_mode(b, j + k - s, sq_mode(a, i + s, c))
        s += 1
    ok = left == right
    return {"ok": ok, "check": "sq-borcherds i=%d j=%d k=%d" % (i, j, k),
            "detail": None if ok else {"left": repr(left), "right": repr(right)}}


# -- Zhu products ----------------------------------------------------------

def star(a, b):
    """a * b = res_w w**-1 (1+w)**(wt a) Y(a,w)b."""
    out = b.space.zero()
    for wa in a.weights():
        part = a.homogeneous_part(wa)
        for k in range(wa + 1):
            out = out + comb(wa, k) * mode_action(part, k - 1, b)
    return out


def circ(a, b):
    """a o b = res_w w**-2 (1+w)**(wt a) Y(a,w)b."""
    out = b.space.zero()
    for wa in a.weights():
        part = a.homogeneous_part(wa)
        for k in range(wa + 1):
            out = out + comb(wa, k) * mode_action(part, k - 2, b)
    return out


# -- filtered Zhu algebra --------------------------------------------------

def _as_fraction(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, Scalar) and c.is_rational():
        return c.rational()
    raise ValueError("non-rational coefficient %r" % (c,))


class _Columns:
    """Monomial indexing with columns sorted by decreasing weight, so an
    echelon pivot certifies membership of the whole row in the span of
    monomials of at most the pivot weight."""

    def __init__(self, V, top):
        self.order = []
        for w in range(top, -1, -1):
            for m in V.basis(w):
                self.order.append((w, m))
        self.index = {m: i for i, (w, m) in enumerate(self.order)}

    def vector(self, terms):
        return {self.index[m]: _as_fraction(c) for m, c in terms.items()}

    def terms(self, vec):
        return {self.order[i][1]: c for i, c in vec.items()}

    def weight(self, col):
        return self.order[col][0]


def _circ_vectors(V, total):
    for da in range(total + 1):
        for ma in V.basis(da):
            a = V.state({ma: 1})
            for db in range(total - da + 1):
                for mb in V.basis(db):
                    res = circ(a, V.state({mb: 1}))
                    if res.terms:
                        yield res.terms


def zhu_dims(V, cutoff, margin):
    """Filtered dimensions of V / (V o V), computed from circle products
    of total weight up to the margin.

    Returns per-weight increments of the filtration together with
    representatives, star structure constants on them, and a stability
    flag obtained by re-running with margin + 1.
    """
    if margin < cutoff:
        raise ValueError("margin must be at least the cutoff")
    cols = _Columns(V, margin + 2)
    ech = Echelon()
    for terms in _circ_vectors(V, margin):
        ech.add(cols.vector(terms))

    def filtration(e):
        pivots_by_weight = [0] * (cutoff + 1)
        for p in e.pivots():
            w = cols.weight(p)
            if w <= cutoff:
                pivots_by_weight[w] += 1
        dims = []
        below = 0
        cut = 0
        for w in range(cutoff + 1):
            below += V.dim(w)
            cut += pivots_by_weight[w]
            dims.append(below - cut)
        return dims

    filt = filtration(ech)
    for terms in _circ_vectors(V, margin + 1):
        ech.add(cols.vector(terms))
    stable = filtration(ech) == filt

    increments = [filt[0]] + [filt[w] - filt[w - 1] for w in range(1, cutoff + 1)]
    pivot_set = set(ech.pivots())
    reps = [m for i, (w, m) in enumerate(cols.order)
            if w <= cutoff and i not in pivot_set]
    reps.sort(key=lambda m: (V.monomial_weight(m), m))

    def reduce_state(state):
        return cols.terms(ech.reduce(cols.vector(state.terms)))

    table = {}
    for i, mi in enumerate(reps):
        wi = V.monomial_weight(mi)
        for j, mj in enumerate(reps):
            if wi + V.monomial_weight(mj) > cutoff:
                continue
            prod = star(V.state({mi: 1}), V.state({mj: 1}))
            table[(i, j)] = reduce_state(prod)
    return {
        "cutoff": cutoff,
        "margin": margin,
        "filtration": filt,
        "dims": increments,
        "stable": stable,
        "representatives": reps,
        "star": table,
        "reduce": reduce_state,
    }


def report_to_json(report):
    def enc_terms(terms):
        return [{"monomial": [list(l) for l in m], "coeff": str(c)}
                for m, c in sorted(terms.items())]

    return {
        "cutoff": report["cutoff"],
        "margin": report["margin"],
        "filtration": report["filtration"],
        "dims": report["dims"],
        "stable": report["stable"],
        "representatives": [[list(l) for l in m] for m in report["representatives"]],
        "star": [{"left": i, "right": j, "value": enc_terms(t)}
                 for (i, j), t in sorted(report["star"].items())],
    }


def check_zhu_comm(a, b, margin=None):
    """a*b - b*a - 2 pi i a_[0]b lies in the span of circle products.

    Membership is certified by exact reduction against the enumerated
    span; if the margin is too small the check is inconclusive rather
    than failed.
    """
    V = getattr(a.space, "algebra", a.space)
    if b.space is not a.space:
        raise ValueError("operands live in different spaces")
    diff = star(a, b) - star(b, a) - Scalar.pi(1) * sq_mode(a, 0, b)
    if not diff.terms:
        return {"ok": True, "check": "zhu-comm", "detail": "difference vanishes"}
    total = a.max_weight() + b.max_weight()
    if margin is None:
        margin = total + 4
    cols = _Columns(V, margin + 2)
    ech = Echelon()
    for terms in _circ_vectors(V, margin):
        ech.add(cols.vector(terms))
    residue = ech.reduce(cols.vector(diff.terms))
    if not residue:
        return {"ok": True, "check": "zhu-comm", "detail": None}
    return {"ok": None, "check": "zhu-comm",
            "detail": {"inconclusive": True, "margin": margin,
                       "residue": cols.terms(residue)}}
