"""Classical limits: graded commutative data attached to a vertex algebra
and the small homological invariants that detect freeness.

Two quotients of V feed in: the associated graded under the letter-count
filtration (a commutative algebra with the derivation induced by
translation) and the quotient V/V_{(-2)}V (a Poisson algebra under
a_{(-1)}b and a_{(0)}b).  On top of either we build, per conformal
weight and with exact rational ranks: Koszul homology HK_1, Poisson
homology HP_0/HP_1, Kaehler differentials, Hochschild HH_0/HH_1 by the
normalized bar complex, and the kernel of the canonical map from a free
differential polynomial ring (the arc-algebra comparison).
"""

from fractions import Fraction
from math import comb

from .linalg import Echelon, nullspace
from .vertex import State, _bump, mode_action, translate

_ONE = Fraction(1)


def _letter_sort(mono):
    return tuple(sorted(mono, key=lambda l: (-l[1], l[0]), reverse=True))


class GradedAlgebra:
    """Algebra with a finite weight-graded basis up to a cutoff.

    ``product`` (and optionally ``bracket`` and ``derivation``) are
    functions on basis keys returning {key: Fraction}; values are
    memoized.  The unit is a basis key, except for hochschild() which
    also accepts a unit vector.
    """

    def __init__(self, name, cutoff, basis_by_weight, product, unit=None,
                 bracket=None, derivation=None, generators=(), commutative=True):
        self.name = name
        self.cutoff = cutoff
        self._basis = {w: list(basis_by_weight.get(w, ())) for w in range(cutoff + 1)}
        self.weight_of = {}
        for w, keys in self._basis.items():
            for k in keys:
                if k in self.weight_of:
                    raise ValueError("duplicate basis key %r" % (k,))
                self.weight_of[k] = w
        self._product = product
        self._bracket = bracket
        self._derivation = derivation
        self.unit = unit
        self.generators = tuple(generators)
        self.commutative = commutative
        self._pcache = {}
        self._bcache = {}
        self._tcache = {}

    def basis(self, w):
        if w < 0 or w > self.cutoff:
            return []
        return self._basis[w]

    def dim(self, w):
        return len(self.basis(w))

    def dims(self, W=None):
        W = self.cutoff if W is None else W
        return [self.dim(w) for w in range(W + 1)]

    def weight(self, key):
        return self.weight_of[key]

    def product(self, k1, k2):
        if self.weight_of[k1] + self.weight_of[k2] > self.cutoff:
            raise ValueError("raise weight cutoff")
        key = (k1, k2)
        got = self._pcache.get(key)
        if got is None:
            got = self._product(k1, k2)
            self._pcache[key] = got
        return got

    def bracket(self, k1, k2):
        if self._bracket is None:
            raise ValueError("algebra %s has no bracket" % self.name)
        key = (k1, k2)
        got = self._bcache.get(key)
        if got is None:
            got = self._bracket(k1, k2)
            self._bcache[key] = got
        return got

    def T(self, key):
        if self._derivation is None:
            raise ValueError("algebra %s has no derivation" % self.name)
        got = self._tcache.get(key)
        if got is None:
            got = self._derivation(key)
            self._tcache[key] = got
        return got

    def expand_product(self, ta, tb):
        out = {}
        for k1, c1 in ta.items():
            for k2, c2 in tb.items():
                for m, c in self.product(k1, k2).items():
                    _bump(out, m, c1 * c2 * c)
        return out

    def expand_T(self, terms):
        out = {}
        for k, c in terms.items():
            for m, cm in self.T(k).items():
                _bump(out, m, c * cm)
        return out


# -- the two quotients of a vertex algebra ---------------------------------

def gr_algebra(V, W):
    """Associated graded of V under the letter-count filtration.

    Classes of PBW monomials multiply by sorted concatenation (terms with
    fewer letters drop), and the derivation is induced by translation.
    """
    basis = {w: list(V.basis(w)) for w in range(W + 1)}

    def product(m1, m2):
        merged = _letter_sort(m1 + m2)
        terms = V.reduce_terms({merged: _ONE})
        n = len(merged)
        return {m: c for m, c in terms.items() if len(m) == n}

    def derivation(m):
        out = translate(State(V, {m: _ONE}))
        return {k: c for k, c in out.terms.items() if len(k) == len(m)}

    gens = tuple(((g, -1),) for g in range(len(V.weights)))
    return GradedAlgebra("gr " + V.name, W, basis, product, unit=(),
                         derivation=derivation, generators=gens)


def c2_algebra(V, W):
    """V/V_{(-2)}V with the product a_{(-1)}b and bracket a_{(0)}b.

    Per weight the quotient is exact: the spanning vectors a_{(-2)}b of
    a given weight come from the finitely many basis pairs of total
    weight one less.
    """
    index = {}
    ech = {}
    for w in range(W + 1):
        cols = {m: i for i, m in enumerate(V.basis(w))}
        e = Echelon()
        for wa in range(w):
            wb = w - 1 - wa
            for ma in V.basis(wa):
                a = State(V, {ma: _ONE})
                for mb in V.basis(wb):
                    res = mode_action(a, -2, State(V, {mb: _ONE}))
                    if res.terms:
                        e.add({cols[m]: c for m, c in res.terms.items()})
        index[w] = cols
        ech[w] = e

    basis = {}
    for w in range(W + 1):
        piv = set(ech[w].pivots())
        basis[w] = [m for m in V.basis(w) if index[w][m] not in piv]

    def reduce(terms):
        out = {}
        grouped = {}
        for m, c in terms.items():
            grouped.setdefault(V.monomial_weight(m), {})[m] = c
        for w, part in grouped.items():
            cols = index[w]
            back = {i: m for m, i in cols.items()}
            red = ech[w].reduce({cols[m]: Fraction(c) for m, c in part.items()})
            for i, c in red.items():
                _bump(out, back[i], c)
        return out

    def product(m1, m2):
        res = mode_action(State(V, {m1: _ONE}), -1, State(V, {m2: _ONE}))
        return reduce(res.terms)

    def bracket(m1, m2):
        res = mode_action(State(V, {m1: _ONE}), 0, State(V, {m2: _ONE}))
        return reduce(res.terms)

    gens = tuple(((g, -1),) for g in range(len(V.weights)))
    A = GradedAlgebra("c2 " + V.name, W, basis, product, unit=(),
                      bracket=bracket, generators=gens)
    A.reduce = reduce
    return A


# -- Kaehler differentials and the degree-one complexes --------------------

def _pairs(A, w):
    out = []
    for wa in range(w + 1):
        for a in A.basis(wa):
            for b in A.basis(w - wa):
                out.append((a, b))
    return out


def _triples(A, w):
    if w < 0:
        return
    for wc in range(w + 1):
        for c in A.basis(wc):
            for (a, b) in _pairs(A, w - wc):
                yield (c, a, b)


def _omega_relation(A, pidx, c, a, b):
    """c * (d(ab) - a db - b da) in free pair coordinates."""
    row = {}
    for m, v in A.product(a, b).items():
        _bump(row, pidx[(c, m)], v)
    for t, v in A.product(c, a).items():
        _bump(row, pidx[(t, b)], -v)
    for t, v in A.product(c, b).items():
        _bump(row, pidx[(t, a)], -v)
    return row


def kaehler_dims(A, W):
    """Per-weight dims of the module of differentials, presented by a db
    for basis pairs modulo the Leibniz relations."""
    out = []
    for w in range(W + 1):
        pairs = _pairs(A, w)
        pidx = {p: i for i, p in enumerate(pairs)}
        rel = Echelon()
        for (c, a, b) in _triples(A, w):
            rel.add(_omega_relation(A, pidx, c, a, b))
        out.append(len(pairs) - rel.rank())
    return out


def _acol_map(A):
    col = {}
    for w in range(A.cutoff + 1):
        for k in A.basis(w):
            col[k] = len(col)
    return col


def hk1(A, W):
    """Per-weight dims of ker d1 / im d2 for the Koszul complex of (A, T):
    d1(a db) = a Tb and d2(c da ^ db) = c(Ta) db - c(Tb) da.

    d1 raises weight by the degree of T, so A must be built past W.
    """
    if A.cutoff < W + 1:
        raise ValueError("raise weight cutoff")
    acol = _acol_map(A)
    out = []
    for w in range(W + 1):
        pairs = _pairs(A, w)
        pidx = {p: i for i, p in enumerate(pairs)}
        im = Echelon()
        for (a, b) in pairs:
            vec = {}
            for t, ct in A.T(b).items():
                for m, cm in A.product(a, t).items():
                    _bump(vec, acol[m], ct * cm)
            im.add(vec)
        kernel = len(pairs) - im.rank()
        bnd = Echelon()
        for (c, a, b) in _triples(A, w):
            bnd.add(_omega_relation(A, pidx, c, a, b))
        for (c, a, b) in _triples(A, w - 1):
            if (A.weight(a), a) >= (A.weight(b), b):
                continue
            row = {}
            for t, ct in A.T(a).items():
                for m, cm in A.product(c, t).items():
                    _bump(row, pidx[(m, b)], ct * cm)
            for t, ct in A.T(b).items():
                for m, cm in A.product(c, t).items():
                    _bump(row, pidx[(m, a)], -ct * cm)
            bnd.add(row)
        out.append(kernel - bnd.rank())
    return out


def hp(R, degree, W):
    """Poisson homology dims per weight: HP_0 = R/{R,R} and
    HP_1 = ker d1 / im d2 with d1(a dx) = {a,x} and
    d2(c dx ^ dy) = {c,x} dy - {c,y} dx - c d({x,y}).

    The bracket may lower weight by at most one; R must be built one
    weight past W so no contribution into weight <= W is missed.
    """
    if R.cutoff < W + 1:
        raise ValueError("raise weight cutoff")
    if degree == 0:
        ech = {w: Echelon() for w in range(W + 1)}
        acol = _acol_map(R)
        for s in range(R.cutoff + 1):
            for (a, b) in _pairs(R, s):
                vec = {m: c for m, c in R.bracket(a, b).items() if c}
                if not vec:
                    continue
                wv = {R.weight(m) for m in vec}
                if len(wv) != 1:
                    raise ValueError("inhomogeneous bracket value")
                wv = wv.pop()
                if wv <= W:
                    ech[wv].add({acol[m]: c for m, c in vec.items()})
        return [R.dim(w) - ech[w].rank() for w in range(W + 1)]
    if degree != 1:
        raise ValueError("only degrees 0 and 1 are computed")
    acol = _acol_map(R)
    pidx_by_w = {}
    kernels = {}
    boundaries = {w: Echelon() for w in range(W + 1)}
    for w in range(W + 1):
        pairs = _pairs(R, w)
        pidx_by_w[w] = {p: i for i, p in enumerate(pairs)}
        im = Echelon()
        for (a, b) in pairs:
            vec = R.bracket(a, b)
            im.add({acol[m]: c for m, c in vec.items()})
        kernels[w] = len(pairs) - im.rank()
        for (c, a, b) in _triples(R, w):
            boundaries[w].add(_omega_relation(R, pidx_by_w[w], c, a, b))
    # images of two-forms, bucketed by the weight they land in
    for s in range(R.cutoff + 1):
        for (c, x, y) in _triples(R, s):
            if (R.weight(x), x) >= (R.weight(y), y):
                continue
            row = {}
            for t, ct in R.bracket(c, x).items():
                row[("pair", t, y)] = row.get(("pair", t, y), 0) + ct
            for t, ct in R.bracket(c, y).items():
                row[("pair", t, x)] = row.get(("pair", t, x), 0) - ct
            for m, cm in R.bracket(x, y).items():
                row[("pair", c, m)] = row.get(("pair", c, m), 0) - cm
            row = {k: v for k, v in row.items() if v}
            if not row:
                continue
            ws = {R.weight(k[1]) + R.weight(k[2]) for k in row}
            if len(ws) != 1:
                raise ValueError("inhomogeneous boundary row")
            wv = ws.pop()
            if wv <= W:
                pidx = pidx_by_w[wv]
                boundaries[wv].add({pidx[(k[1], k[2])]: v for k, v in row.items()})
    return [kernels[w] - boundaries[w].rank() for w in range(W + 1)]


def check_d1_d2(A, flavor, W):
    """d1 . d2 = 0 on all generating two-forms up to total weight W,
    for flavor "koszul" (derivation) or "poisson" (bracket).

    The composite applies the derivation twice, so the koszul flavor
    needs A built to W + 2."""
    if flavor == "koszul" and A.cutoff < W + 2:
        raise ValueError("raise weight cutoff")
    for s in range(W + 1):
        for (c, a, b) in _triples(A, s):
            if (A.weight(a), a) >= (A.weight(b), b):
                continue
            val = {}
            if flavor == "koszul":
                # d1 d2 (c da ^ db) = (c Ta) Tb - (c Tb) Ta
                for t, ct in A.T(a).items():
                    for m, cm in A.expand_product(A.product(c, t), A.T(b)).items():
                        _bump(val, m, ct * cm)
                for t, ct in A.T(b).items():
                    for m, cm in A.expand_product(A.product(c, t), A.T(a)).items():
                        _bump(val, m, -ct * cm)
            elif flavor == "poisson":
                # {{c,x},y} - {{c,y},x} - {c,{x,y}}: the Jacobi identity
                for t, ct in A.bracket(c, a).items():
                    for m, cm in A.bracket(t, b).items():
                        _bump(val, m, ct * cm)
                for t, ct in A.bracket(c, b).items():
                    for m, cm in A.bracket(t, a).items():
                        _bump(val, m, -ct * cm)
                for t, ct in A.bracket(a, b).items():
                    for m, cm in A.bracket(c, t).items():
                        _bump(val, m, -ct * cm)
            else:
                raise ValueError("unknown flavor %r" % (flavor,))
            if val:
                return {"ok": False, "check": "d1d2-" + flavor,
                        "detail": {"triple": (c, a, b), "value": val}}
    return {"ok": True, "check": "d1d2-" + flavor, "detail": None}


# -- Hochschild homology by the normalized bar complex ---------------------

def _unit_vector(A):
    u = A.unit
    if not isinstance(u, dict):
        u = {u: _ONE}
    return u


def _abar(A, vec, unit, k0):
    lam = vec.get(k0)
    if not lam:
        return {k: v for k, v in vec.items() if v}
    scale = lam / unit[k0]
    out = dict(vec)
    for k, v in unit.items():
        _bump(out, k, -scale * v)
    out.pop(k0, None)
    return {k: v for k, v in out.items() if v}


def hochschild_dims(A, degree, W=None):
    """HH_0 or HH_1 per weight from the normalized bar complex."""
    W = A.cutoff if W is None else W
    unit = _unit_vector(A)
    k0 = min(unit, key=lambda k: (A.weight(k), str(k)))
    if A.weight(k0) != 0:
        raise ValueError("unit must sit in weight zero")
    acol = _acol_map(A)
    if degree == 0:
        ech = {w: Echelon() for w in range(W + 1)}
        for s in range(W + 1):
            for (a, b) in _pairs(A, s):
                vec = {}
                for m, c in A.product(a, b).items():
                    _bump(vec, m, c)
                for m, c in A.product(b, a).items():
                    _bump(vec, m, -c)
                if vec:
                    ech[s].add({acol[m]: c for m, c in vec.items()})
        return [A.dim(w) - ech[w].rank() for w in range(W + 1)]
    if degree != 1:
        raise ValueError("only degrees 0 and 1 are computed")
    out = []
    for w in range(W + 1):
        cols = []
        for wa in range(w + 1):
            for a in A.basis(wa):
                for b in A.basis(w - wa):
                    if b != k0:
                        cols.append((a, b))
        pidx = {p: i for i, p in enumerate(cols)}
        im = Echelon()
        for (a, b) in cols:
            vec = {}
            for m, c in A.product(a, b).items():
                _bump(vec, m, c)
            for m, c in A.product(b, a).items():
                _bump(vec, m, -c)
            im.add({acol[m]: c for m, c in vec.items()})
        kernel = len(cols) - im.rank()
        bnd = Echelon()
        for wa in range(w + 1):
            for a in A.basis(wa):
                for wb in range(w - wa + 1):
                    for b in A.basis(wb):
                        if b == k0:
                            continue
                        for c in A.basis(w - wa - wb):
                            if c == k0:
                                continue
                            row = {}
                            for m, cm in A.product(a, b).items():
                                _bump(row, pidx[(m, c)], cm)
                            mid = _abar(A, A.product(b, c), unit, k0)
                            for t, ct in mid.items():
                                _bump(row, pidx[(a, t)], -ct)
                            for m, cm in A.product(c, a).items():
                                _bump(row, pidx[(m, b)], cm)
                            bnd.add(row)
        out.append(kernel - bnd.rank())
    return out


def hochschild(A, degree):
    """Total HH_0 or HH_1 dimension."""
    return sum(hochschild_dims(A, degree))


# -- small test algebras ---------------------------------------------------

def dual_numbers():
    """k[s]/(s^2), s in weight one, zero bracket, zero derivation."""
    basis = {0: ["1"], 1: ["s"]}

    def product(a, b):
        if a == "1":
            return {b: _ONE}
        if b == "1":
            return {a: _ONE}
        return {}

    def bracket(a, b):
        return {}

    return GradedAlgebra("dual numbers", 3, basis, product, unit="1",
                         bracket=bracket, derivation=lambda k: {},
                         generators=("s",))


def ground_field():
    return GradedAlgebra("k", 0, {0: ["1"]},
                         lambda a, b: {"1": _ONE}, unit="1")


def matrix_algebra():
    """2 x 2 matrices in the elementary basis; the unit is a vector."""
    keys = [(i, j) for i in (0, 1) for j in (0, 1)]

    def product(a, b):
        if a[1] != b[0]:
            return {}
        return {(a[0], b[1]): _ONE}

    A = GradedAlgebra("mat2", 0, {0: keys}, product,
                      unit={(0, 0): _ONE, (1, 1): _ONE}, commutative=False)
    return A


def poly_line(W):
    """k[x] truncated at weight W, x in weight one; key a stands for x**a."""
    basis = {w: [w] for w in range(W + 1)}

    def product(a, b):
        return {a + b: _ONE}

    return GradedAlgebra("k[x]", W, basis, product, unit=0, generators=(1,))


def fat_point_arc(W):
    """Differential polynomial algebra on y_0, y_1, ... (weight j+1,
    derivative y_j -> y_{j+1}) modulo the differential ideal generated
    by y_0^2.  Keys are weakly decreasing tuples of letter indices."""
    free = {w: [] for w in range(W + 1)}

    def enum(remaining, bound):
        if remaining == 0:
            yield ()
            return
        for j in range(min(bound, remaining - 1), -1, -1):
            for tail in enum(remaining - j - 1, j):
                yield (j,) + tail

    for w in range(W + 1):
        free[w] = sorted(enum(w, w), reverse=True)

    def d_power(k):
        # k-th derivative of y_0^2 as a monomial dict
        out = {}
        for i in range(k + 1):
            mono = tuple(sorted((i, k - i), reverse=True))
            _bump(out, mono, Fraction(comb(k, i)))
        return out

    index = {w: {m: i for i, m in enumerate(free[w])} for w in range(W + 1)}
    ech = {w: Echelon() for w in range(W + 1)}
    for w in range(2, W + 1):
        for k in range(w - 1):
            gen = d_power(k)
            gw = k + 2
            for m in free[w - gw]:
                row = {}
                for g, c in gen.items():
                    merged = tuple(sorted(m + g, reverse=True))
                    _bump(row, index[w][merged], c)
                ech[w].add(row)

    basis = {w: [m for m in free[w] if index[w][m] not in set(ech[w].pivots())]
             for w in range(W + 1)}

    def reduce(terms):
        out = {}
        grouped = {}
        for m, c in terms.items():
            grouped.setdefault(sum(j + 1 for j in m), {})[m] = c
        for w, part in grouped.items():
            back = {i: m for m, i in index[w].items()}
            red = ech[w].reduce({index[w][m]: Fraction(c) for m, c in part.items()})
            for i, c in red.items():
                _bump(out, back[i], c)
        return out

    def product(m1, m2):
        return reduce({tuple(sorted(m1 + m2, reverse=True)): _ONE})

    def derivation(m):
        terms = {}
        for pos in range(len(m)):
            lifted = tuple(sorted(m[:pos] + (m[pos] + 1,) + m[pos + 1:], reverse=True))
            _bump(terms, lifted, _ONE)
        return reduce(terms)

    A = GradedAlgebra("arc of k[y]/(y^2)", W, basis, product, unit=(),
                      derivation=derivation, generators=((0,),))
    A.reduce = reduce
    return A


# -- arc-algebra comparison ------------------------------------------------

def _jet_letters(gens, weights, W):
    out = []
    for gi in range(len(gens)):
        j = 0
        while weights[gi] + j <= W:
            out.append((gi, j))
            j += 1
    return out


def _jet_monomials(letters, lw, W):
    by_weight = {w: [] for w in range(W + 1)}

    def enum(remaining, start):
        if remaining == 0:
            yield ()
            return
        for i in range(start, len(letters)):
            w = lw[letters[i]]
            if w <= remaining:
                for tail in enum(remaining - w, i):
                    yield (letters[i],) + tail

    for w in range(W + 1):
        by_weight[w] = sorted(enum(w, 0))
    return by_weight


def _jet_images(R, A, W, images):
    gens = R.generators
    weights = [R.weight(g) for g in gens]
    if any(w < 1 for w in weights):
        raise ValueError("generators must have positive weight")
    if images is None:
        images = {g: {g: _ONE} for g in gens}
    letters = _jet_letters(gens, weights, W)
    lw = {(gi, j): weights[gi] + j for (gi, j) in letters}
    limg = {}
    for (gi, j) in letters:
        if j == 0:
            limg[(gi, j)] = dict(images[gens[gi]])
        else:
            limg[(gi, j)] = A.expand_T(limg[(gi, j - 1)])
    monos = _jet_monomials(letters, lw, W)
    if isinstance(A.unit, dict):
        raise ValueError("arc comparison needs a basis-key unit")

    def image(mono):
        terms = {A.unit: _ONE}
        for l in mono:
            terms = A.expand_product(terms, limg[l])
        return terms

    return monos, image, lw


def arc_compare(R, A, W, images=None):
    """Kernel dims per weight of the map from the free differential
    polynomial algebra on R's generators into A (sending the j-th formal
    derivative of a generator to T^j of its image).  A zero row means
    the map is injective there; the rank column reports surjectivity.
    """
    monos, image, lw = _jet_images(R, A, W, images)
    acol = _acol_map(A)
    kernel = []
    jr = []
    onto = []
    for w in range(W + 1):
        ech = Echelon()
        for m in monos[w]:
            ech.add({acol[k]: c for k, c in image(m).items()})
        jr.append(len(monos[w]))
        kernel.append(len(monos[w]) - ech.rank())
        onto.append(ech.rank() == A.dim(w))
    return {"kernel": kernel, "jet_dims": jr, "algebra_dims": A.dims(W),
            "surjective": onto}


def check_koszul_bound(R, A, W, images=None):
    """The target I/(J*TI) of the comparison map dominates HK_1 per weight.

    I is the kernel of the map from the free differential polynomial
    algebra J onto A; its quotient by J*TI is computed from explicit
    kernel vectors, and compared with hk1(A, .).
    """
    monos, image, lw = _jet_images(R, A, W, images)
    kernel_vecs = {}
    for w in range(W + 1):
        pos = {k: i for i, k in enumerate(A.basis(w))}
        mat = []
        for m in monos[w]:
            row = [Fraction(0)] * A.dim(w)
            for k, c in image(m).items():
                row[pos[k]] = Fraction(c)
            mat.append(row)
        if not monos[w]:
            kern = []
        elif A.dim(w) == 0:
            kern = [[_ONE if i == j else Fraction(0) for j in range(len(monos[w]))]
                    for i in range(len(monos[w]))]
        else:
            # left kernel of the image matrix: right kernel of its transpose
            kern = nullspace([list(col) for col in zip(*mat)])
        kernel_vecs[w] = [{monos[w][i]: v for i, v in enumerate(vec) if v}
                          for vec in kern]

    def jet_T(mono):
        out = {}
        for pos in range(len(mono)):
            g, j = mono[pos]
            lifted = tuple(sorted(mono[:pos] + ((g, j + 1),) + mono[pos + 1:]))
            _bump(out, lifted, _ONE)
        return out

    target = []
    for w in range(W + 1):
        midx = {m: i for i, m in enumerate(monos[w])}
        sub = Echelon()
        for wv in range(w):
            for vec in kernel_vecs.get(wv, ()):
                tv = {}
                for m, c in vec.items():
                    for m2, c2 in jet_T(m).items():
                        _bump(tv, m2, c * c2)
                for mm in monos[w - wv - 1]:
                    row = {}
                    for m, c in tv.items():
                        merged = tuple(sorted(mm + m))
                        _bump(row, midx[merged], c)
                    sub.add(row)
        target.append(len(kernel_vecs[w]) - sub.rank())
    hk = hk1(A, W - 1) if W >= 1 else [0]
    ok = all(target[w] >= hk[w] for w in range(len(hk)))
    return {"ok": ok, "check": "koszul-bound",
            "detail": {"target": target, "hk1": hk}}


# -- bridge from a filtered quotient report --------------------------------

def filtered_algebra(report):
    """Wrap a filtered quotient report (representatives plus structure
    constants) as a GradedAlgebra.  Weights are read off the monomial
    letters; the product table must contain all pairs within the cutoff."""
    reps = report["representatives"]
    cutoff = report["cutoff"]
    weight = lambda m: sum(-n for (g, n) in m)
    basis = {w: [] for w in range(cutoff + 1)}
    for m in reps:
        basis[weight(m)].append(m)
    table = report["star"]
    pos = {m: i for i, m in enumerate(reps)}

    def product(m1, m2):
        return dict(table[(pos[m1], pos[m2])])

    gens = tuple(m for m in reps if len(m) == 1)
    return GradedAlgebra("filtered quotient", cutoff, basis, product,
                         unit=(), generators=gens)


# -- dimension table emission ----------------------------------------------

def dims_records(tables):
    """[{invariant, weight, dim}] rows from {name: [dims]}."""
    out = []
    for name in sorted(tables):
        for w, d in enumerate(tables[name]):
            out.append({"invariant": name, "weight": w, "dim": d})
    return out


def dims_csv(tables):
    lines = ["invariant,weight,dim"]
    for rec in dims_records(tables):
        lines.append("%s,%d,%d" % (rec["invariant"], rec["weight"], rec["dim"]))
    return "\n".join(lines) + "\n"
