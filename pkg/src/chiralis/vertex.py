"""Weight-graded vertex algebras with exact rational structure constants.

A state is a sparse combination of PBW monomials.  A monomial is a tuple
of letters (g, n) with g a generator index and n <= -1, kept weakly
decreasing in the sort key (-n, g); the empty tuple is the vacuum.
Generator modes act by commutator rewriting, modes of composite states
by Borcherds reconstruction.  Both recursions memoize per carrier, and
cache writes are idempotent, so concurrent readers are safe.

Coefficients are duck-typed: Fraction throughout the core engine, but
states tolerate any commutative coefficient that multiplies with
Fraction (q-series coefficients appear once elliptic kernels enter).
"""

from fractions import Fraction
from math import comb, factorial

_ONE = Fraction(1)


def sign_pow(n):
    """(-1)**n as an int for any integer n."""
    return -1 if n % 2 else 1


def binom(n, j):
    """Binomial coefficient with arbitrary integer top."""
    if j < 0:
        return 0
    if n >= 0:
        return comb(n, j)
    return sign_pow(j) * comb(j - n - 1, j)


def _bump(acc, key, val):
    cur = acc.get(key)
    cur = val if cur is None else cur + val
    if cur:
        acc[key] = cur
    else:
        acc.pop(key, None)


class VertexAlgebra:
    """A vertex algebra presented by generators and their nonnegative
    products a_{(j)}b, from which every other structure constant is
    reconstructed."""

    def __init__(self, name, weights, products, central_charge, omega_terms):
        self.name = name
        self.weights = tuple(int(w) for w in weights)
        # products: (g, h) -> {j >= 0: {monomial: Fraction}}
        self.products = {
            pair: {j: dict(terms) for j, terms in table.items()}
            for pair, table in products.items()
        }
        self.central_charge = Fraction(central_charge)
        self.omega_terms = dict(omega_terms)
        self.cutoff = None
        self._gen_cache = {}
        self._cmp_cache = {}
        self._basis_cache = {}

    # -- gradation ---------------------------------------------------------

    def letter_weight(self, g, n):
        return self.weights[g] - n - 1

    def monomial_weight(self, mono):
        return sum(self.weights[g] - n - 1 for g, n in mono)

    def basis(self, weight):
        """Monomials of the given total weight, in a fixed order."""
        got = self._basis_cache.get(weight)
        if got is None:
            got = sorted(self._enumerate(weight, None))
            self._basis_cache[weight] = got
        return got

    def _enumerate(self, remaining, kappa_bound):
        if remaining == 0:
            yield ()
            return
        for g in range(len(self.weights)):
            for wl in range(self.weights[g], remaining + 1):
                n = self.weights[g] - wl - 1
                kappa = (-n, g)
                if kappa_bound is not None and kappa > kappa_bound:
                    continue
                for tail in self._enumerate(remaining - wl, kappa):
                    yield ((g, n),) + tail

    def dim(self, weight):
        return len(self.basis(weight)) if weight >= 0 else 0

    # -- states ------------------------------------------------------------

    def zero(self):
        return State(self, {})

    def vacuum(self):
        return State(self, {(): _ONE})

    def generator(self, g=0):
        return State(self, {((g, -1),): _ONE})

    def omega(self):
        return State(self, dict(self.omega_terms))

    def state(self, terms):
        return State(self, terms)

    def reduce_terms(self, terms):
        return terms

    # -- the mode engine ---------------------------------------------------

    def _ground_mode(self, g, n, tag):
        """Action of a nonnegative generator mode on the ground level."""
        return {}

    def _gen_mode(self, g, n, mono):
        """a^g_{(n)} applied to a basis key, as {key: Fraction}.

        Keys are (letters, tag) pairs in modules; here the tag slot is
        absent and keys are plain letter tuples.
        """
        key = (g, n, mono)
        out = self._gen_cache.get(key)
        if out is not None:
            return out
        letters, tag = self._split(mono)
        if not letters:
            if n <= -1:
                out = {self._join(((g, n),), tag): _ONE}
            else:
                out = self._ground_mode(g, n, tag)
        elif n <= -1 and (-n, g) >= (-letters[0][1], letters[0][0]):
            out = {self._join(((g, n),) + letters, tag): _ONE}
        else:
            h, m = letters[0]
            rest = self._join(letters[1:], tag)
            acc = {}
            for k1, c1 in self._gen_mode(g, n, rest).items():
                for k2, c2 in self._gen_mode(h, m, k1).items():
                    _bump(acc, k2, c1 * c2)
            for j, prod in self.products.get((g, h), {}).items():
                cj = binom(n, j)
                if not cj:
                    continue
                for mu, cu in prod.items():
                    coef = cj * cu
                    for k2, c2 in self._composite_mode(mu, n + m - j, rest).items():
                        _bump(acc, k2, coef * c2)
            out = acc
        self._gen_cache[key] = out
        return out

    def _composite_mode(self, u, k, c):
        """(monomial u)_{(k)} applied to a basis key c."""
        if not u:
            return {c: _ONE} if k == -1 else {}
        if len(u) == 1 and u[0][1] == -1:
            return self._gen_mode(u[0][0], k, c)
        key = (u, k, c)
        out = self._cmp_cache.get(key)
        if out is not None:
            return out
        g, n = u[0]
        rest = u[1:]
        wt_b = self.monomial_weight(rest)
        wt_c = self._key_weight(c)
        da = self.weights[g]
        jmax1 = wt_b + wt_c - 1 - k
        jmax2 = da + wt_c - 1
        if n >= 0:
            jmax1 = min(jmax1, n)
            jmax2 = min(jmax2, n)
        sgn = -sign_pow(n)
        acc = {}
        for j in range(max(jmax1, jmax2) + 1):
            cj = binom(n, j) * sign_pow(j)
            if not cj:
                continue
            if j <= jmax1:
                for k1, c1 in self._composite_mode(rest, k + j, c).items():
                    for k2, c2 in self._gen_mode(g, n - j, k1).items():
                        _bump(acc, k2, cj * c1 * c2)
            if j <= jmax2:
                for k1, c1 in self._gen_mode(g, j, c).items():
                    for k2, c2 in self._composite_mode(rest, n + k - j, k1).items():
                        _bump(acc, k2, cj * sgn * c1 * c2)
        self._cmp_cache[key] = acc
        return acc

    # Basis keys are bare letter tuples for the algebra itself; modules
    # append a ground tag.  These two hooks keep the recursion shared.

    def _split(self, key):
        return key, None

    def _join(self, letters, tag):
        return letters

    def _key_weight(self, key):
        return self.monomial_weight(key)


class State:
    __slots__ = ("space", "terms")

    def __init__(self, space, terms=None):
        self.space = space
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.space is other.space and self.terms == other.terms

    def __neg__(self):
        return State(self.space, {m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, State) or other.space is not self.space:
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _bump(acc, m, c)
        return State(self.space, acc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return State(self.space, {m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        if not self.terms:
            return "State(0)"
        bits = ["%s*%s" % (c, list(m)) for m, c in sorted(self.terms.items())]
        return "State(%s)" % " + ".join(bits)

    def weights(self):
        return sorted({self.space._key_weight(m) for m in self.terms})

    def weight(self):
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError("state is not homogeneous: weights %s" % ws)
        return ws[0]

    def homogeneous_part(self, weight):
        return State(self.space, {
            m: c for m, c in self.terms.items()
            if self.space._key_weight(m) == weight})

    def max_weight(self):
        return max((self.space._key_weight(m) for m in self.terms), default=-1)


def mode_action(a, n, v):
    """a_{(n)} v for a in the algebra and v in the algebra or a module."""
    space = v.space
    algebra = getattr(space, "algebra", space)
    if a.space is not algebra:
        raise ValueError("left factor must live in the acting algebra")
    acc = {}
    for mu, cu in a.terms.items():
        for mc, cc in v.terms.items():
            w = cu * cc
            for m2, c2 in space._composite_mode(mu, n, mc).items():
                _bump(acc, m2, w * c2)
    out = State(space, space.reduce_terms(acc))
    limit = getattr(space, "cutoff", None)
    if limit is not None and out.max_weight() > limit:
        raise ValueError("raise weight cutoff")
    return out


def translate(a):
    """T a = a_{(-2)} vacuum, for states of the algebra itself."""
    algebra = getattr(a.space, "algebra", a.space)
    if a.space is not algebra:
        raise ValueError("translation acts on algebra states")
    return mode_action(a, -2, algebra.vacuum())


def l_mode(m, v):
    """L_m v = omega_{(m+1)} v."""
    algebra = getattr(v.space, "algebra", v.space)
    return mode_action(algebra.omega(), m + 1, v)


def f_product(a, f, b):
    """a_{(f)} b = sum_n f_n a_{(n)} b for a one-variable Laurent kernel.

    f may be a one-variable ZLaurent (its q-series entries then show up
    in the coefficients of the result) or a plain {exponent: coeff} dict.
    """
    if hasattr(f, "entries"):
        if len(f.vars) != 1:
            raise ValueError("kernel must be one-variable")
        items = [(e[0], s) for e, s in f.entries.items()]
    else:
        items = list(f.items())
    space = b.space
    top = a.max_weight() + b.max_weight()
    acc = {}
    for n, fn in items:
        if n >= top:
            continue
        for m, c in mode_action(a, n, b).terms.items():
            _bump(acc, m, fn * c)
    return State(space, acc)


# -- built-in algebras -----------------------------------------------------

_CACHE = {}


def heisenberg():
    """Rank one free boson: one generator x of weight 1 with x_{(1)}x = 1,
    conformal vector (1/2) x_{(-1)}x of central charge 1."""
    got = _CACHE.get("heisenberg")
    if got is None:
        got = VertexAlgebra(
            "heisenberg",
            weights=(1,),
            products={(0, 0): {1: {(): _ONE}}},
            central_charge=1,
            omega_terms={((0, -1), (0, -1)): Fraction(1, 2)},
        )
        _CACHE["heisenberg"] = got
    return got


def virasoro(c):
    """Universal Virasoro vertex algebra at central charge c."""
    c = Fraction(c)
    key = ("virasoro", c)
    got = _CACHE.get(key)
    if got is None:
        got = VertexAlgebra(
            "virasoro(%s)" % c,
            weights=(2,),
            products={(0, 0): {
                0: {((0, -2),): _ONE},
                1: {((0, -1),): Fraction(2)},
                3: {(): c / 2},
            }},
            central_charge=c,
            omega_terms={((0, -1),): _ONE},
        )
        _CACHE[key] = got
    return got


# -- quotients -------------------------------------------------------------

class QuotientAlgebra(VertexAlgebra):
    """Quotient of a free algebra by the ideal generated by states
    asserted to be singular.  Simplicity of the result is not checked.
    Mode actions are only available below the weight cutoff."""

    def __init__(self, parent, null_vectors, cutoff):
        self.name = parent.name + "/ideal"
        self.parent = parent
        self.weights = parent.weights
        self.products = parent.products
        self.central_charge = parent.central_charge
        self.omega_terms = parent.omega_terms
        self.cutoff = cutoff
        self._gen_cache = parent._gen_cache
        self._cmp_cache = parent._cmp_cache
        self._basis_cache = {}
        self._build_reduction([dict(v.terms) for v in null_vectors])

    def _build_reduction(self, seeds):
        from .linalg import rank, rref

        buckets = {w: [] for w in range(self.cutoff + 1)}
        queue = list(seeds)
        seen_ranks = {w: 0 for w in buckets}
        while queue:
            for terms in queue:
                grouped = {}
                for m, c in terms.items():
                    grouped.setdefault(self.parent.monomial_weight(m), {})[m] = c
                for w, part in grouped.items():
                    if w <= self.cutoff:
                        buckets[w].append(part)
            changed = False
            for w, vecs in buckets.items():
                r = rank(self._matrix(w, vecs)) if vecs else 0
                if r > seen_ranks[w]:
                    seen_ranks[w] = r
                    changed = True
            if not changed:
                break
            # close under generator modes landing inside the cutoff
            queue = []
            for w, vecs in buckets.items():
                for terms in vecs:
                    st = State(self.parent, terms)
                    for g in range(len(self.weights)):
                        dg = self.weights[g]
                        for n in range(w + dg - 1 - self.cutoff, w + dg):
                            res = mode_action(self.parent.generator(g), n, st)
                            if res.terms:
                                queue.append(dict(res.terms))
        self._reduction = {}
        for w, vecs in buckets.items():
            basis = self.parent.basis(w)
            rows, pivots = rref(self._matrix(w, vecs))
            index = {m: i for i, m in enumerate(basis)}
            self._reduction[w] = (basis, index, rows[: len(pivots)], pivots)

    def _matrix(self, w, vecs):
        basis = self.parent.basis(w)
        index = {m: i for i, m in enumerate(basis)}
        mat = []
        for terms in vecs:
            row = [Fraction(0)] * len(basis)
            for m, c in terms.items():
                row[index[m]] = Fraction(c)
            mat.append(row)
        return mat

    def basis(self, weight):
        if weight > self.cutoff:
            raise ValueError("raise weight cutoff")
        basis, index, rows, pivots = self._reduction[weight]
        return [m for i, m in enumerate(basis) if i not in pivots]

    def dim(self, weight):
        return len(self.basis(weight)) if weight >= 0 else 0

    def reduce_terms(self, terms):
        out = {}
        for m, c in terms.items():
            w = self.parent.monomial_weight(m)
            if w > self.cutoff:
                raise ValueError("raise weight cutoff")
            basis, index, rows, pivots = self._reduction[w]
            i = index[m]
            try:
                p = pivots.index(i)
            except ValueError:
                _bump(out, m, c)
                continue
            # pivot monomial: rewrite as minus the free part of its row
            for jcol, val in enumerate(rows[p]):
                if jcol != i and val:
                    _bump(out, basis[jcol], -c * val)
        return out


def quotient(parent, null_vectors, cutoff):
    return QuotientAlgebra(parent, null_vectors, cutoff)


# -- verifier reports ------------------------------------------------------

def _report(ok, name, detail=None):
    return {"ok": ok, "check": name, "detail": detail}


def check_borcherds(a, b, c, i, j, k):
    """Mode form of the Borcherds identity for the kernel z**i w**j (z-w)**k:

    sum_s C(i,s) (a_{(k+s)}b)_{(i+j-s)} c
      = sum_s (-1)**s C(k,s) (a_{(i+k-s)} b_{(j+s)} - (-1)**k b_{(j+k-s)} a_{(i+s)}) c
    """
    space = c.space
    wa, wb, wc = a.max_weight(), b.max_weight(), c.max_weight()
    left = State(space)
    s = 0
    while True:
        if (i >= 0 and s > i) or k + s > wa + wb - 1:
            break
        cs = binom(i, s)
        if cs:
            inner = mode_action(a, k + s, b)
            left = left + cs * mode_action(inner, i + j - s, c)
        s += 1
    right = State(space)
    s = 0
    while True:
        first = j + s <= wb + wc - 1
        second = i + s <= wa + wc - 1
        if (k >= 0 and s > k) or not (first or second):
            break
        cs = binom(k, s) * (-1) ** s
        if cs:
            if first:
                right = right + cs * mode_action(a, i + k - s, mode_action(b, j + s, c))
            if second:
                right = right - cs * sign_pow(k) * mode_action(b, j + k - s, mode_action(a, i + s, c))
        s += 1
    ok = left == right
    return _report(ok, "borcherds i=%d j=%d k=%d" % (i, j, k),
                   None if ok else {"left": repr(left), "right": repr(right)})


def check_skew(a, b, k):
    """a_{(k)}b = -(-1)**k sum_j (-L_{-1})**j / j! of b_{(k+j)}a."""
    left = mode_action(a, k, b)
    wa, wb = a.max_weight(), b.max_weight()
    acc = a.space.zero()
    for j in range(max(0, wa + wb - k) + 1):
        term = mode_action(b, k + j, a)
        for _ in range(j):
            term = -translate(term)
        acc = acc + Fraction(1, factorial(j)) * term
    acc = -sign_pow(k) * acc
    ok = left == acc
    return _report(ok, "skew k=%d" % k,
                   None if ok else {"left": repr(left), "right": repr(acc)})


def check_symmetric_product(a, b, f):
    """a_{(f(x))}b + b_{(f(-x))}a = sum_j (-1)**j/(j+1)! T**(j+1) a_{(x**(j+1) f)}b
    for a one-variable Laurent polynomial kernel f given as {exponent: Fraction}."""
    flip = {n: sign_pow(n) * c for n, c in f.items()}
    left = f_product(a, f, b) + f_product(b, flip, a)
    right = a.space.zero()
    top = a.max_weight() + b.max_weight()
    jmax = top - min(f) if f else -1
    for j in range(max(jmax, -1) + 1):
        shifted = {n + j + 1: c for n, c in f.items()}
        term = f_product(a, shifted, b)
        for _ in range(j + 1):
            term = translate(term)
        right = right + Fraction((-1) ** j, factorial(j + 1)) * term
    ok = left == right
    return _report(ok, "symmetric-product", None if ok else
                   {"left": repr(left), "right": repr(right)})


# -- Fock modules and self extensions --------------------------------------

class FockModule(VertexAlgebra):
    """Heisenberg module induced from a finite-dimensional ground space
    on which only the zero mode acts, nilpotently.  Basis keys are
    (letters, t) with t indexing the ground basis."""

    def __init__(self, algebra, ground_dim, zero_matrices):
        self.name = algebra.name + " module"
        self.algebra = algebra
        self.weights = algebra.weights
        self.products = algebra.products
        self.central_charge = algebra.central_charge
        self.omega_terms = algebra.omega_terms
        self.cutoff = None
        self.ground_dim = ground_dim
        # zero_matrices: {generator: rows}; action |t> -> sum_s rows[s][t] |s>
        self.zero_matrices = {g: tuple(tuple(Fraction(x) for x in row) for row in m)
                              for g, m in zero_matrices.items()}
        self._gen_cache = {}
        self._cmp_cache = {}
        self._basis_cache = {}

    def _split(self, key):
        return key[0], key[1]

    def _join(self, letters, tag):
        return (letters, tag)

    def _key_weight(self, key):
        return self.monomial_weight(key[0])

    def _ground_mode(self, g, n, tag):
        if n != 0:
            return {}
        rows = self.zero_matrices.get(g)
        if rows is None:
            return {}
        return {((), s): rows[s][tag] for s in range(self.ground_dim) if rows[s][tag]}

    def basis(self, weight):
        got = self._basis_cache.get(weight)
        if got is None:
            got = [(m, t) for m in self.algebra.basis(weight)
                   for t in range(self.ground_dim)]
            self._basis_cache[weight] = got
        return got

    def vacuum(self, t=0):
        return State(self, {((), t): _ONE})

    def state(self, terms):
        return State(self, terms)

    def zero(self):
        return State(self, {})


class Extension:
    """Self extension 0 -> M -> E -> M -> 0 presented by the square-zero
    ground ring; exposes the End(M)-valued derivation of the off-diagonal
    block."""

    def __init__(self, algebra, module):
        self.algebra = algebra
        self.module = module

    def embed(self, v, t=0):
        """A state of the algebra, viewed inside E at ground index t."""
        return State(self.module, {(m, t): c for m, c in v.terms.items()})

    def component(self, m_state, t):
        return State(self.algebra,
                     {m: c for (m, tag), c in m_state.terms.items() if tag == t})

    def psi_mode(self, a, n, v):
        """Psi(a)_{(n)} v, with M identified with the algebra itself."""
        acted = mode_action(a, n, self.embed(v, 0))
        return self.component(acted, 1)

    def sigma_mode(self, a, n, v):
        """sigma(a)_n v = Psi(a)_{(n + wt a - 1)} v for homogeneous a."""
        return self.psi_mode(a, n + a.weight() - 1, v)

    def check_derivation(self, a, b, m_state, i, j, k):
        """Derivation identity for the kernel z**i w**j (z-w)**k: the mode
        Borcherds identity with Psi substituted once in every slot."""
        wa, wb = a.max_weight(), b.max_weight()
        wm = m_state.max_weight()
        left = State(self.algebra)
        s = 0
        while True:
            if (i >= 0 and s > i) or k + s > wa + wb - 1:
                break
            cs = binom(i, s)
            if cs:
                inner = mode_action(a, k + s, b)
                left = left + cs * self.psi_mode(inner, i + j - s, m_state)
            s += 1
        right = State(self.algebra)
        s = 0
        while True:
            first = j + s <= wb + wm - 1 + 1
            second = i + s <= wa + wm - 1 + 1
            if (k >= 0 and s > k) or not (first or second):
                break
            cs = binom(k, s) * (-1) ** s
            if cs:
                if first:
                    right = right + cs * (
                        mode_action(a, i + k - s, self.psi_mode(b, j + s, m_state))
                        + self.psi_mode(a, i + k - s, mode_action(b, j + s, m_state)))
                if second:
                    right = right - cs * sign_pow(k) * (
                        self.psi_mode(b, j + k - s, mode_action(a, i + s, m_state))
                        + mode_action(b, j + k - s, self.psi_mode(a, i + s, m_state)))
            s += 1
        ok = left == right
        return _report(ok, "derivation i=%d j=%d k=%d" % (i, j, k),
                       None if ok else {"left": repr(left), "right": repr(right)})


def fock_extension():
    """The rank one Heisenberg acting on itself extended by itself: the
    module induced from the square-zero ground ring, with the zero mode
    of x shifting the ground index."""
    V = heisenberg()
    module = FockModule(V, 2, {0: ((0, 0), (1, 0))})
    return Extension(V, module)


# -- JSON interface --------------------------------------------------------

def _terms_to_json(terms):
    return [{"monomial": [list(l) for l in m], "coeff": str(c)}
            for m, c in sorted(terms.items())]


def _terms_from_json(doc):
    return {tuple((g, n) for g, n in item["monomial"]): Fraction(item["coeff"])
            for item in doc}


def algebra_to_json(V):
    doc = {
        "name": V.name,
        "weights": list(V.weights),
        "central_charge": str(V.central_charge),
        "products": [
            {"left": pair[0], "right": pair[1], "n": j,
             "result": _terms_to_json(terms)}
            for pair, table in sorted(V.products.items())
            for j, terms in sorted(table.items())
        ],
        "omega": _terms_to_json(V.omega_terms),
    }
    return doc


def algebra_from_json(doc):
    products = {}
    for item in doc["products"]:
        pair = (item["left"], item["right"])
        products.setdefault(pair, {})[item["n"]] = _terms_from_json(item["result"])
    V = VertexAlgebra(doc["name"], doc["weights"], products,
                      Fraction(doc["central_charge"]),
                      _terms_from_json(doc["omega"]))
    if doc.get("null_vectors"):
        nulls = [State(V, _terms_from_json(nv)) for nv in doc["null_vectors"]]
        return quotient(V, nulls, int(doc["cutoff"]))
    return V
