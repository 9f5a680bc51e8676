"""Exact coefficient arithmetic for formal q-expansions.

Three layers, bottom up:

  * Scalar   -- Laurent polynomial in a formal symbol P (standing for 2*pi*i)
                with rational coefficients.
  * QSeries  -- power series in q over Scalar, with a rational exponent offset
                (so q**(-c/24) prefactors live inside the series), an explicit
                precision bound, and an optional modular weight tag.
  * ZLaurent -- Laurent object in finitely many formal variables, coefficients
                in QSeries, truncated to a symmetric exponent window.

Everything is exact: no floats anywhere.  A QSeries knows how far it can be
trusted; arithmetic propagates the bound, so a test that compares two series
compares them on the range where both are known.
"""

from fractions import Fraction

import json

DEFAULT_ORDER = 16
DEFAULT_WINDOW = 16


def _frac(x):
    """Coerce an int or Fraction; reject everything else."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected int or Fraction, got %r" % (x,))


class Scalar:
    """Element of Q[P, 1/P], P a formal symbol for 2*pi*i.

    Stored as a map {power of P: Fraction}, zero values dropped.

    >>> (Scalar.pi() + 1) * (Scalar.pi() - 1) == Scalar.pi(2) - 1
    True
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for k, v in terms.items():
                v = _frac(v)
                if v:
                    t[int(k)] = v
        self.terms = t

    @classmethod
    def of(cls, x):
        if isinstance(x, Scalar):
            return x
        return cls({0: _frac(x)})

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def pi(cls, power=1, coeff=1):
        """coeff * P**power."""
        return cls({power: coeff})

    def coeff(self, power):
        return self.terms.get(power, Fraction(0))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return Scalar({k: -v for k, v in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        t = dict(self.terms)
        for k, v in other.terms.items():
            w = t.get(k, 0) + v
            if w:
                t[k] = w
            else:
                t.pop(k, None)
        out = Scalar.__new__(Scalar)
        out.terms = t
        return out

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Scalar) else -Scalar.of(other))

    def __rsub__(self, other):
        return Scalar.of(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar.zero()
            o = _frac(other)
            return Scalar({k: v * o for k, v in self.terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        t = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = ka + kb
                w = t.get(k, 0) + va * vb
                if w:
                    t[k] = w
                else:
                    t.pop(k, None)
        out = Scalar.__new__(Scalar)
        out.terms = t
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a rational or by a one-term scalar c*P**k."""
        if isinstance(other, (int, Fraction)):
            o = _frac(other)
            if not o:
                raise ZeroDivisionError
            return Scalar({k: v / o for k, v in self.terms.items()})
        if isinstance(other, Scalar):
            if len(other.terms) != 1:
                raise ValueError("unit required: can only divide by a monomial scalar")
            (k, v), = other.terms.items()
            return Scalar({kk - k: vv / v for kk, vv in self.terms.items()})
        return NotImplemented

    def is_rational(self):
        return set(self.terms) <= {0}

    def rational(self):
        """The rational part; raises if a genuine P power is present."""
        if not self.is_rational():
            raise ValueError("scalar %r is not rational" % (self,))
        return self.terms.get(0, Fraction(0))

    def homogeneous_degree(self):
        """The single P power if homogeneous (0 for the zero scalar), else None."""
        if not self.terms:
            return 0
        ks = set(self.terms)
        if len(ks) == 1:
            return ks.pop()
        return None

    def drop_pi(self):
        """Sum of coefficients: the image under P -> 1."""
        return sum(self.terms.values(), Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms):
            v = self.terms[k]
            if k == 0:
                bits.append(str(v))
            elif k == 1:
                bits.append("%s*P" % v)
            else:
                bits.append("%s*P^%d" % (v, k))
        return " + ".join(bits)


def _scalar(x):
    if isinstance(x, Scalar):
        return x
    return Scalar.of(x)


def _merge_weight(a, b):
    return a if a == b else None


class QSeries:
    """Truncated power series in q over Scalar.

    Exponents are rationals of the form offset + (nonnegative integer).
    ``prec`` is an exclusive exponent bound: coefficients at exponents below
    prec are exactly known, everything at or above is unknown.  ``prec is
    None`` means the series is exact (a Laurent polynomial in q**(1/m)).

    ``weight`` is optional modular-weight metadata: products add weights,
    sums keep a weight only when both agree.

    Addition requires the offsets to differ by an integer.  The precision of
    a product is min(prec_a + offset_b, prec_b + offset_a), which for two
    plain truncations of the same order is again that order.
    """

    __slots__ = ("offset", "prec", "coeffs", "weight")

    def __init__(self, coeffs=None, prec=None, offset=None, weight=None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _scalar(v)
                if v:
                    c[_frac(e)] = v
        if offset is None:
            offset = min(c) if c else Fraction(0)
        else:
            offset = _frac(offset)
        if prec is not None:
            prec = _frac(prec)
            c = {e: v for e, v in c.items() if e < prec}
        self.offset = offset
        self.prec = prec
        self.coeffs = c
        self.weight = weight

    @classmethod
    def _mk(cls, coeffs, prec, offset, weight=None):
        out = cls.__new__(cls)
        out.coeffs = coeffs
        out.prec = prec
        out.offset = offset
        out.weight = weight
        return out

    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, x, prec=None, weight=None):
        """Exact constant series (or with an explicit precision bound)."""
        if isinstance(x, QSeries):
            return x
        return cls({0: _scalar(x)}, prec=prec, weight=weight)

    @classmethod
    def zero(cls, prec=None):
        return cls({}, prec=prec)

    @classmethod
    def monomial(cls, exponent, coeff=1, prec=None, weight=None):
        """coeff * q**exponent, exact by default."""
        return cls({_frac(exponent): _scalar(coeff)}, prec=prec, weight=weight)

    # -- inspection --------------------------------------------------------

    def coeff(self, exponent):
        e = _frac(exponent)
        if self.prec is not None and e >= self.prec:
            raise ValueError("coefficient of q^%s not known (prec %s)" % (e, self.prec))
        return self.coeffs.get(e, Scalar.zero())

    def items(self):
        return sorted(self.coeffs.items())

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def known_to(self, bound):
        """True when the series is trusted at all exponents below bound."""
        return self.prec is None or self.prec >= _frac(bound)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return QSeries.of(other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bound = self.prec if o.prec is None else (o.prec if self.prec is None else min(self.prec, o.prec))
        for e in set(self.coeffs) | set(o.coeffs):
            if bound is not None and e >= bound:
                continue
            if self.coeffs.get(e, Scalar.zero()) != o.coeffs.get(e, Scalar.zero()):
                return False
        return True

    def __hash__(self):
        raise TypeError("QSeries is not hashable")

    def __neg__(self):
        return QSeries._mk({e: -v for e, v in self.coeffs.items()},
                           self.prec, self.offset, self.weight)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if (self.offset - o.offset).denominator != 1:
            raise ValueError("offsets %s and %s differ by a non-integer" % (self.offset, o.offset))
        prec = self.prec if o.prec is None else (o.prec if self.prec is None else min(self.prec, o.prec))
        c = dict(self.coeffs)
        for e, v in o.coeffs.items():
            w = c.get(e)
            w = v if w is None else w + v
            if w:
                c[e] = w
            else:
                c.pop(e, None)
        if prec is not None:
            c = {e: v for e, v in c.items() if e < prec}
        return QSeries._mk(c, prec, min(self.offset, o.offset),
                           _merge_weight(self.weight, o.weight))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            s = _scalar(other)
            if not s:
                return QSeries._mk({}, self.prec, self.offset, self.weight)
            return QSeries._mk({e: w for e, v in self.coeffs.items() if (w := v * s)},
                               self.prec, self.offset, self.weight)
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.prec is None and other.prec is None:
            prec = None
        elif self.prec is None:
            prec = other.prec + self.offset
        elif other.prec is None:
            prec = self.prec + other.offset
        else:
            prec = min(self.prec + other.offset, other.prec + self.offset)
        c = {}
        for ea, va in self.coeffs.items():
            for eb, vb in other.coeffs.items():
                e = ea + eb
                if prec is not None and e >= prec:
                    continue
                w = c.get(e)
                w = va * vb if w is None else w + va * vb
                if w:
                    c[e] = w
                else:
                    c.pop(e, None)
        weight = None
        if self.weight is not None and other.weight is not None:
            weight = self.weight + other.weight
        return QSeries._mk(c, prec, self.offset + other.offset, weight)

    __rmul__ = __mul__

    def shift(self, exponent):
        """Multiply by q**exponent."""
        e0 = _frac(exponent)
        return QSeries._mk({e + e0: v for e, v in self.coeffs.items()},
                           None if self.prec is None else self.prec + e0,
                           self.offset + e0, self.weight)

    def truncate(self, prec):
        """Forget everything at exponent >= prec."""
        p = _frac(prec)
        if self.prec is not None and self.prec <= p:
            p = self.prec
        return QSeries._mk({e: v for e, v in self.coeffs.items() if e < p},
                           p, self.offset, self.weight)

    def map_coeffs(self, fn):
        """Apply fn to every coefficient, keeping the precision bound."""
        return QSeries._mk({e: w for e, v in self.coeffs.items() if (w := fn(v))},
                           self.prec, self.offset, self.weight)

    def with_weight(self, weight):
        return QSeries._mk(dict(self.coeffs), self.prec, self.offset, weight)

    def q_log_derivative(self):
        """q d/dq: the coefficient at q**e picks up a factor e."""
        return QSeries._mk({e: w for e, v in self.coeffs.items() if (w := v * e)},
                           self.prec, self.offset, self.weight)

    def invert(self, order=None):
        """Multiplicative inverse.

        The lowest nonzero coefficient must be an invertible (one-term)
        scalar.  For an exact input, ``order`` sets how many terms of the
        inverse to produce (default DEFAULT_ORDER+1); for a truncated input
        the inverse carries the precision the input supports.
        """
        if not self.coeffs:
            raise ZeroDivisionError("inverting the zero series")
        e0 = min(self.coeffs)
        lead = self.coeffs[e0]
        if self.prec is None:
            n = (order if order is not None else DEFAULT_ORDER) + 1
        else:
            n = int(self.prec - e0)
            if n <= 0:
                raise ValueError("no known terms to invert")
            if order is not None:
                n = min(n, order + 1)
        if len(lead.terms) != 1:
            raise ValueError("unit required: leading coefficient %r is not invertible" % (lead,))
        inv_lead = Scalar.one() / lead
        rest = {e - e0: v for e, v in self.coeffs.items() if e != e0}
        r = {Fraction(0): inv_lead}
        for k in range(1, n):
            acc = Scalar.zero()
            for d, v in rest.items():
                if d <= k:
                    w = r.get(k - d)
                    if w is not None:
                        acc = acc + v * w
            if acc:
                r[Fraction(k)] = -(inv_lead * acc)
        weight = None if self.weight is None else -self.weight
        out = QSeries._mk({(-e0) + k: v for k, v in r.items() if v},
                          -e0 + n, -e0, weight)
        if self.prec is None and not rest:
            out.prec = None   # inverse of a monomial is exact
        return out

    def q0(self):
        """Value at q = 0, a Scalar.  Raises on a q-pole or unknown constant."""
        for e, v in self.coeffs.items():
            if e < 0 and v:
                raise ValueError("series has a pole at q=0")
        if self.prec is not None and self.prec <= 0:
            raise ValueError("constant term not known")
        return self.coeffs.get(Fraction(0), Scalar.zero())

    # -- serialization -----------------------------------------------------

    def to_json(self):
        steps = sorted(self.coeffs)
        off = self.offset
        data = {
            "offset": str(off),
            "truncation": None if self.prec is None else int(self.prec - off) - 1,
            "coeffs": [
                {
                    "pow": str(e - off),
                    "terms": [
                        {"pi": k, "num": str(v.numerator), "den": str(v.denominator)}
                        for k, v in sorted(self.coeffs[e].terms.items())
                    ],
                }
                for e in steps
            ],
        }
        if self.weight is not None:
            data["weight"] = self.weight
        return data

    @classmethod
    def from_json(cls, data):
        off = Fraction(data["offset"])
        coeffs = {}
        for entry in data["coeffs"]:
            s = Scalar({t["pi"]: Fraction(int(t["num"]), int(t["den"]))
                        for t in entry["terms"]})
            coeffs[off + Fraction(entry["pow"])] = s
        prec = data.get("truncation")
        prec = None if prec is None else off + prec + 1
        return cls(coeffs, prec=prec, offset=off, weight=data.get("weight"))

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            bits = []
            for e, v in self.items()[:8]:
                sv = repr(v)
                if len(v.terms) > 1:
                    sv = "(" + sv + ")"
                bits.append(sv if e == 0 else "%s*q^%s" % (sv, e))
            body = " + ".join(bits)
            if len(self.coeffs) > 8:
                body += " + ..."
        tail = "" if self.prec is None else " + O(q^%s)" % self.prec
        return body + tail


def _qseries(x, prec=None):
    if isinstance(x, QSeries):
        return x
    return QSeries.of(x, prec=prec)


class ZLaurent:
    """Laurent object in named formal variables over QSeries.

    Exponents are clipped to [-window, window] in every variable: terms that
    land outside are dropped.  That makes products well defined on truncated
    data; any identity checked through this type holds inside the window.
    """

    __slots__ = ("vars", "window", "entries")

    def __init__(self, vars, entries=None, window=DEFAULT_WINDOW):
        self.vars = tuple(vars)
        self.window = int(window)
        good = {}
        if entries:
            for exps, s in entries.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != len(self.vars):
                    raise ValueError("exponent tuple %r does not match vars %r" % (exps, self.vars))
                if any(abs(e) > self.window for e in exps):
                    continue
                s = _qseries(s)
                if s:
                    good[exps] = s
        self.entries = good

    @classmethod
    def constant(cls, x, vars=(), window=DEFAULT_WINDOW):
        z = cls(vars, window=window)
        x = _qseries(x)
        if x:
            z.entries[(0,) * len(z.vars)] = x
        return z

    @classmethod
    def monomial(cls, vars, exps, coeff=1, window=DEFAULT_WINDOW):
        return cls(vars, {tuple(exps): _qseries(coeff)}, window=window)

    def coeff(self, exps):
        return self.entries.get(tuple(exps), QSeries.zero())

    def __bool__(self):
        return bool(self.entries)

    def is_zero(self):
        return not self.entries

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError("variable mismatch: %r vs %r" % (self.vars, other.vars))
        return min(self.window, other.window)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar, QSeries)):
            other = ZLaurent.constant(other, self.vars, self.window)
        if not isinstance(other, ZLaurent):
            return NotImplemented
        w = self._check(other)
        for exps in set(self.entries) | set(other.entries):
            if any(abs(e) > w for e in exps):
                continue
            if self.coeff(exps) != other.coeff(exps):
                return False
        return True

    def __neg__(self):
        out = ZLaurent(self.vars, window=self.window)
        out.entries = {k: -v for k, v in self.entries.items()}
        return out

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar, QSeries)):
            other = ZLaurent.constant(other, self.vars, self.window)
        if not isinstance(other, ZLaurent):
            return NotImplemented
        w = self._check(other)
        out = ZLaurent(self.vars, window=w)
        c = {k: v for k, v in self.entries.items() if all(abs(e) <= w for e in k)}
        for k, v in other.entries.items():
            if any(abs(e) > w for e in k):
                continue
            s = c.get(k)
            s = v if s is None else s + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        out.entries = c
        return out

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar, QSeries)):
            other = ZLaurent.constant(other, self.vars, self.window)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar, QSeries)):
            out = ZLaurent(self.vars, window=self.window)
            out.entries = {k: w for k, v in self.entries.items() if (w := v * other)}
            return out
        if not isinstance(other, ZLaurent):
            return NotImplemented
        w = self._check(other)
        c = {}
        for ka, va in self.entries.items():
            for kb, vb in other.entries.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                if any(abs(e) > w for e in k):
                    continue
                s = c.get(k)
                p = va * vb
                s = p if s is None else s + p
                if s:
                    c[k] = s
                else:
                    c.pop(k, None)
        out = ZLaurent(self.vars, window=w)
        out.entries = c
        return out

    __rmul__ = __mul__

    def var_index(self, var):
        try:
            return self.vars.index(var)
        except ValueError:
            raise ValueError("no variable %r in %r" % (var, self.vars))

    def residue(self, var):
        """Coefficient of var**(-1); a ZLaurent in the remaining variables,
        or a QSeries when var was the only one."""
        i = self.var_index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        if rest:
            out = ZLaurent(rest, window=self.window)
            for k, v in self.entries.items():
                if k[i] == -1:
                    kk = k[:i] + k[i + 1:]
                    s = out.entries.get(kk)
                    out.entries[kk] = v if s is None else s + v
            out.entries = {k: v for k, v in out.entries.items() if v}
            return out
        acc = QSeries.zero()
        for k, v in self.entries.items():
            if k[i] == -1:
                acc = acc + v
        return acc

    def coefficient_of(self, var, power):
        """Coefficient of var**power as a ZLaurent in the remaining vars."""
        i = self.var_index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        out = ZLaurent(rest, window=self.window)
        for k, v in self.entries.items():
            if k[i] == power:
                kk = k[:i] + k[i + 1:]
                s = out.entries.get(kk)
                out.entries[kk] = v if s is None else s + v
        out.entries = {k: v for k, v in out.entries.items() if v}
        return out

    def mul_var_power(self, var, power):
        """Multiply by var**power (entries pushed outside the window drop)."""
        i = self.var_index(var)
        out = ZLaurent(self.vars, window=self.window)
        for k, v in self.entries.items():
            kk = list(k)
            kk[i] += power
            if abs(kk[i]) <= self.window:
                out.entries[tuple(kk)] = v
        return out

    def subst_q(self, var, power=1):
        """Substitute var -> var * q**power."""
        i = self.var_index(var)
        out = ZLaurent(self.vars, window=self.window)
        for k, v in self.entries.items():
            out.entries[k] = v.shift(Fraction(power) * k[i])
        return out

    def zddz(self, var):
        """The Euler operator var * d/d(var)."""
        i = self.var_index(var)
        out = ZLaurent(self.vars, window=self.window)
        for k, v in self.entries.items():
            if k[i]:
                out.entries[k] = v * k[i]
        return out

    def ddz(self, var):
        """Plain derivative d/d(var)."""
        i = self.var_index(var)
        out = ZLaurent(self.vars, window=self.window)
        for k, v in self.entries.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                if abs(kk[i]) <= self.window:
                    out.entries[tuple(kk)] = v * k[i]
        return out

    def map_series(self, fn):
        out = ZLaurent(self.vars, window=self.window)
        out.entries = {k: w for k, v in self.entries.items() if (w := fn(v))}
        return out

    def clip(self, bound):
        """Drop entries with any exponent beyond +-bound; window unchanged."""
        out = ZLaurent(self.vars, window=self.window)
        out.entries = {k: v for k, v in self.entries.items()
                       if all(abs(e) <= bound for e in k)}
        return out

    def rename(self, mapping):
        """Rename variables; order is preserved."""
        out = ZLaurent(tuple(mapping.get(v, v) for v in self.vars), window=self.window)
        out.entries = dict(self.entries)
        return out

    def with_vars(self, vars):
        """Embed into a larger variable list (new vars get exponent 0)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        out = ZLaurent(vars, window=self.window)
        for k, v in self.entries.items():
            kk = [0] * len(vars)
            for p, e in zip(pos, k):
                kk[p] = e
            out.entries[tuple(kk)] = v
        return out

    def to_json(self):
        return {
            "vars": list(self.vars),
            "window": self.window,
            "entries": [
                {"exps": list(k), "series": v.to_json()}
                for k, v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data):
        out = cls(tuple(data["vars"]), window=data["window"])
        for entry in data["entries"]:
            out.entries[tuple(entry["exps"])] = QSeries.from_json(entry["series"])
        return out

    def __repr__(self):
        if not self.entries:
            return "0"
        bits = []
        for k in sorted(self.entries)[:6]:
            mono = "*".join("%s^%d" % (v, e) for v, e in zip(self.vars, k) if e)
            bits.append("(%r)%s" % (self.entries[k], "*" + mono if mono else ""))
        if len(self.entries) > 6:
            bits.append("...")
        return " + ".join(bits)


# -- module level operation names -----------------------------------------

def series_mul(a, b):
    return _qseries(a) * _qseries(b)


def series_invert(a, order=None):
    return _qseries(a).invert(order=order)


def laurent_residue(z, var):
    return z.residue(var)


def q_log_derivative(a):
    return _qseries(a).q_log_derivative()


def dumps(obj):
    """JSON text for a QSeries or ZLaurent."""
    return json.dumps(obj.to_json(), indent=None, sort_keys=True)
