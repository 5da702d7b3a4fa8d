"""Exact arithmetic in real fields Q(sqrt(d1), ..., sqrt(dk)).

Numbers are stored as rational combinations of square-root monomials: the
key frozenset({2, 3}) stands for sqrt(2)*sqrt(3) = sqrt(6).  The radicands
must be pairwise coprime square-free integers > 1 so that products reduce
by symmetric difference alone.  This is all the lattice rank computation
needs; exact rank over floats would be undecidable.
"""

from fractions import Fraction
from math import gcd, isqrt


class FieldError(Exception):
    pass


def _square_free(d):
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


class Generators:
    """A declared basis of radicands, e.g. (2, 3) for Q(sqrt2, sqrt3)."""

    def __init__(self, radicands):
        rads = tuple(sorted(set(int(d) for d in radicands)))
        for d in rads:
            if d < 2:
                raise FieldError(f"radicand {d} is not a surd")
            if not _square_free(d):
                raise FieldError(f"radicand {d} is not square-free")
        for i, a in enumerate(rads):
            for b in rads[i + 1:]:
                if gcd(a, b) != 1:
                    raise FieldError(
                        f"radicands {a} and {b} share a factor; declare "
                        f"coprime generators")
        self.radicands = rads

    def monomials(self):
        """All subsets of the radicand set, sorted for stable printing."""
        out = [frozenset()]
        for d in self.radicands:
            out += [key | {d} for key in out]
        return sorted(out, key=lambda k: (len(k), sorted(k)))

    def __eq__(self, other):
        return isinstance(other, Generators) and \
            self.radicands == other.radicands


class QNum:
    """An element of the field, as {monomial key: Fraction}."""

    def __init__(self, gens, terms=None):
        self.gens = gens
        self.terms = {}
        for key, q in (terms or {}).items():
            key = frozenset(key)
            if not key <= set(gens.radicands):
                raise FieldError(f"monomial {sorted(key)} outside the "
                                 f"declared generators")
            q = Fraction(q)
            if q:
                self.terms[key] = self.terms.get(key, Fraction(0)) + q
        self.terms = {k: q for k, q in self.terms.items() if q}

    @classmethod
    def of(cls, gens, q):
        return cls(gens, {frozenset(): Fraction(q)})

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(not key for key in self.terms)

    def rational_part(self):
        return self.terms.get(frozenset(), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, QNum) and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for key, q in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + q
        return QNum(self.gens, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QNum(self.gens, {k: -q for k, q in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for k1, q1 in self.terms.items():
            for k2, q2 in other.terms.items():
                key = k1 ^ k2
                q = q1 * q2
                for d in k1 & k2:
                    q *= d
                out[key] = out.get(key, Fraction(0)) + q
        return QNum(self.gens, out)

    def inverse(self):
        """Invert by solving x*y = 1 over the monomial basis."""
        if self.is_zero():
            raise ZeroDivisionError("field inverse of zero")
        basis = self.gens.monomials()
        pos = {key: i for i, key in enumerate(basis)}
        n = len(basis)
        # column j of m is self * basis[j], written in the basis
        m = [[Fraction(0)] * n for _ in range(n)]
        for j, bkey in enumerate(basis):
            for key, q in self.terms.items():
                prod = key ^ bkey
                f = q
                for d in key & bkey:
                    f *= d
                m[pos[prod]][j] += f
        rhs = [Fraction(0)] * n
        rhs[pos[frozenset()]] = Fraction(1)
        sol = _solve_rational(m, rhs)
        if sol is None:
            raise FieldError("element is a zero divisor; generators are "
                             "not independent")
        return QNum(self.gens, {basis[i]: sol[i] for i in range(n)})

    def __truediv__(self, other):
        return self * other.inverse()

    def to_float(self):
        total = 0.0
        for key, q in self.terms.items():
            r = 1.0
            for d in key:
                r *= d ** 0.5
            total += float(q) * r
        return total

    def __repr__(self):
        return f"QNum({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in self.gens.monomials():
            if key not in self.terms:
                continue
            q = self.terms[key]
            if not key:
                parts.append(str(q))
                continue
            rad = 1
            for d in key:
                rad *= d
            if q == 1:
                parts.append(f"sqrt{rad}")
            elif q == -1:
                parts.append(f"-sqrt{rad}")
            else:
                parts.append(f"{q}*sqrt{rad}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


def _solve_rational(m, rhs):
    """Gaussian elimination over the rationals; None when singular."""
    n = len(m)
    a = [row[:] + [rhs[i]] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def parse_qnum(text, gens):
    """Read '1 - 2/3*sqrt2 + sqrt6' into a QNum."""
    s = text.replace(" ", "")
    if not s:
        raise FieldError("empty field element")
    terms = {}
    i = 0
    while i < len(s):
        sign = 1
        while i < len(s) and s[i] in "+-":
            if s[i] == "-":
                sign = -sign
            i += 1
        j = i
        while j < len(s) and s[j] not in "+-":
            j += 1
        piece = s[i:j]
        i = j
        if not piece:
            raise FieldError(f"dangling sign in {text!r}")
        coeff = Fraction(1)
        if "*" in piece:
            num, _, piece = piece.partition("*")
            coeff = Fraction(num)
        if piece.startswith("sqrt"):
            rad = int(piece[4:])
            key = _factor_key(rad, gens)
        else:
            coeff *= Fraction(piece)
            key = frozenset()
        terms[key] = terms.get(key, Fraction(0)) + sign * coeff
    return QNum(gens, terms)


def _factor_key(rad, gens):
    """Express sqrt(rad) as a product of declared generators."""
    if rad < 2:
        raise FieldError(f"sqrt{rad} is not a surd")
    key = set()
    rest = rad
    for d in gens.radicands:
        if rest % d == 0:
            key.add(d)
            rest //= d
    if rest != 1:
        raise FieldError(f"sqrt{rad} is outside the declared generators")
    return frozenset(key)


def solve_linear(matrix, rhs):
    """Solve M u = rhs over the field; M is a list of QNum rows."""
    n = len(matrix)
    gens = rhs[0].gens
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()),
                   None)
        if piv is None:
            raise FieldError("singular lattice matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def rational_rank(rows):
    """Rank over Q of a list of Fraction vectors."""
    work = [list(map(Fraction, row)) for row in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(work)) if work[r][col]),
                   None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [x * inv for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[rank])]
        rank += 1
    return rank


def span_rank(vectors):
    """Dimension of the smallest Q-rational subspace containing the span.

    Each real vector splits into per-monomial rational component vectors;
    any rational subspace containing the vector contains each of them, so
    the rank of the stacked components is the answer.
    """
    rows = []
    for vec in vectors:
        keys = set()
        for x in vec:
            keys |= set(x.terms)
        for key in keys:
            rows.append([x.terms.get(key, Fraction(0)) for x in vec])
    if not rows:
        return 0
    return rational_rank(rows)
