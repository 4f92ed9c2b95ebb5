"""Exact closed forms for nested oscillatory time integrals.

Everything here revolves around one representation: finite sums

    t  ->  sum_{(w, p)} c_{w,p} * t^p * exp(i w t)

with *exact rational* frequencies ``w``.  This class of functions is closed
under multiplication, conjugation, differentiation and the time-ordered
integration step ``p -> int_0^t exp(i W tau) p(tau) dtau``, so chain integrals
over ordered simplices and full tree amplitudes evaluate exactly; resonance
(``w == 0``) is decided by rational comparison, never by a floating threshold.

An independent numerical oracle (spectral iterated quadrature) and a direct
region-quadrature oracle for tree amplitudes are provided for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .util import DomainError, NumericalError, ResourceError

__all__ = [
    "OscPoly",
    "osc_primitive",
    "g_m",
    "g_m_symbolic",
    "g_m_oracle",
    "CaseTag",
    "classify_leading",
    "f_tree",
    "f_tree_symbolic",
    "f_tree_oracle",
]

#: relative magnitude below which stored coefficients are pruned (storage
#: hygiene only; resonance logic never looks at coefficient size)
PRUNE_REL = 1e-14


def _as_fraction(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, int):
        return Fraction(w)
    if isinstance(w, float):
        return Fraction(w)  # floats are exact dyadic rationals
    raise DomainError(f"frequency must be rational, got {type(w).__name__}")


@dataclass(frozen=True)
class OscPoly:
    """Finite sum of ``c * t^p * exp(i w t)`` terms, canonically sorted.

    ``terms`` maps nothing implicitly: it is a tuple of ``((w, p), c)`` with
    ``w`` an exact :class:`~fractions.Fraction` and ``p`` a non-negative int.
    """

    terms: tuple[tuple[tuple[Fraction, int], complex], ...] = ()

    # -- construction -------------------------------------------------------

    @staticmethod
    def from_map(data: dict[tuple[Fraction, int], complex]) -> "OscPoly":
        cleaned = {k: complex(v) for k, v in data.items() if v != 0}
        if cleaned:
            top = max(abs(v) for v in cleaned.values())
            cleaned = {k: v for k, v in cleaned.items() if abs(v) > PRUNE_REL * top}
        return OscPoly(tuple(sorted(cleaned.items(), key=lambda kv: (kv[0][0], kv[0][1]))))

    @staticmethod
    def constant(c: complex) -> "OscPoly":
        return OscPoly.from_map({(Fraction(0), 0): complex(c)})

    @staticmethod
    def zero() -> "OscPoly":
        return OscPoly()

    @staticmethod
    def oscillation(w, c: complex = 1.0) -> "OscPoly":
        """c * exp(i w t)"""
        return OscPoly.from_map({(_as_fraction(w), 0): complex(c)})

    @staticmethod
    def monomial(p: int, c: complex = 1.0) -> "OscPoly":
        """c * t^p"""
        return OscPoly.from_map({(Fraction(0), int(p)): complex(c)})

    @staticmethod
    def merge_many(polys: Iterable["OscPoly"]) -> "OscPoly":
        """Sum of many polynomials with one exactly rounded accumulation per
        (frequency, power) key — the result does not depend on the order of
        the inputs."""
        res: dict[tuple[Fraction, int], list[float]] = {}
        ims: dict[tuple[Fraction, int], list[float]] = {}
        for poly in polys:
            for key, c in poly.terms:
                res.setdefault(key, []).append(c.real)
                ims.setdefault(key, []).append(c.imag)
        return OscPoly.from_map(
            {key: complex(math.fsum(res[key]), math.fsum(ims[key])) for key in res}
        )

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def as_map(self) -> dict[tuple[Fraction, int], complex]:
        return dict(self.terms)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = OscPoly.constant(other)
        if not isinstance(other, OscPoly):
            return NotImplemented
        acc = dict(self.terms)
        for key, c in other.terms:
            acc[key] = acc.get(key, 0.0) + c
        return OscPoly.from_map(acc)

    __radd__ = __add__

    def __neg__(self):
        return OscPoly(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        return self + (-other if isinstance(other, OscPoly) else -complex(other))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return OscPoly.zero()
            return OscPoly(tuple((k, c * other) for k, c in self.terms))
        if not isinstance(other, OscPoly):
            return NotImplemented
        acc: dict[tuple[Fraction, int], complex] = {}
        for (w1, p1), c1 in self.terms:
            for (w2, p2), c2 in other.terms:
                key = (w1 + w2, p1 + p2)
                acc[key] = acc.get(key, 0.0) + c1 * c2
        return OscPoly.from_map(acc)

    __rmul__ = __mul__

    def conjugate(self) -> "OscPoly":
        return OscPoly.from_map(
            {(-w, p): c.conjugate() for (w, p), c in self.terms}
        )

    def derivative(self) -> "OscPoly":
        acc: dict[tuple[Fraction, int], complex] = {}
        for (w, p), c in self.terms:
            if p > 0:
                acc[(w, p - 1)] = acc.get((w, p - 1), 0.0) + c * p
            if w != 0:
                acc[(w, p)] = acc.get((w, p), 0.0) + 1j * float(w) * c
        return OscPoly.from_map(acc)

    def frequency_shift(self, w) -> "OscPoly":
        """Multiply by exp(i w t)."""
        wf = _as_fraction(w)
        return OscPoly.from_map({(w0 + wf, p): c for (w0, p), c in self.terms})

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, t: float) -> complex:
        """Exactly rounded sum of the term values (stable and, when the term
        values cancel exactly in the reals, exactly zero)."""
        res = []
        ims = []
        for (w, p), c in self.terms:
            z = c * (t**p) * complex(math.cos(float(w) * t), math.sin(float(w) * t))
            res.append(z.real)
            ims.append(z.imag)
        return complex(math.fsum(res), math.fsum(ims))

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.zeros(ts.shape, dtype=complex)
        for (w, p), c in self.terms:
            out += c * ts**p * np.exp(1j * float(w) * ts)
        return out

    # -- serialization ------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "osc": [
                [p, w.numerator, w.denominator, c.real, c.imag]
                for (w, p), c in self.terms
            ]
        }

    @staticmethod
    def from_document(doc: dict) -> "OscPoly":
        return OscPoly.from_map(
            {
                (Fraction(num, den), int(p)): complex(re, im)
                for p, num, den, re, im in doc["osc"]
            }
        )

    def term_rows(self) -> list[tuple[int, str, float, float]]:
        """Sorted ``(power, frequency, re, im)`` rows for CSV rendering."""
        rows = []
        for (w, p), c in sorted(self.terms, key=lambda kv: (kv[0][1], kv[0][0])):
            rows.append((p, f"{w.numerator}/{w.denominator}", c.real, c.imag))
        return rows


def osc_primitive(p: OscPoly, omega) -> OscPoly:
    """Exact primitive ``t -> int_0^t exp(i W tau) p(tau) dtau``.

    Per term ``c tau^n exp(i w tau)`` the combined frequency is ``mu = w + W``;
    the resonant branch (``mu == 0`` as rationals) integrates the bare
    monomial, the oscillatory branch uses the classical closed form obtained
    by repeated integration by parts.
    """
    big_omega = _as_fraction(omega)
    acc: dict[tuple[Fraction, int], complex] = {}

    def put(key, c):
        acc[key] = acc.get(key, 0.0) + c

    for (w, n), c in p.terms:
        mu = w + big_omega
        if mu == 0:
            put((Fraction(0), n + 1), c / (n + 1))
            continue
        imu = 1j * float(mu)
        coef = 1.0 / imu
        constant_part = 0.0 + 0.0j
        for k in range(0, n + 1):
            # coefficient of t^{n-k} exp(i mu t):  (-1)^k n!/(n-k)! / (i mu)^{k+1}
            value = c * coef * _falling(n, k)
            put((mu, n - k), value)
            if k == n:
                constant_part = value
            coef *= -1.0 / imu
        # boundary value at tau = 0: the exact negation of the power-0
        # oscillatory coefficient, so the primitive vanishes at 0 to the bit
        put((Fraction(0), 0), -constant_part)
    return OscPoly.from_map(acc)


def _falling(n: int, k: int) -> float:
    out = 1.0
    for j in range(n, n - k, -1):
        out *= j
    return out


# ---------------------------------------------------------------------------
# chain integrals over the ordered simplex
# ---------------------------------------------------------------------------


@lru_cache(maxsize=100_000)
def _g_m_cached(freqs: tuple[Fraction, ...]) -> OscPoly:
    poly = OscPoly.constant(1.0)
    for w in freqs:
        poly = osc_primitive(poly, w)
    return poly


def g_m_symbolic(frequencies: Sequence) -> OscPoly:
    """The chain integral over 0 <= t_1 <= ... <= t_M <= t as a closed form."""
    return _g_m_cached(tuple(_as_fraction(w) for w in frequencies))


def g_m(frequencies: Sequence, t: float) -> complex:
    """Value of the chain integral at time ``t`` (exact closed form)."""
    return g_m_symbolic(frequencies).evaluate(t)


def g_m_oracle(frequencies: Sequence, t: float, tol: float = 1e-10) -> complex:
    """Independent numerical evaluation of the chain integral.

    Iterated spectral quadrature: each level's running integral is fitted on
    Chebyshev nodes and antidifferentiated in coefficient space; the node
    count doubles until two refinements agree within ``tol``.  Shares no code
    with the closed-form path.
    """
    freqs = [float(_as_fraction(w)) for w in frequencies]
    if len(freqs) > 5:
        raise ResourceError("oracle cost grows too fast beyond 5 nested levels")
    if not freqs:
        return 1.0 + 0.0j
    if t == 0.0:
        return 0.0 + 0.0j

    def compute(n_nodes: int) -> complex:
        # Chebyshev points on [0, t]
        s = np.cos(np.pi * np.arange(n_nodes + 1) / n_nodes)  # [-1, 1]
        x = 0.5 * t * (s + 1.0)
        running = np.ones_like(x, dtype=complex)
        for w in freqs:
            values = np.exp(1j * w * x) * running
            coeffs = _cheb.chebfit(s, values, n_nodes)
            integ = _cheb.chebint(coeffs, lbnd=-1.0, scl=0.5 * t)
            running = _cheb.chebval(s, integ)
        return complex(running[0])  # s=+1 corresponds to x=t

    n = 64
    prev = compute(n)
    for _ in range(6):
        n *= 2
        cur = compute(n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise NumericalError(
        f"spectral oracle did not reach tol={tol} (last delta {abs(cur - prev):.3e})",
        partial_value=abs(cur),
    )


# ---------------------------------------------------------------------------
# leading-behavior classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseTag:
    """Predicted leading behavior of a chain integral.

    ``power`` is the predicted leading exponent of ``t``;
    ``modulus`` is the predicted |leading coefficient| when the classification
    supplies one (``None`` means unpredicted — catch-all cases);
    ``oscillation`` is the frequency of a non-decaying oscillatory factor
    attached to the leading term: ``("circle", w)`` for ``exp(i w t)`` and
    ``("ring", w)`` for ``exp(i w t) - 1``; ``None`` for a plain constant.
    """

    name: str
    power: int
    modulus: float | None
    oscillation: tuple[str, Fraction] | None


_EVEN_CHAIN = "EvenResonantChain"
_EVEN_GENERIC = "EvenGeneric"


def classify_leading(frequencies: Sequence) -> CaseTag:
    """Match a nonzero frequency list against the leading-order case list."""
    om = [_as_fraction(w) for w in frequencies]
    if any(w == 0 for w in om):
        raise DomainError("classification expects nonzero frequencies")
    m = len(om)

    if m % 2 == 0:
        half = m // 2
        if all(om[2 * j] + om[2 * j + 1] == 0 for j in range(half)):
            mod = 1.0
            for j in range(half):
                mod /= abs(float(om[2 * j + 1]))  # entries at even positions 2j
            mod /= math.factorial(half)
            return CaseTag(_EVEN_CHAIN, half, mod, None)
        return CaseTag(_EVEN_GENERIC, (m - 1) // 2, None, None)

    # odd length; positions below are 1-based as in the classical statement
    half = (m - 1) // 2
    if m == 1:
        return CaseTag("Odd1", 0, 1.0 / abs(float(om[0])), ("ring", om[0]))

    odd_product = 1.0
    for j in range(0, half + 1):
        odd_product /= abs(float(om[2 * j]))  # entries Omega_{2j+1}, 1-based
    odd_product /= math.factorial(half)

    if all(om[2 * j + 1] == -om[2 * j] == -om[m - 1] for j in range(half)):
        mod = abs(float(om[m - 1])) ** (-(m + 1) // 2) / math.factorial(half)
        return CaseTag("Odd2", half, mod, ("ring", om[m - 1]))
    if all(om[2 * j + 1] + om[2 * j] == 0 for j in range(half)):
        return CaseTag("Odd3", half, odd_product, ("circle", om[m - 1]))
    if all(om[2 * j + 1] + om[2 * j + 2] == 0 for j in range(half)):
        return CaseTag("Odd4", half, odd_product, None)
    for j0 in range(1, half + 1):
        # 1-based triple (2 j0 - 1, 2 j0, 2 j0 + 1); pair sums close above and
        # below the pivot
        if (
            om[2 * j0 - 2] + om[2 * j0 - 1] + om[2 * j0] == 0
            and all(om[2 * j - 1] + om[2 * j] == 0 for j in range(j0 + 1, half + 1))
            and all(om[2 * j - 2] + om[2 * j - 1] == 0 for j in range(1, j0))
        ):
            return CaseTag("Odd5", half, odd_product, None)
    return CaseTag("Odd6", (m - 3) // 2, None, None)


# ---------------------------------------------------------------------------
# tree amplitudes
# ---------------------------------------------------------------------------


def f_tree_symbolic(tree, assignment) -> OscPoly:
    """Closed-form amplitude of a labelled tree.

    Sums the chain integral over all linear extensions of the node order and
    applies the (-i)^{sign exponent} prefactor.  Frequencies are the exact
    node labels (numerator over L^2).
    """
    from . import trees as _trees

    n = tree.node_count
    if n == 0:
        return OscPoly.constant(1.0)
    omega = _trees.omega_labels(tree, assignment)
    lsq = assignment.lattice_size**2
    total = OscPoly.zero()
    for extension in _trees.linear_extensions(tree):
        freqs = [Fraction(omega.values[addr], lsq) for addr in extension]
        total = total + g_m_symbolic(freqs)
    exponent = _trees.sign_exponent(tree) % 4
    return total * ((-1j) ** exponent)


def f_tree(tree, assignment, t: float) -> complex:
    """Value of the labelled-tree amplitude at time ``t``."""
    return f_tree_symbolic(tree, assignment).evaluate(t)


def f_tree_oracle(tree, assignment, t: float) -> complex:
    """Direct quadrature of the time-ordered region (independent check).

    Integrates ``prod exp(i t_l W_l)`` over the set of node times constrained
    by parenthood (each node's time below its parent's, root below ``t``)
    using nested adaptive quadrature; practical for up to 3 nodes.
    """
    from scipy.integrate import nquad

    from . import trees as _trees

    n = tree.node_count
    if n == 0:
        return 1.0 + 0.0j
    if n > 3:
        raise ResourceError("region quadrature is limited to 3 nested levels")
    omega = _trees.omega_labels(tree, assignment)
    lsq = assignment.lattice_size**2
    nodes = sorted(omega.values, key=lambda a: a.path)  # deterministic
    # innermost variable first; each node's upper limit is its parent's time
    order = sorted(nodes, key=lambda a: len(a.path), reverse=True)
    index = {addr: i for i, addr in enumerate(order)}
    freqs = [omega.values[addr] / lsq for addr in order]

    def limits_for(i):
        addr = order[i]
        if len(addr.path) == 0:
            return lambda *args: (0.0, t)
        parent = addr.parent()
        j = index[parent]

        def rng(*args):
            # args are the outer variables, ordered x_{i+1}, ..., x_{n-1}
            return (0.0, args[j - i - 1])

        return rng

    ranges = [limits_for(i) for i in range(n)]

    def integrand_real(*ts):
        phase = sum(freqs[i] * ts[i] for i in range(n))
        return math.cos(phase)

    def integrand_imag(*ts):
        phase = sum(freqs[i] * ts[i] for i in range(n))
        return math.sin(phase)

    re, _ = nquad(integrand_real, ranges)
    im, _ = nquad(integrand_imag, ranges)
    exponent = _trees.sign_exponent(tree) % 4
    return ((-1j) ** exponent) * complex(re, im)
