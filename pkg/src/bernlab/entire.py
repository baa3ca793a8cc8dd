"""Entire functions and the algebraic operations the laboratory needs.

Three first-class representations:

  * Polynomial    -- complex coefficients, ascending order
  * ExpSum        -- finite sums  sum_k c_k exp(i lam_k z), lam_k real
  * ZeroProduct   -- gamma * z^zp * prod (1 - z^2/a_k^2) over a real zero set
                     (explicit list, lacunary generator b^k, or an arithmetic
                     lattice d*(k+offset) evaluated with an analytic tail)

plus formal closures (linear combinations, products, quotients by a root,
exponential shifts) that stay pointwise evaluable when an operation leaves
the three closed classes.

Conventions: the conjugation symmetry is F#(z) = conj(F(conj z)); the mean
type of h is the tail growth rate of log|h(iy)|/y along the positive
imaginary axis, reported as a running max of tail slopes (a limsup, not a
least-squares fit).  All evaluators accept scalars or numpy arrays; log_abs
gives log|F(z)| without overflow for the growth diagnostics.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as hurwitz_zeta

__all__ = [
    "EntireFn", "Polynomial", "ExpSum", "ZeroProduct",
    "ListZeros", "LacunaryZeros", "LatticeZeros",
    "LinearCombo", "ProductFn", "QuotientFn", "ExpShifted", "WrappedFn",
    "MeanTypeEstimate", "GeometricSchedule",
    "sharp", "divide_zero", "diff_quotient", "derivative_at",
    "mean_type", "mean_type_ratio", "exp_shift",
    "fn_from_spec", "fn_to_spec", "sine_product", "cosine_product",
    "NotAZeroError", "TruncationBudgetError",
]


class NotAZeroError(ValueError):
    """Requested zero division at a point that is not a zero."""


class TruncationBudgetError(ArithmeticError):
    """Truncated evaluation cannot reach the requested tolerance."""


def _as_z(z):
    arr = np.asarray(z, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _ret(vals, scalar):
    return complex(vals[0]) if scalar else vals


def _ret_real(vals, scalar):
    return float(vals[0]) if scalar else vals


# ----------------------------------------------------------------------------
# base class

class EntireFn:
    """Common interface: eval, log_eval (complex log, robust), sharp."""

    type_bound = 0.0

    def eval(self, z):
        zz, scalar = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _ret(np.exp(self.log_eval(zz)), scalar)

    def log_eval(self, z):
        """Complex log of F(z); real part is log|F|, -inf at zeros.
        The imaginary part is a phase, not a continuous branch."""
        raise NotImplementedError

    def log_abs(self, z):
        zz, scalar = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            la = np.real(self.log_eval(zz))
        return _ret_real(la, scalar)

    def sharp(self):
        raise NotImplementedError

    def taylor(self, w, n):
        """First n Taylor coefficients at w (c_0..c_{n-1}); None if the
        representation has no convenient closed form."""
        return None

    def derivative(self, x):
        co = self.taylor(complex(x), 2)
        if co is not None and len(co) > 1:
            return complex(co[1])
        return _numeric_derivative(self, x)


def _numeric_derivative(f, x, h=1e-5):
    """Richardson-extrapolated central difference (closure fallback)."""
    x = complex(x)
    d1 = (f.eval(x + h) - f.eval(x - h)) / (2 * h)
    d2 = (f.eval(x + h / 2) - f.eval(x - h / 2)) / h
    return complex((4 * d2 - d1) / 3)


# ----------------------------------------------------------------------------
# polynomials

class Polynomial(EntireFn):
    """Complex polynomial, coefficients ascending (c0 + c1 z + ...)."""

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        nz = np.nonzero(np.abs(c) > 0)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        self.coeffs = c

    type_bound = 0.0

    @property
    def degree(self):
        return self.coeffs.size - 1

    def is_zero(self):
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def eval(self, z):
        zz, scalar = _as_z(z)
        return _ret(np.polynomial.polynomial.polyval(zz, self.coeffs), scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        out = np.empty(zz.shape, dtype=complex)
        big = np.abs(zz) > 1e60
        small = ~big
        with np.errstate(divide="ignore", invalid="ignore"):
            out[small] = np.log(
                np.polynomial.polynomial.polyval(zz[small], self.coeffs))
            if np.any(big):
                # factor the leading term so the log stays finite
                zb = zz[big]
                n = self.degree
                bracket = np.zeros(zb.shape, dtype=complex)
                for k in range(n + 1):
                    bracket += self.coeffs[k] * zb ** (k - n)
                out[big] = n * np.log(zb) + np.log(bracket)
        return out

    def sharp(self):
        return Polynomial(np.conj(self.coeffs))

    def taylor(self, w, n):
        c = self.coeffs.copy()
        out = np.zeros(n, dtype=complex)
        for m in range(n):
            if c.size == 0:
                break
            rem, c = _horner_divide(c, w)
            out[m] = rem
        return out

    def derivative(self, x):
        if self.coeffs.size == 1:
            return 0j
        dc = self.coeffs[1:] * np.arange(1, self.coeffs.size)
        return complex(np.polynomial.polynomial.polyval(complex(x), dc))

    def derivative_poly(self):
        if self.coeffs.size == 1:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def __eq__(self, other):
        return isinstance(other, Polynomial) and \
            self.coeffs.shape == other.coeffs.shape and \
            bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"


def _horner_divide(coeffs, w):
    """Divide by (z - w): returns (remainder, quotient coeffs ascending)."""
    n = coeffs.size
    if n == 1:
        return complex(coeffs[0]), np.zeros(0, dtype=complex)
    q = np.zeros(n - 1, dtype=complex)
    acc = coeffs[-1]
    for k in range(n - 2, -1, -1):
        q[k] = acc
        acc = coeffs[k] + acc * w
    return complex(acc), q


# ----------------------------------------------------------------------------
# exponential sums

class ExpSum(EntireFn):
    """F(z) = sum_k c_k exp(i lam_k z) with distinct real frequencies."""

    def __init__(self, freqs, coeffs):
        f = np.atleast_1d(np.asarray(freqs, dtype=float))
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if f.size != c.size or f.size == 0:
            raise ValueError("frequency/coefficient mismatch")
        order = np.argsort(f)
        f, c = f[order], c[order]
        if np.any(np.diff(f) == 0):
            raise ValueError("frequencies must be pairwise distinct")
        self.freqs, self.coeffs = f, c

    @property
    def type_bound(self):
        return float(np.max(np.abs(self.freqs)))

    def eval(self, z):
        zz, scalar = _as_z(z)
        ph = np.exp(1j * np.outer(zz, self.freqs))
        return _ret(ph @ self.coeffs, scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            lt = np.log(self.coeffs.astype(complex))[None, :] \
                + 1j * np.outer(zz, self.freqs)
            m = np.max(np.real(lt), axis=1)
            s = np.sum(np.exp(lt - m[:, None]), axis=1)
            return m + np.log(s)

    def sharp(self):
        # conj(F(conj z)) maps c e^{i lam z} to conj(c) e^{-i lam z}
        return ExpSum(-self.freqs, np.conj(self.coeffs))

    def taylor(self, w, n):
        w = complex(w)
        base = self.coeffs * np.exp(1j * self.freqs * w)
        out = np.zeros(n, dtype=complex)
        fac = 1.0
        for m in range(n):
            if m > 0:
                fac *= m
            out[m] = np.sum(base * (1j * self.freqs) ** m) / fac
        return out

    def derivative(self, x):
        x = complex(x)
        return complex(np.sum(self.coeffs * (1j * self.freqs)
                              * np.exp(1j * self.freqs * x)))

    def __eq__(self, other):
        return isinstance(other, ExpSum) and \
            self.freqs.shape == other.freqs.shape and \
            bool(np.all(self.freqs == other.freqs)) and \
            bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash((self.freqs.tobytes(), self.coeffs.tobytes()))

    def __repr__(self):
        return f"ExpSum(freqs={self.freqs.tolist()}, coeffs={self.coeffs.tolist()})"


# ----------------------------------------------------------------------------
# real zero sets

@dataclass(frozen=True)
class ListZeros:
    """Explicit zeros: symmetric pairs +-a_k from positive points, or an
    arbitrary strictly increasing real list (factors 1 - z/a_k)."""

    points: np.ndarray
    symmetric: bool = True

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=float))
        if p.size and np.any(np.diff(p) <= 0):
            raise ValueError("zero list must be strictly increasing")
        if self.symmetric and p.size and p[0] <= 0:
            raise ValueError("symmetric zero list holds positive points")
        if not self.symmetric and p.size and np.any(p == 0):
            raise ValueError("origin zero is carried by the z factor")
        object.__setattr__(self, "points", p)

    kind = "list"

    def count(self):
        return self.points.size

    def positive(self, n):
        return self.points[:n]


@dataclass(frozen=True)
class LacunaryZeros:
    """Positive zeros base^k for k = kmin..kmax (geometric, symmetric).

    kmax is capped at 40: derivative magnitudes grow like
    exp(log(base)*k^2) and leave double range quickly, so downstream code
    works with log magnitudes."""

    base: float = 2.0
    kmin: int = 0
    kmax: int = 8

    def __post_init__(self):
        if self.base <= 1:
            raise ValueError("lacunary base must exceed 1")
        if self.kmax > 40:
            raise ValueError("lacunary generator capped at kmax = 40")
        if self.kmin > self.kmax:
            raise ValueError("empty lacunary range")

    kind = "lacunary"

    def count(self):
        return self.kmax - self.kmin + 1

    def positive(self, n):
        ks = np.arange(self.kmin, self.kmax + 1)[:n]
        return self.base ** ks.astype(float)


@dataclass(frozen=True)
class LatticeZeros:
    """Arithmetic lattice: positive zeros spacing*(k+offset), k >= 1 for
    offset 0 and k >= 0 for offset 1/2, mirrored symmetrically.
    Conceptually infinite; evaluation truncates and corrects with a
    Hurwitz-zeta tail."""

    spacing: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.offset not in (0.0, 0.5):
            raise ValueError("offset must be 0 or 1/2")

    kind = "lattice"

    def count(self):
        return None

    def positive(self, n):
        k0 = 1 if self.offset == 0.0 else 0
        ks = np.arange(k0, k0 + n, dtype=float)
        return self.spacing * (ks + self.offset)


# ----------------------------------------------------------------------------
# zero products

class ZeroProduct(EntireFn):
    """gamma * z^zp * prod_k (1 - z^2/a_k^2) over a symmetric real zero set
    (or prod (1 - z/a_k) for an explicit asymmetric list).

    Factors are accumulated as complex logs, ordered by |a_k| ascending;
    lacunary generators span many magnitudes, so raw products are never
    formed.  ``trunc`` caps the number of positive-zero factors; skipped
    factors are reported as a bound and, for lattices, replaced by an
    analytic tail."""

    def __init__(self, zeros, gamma=1.0, z_factor=False, trunc=10000):
        if not isinstance(zeros, (ListZeros, LacunaryZeros, LatticeZeros)):
            raise TypeError("zeros must be a zero-set descriptor")
        self.zeros = zeros
        self.gamma = complex(gamma)
        self.z_factor = bool(z_factor)
        self.trunc = int(trunc)
        if self.gamma == 0:
            raise ValueError("gamma must be nonzero")

    @property
    def type_bound(self):
        if isinstance(self.zeros, LatticeZeros):
            return math.pi / self.zeros.spacing
        return 0.0

    @property
    def is_lattice(self):
        return isinstance(self.zeros, LatticeZeros)

    @property
    def is_asymmetric(self):
        return isinstance(self.zeros, ListZeros) and not self.zeros.symmetric

    # -- zero bookkeeping -----------------------------------------------------

    def n_factors(self):
        c = self.zeros.count()
        return self.trunc if c is None else min(self.trunc, c)

    def positive_zeros(self, n=None):
        return self.zeros.positive(self.n_factors() if n is None else n)

    def zeros_ascending(self, n_pos=None):
        """Represented zeros in ascending order (+-a_k, plus 0 with the z
        factor); asymmetric lists are returned as stored."""
        if self.is_asymmetric:
            pts = self.zeros.points
            if self.z_factor:
                pts = np.sort(np.concatenate([pts, [0.0]]))
            return pts
        pos = self.positive_zeros(n_pos)
        mid = [0.0] if self.z_factor else []
        return np.concatenate([-pos[::-1], mid, pos])

    def zero_index(self, x, tol=1e-9):
        """Locate x in the zero set: ("origin", 0), ("asym", j), or
        ("sym", j, sign) with j the positive-zero index; None otherwise."""
        x = float(x)
        if self.z_factor and abs(x) <= tol:
            return ("origin", 0)
        if self.is_asymmetric:
            pts = self.zeros.points
            j = int(np.argmin(np.abs(pts - x)))
            if abs(pts[j] - x) <= tol * (1 + abs(x)):
                return ("asym", j)
            return None
        if self.is_lattice:
            d, off = self.zeros.spacing, self.zeros.offset
            k0 = 1 if off == 0.0 else 0
            m = int(round(abs(x) / d - off))
            if m >= k0 and abs(abs(x) - d * (m + off)) <= tol * (1 + abs(x)):
                return ("sym", m - k0, 1 if x > 0 else -1)
            return None
        pos = self.positive_zeros()
        j = int(np.argmin(np.abs(pos - abs(x))))
        if abs(pos[j] - abs(x)) <= tol * (1 + abs(x)):
            return ("sym", j, 1 if x > 0 else -1)
        return None

    # -- evaluation -------------------------------------------------------------

    def _tail_log(self, u2, n_used):
        """log prod_{k>N} (1 - u^2/(k+off)^2): power series in u^2 with
        Hurwitz-zeta coefficients, valid for |u| < first skipped zero."""
        off = self.zeros.offset
        q = n_used + (1 if off == 0.0 else 0) + off
        out = np.zeros(u2.shape, dtype=complex)
        term = np.ones_like(out)
        logq = math.log(q)
        for j in range(1, 120):
            term = term * (u2 / (q * q))
            zv = hurwitz_zeta(2 * j, q)
            if not np.isfinite(zv) or zv <= 0.0:
                break   # series converged long before zeta underflows
            scaled = math.exp(2 * j * logq + math.log(zv))
            contrib = -(term / j) * scaled
            out = out + contrib
            if np.all(np.abs(contrib) <= 1e-18 * (1.0 + np.abs(out))):
                break
        return out

    def _closed_log(self, zz):
        """Closed lattice product identity (sine/cosine form), used when
        |z| is too large for the truncated product + tail."""
        d, off = self.zeros.spacing, self.zeros.offset
        u = zz / d
        with np.errstate(divide="ignore", invalid="ignore"):
            if off == 0.0:
                return _log_sin(np.pi * u) - np.log(np.pi * u)
            return _log_cos(np.pi * u)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        out = np.full(zz.shape, np.log(self.gamma), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.z_factor:
                out = out + np.log(zz)
            if self.is_asymmetric:
                for a in self.zeros.points:
                    out = out + np.log(1 - zz / a)
                return out
            n = self.n_factors()
            if self.is_lattice:
                d = self.zeros.spacing
                u = zz / d
                far = np.abs(u) > 0.25 * n
                near = ~far
                if np.any(near):
                    a = self.positive_zeros(n) / d
                    u2 = u[near] * u[near]
                    s = np.zeros(u2.shape, dtype=complex)
                    for lo in range(0, n, 4096):
                        blk = a[lo:lo + 4096]
                        s = s + np.sum(
                            np.log(1 - u2[:, None] / blk[None, :] ** 2), axis=1)
                    s = s + self._tail_log(u2, n)
                    out[near] = out[near] + s
                if np.any(far):
                    out[far] = out[far] + self._closed_log(zz[far])
                return out
            a = self.positive_zeros(n)
            z2 = zz * zz
            for lo in range(0, n, 4096):
                blk = a[lo:lo + 4096]
                out = out + np.sum(np.log(1 - z2[:, None] / blk[None, :] ** 2),
                                   axis=1)
        return out

    def eval_with_bound(self, z, tol=None):
        """(value, relative truncation bound).  Zero bound when every
        represented factor enters; lattices carry only float-level slack
        since the tail is analytic."""
        zz, scalar = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = np.exp(self.log_eval(zz))
        n = self.n_factors()
        cnt = self.zeros.count()
        if self.is_lattice:
            bound = float(n) * 2e-16 + 1e-14
        elif cnt is not None and n < cnt:
            skipped = self.zeros.positive(cnt)[n:]
            m = float(np.max(np.abs(zz)))
            bound = float(np.expm1(np.sum(np.log1p(m * m / skipped ** 2))))
        else:
            bound = float(cnt or 1) * 2e-16
        if tol is not None and bound > tol:
            raise TruncationBudgetError(
                f"truncation bound {bound:.3g} exceeds requested {tol:.3g}")
        return _ret(val, scalar), bound

    def sharp(self):
        if self.gamma.imag != 0:
            return ZeroProduct(self.zeros, np.conj(self.gamma),
                               self.z_factor, self.trunc)
        return self   # real zeros, real gamma: fixed point of #

    # -- derivatives ---------------------------------------------------------------

    def derivative_log(self, x, tol=1e-9):
        """(log|B'(x)|, unit phase, relative bound) at a represented zero.

        Magnitudes can exceed double range (lacunary sets), hence the log
        form.  Lattice values use the closed derivative of the product
        identity: the skipped-factor product collapses through factorials
        against the analytic tail."""
        info = self.zero_index(x, tol)
        if info is None:
            raise NotAZeroError(f"{x} is not a represented zero")
        g_log = np.log(self.gamma)
        if info[0] == "origin":
            # only the z factor vanishes: B'(0) = gamma * prod(1) = gamma
            lg = g_log
            if self.is_lattice:
                return float(lg.real), _unit_phase(lg), 1e-15
            return float(lg.real), _unit_phase(lg), 0.0
        if info[0] == "asym":
            j = info[1]
            a = self.zeros.points[j]
            rest = np.delete(self.zeros.points, j)
            lg = g_log + np.log(complex(-1.0 / a))
            if self.z_factor:
                lg = lg + np.log(complex(a))
            lg = lg + np.sum(np.log((1 - a / rest).astype(complex)))
            return float(lg.real), _unit_phase(lg), 0.0
        if self.is_lattice:
            return self._lattice_derivative(info[1], info[2], g_log)
        # finite symmetric set, zero at x = s*a_j:
        # B'(x) = gamma (s a)^zp * (-2s/a) * prod_{k!=j} (1 - a^2/a_k^2)
        j, s = info[1], info[2]
        pos = self.positive_zeros()
        a = pos[j]
        rest = np.delete(pos, j)
        lg = g_log + np.log(complex(-2.0 * s / a))
        if self.z_factor:
            lg = lg + np.log(complex(s * a))
        lg = lg + np.sum(np.log((1 - a * a / rest ** 2).astype(complex)))
        bound = 0.0
        cnt = self.zeros.count()
        if cnt is not None and self.n_factors() < cnt:
            skip = self.zeros.positive(cnt)[self.n_factors():]
            bound = float(np.expm1(np.sum(np.log1p(a * a / skip ** 2))))
        return float(lg.real), _unit_phase(lg), bound

    def _lattice_derivative(self, j, s, g_log):
        """Closed derivative at the j-th positive lattice zero (sign s).

        offset 0:  B = gamma z^zp sin(pi u)/(pi u)^ (u=z/d), and at x = s*d*m
                   B'(x) = gamma (-1)^m x^{zp-1}
        offset1/2: B = gamma z^zp cos(pi u), and at x = s*d*(m+1/2)
                   B'(x) = -gamma (pi/d) s (-1)^m x^{zp}
        """
        d, off = self.zeros.spacing, self.zeros.offset
        if off == 0.0:
            m = j + 1
            x = s * d * m
            sign = (-1.0) ** m
            if self.z_factor:
                lg = g_log
            else:
                lg = g_log - math.log(abs(x))
                sign *= math.copysign(1.0, x)
        else:
            m = j
            x = s * d * (m + 0.5)
            sign = -s * (-1.0) ** m
            lg = g_log + math.log(math.pi / d)
            if self.z_factor:
                lg = lg + math.log(abs(x))
                sign *= math.copysign(1.0, x)
        ph = _unit_phase(lg) * sign
        return float(lg.real), ph, 1e-15

    def derivative(self, x):
        x = complex(x)
        if x.imag == 0:
            info = self.zero_index(x.real)
            if info is not None:
                la, ph, _ = self.derivative_log(x.real)
                mag = math.exp(la) if la < 700 else math.inf
                return ph * mag
        return complex(self.eval(x) * self._log_derivative(x))

    def _log_derivative(self, z):
        """B'/B off the zero set."""
        s = 0j
        if self.z_factor:
            s += 1.0 / z
        if self.is_asymmetric:
            return s + complex(np.sum(1.0 / (z - self.zeros.points)))
        a = self.positive_zeros()
        s += complex(np.sum(-2.0 * z / (a * a - z * z)))
        if self.is_lattice:
            d, off = self.zeros.spacing, self.zeros.offset
            n = self.n_factors()
            q = n + (1 if off == 0.0 else 0) + off
            u = z / d
            if abs(u) < 0.5 * q:
                t = 0j
                r = u / q
                logq = math.log(q)
                for jj in range(1, 80):
                    zv = hurwitz_zeta(2 * jj, q)
                    if not np.isfinite(zv) or zv <= 0.0:
                        break
                    scaled = math.exp(2 * jj * logq + math.log(zv))
                    contrib = -(2.0 / (d * q)) * r ** (2 * jj - 1) * scaled
                    t += contrib
                    if abs(contrib) <= 1e-18 * (1 + abs(t)):
                        break
                s += t
        return s

    def __repr__(self):
        return (f"ZeroProduct({self.zeros!r}, gamma={self.gamma}, "
                f"z_factor={self.z_factor}, trunc={self.trunc})")


def _unit_phase(log_complex):
    """Unit phase from a complex log; snaps to +-1 for real data."""
    ph = np.exp(1j * float(np.imag(log_complex)))
    if abs(ph.imag) < 1e-12:
        return float(np.sign(ph.real))
    return complex(ph)


def _log_sin(w):
    """log sin(w), stable for large |Im w| (phase modulo 2 pi)."""
    w = np.asarray(w, dtype=complex)
    s = np.where(np.imag(w) >= 0, 1.0, -1.0)
    # factor the dominant exponential e^{-i s w}
    with np.errstate(divide="ignore", invalid="ignore"):
        return -1j * s * w + np.log(s * (np.exp(2j * s * w) - 1.0) / 2j)


def _log_cos(w):
    w = np.asarray(w, dtype=complex)
    s = np.where(np.imag(w) >= 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -1j * s * w + np.log((np.exp(2j * s * w) + 1.0) / 2.0)


# ----------------------------------------------------------------------------
# closures

class LinearCombo(EntireFn):
    """sum of coef * member; keeps Taylor data when every member has it."""

    def __init__(self, terms):
        self.terms = [(complex(c), f) for c, f in terms]

    @property
    def type_bound(self):
        return max((f.type_bound for _, f in self.terms), default=0.0)

    def eval(self, z):
        zz, scalar = _as_z(z)
        out = np.zeros(zz.shape, dtype=complex)
        for c, f in self.terms:
            out = out + c * f.eval(zz)
        return _ret(out, scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = [np.log(c) + f.log_eval(zz)
                    for c, f in self.terms if c != 0]
            if not logs:
                return np.full(zz.shape, -np.inf, dtype=complex)
            m = np.max(np.real(np.stack(logs)), axis=0)
            m = np.where(np.isfinite(m), m, 0.0)
            s = np.zeros(zz.shape, dtype=complex)
            for l in logs:
                s = s + np.exp(l - m)
            return m + np.log(s)

    def sharp(self):
        return LinearCombo([(np.conj(c), f.sharp()) for c, f in self.terms])

    def taylor(self, w, n):
        out = np.zeros(n, dtype=complex)
        for c, f in self.terms:
            t = f.taylor(w, n)
            if t is None:
                return None
            out = out + c * np.asarray(t)
        return out

    def derivative(self, x):
        return complex(sum(c * f.derivative(x) for c, f in self.terms))


class ProductFn(EntireFn):
    """Pointwise product of entire factors."""

    def __init__(self, factors):
        self.factors = list(factors)

    @property
    def type_bound(self):
        return sum(f.type_bound for f in self.factors)

    def eval(self, z):
        zz, scalar = _as_z(z)
        out = np.ones(zz.shape, dtype=complex)
        for f in self.factors:
            out = out * f.eval(zz)
        return _ret(out, scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        out = np.zeros(zz.shape, dtype=complex)
        for f in self.factors:
            out = out + f.log_eval(zz)
        return out

    def sharp(self):
        return ProductFn([f.sharp() for f in self.factors])

    def derivative(self, x):
        x = complex(x)
        vals = [f.eval(x) for f in self.factors]
        tot = 0j
        for i, f in enumerate(self.factors):
            rest = 1.0 + 0j
            for jj, v in enumerate(vals):
                if jj != i:
                    rest *= v
            tot += f.derivative(x) * rest
        return complex(tot)


class QuotientFn(EntireFn):
    """numerator / (z - w) with numerator(w) = 0: an entire function.

    Near w the value comes from the numerator's Taylor series when
    available; at w exactly it is numerator'(w)."""

    _NEAR = 1e-3

    def __init__(self, numerator, w):
        self.numerator = numerator
        self.w = complex(w)

    @property
    def type_bound(self):
        return self.numerator.type_bound

    def eval(self, z):
        zz, scalar = _as_z(z)
        out = np.empty(zz.shape, dtype=complex)
        d = zz - self.w
        near = np.abs(d) < self._NEAR
        far = ~near
        if np.any(far):
            out[far] = self.numerator.eval(zz[far]) / d[far]
        if np.any(near):
            co = self.numerator.taylor(self.w, 18)
            if co is not None:
                out[near] = np.polynomial.polynomial.polyval(
                    d[near], np.asarray(co)[1:])
            else:
                hit = np.abs(d) < 1e-13
                mid = near & ~hit
                out[mid] = self.numerator.eval(zz[mid]) / d[mid]
                if np.any(hit):
                    out[hit] = self.numerator.derivative(self.w)
        return _ret(out, scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.numerator.log_eval(zz) - np.log(zz - self.w)
            near = np.abs(zz - self.w) < self._NEAR
            if np.any(near):
                out[near] = np.log(np.asarray(self.eval(zz[near]),
                                              dtype=complex))
        return out

    def sharp(self):
        return QuotientFn(self.numerator.sharp(), np.conj(self.w))

    def taylor(self, w0, n):
        w0 = complex(w0)
        if abs(w0 - self.w) < 1e-12:
            co = self.numerator.taylor(self.w, n + 1)
            return None if co is None else np.asarray(co)[1:]
        co = self.numerator.taylor(w0, n)
        if co is None:
            return None
        # series division: N(u) = Q(u) (u + a), a = w0 - w
        a = w0 - self.w
        q = np.zeros(n, dtype=complex)
        prev = 0j
        for m in range(n):
            q[m] = (co[m] - prev) / a
            prev = q[m]
        return q

    def derivative(self, x):
        x = complex(x)
        if abs(x - self.w) < self._NEAR:
            co = self.taylor(self.w, 3)
            if co is not None:
                u = x - self.w
                return complex(co[1] + 2 * co[2] * u)
            return _numeric_derivative(self, x)
        nv = self.numerator.eval(x)
        nd = self.numerator.derivative(x)
        return complex(nd / (x - self.w) - nv / (x - self.w) ** 2)


class ExpShifted(EntireFn):
    """e^{i alpha z} * F(z): the exponential shift as a formal product."""

    def __init__(self, base, alpha):
        if isinstance(base, ExpShifted):
            alpha = alpha + base.alpha
            base = base.base
        self.base = base
        self.alpha = float(alpha)

    @property
    def type_bound(self):
        return self.base.type_bound + abs(self.alpha)

    def eval(self, z):
        zz, scalar = _as_z(z)
        return _ret(np.exp(1j * self.alpha * zz) * self.base.eval(zz), scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        return 1j * self.alpha * zz + self.base.log_eval(zz)

    def sharp(self):
        # conj(e^{i a conj z} F(conj z)) = e^{-i a z} F#(z)... with real a the
        # frequency flips exactly like an ExpSum term
        return ExpShifted(self.base.sharp(), -self.alpha)

    def taylor(self, w, n):
        tb = self.base.taylor(w, n)
        if tb is None:
            return None
        ia = 1j * self.alpha
        ex = np.zeros(n, dtype=complex)
        fac = 1.0
        for m in range(n):
            if m > 0:
                fac *= m
            ex[m] = ia ** m / fac
        return np.convolve(ex, np.asarray(tb))[:n] * np.exp(ia * complex(w))

    def derivative(self, x):
        x = complex(x)
        e = np.exp(1j * self.alpha * x)
        return complex(e * (1j * self.alpha * self.base.eval(x)
                            + self.base.derivative(x)))


class WrappedFn(EntireFn):
    """Opaque evaluable closure (vectorized callable); growth metadata only."""

    def __init__(self, fn, type_bound=math.nan, label="closure", sharp_fn=None):
        self._fn = fn
        self._tb = type_bound
        self.label = label
        self._sharp = sharp_fn

    @property
    def type_bound(self):
        return self._tb

    def eval(self, z):
        zz, scalar = _as_z(z)
        return _ret(np.asarray(self._fn(zz), dtype=complex), scalar)

    def log_eval(self, z):
        zz, _ = _as_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.asarray(self._fn(zz), dtype=complex))

    def sharp(self):
        if self._sharp is not None:
            return self._sharp
        fn = self._fn
        return WrappedFn(lambda z: np.conj(fn(np.conj(z))), self._tb,
                         label=f"{self.label}#")

    def derivative(self, x):
        return _numeric_derivative(self, x)


# ----------------------------------------------------------------------------
# operations

def sharp(f):
    """F#(z) = conj(F(conj z)), in the same representation class."""
    return f.sharp()


def local_scale(f, w, radius=1.0, n=16):
    """max |F| on a small circle around w (tolerance reference)."""
    ang = np.exp(2j * np.pi * np.arange(n) / n)
    return float(np.max(np.abs(f.eval(w + radius * ang))))


def divide_zero(f, w, rtol=1e-9):
    """F(z)/(z-w) for a zero w of F.

    Polynomials divide synthetically (remainder checked against the local
    scale: synthetic division amplifies remainder noise); zero products
    accept listed zeros structurally; other representations return an
    evaluable quotient closure after the same zero check."""
    w = complex(w)
    if isinstance(f, Polynomial):
        rem, q = _horner_divide(f.coeffs, w)
        scale = rtol * (1.0 + local_scale(f, w))
        if abs(rem) > scale:
            raise NotAZeroError(f"|F(w)| = {abs(rem):.3g} exceeds {scale:.3g}")
        return Polynomial(q) if q.size else Polynomial([0.0])
    if isinstance(f, ZeroProduct):
        if w.imag != 0 or f.zero_index(w.real) is None:
            if abs(f.eval(w)) > rtol * (1.0 + local_scale(f, w)):
                raise NotAZeroError(f"{w} is not a zero of the product")
        return QuotientFn(f, w)
    if abs(f.eval(w)) > rtol * (1.0 + local_scale(f, w)):
        raise NotAZeroError(f"|F({w})| too large for zero division")
    return QuotientFn(f, w)


def diff_quotient(w, f, g):
    """(F(z)G(w) - G(z)F(w))/(z - w), entire in z; equals
    F'(w)G(w) - G'(w)F(w) at z = w."""
    w = complex(w)
    fw, gw = complex(f.eval(w)), complex(g.eval(w))
    if isinstance(f, Polynomial) and isinstance(g, Polynomial):
        num = np.zeros(max(f.coeffs.size, g.coeffs.size), dtype=complex)
        num[: f.coeffs.size] += gw * f.coeffs
        num[: g.coeffs.size] -= fw * g.coeffs
        _, q = _horner_divide(num, w)   # remainder cancels identically
        return Polynomial(q) if q.size else Polynomial([0.0])
    return QuotientFn(LinearCombo([(gw, f), (-fw, g)]), w)


def derivative_at(f, x):
    """F'(x) via the representation's closed form (finite differences only
    for opaque closures)."""
    return f.derivative(x)


# ----------------------------------------------------------------------------
# mean type

@dataclass(frozen=True)
class GeometricSchedule:
    """Geometric ray samples y = y0 * factor^j, j = 0..count-1."""

    y0: float = 1.0
    factor: float = 2.0
    count: int = 21

    def ys(self):
        return self.y0 * self.factor ** np.arange(self.count, dtype=float)


@dataclass(frozen=True)
class MeanTypeEstimate:
    slope: float
    samples: list                  # (y, log|h(iy)|/y), y ascending
    confidence: str                # stable | oscillatory | diverging

    TAIL = 5


def _log_abs_on_ray(h, ys, direction=1.0):
    if isinstance(h, EntireFn):
        return np.asarray(h.log_abs(1j * direction * ys), dtype=float)
    vals = np.asarray(h(1j * direction * ys), dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals))


def _classify(s):
    tail = s[-MeanTypeEstimate.TAIL:]
    slope = float(np.max(tail))
    spread = float(np.max(tail) - np.min(tail))
    if spread <= 0.02 * max(1.0, abs(slope)):
        return slope, "stable"
    diffs = np.diff(s[-MeanTypeEstimate.TAIL - 2:])
    if np.all(diffs > 0) and tail[-1] > 2.0 * max(1.0, abs(s[0])):
        return slope, "diverging"
    return slope, "oscillatory"


def mean_type(h, schedule=None, direction=1.0):
    """Tail growth rate of log|h(iy)|/y with a stability diagnosis.

    h may be an EntireFn (evaluated in log space, no overflow) or a
    vectorized callable.  Zero hits on the ray are retried at a perturbed
    height.  The slope is the running max over the tail samples: the
    quantity is a limsup and |h| may oscillate."""
    schedule = schedule or GeometricSchedule()
    ys = schedule.ys()
    la = _log_abs_on_ray(h, ys, direction)
    bad = ~np.isfinite(la)
    if np.any(bad):
        ys = ys.copy()
        ys[bad] *= math.sqrt(schedule.factor)
        la[bad] = _log_abs_on_ray(h, ys[bad], direction)
        if np.any(~np.isfinite(la)):
            raise ArithmeticError("h vanishes along the sampled ray")
    s = la / ys
    slope, conf = _classify(s)
    return MeanTypeEstimate(slope, list(zip(ys.tolist(), s.tolist())), conf)


def mean_type_ratio(f, b, schedule=None, direction=1.0, extra_log_y=0.0):
    """Mean type of F/B from log|F(iy)| - log|B(iy)| (+ c log y), avoiding
    overflow of either factor."""
    schedule = schedule or GeometricSchedule()
    ys = schedule.ys()
    la = _log_abs_on_ray(f, ys, direction) - _log_abs_on_ray(b, ys, direction)
    if extra_log_y:
        la = la + extra_log_y * np.log(ys)
    s = la / ys
    slope, conf = _classify(s)
    return MeanTypeEstimate(slope, list(zip(ys.tolist(), s.tolist())), conf)


def exp_shift(f, alpha):
    """F(z) -> e^{i alpha z} F(z).  Exponential sums shift their
    frequencies; everything else wraps in a formal product (which unwraps
    when shifts cancel).  Mean type along +i infinity shifts by -alpha."""
    alpha = float(alpha)
    if alpha == 0.0:
        return f
    if isinstance(f, ExpSum):
        return ExpSum(f.freqs + alpha, f.coeffs)
    if isinstance(f, Polynomial) and f.degree == 0:
        return ExpSum([alpha], [f.coeffs[0]])
    return ExpShifted(f, alpha)


# ----------------------------------------------------------------------------
# canonical products and JSON specs

def sine_product(spacing=1.0, gamma=None, trunc=10000):
    """Lattice product with zeros at every multiple of ``spacing``; the
    default gamma = pi/spacing normalizes it to sin(pi z/spacing)."""
    if gamma is None:
        gamma = math.pi / spacing
    return ZeroProduct(LatticeZeros(spacing=spacing, offset=0.0),
                       gamma=gamma, z_factor=True, trunc=trunc)


def cosine_product(spacing=1.0, gamma=1.0, trunc=10000):
    """Lattice product with zeros at spacing*(k+1/2): gamma*cos(pi z/spacing)."""
    return ZeroProduct(LatticeZeros(spacing=spacing, offset=0.5),
                       gamma=gamma, z_factor=False, trunc=trunc)


def fn_from_spec(spec):
    v = spec.get("variant")
    if v == "poly":
        return Polynomial([complex(re, im) for re, im in spec["coeffs"]])
    if v == "expsum":
        t = spec["terms"]
        return ExpSum([row[0] for row in t],
                      [complex(row[1], row[2]) for row in t])
    if v == "zeroprod":
        zs = spec["zeros"]
        if "list" in zs:
            zeros = ListZeros(np.asarray(zs["list"], dtype=float),
                              symmetric=bool(zs.get("symmetric", True)))
        elif "lacunary" in zs:
            g = zs["lacunary"]
            zeros = LacunaryZeros(base=float(g.get("base", 2.0)),
                                  kmin=int(g.get("kmin", 0)),
                                  kmax=int(g["kmax"]))
        elif "lattice" in zs:
            g = zs["lattice"]
            zeros = LatticeZeros(spacing=float(g.get("spacing", 1.0)),
                                 offset=float(g.get("offset", 0.0)))
        else:
            raise ValueError("zeroprod spec needs list|lacunary|lattice zeros")
        g = spec.get("gamma", 1.0)
        gamma = complex(g[0], g[1]) if isinstance(g, (list, tuple)) else complex(g)
        return ZeroProduct(zeros, gamma=gamma,
                           z_factor=bool(spec.get("z_factor", False)),
                           trunc=int(spec.get("trunc", 10000)))
    raise ValueError(f"unknown entire-function variant {v!r}")


def fn_to_spec(f):
    if isinstance(f, Polynomial):
        return {"variant": "poly",
                "coeffs": [[float(c.real), float(c.imag)] for c in f.coeffs]}
    if isinstance(f, ExpSum):
        return {"variant": "expsum",
                "terms": [[float(l), float(c.real), float(c.imag)]
                          for l, c in zip(f.freqs, f.coeffs)]}
    if isinstance(f, ZeroProduct):
        if isinstance(f.zeros, ListZeros):
            zs = {"list": f.zeros.points.tolist(), "symmetric": f.zeros.symmetric}
        elif isinstance(f.zeros, LacunaryZeros):
            zs = {"lacunary": {"base": f.zeros.base, "kmin": f.zeros.kmin,
                               "kmax": f.zeros.kmax}}
        else:
            zs = {"lattice": {"spacing": f.zeros.spacing,
                              "offset": f.zeros.offset}}
        gamma = float(f.gamma.real) if f.gamma.imag == 0 \
            else [f.gamma.real, f.gamma.imag]
        return {"variant": "zeroprod", "zeros": zs, "gamma": gamma,
                "z_factor": f.z_factor, "trunc": f.trunc}
    raise TypeError(f"cannot serialize {type(f)!r}")
