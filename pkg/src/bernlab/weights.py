"""Weights W: R -> (0, inf] and the weighted sup-seminorm.

A weight is lower semicontinuous, strictly positive, and finite on a
nonempty set Omega = {x : W(x) < inf}.  The reciprocal V = 1/W (0 off
Omega) is upper semicontinuous and is the quantity that actually enters
all computations: the seminorm of f is sup |f| * V over a sampling plan.

Infinity is represented by float inf, never a sentinel; arithmetic follows
1/inf = 0 and |f| * 0 = 0.

Three weight kinds:
  * formula   -- closed-form positive continuous evaluator, Omega = R
  * discrete  -- finite (possibly generator-defined) point set, W = inf off it
  * table     -- grid values, lower envelope between nodes (keeps lower
                 semicontinuity on the conservative side)
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Weight", "FormulaWeight", "DiscreteWeight", "TabulatedWeight",
    "SamplingPlan", "SeminormResult", "ContainmentReport", "EmptyGridError",
    "eval_weight", "reciprocal_v", "seminorm", "check_containment",
    "weight_from_spec", "weight_to_spec", "lacunary_points",
]


class EmptyGridError(ValueError):
    """Sampling plan does not intersect the finiteness set of the weight."""


# ----------------------------------------------------------------------------
# weight kinds

class Weight:
    """Base class; subclasses implement vectorized values()/recip_values()."""

    kind = "abstract"

    def __call__(self, x):
        return float(self.values(np.asarray([x], dtype=float))[0])

    def values(self, xs):
        raise NotImplementedError

    def recip_values(self, xs):
        """V = 1/W elementwise, 0 where W is infinite."""
        w = self.values(xs)
        v = np.zeros_like(w)
        finite = np.isfinite(w)
        v[finite] = 1.0 / w[finite]
        return v

    def finite_inf(self):
        """Infimum of W over the sampled finiteness set (for constant bounds)."""
        g = default_plan().grid(self)
        return float(np.min(self.values(g)))

    def support_points(self):
        """Explicit Omega for discrete weights, None otherwise."""
        return None


_FORMULAS = {
    # name -> (callable builder, parameter names)
    "exp_abs_pow": lambda a, s: (lambda x: s * np.exp(np.abs(x) ** a)),
    "rational_decay": lambda p, s: (lambda x: s / (1.0 + x * x) ** p),
    "const": lambda c, _s: (lambda x: np.full_like(np.asarray(x, dtype=float), c)),
}


@dataclass(frozen=True)
class FormulaWeight(Weight):
    """Continuous closed-form weight, finite everywhere.

    family: one of "exp_abs_pow" (W = scale*exp(|x|^alpha)),
    "rational_decay" (W = scale/(1+x^2)^p), "const" (W = value).
    Continuity gives lower semicontinuity by construction.
    """

    family: str
    param: float = 1.0
    scale: float = 1.0
    _fn: object = field(default=None, compare=False, repr=False)

    kind = "formula"

    def __post_init__(self):
        if self.family not in _FORMULAS:
            raise ValueError(f"unknown weight formula family: {self.family}")
        if self.scale <= 0:
            raise ValueError("weight scale must be positive")
        object.__setattr__(self, "_fn", _FORMULAS[self.family](self.param, self.scale))

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        w = self._fn(xs)
        # exp overflow shows up as inf, which is the honest extended value
        return np.asarray(w, dtype=float)


def lacunary_points(base, kmax, kmin=0):
    """Positive lacunary points base^k, k = kmin..kmax, ascending."""
    return np.array([float(base) ** k for k in range(kmin, kmax + 1)])


@dataclass(frozen=True)
class DiscreteWeight(Weight):
    """Weight finite exactly on a finite strictly increasing point set."""

    points: np.ndarray     # strictly increasing
    point_values: np.ndarray
    generator: dict | None = None   # provenance for serialization

    kind = "discrete"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.point_values, dtype=float)
        if pts.size == 0:
            raise ValueError("discrete weight needs a nonempty support")
        if pts.size != vals.size:
            raise ValueError("points/values length mismatch")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(vals <= 0) or np.any(~np.isfinite(vals)):
            raise ValueError("support values must be finite and positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "point_values", vals)

    @classmethod
    def lacunary(cls, base=2.0, kmax=8, logw_coeff=0.3, origin=None):
        """Symmetric lacunary support {+-base^k : 0 <= k <= kmax} with
        log W = logw_coeff * k^2; optionally also the origin with value
        ``origin``."""
        pos = lacunary_points(base, kmax)
        vals = np.exp(logw_coeff * np.arange(kmax + 1) ** 2)
        pts = np.concatenate([-pos[::-1], pos])
        ws = np.concatenate([vals[::-1], vals])
        if origin is not None:
            pts = np.concatenate([pts[: kmax + 1], [0.0], pts[kmax + 1:]])
            ws = np.concatenate([ws[: kmax + 1], [float(origin)], ws[kmax + 1:]])
        gen = {"type": "lacunary", "base": base, "kmax": kmax,
               "logW_coeff": logw_coeff}
        if origin is not None:
            gen["origin"] = float(origin)
        return cls(pts, ws, generator=gen)

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, np.inf)
        idx = np.searchsorted(self.points, xs)
        idx = np.clip(idx, 0, self.points.size - 1)
        for shift in (0, -1):
            j = np.clip(idx + shift, 0, self.points.size - 1)
            hit = np.isclose(xs, self.points[j], rtol=1e-12, atol=1e-12)
            out[hit] = self.point_values[j[hit]]
        return out

    def support_points(self):
        return self.points


@dataclass(frozen=True)
class TabulatedWeight(Weight):
    """Grid-sampled weight; between nodes the lower envelope of the two
    neighbors is used, off the table range the weight is infinite."""

    xs: np.ndarray
    ws: np.ndarray

    kind = "table"

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ws = np.asarray(self.ws, dtype=float)
        if xs.size < 1 or xs.size != ws.size:
            raise ValueError("table needs matching nonempty x/W arrays")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("table nodes must be strictly increasing")
        if np.any(ws <= 0):
            raise ValueError("table values must be positive")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ws", ws)

    def values(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        inside = (x >= self.xs[0]) & (x <= self.xs[-1])
        xi = x[inside]
        right = np.clip(np.searchsorted(self.xs, xi), 1, self.xs.size - 1)
        left = right - 1
        exact = np.isclose(xi, self.xs[right])
        lo = np.minimum(self.ws[left], self.ws[right])
        lo[exact] = self.ws[right][exact]
        exact0 = np.isclose(xi, self.xs[left])
        lo[exact0] = self.ws[left][exact0]
        out[inside] = lo
        return out


# ----------------------------------------------------------------------------
# sampling plans and the seminorm

@dataclass(frozen=True)
class SamplingPlan:
    """Explicit, reproducible evaluation grid: |x| <= radius with the given
    step, plus every support point of a discrete weight.  Defaults resolve
    the polynomial/Gaussian test family to six digits."""

    radius: float = 50.0
    step: float = 1e-3

    def grid(self, w):
        sup = w.support_points()
        if sup is not None:
            # discrete finiteness sets enter in full: every point can carry
            # an active constraint regardless of the continuous radius
            if sup.size == 0:
                raise EmptyGridError("discrete weight with empty support")
            return sup.copy()
        n = int(math.floor(self.radius / self.step))
        g = np.arange(-n, n + 1, dtype=float) * self.step
        if isinstance(w, TabulatedWeight):
            g = g[(g >= w.xs[0]) & (g <= w.xs[-1])]
            g = np.unique(np.concatenate([g, w.xs]))
            if g.size == 0:
                raise EmptyGridError("plan misses the table range")
        return g


def default_plan():
    return SamplingPlan()


@dataclass(frozen=True)
class SeminormResult:
    value: float
    argmax: float
    grid_size: int


def eval_weight(w, x):
    """W(x) as an extended positive real (inf off the finiteness set)."""
    return w(x)


def reciprocal_v(w, x):
    """V(x) = 1/W(x) on the finiteness set, 0 elsewhere."""
    return float(w.recip_values(np.asarray([x], dtype=float))[0])


def _eval_fn(f, xs):
    """Evaluate a function-like object (EntireFn or vectorized callable)."""
    if hasattr(f, "eval"):
        return np.asarray(f.eval(xs))
    return np.asarray(f(xs))


def seminorm(w, f, plan=None):
    """max over the sampled grid of |f(x)| V(x), with the maximizer.

    A lower bound of the true sup for continuous weights; exact for
    discrete weights once the plan radius covers the support.
    """
    plan = plan or default_plan()
    g = plan.grid(w)
    v = w.recip_values(g)
    vals = np.abs(_eval_fn(f, g)) * v
    i = int(np.argmax(vals))
    return SeminormResult(float(vals[i]), float(g[i]), g.size)


# ----------------------------------------------------------------------------
# containment diagnostics

@dataclass(frozen=True)
class ContainmentReport:
    verdicts: list          # one of "decaying", "non-decaying", "inconclusive"
    annulus_sups: list      # per family member: list of (r_outer, sup|F|V)

    def all_decaying(self):
        return all(v == "decaying" for v in self.verdicts)


def _annulus_verdict(sups):
    """Monotone-decay diagnosis of the dyadic-annulus sup sequence."""
    s = np.asarray(sups, dtype=float)
    s = s[np.isfinite(s)]
    if s.size < 4:
        return "inconclusive"
    tail = s[-3:]
    if np.all(np.diff(tail) < 0) and tail[-1] < s.max() * 0.5:
        return "decaying"
    if np.all(np.diff(tail) >= 0) and tail[-1] > max(s[0], 1e-300):
        return "non-decaying"
    return "inconclusive"


def check_containment(w, family, radius=64.0):
    """Numerical proxy for "the family lies in the weighted space": for each
    member report sup |F| V over dyadic annuli up to ``radius`` and classify
    the tail trend."""
    sup = w.support_points()
    verdicts, tables = [], []
    n_ann = max(4, int(math.ceil(math.log2(max(radius, 2.0)))) + 1)
    edges = [0.0] + [2.0 ** j for j in range(n_ann)]
    for f in family:
        sups = []
        for a, b in zip(edges[:-1], edges[1:]):
            if sup is not None:
                xs = sup[(np.abs(sup) > a) & (np.abs(sup) <= b)]
            else:
                step = max((b - a) / 256.0, 1e-6)
                pos = np.arange(a + step, b + step / 2, step)
                xs = np.concatenate([-pos[::-1], pos])
            if xs.size == 0:
                sups.append(np.nan)
                continue
            vals = np.abs(_eval_fn(f, xs)) * w.recip_values(xs)
            sups.append(float(np.max(vals)))
        verdicts.append(_annulus_verdict([s for s in sups if not np.isnan(s)]))
        tables.append(list(zip(edges[1:], sups)))
    return ContainmentReport(verdicts, tables)


# ----------------------------------------------------------------------------
# JSON spec mapping

def weight_from_spec(spec):
    """Build a weight from its JSON-style dict spec.

    {"kind":"formula","formula":{"family":"exp_abs_pow","alpha":2.0,"scale":1.0}}
    {"kind":"discrete","points":[[x,W],...]}
    {"kind":"discrete","generator":{"type":"lacunary","base":2,"kmax":8,
                                    "logW_coeff":0.3,"origin":1.0}}
    {"kind":"table","points":[[x,W],...]}
    """
    kind = spec.get("kind")
    if kind == "formula":
        f = spec["formula"]
        fam = f["family"]
        if fam == "exp_abs_pow":
            return FormulaWeight(fam, float(f["alpha"]), float(f.get("scale", 1.0)))
        if fam == "rational_decay":
            return FormulaWeight(fam, float(f.get("p", 1.0)), float(f.get("scale", 1.0)))
        if fam == "const":
            return FormulaWeight(fam, float(f["value"]))
        raise ValueError(f"unknown formula family {fam!r}")
    if kind == "discrete":
        if "generator" in spec:
            g = spec["generator"]
            if g.get("type") != "lacunary":
                raise ValueError(f"unknown generator type {g.get('type')!r}")
            return DiscreteWeight.lacunary(
                base=float(g.get("base", 2.0)), kmax=int(g["kmax"]),
                logw_coeff=float(g.get("logW_coeff", 0.3)),
                origin=g.get("origin"))
        pts = np.asarray(spec["points"], dtype=float)
        return DiscreteWeight(pts[:, 0], pts[:, 1])
    if kind == "table":
        pts = np.asarray(spec["points"], dtype=float)
        return TabulatedWeight(pts[:, 0], pts[:, 1])
    raise ValueError(f"unknown weight kind {kind!r}")


def weight_to_spec(w):
    if isinstance(w, FormulaWeight):
        f = {"family": w.family}
        if w.family == "exp_abs_pow":
            f["alpha"] = w.param
            f["scale"] = w.scale
        elif w.family == "rational_decay":
            f["p"] = w.param
            f["scale"] = w.scale
        else:
            f["value"] = w.param
        return {"kind": "formula", "formula": f}
    if isinstance(w, DiscreteWeight):
        if w.generator is not None:
            return {"kind": "discrete", "generator": dict(w.generator)}
        return {"kind": "discrete",
                "points": [[float(x), float(v)]
                           for x, v in zip(w.points, w.point_values)]}
    if isinstance(w, TabulatedWeight):
        return {"kind": "table",
                "points": [[float(x), float(v)] for x, v in zip(w.xs, w.ws)]}
    raise TypeError(f"cannot serialize weight of type {type(w)!r}")
