"""Hall majorants over finite families by LP with constraint exchange.

The majorant value at a probe z is the norm of point evaluation on the
family's unit ball in the weighted sup-seminorm:

    m(z) = sup { |P(z)| : P in span(basis), |P(x)| <= W(x) on the grid }.

Modulus constraints over complex coefficients are linearized by phase cuts
Re(e^{-i phi} P(x)) <= W(x) (an outer approximation: a regular 32-gon gap
is 1/cos(pi/32)), then post-corrected by exact modulus checks inside the
exchange loop, which adds the most violated (point, phase) cut until the
relaxation value and the rescaled-feasible value meet.  The objective
|P(z)| is handled as a sweep over Re(e^{-i theta} P(z)): 64 coarse phases
on the pooled relaxation, golden-section refinement on the best arc, full
exchange at the winner.  (The feasible set is invariant under P -> e^{it}P,
so the swept values agree up to discretization ripple; the sweep guards the
linearization, it does not search a genuinely unknown landscape.)

The master problems are small dense LPs solved by the package's own
simplex; every returned value is certified from both sides:
feasible-rescaled |P(z)| below, LP relaxation above.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .simplex import solve_lp
from .weights import SamplingPlan, default_plan
from .entire import Polynomial, ExpSum

__all__ = [
    "MonomialBasis", "ExponentialBasis", "ExtremalSolution", "MajorantTable",
    "hall_majorant", "dual_bound", "majorant_profile", "best_approximation",
    "MajorantUnboundedError", "DualityGapError", "InfeasibleDegenerateError",
]

PHASE_GON = 32          # regular phase polygon refined toward exact cuts
SWEEP_PHASES = 64       # coarse objective sweep
GOLDEN_STEPS = 24
DIVERGENCE_RATIO = 10.0     # last-3 growth ratio flagging divergence
DIVERGENCE_VALUE = 1e12     # absolute scale flagging divergence


class MajorantUnboundedError(RuntimeError):
    """LP relaxation has a feasible ray: the majorant is infinite within
    budget (constraint set cannot pin the family)."""


class DualityGapError(RuntimeError):
    """Primal/dual disagreement beyond tolerance: exchange non-convergence."""


class InfeasibleDegenerateError(RuntimeError):
    """Defensive: the master LP reported infeasible, which valid weight data
    cannot produce (P = 0 always satisfies the constraints)."""


# ----------------------------------------------------------------------------
# bases

class MonomialBasis:
    """1, z, ..., z^degree."""

    def __init__(self, degree):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = int(degree)

    @property
    def dim(self):
        return self.degree + 1

    kind = "monomials"

    def matrix(self, xs):
        xs = np.asarray(xs, dtype=complex)
        return np.vander(xs, self.dim, increasing=True)

    def at(self, z):
        return self.matrix(np.asarray([z]))[0]

    def to_fn(self, coeffs):
        return Polynomial(coeffs)

    def members(self):
        return [Polynomial([0.0] * k + [1.0]) for k in range(self.dim)]


class ExponentialBasis:
    """exp(i lam z) for m equispaced frequencies with |lam| <= tau."""

    def __init__(self, tau, m):
        if tau <= 0 or m < 1:
            raise ValueError("need tau > 0 and m >= 1")
        self.tau = float(tau)
        self.freqs = np.linspace(-tau, tau, m) if m > 1 else np.array([0.0])

    @property
    def dim(self):
        return self.freqs.size

    kind = "exponentials"

    def matrix(self, xs):
        xs = np.asarray(xs, dtype=complex)
        return np.exp(1j * np.outer(xs, self.freqs))

    def at(self, z):
        return self.matrix(np.asarray([z]))[0]

    def to_fn(self, coeffs):
        return ExpSum(self.freqs, coeffs)

    def members(self):
        return [ExpSum([l], [1.0]) for l in self.freqs]


def basis_from_spec(spec):
    kind = spec.get("kind", "monomials")
    if kind == "monomials":
        return MonomialBasis(int(spec["degree"]))
    if kind == "exponentials":
        return ExponentialBasis(float(spec["tau"]), int(spec["m"]))
    raise ValueError(f"unknown basis kind {kind!r}")


# ----------------------------------------------------------------------------
# results

@dataclass
class ExtremalSolution:
    value: float                 # certified feasible |P(z)|
    extremizer: object           # EntireFn with seminorm <= 1 (grid-certified)
    coeffs: np.ndarray
    active_points: np.ndarray
    dual_weights: np.ndarray     # positive, aggregated per active point
    phase: float
    relaxation_value: float      # LP upper bound at the final pool
    gap: float                   # relaxation_value - value
    probe: complex
    rows: list = field(repr=False, default_factory=list)
    # rows: (x, phi, normalized row vector, dual) for dual recomputation
    objective_vec: np.ndarray | None = field(repr=False, default=None)


@dataclass
class MajorantTable:
    probes: list
    family_sizes: list
    values: np.ndarray           # (len(family_sizes), len(probes))
    active_counts: np.ndarray
    gaps: np.ndarray
    diverging: list              # per probe: bool (budget heuristic)

    def to_csv(self, fh):
        fh.write("n,re_z,im_z,m_n,active_point_count,duality_gap\n")
        for i, n in enumerate(self.family_sizes):
            for j, z in enumerate(self.probes):
                z = complex(z)
                fh.write(f"{n},{z.real:.12g},{z.imag:.12g},"
                         f"{self.values[i, j]:.12g},"
                         f"{int(self.active_counts[i, j])},"
                         f"{self.gaps[i, j]:.6g}\n")


# ----------------------------------------------------------------------------
# workspace

RANK_RCOND = 1e-11     # relative singular-value cutoff of the grid frame


class _Workspace:
    """Grid data and the growing cut pool for one (weight, basis, plan).

    The raw constraint frame (basis values times V, column-normalized) can
    be numerically rank-deficient: monomials on a lacunary grid agree to
    double precision along near-null coefficient directions, and an LP that
    rides such a direction produces "feasible" iterates whose violations
    are invisible to a float64 scan.  The workspace therefore performs all
    certification in the orthonormal frame of the constraint matrix's SVD:
    constraints |U_i . a| <= 1 with orthonormal rows have no cancellation
    blind spots, the numerical null space is excluded from the family, and
    a probe whose evaluation vector leans on that null space is reported as
    a genuinely unbounded majorant (the grid cannot pin it)."""

    def __init__(self, w, basis, plan=None, extra_points=None):
        plan = plan or default_plan()
        grid = plan.grid(w)
        if extra_points is not None:
            grid = np.unique(np.concatenate([grid, np.asarray(extra_points,
                                                              dtype=float)]))
        v = w.recip_values(grid)
        keep = v > 0
        if not np.any(keep):
            raise InfeasibleDegenerateError("weight infinite on entire grid")
        grid, v = grid[keep], v[keep]
        basis_mat = basis.matrix(grid)
        scaled = np.abs(basis_mat) * v[:, None]
        s = np.max(scaled, axis=0)
        s[s == 0] = 1.0
        rownorm = np.max(scaled / s[None, :], axis=1)
        live = rownorm > 0.0
        self.grid = grid[live]
        self.v = v[live]
        self.basis = basis
        self.col_scale = s
        m = (basis_mat[live] / s[None, :]) * self.v[:, None]
        u_full, sing, vh = np.linalg.svd(m, full_matrices=False)
        r = int(np.sum(sing > RANK_RCOND * sing[0])) if sing.size else 0
        if r == 0:
            raise InfeasibleDegenerateError("constraint frame has rank zero")
        self.rank = r
        self.umat = np.ascontiguousarray(u_full[:, :r])   # (npts, r)
        self.sing = sing[:r]
        self.v_r = vh[:r].conj().T                        # (dim, r)
        # coefficient directions the grid cannot certify: numerically tiny
        # singular directions plus (for grids smaller than the family) the
        # exact null space of the constraint frame
        dropped = [vh[j].conj() for j in range(r, vh.shape[0])]
        if m.shape[0] < m.shape[1]:
            from scipy.linalg import null_space
            ns = null_space(m)
            dropped.extend(ns[:, j] for j in range(ns.shape[1]))
        self.null_dirs = dropped
        self.rownorm = np.max(np.abs(self.umat), axis=1)
        self.rows = []          # (point_index, phi)
        self._row_keys = set()
        self._seed_keys = set()
        self._seeded_pts = set()
        self.row_mat = None     # cached real constraint matrix

    def probe_vector(self, z):
        """Objective vector q with q.a = P(z) for a in the U frame, plus the
        relative weight of the probe on the excluded null directions.

        P(z) = p.c is bilinear (no conjugation), so the pairing with the
        right singular vectors uses plain transposes."""
        p = self.basis.at(z) / self.col_scale
        q = (self.v_r.T @ p) / self.sing
        pn = float(np.linalg.norm(p))
        if pn == 0.0 or not self.null_dirs:
            return q, 0.0
        comp = math.fsum(abs(np.dot(p, d)) ** 2 for d in self.null_dirs)
        return q, math.sqrt(comp) / pn

    def seed_pool(self):
        """Initial cuts: per-frame-column argmax points (pinning every
        direction when distinct) plus a spread over the effective region,
        four phases each."""
        idx = {int(np.argmax(np.abs(self.umat[:, k])))
               for k in range(self.rank)}
        strong = np.nonzero(self.rownorm >= 1e-8 * np.max(self.rownorm))[0]
        n_spread = min(strong.size, 2 * self.rank + 3)
        if n_spread:
            idx |= {int(strong[i]) for i in
                    np.unique(np.linspace(0, strong.size - 1,
                                          n_spread).astype(int))}
        for i in sorted(idx):
            self.seed_point(int(i))

    def seed_point(self, i):
        self._seeded_pts.add(i)
        for phi in (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi):
            self.add_row(int(i), phi, seed=True)

    def extend_seed(self, batch=32):
        """Add the strongest not-yet-seeded points (boundedness recovery:
        column argmaxes may coincide on sparse grids).  Returns the number
        of new points; zero means every point is already seeded."""
        order = np.argsort(self.rownorm)[::-1]
        fresh = [int(i) for i in order if int(i) not in self._seeded_pts]
        for i in fresh[:batch]:
            self.seed_point(i)
        return min(len(fresh), batch)

    def add_row(self, i, phi, seed=False):
        key = (i, round(phi % (2 * math.pi), 9))
        if key not in self._row_keys:
            self._row_keys.add(key)
            self.rows.append((i, phi % (2 * math.pi)))
            self.row_mat = None
            if seed:
                self._seed_keys.add(key)
        return key

    def prune(self, keep_keys):
        """Drop rows not in keep_keys (seed rows always stay: they certify
        boundedness of the relaxation)."""
        kept = []
        for (i, phi) in self.rows:
            key = (i, round(phi % (2 * math.pi), 9))
            if key in keep_keys or key in self._seed_keys:
                kept.append((i, phi))
        if len(kept) != len(self.rows):
            self.rows = kept
            self._row_keys = {(i, round(p % (2 * math.pi), 9))
                              for i, p in kept}
            self.row_mat = None

    def constraint_matrix(self):
        """Real rows over u = [Re a; Im a]: Re(e^{-i phi} U_i . a) <= 1."""
        if self.row_mat is None:
            r = self.rank
            A = np.empty((len(self.rows), 2 * r))
            for k, (i, phi) in enumerate(self.rows):
                g = np.exp(-1j * phi) * self.umat[i]
                A[k, :r] = g.real
                A[k, r:] = -g.imag
            self.row_mat = A
        return self.row_mat

    def objective(self, z, theta):
        q, _ = self.probe_vector(z)
        g = np.exp(-1j * theta) * q
        r = self.rank
        c = np.empty(2 * r)
        c[:r] = g.real
        c[r:] = -g.imag
        return c

    def scan(self, a):
        """Modulus ratios |P(x)| V(x) over the full grid for frame coeffs."""
        return np.abs(self.umat @ a)

    def to_coefficients(self, a):
        """Min-norm original-basis coefficients realizing frame coeffs a on
        the grid."""
        return (self.v_r @ (a / self.sing)) / self.col_scale


def _lp_value(ws, z, theta, tol):
    """Solve the pooled relaxation max Re(e^{-i theta}P(z)); returns
    (value, scaled coeffs, duals per row).  An unbounded pool is first
    repaired by seeding more grid points; only an unbounded relaxation over
    the fully seeded grid is reported as a genuinely infinite majorant."""
    while True:
        A = ws.constraint_matrix()
        c = ws.objective(z, theta)
        A2 = np.hstack([A, -A])
        c2 = np.concatenate([c, -c])
        res = solve_lp(c2, A_ub=A2, b_ub=np.ones(A.shape[0]), maximize=True,
                       tol=1e-11)
        if res.status == "iteration_limit":
            # degenerate stalling at tight pivot tolerance: retry once looser
            res = solve_lp(c2, A_ub=A2, b_ub=np.ones(A.shape[0]),
                           maximize=True, tol=1e-9, max_iter=60000)
        if res.status == "unbounded":
            if ws.extend_seed():
                continue
            raise MajorantUnboundedError(
                f"majorant infinite within budget at probe {z}: family dim "
                f"{ws.basis.dim} is unbounded over all {ws.grid.size} "
                f"constraint points")
        if res.status == "infeasible":
            raise InfeasibleDegenerateError("master LP infeasible")
        if res.status != "optimal":
            raise DualityGapError(f"LP did not converge: {res.status}")
        break
    nu = A.shape[1]
    u = res.x[:nu] - res.x[nu:]
    r = ws.rank
    return res.objective, u[:r] + 1j * u[r:], res.duals_ub


def _exchange(ws, z, theta, tol, max_rounds):
    """Exchange loop at fixed objective phase.

    Any pooled relaxation value upper-bounds the grid majorant (fewer
    constraints, larger value), and every rescaled iterate lower-bounds it,
    so the best bounds over the rounds bracket the answer even though the
    working set is pruned to the dual-active rows (plus the seed rows that
    certify boundedness) as it grows.

    Returns (best_feas, best_coeffs_scaled, min_relax, dual_row_snapshot).
    """
    best_feas, best_coeffs = -np.inf, None
    min_relax, snapshot = np.inf, []
    q, _ = ws.probe_vector(z)
    for _ in range(max_rounds):
        relax, a, duals = _lp_value(ws, z, theta, tol)
        A = ws.constraint_matrix()
        ratios = ws.scan(a)
        rho = float(np.max(ratios)) if ratios.size else 0.0
        feas = abs(complex(q @ a)) / max(1.0, rho)
        if feas > best_feas:
            best_feas, best_coeffs = feas, a
        if relax < min_relax:
            min_relax = relax
            snapshot = [(float(ws.grid[i]), float(phi), A[r].copy(),
                         float(duals[r]))
                        for r, (i, phi) in enumerate(ws.rows)]
        if min_relax - best_feas <= tol * (1.0 + abs(min_relax)):
            break
        keep = {(i, round(p % (2 * math.pi), 9))
                for r, (i, p) in enumerate(ws.rows) if duals[r] > 1e-12}
        if len(ws.rows) > 64 + 8 * ws.rank:
            ws.prune(keep)
        # cut the worst violator; refresh exact phases at active points
        vals = ws.umat @ a
        gon = 2 * math.pi / PHASE_GON
        iworst = int(np.argmax(ratios))
        phi = float(np.angle(vals[iworst]))
        n_before = len(ws._row_keys)
        ws.add_row(iworst, round(phi / gon) * gon)
        ws.add_row(iworst, phi)
        for i in np.argsort(ratios)[::-1][:6]:
            if ratios[i] >= 0.98 * rho:
                ws.add_row(int(i), float(np.angle(vals[int(i)])))
        if len(ws._row_keys) == n_before:
            break    # pool fixpoint: nothing further to cut
    return best_feas, best_coeffs, min_relax, snapshot


def hall_majorant(w, basis, z, tol=1e-7, plan=None, max_rounds=80,
                  extra_points=None, _ws=None):
    """Majorant of the family at probe z with a two-sided certificate.

    Returns an ExtremalSolution whose ``value`` is the exact-modulus
    feasible bound and whose ``relaxation_value`` is the LP upper bound;
    their gap is driven under ``tol`` (relative) by the exchange."""
    z = complex(z)
    if isinstance(basis, dict):
        basis = basis_from_spec(basis)
    ws = _ws if _ws is not None else _Workspace(w, basis, plan, extra_points)
    _, null_frac = ws.probe_vector(z)
    if null_frac > 1e-6:
        raise MajorantUnboundedError(
            f"majorant infinite within budget at probe {z}: the constraint "
            f"grid leaves the family's evaluation there unpinned "
            f"(null fraction {null_frac:.2e})")
    if not ws.rows:
        ws.seed_pool()

    # coarse phase sweep on the pooled relaxation
    sweep = np.linspace(0.0, 2 * math.pi, SWEEP_PHASES, endpoint=False)
    relax_vals = []
    for th in sweep:
        val, _, _ = _lp_value(ws, z, th, tol)
        relax_vals.append(val)
    k = int(np.argmax(relax_vals))
    # golden-section refinement on the winning arc
    lo = sweep[k] - 2 * math.pi / SWEEP_PHASES
    hi = sweep[k] + 2 * math.pi / SWEEP_PHASES
    invphi = (math.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1 = _lp_value(ws, z, c1, tol)[0]
    f2 = _lp_value(ws, z, c2, tol)[0]
    for _ in range(GOLDEN_STEPS):
        if f1 >= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = _lp_value(ws, z, c1, tol)[0]
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = _lp_value(ws, z, c2, tol)[0]
    theta = c1 if f1 >= f2 else c2

    feas, frame_coeffs, relax, snapshot = _exchange(ws, z, theta, tol,
                                                    max_rounds)

    if relax > DIVERGENCE_VALUE:
        raise MajorantUnboundedError(
            f"majorant exceeds {DIVERGENCE_VALUE:g} at probe {z}")

    ratios = ws.scan(frame_coeffs)
    rho = max(1.0, float(np.max(ratios)))
    coeffs = ws.to_coefficients(frame_coeffs / rho)
    extremizer = basis.to_fn(coeffs)

    per_point = {}
    for (x, phi, rowvec, yr) in snapshot:
        if yr > 1e-12:
            per_point[x] = per_point.get(x, 0.0) + yr
    act_idx = np.nonzero(ratios / rho >= 1.0 - 50 * tol)[0]
    merged = sorted({float(ws.grid[i]) for i in act_idx} |
                    set(per_point.keys()))
    active_points = np.array(merged)
    dual_weights = np.array([per_point.get(x, 0.0) for x in merged])

    return ExtremalSolution(
        value=float(feas), extremizer=extremizer, coeffs=coeffs,
        active_points=active_points, dual_weights=dual_weights,
        phase=float(theta), relaxation_value=float(relax),
        gap=float(relax - feas), probe=z, rows=snapshot,
        objective_vec=ws.objective(z, theta))


def dual_bound(sol, w, z, tol=1e-6):
    """Recompute the dual objective from the stored cut multipliers and
    check strong duality: the dual value must bracket the primal within
    10*tol, else the exchange did not converge."""
    y = np.array([r[3] for r in sol.rows])
    if np.any(y < -1e-10):
        raise DualityGapError("negative dual multiplier")
    dual_val = float(np.sum(y))          # rows are normalized to RHS 1
    # dual feasibility: sum y_r row_r == objective vector
    if sol.rows:
        A = np.stack([r[2] for r in sol.rows])
        resid = A.T @ y
        cvec = sol.objective_vec
        if cvec is not None:
            err = float(np.max(np.abs(resid - cvec)))
            if err > 1e-6 * (1.0 + np.max(np.abs(cvec))):
                raise DualityGapError(f"dual infeasibility {err:.3g}")
    gap = abs(dual_val - sol.value)
    if gap > 10 * tol * (1.0 + abs(dual_val)):
        raise DualityGapError(
            f"primal {sol.value:.9g} vs dual {dual_val:.9g}: gap {gap:.3g}")
    return dual_val


def majorant_profile(w, n_list, probes, tol=1e-7, plan=None, basis_kind="monomials",
                     tau=None):
    """Majorant values over nested families at each probe, with the
    budget-bounded divergence flag (growth ratio over the last 3 entries
    and absolute scale)."""
    n_list = list(n_list)
    probes = [complex(p) for p in probes]
    vals = np.full((len(n_list), len(probes)), np.nan)
    acts = np.zeros((len(n_list), len(probes)))
    gaps = np.full((len(n_list), len(probes)), np.nan)
    for j, z in enumerate(probes):
        carry_points = None
        for i, n in enumerate(n_list):
            if basis_kind == "monomials":
                basis = MonomialBasis(n)
            else:
                basis = ExponentialBasis(tau, n + 1)
            try:
                sol = hall_majorant(w, basis, z, tol=tol, plan=plan,
                                    extra_points=carry_points)
            except MajorantUnboundedError:
                vals[i:, j] = np.inf
                break
            vals[i, j] = sol.value
            acts[i, j] = sol.active_points.size
            gaps[i, j] = sol.gap
            carry_points = sol.active_points
    diverging = []
    for j in range(len(probes)):
        col = vals[:, j]
        col = col[~np.isnan(col)]
        flag = bool(col.size and np.isinf(col[-1]))
        if col.size >= 3 and np.isfinite(col[-1]):
            if col[-3] > 0 and col[-1] / col[-3] >= DIVERGENCE_RATIO \
                    and col[-1] >= DIVERGENCE_VALUE:
                flag = True
        diverging.append(flag)
    return MajorantTable(probes, n_list, vals, acts, gaps, diverging)


# ----------------------------------------------------------------------------
# direct best approximation (Remez-style exchange)

def best_approximation(w, basis, target, plan=None, tol=1e-9, max_rounds=60):
    """Weighted sup-distance from ``target`` to the (real) family:

        min_P  max_x |f(x) - P(x)| V(x)

    by the classic exchange: small master LP on a working set, add the
    worst off-set point, stop when the certified error meets the LP lower
    bound.  Returns (distance, coefficients, working points)."""
    plan = plan or default_plan()
    grid = plan.grid(w)
    v = w.recip_values(grid)
    keep = v > 0
    grid, v = grid[keep], v[keep]
    fvals = np.asarray(target(grid), dtype=float)
    bmat = np.real(basis.matrix(grid))
    s = np.max(np.abs(bmat) * v[:, None], axis=0)
    s[s == 0] = 1.0
    # same orthonormal certification frame as the majorant workspace: the
    # grid-weighted error is m_mat . a with orthonormal columns
    m_mat = (bmat / s[None, :]) * v[:, None]
    u_full, sing, vh = np.linalg.svd(m_mat, full_matrices=False)
    r = int(np.sum(sing > RANK_RCOND * sing[0]))
    umat = u_full[:, :r]
    fv_all = fvals * v

    work = set(np.unique(np.linspace(0, grid.size - 1, r + 2).astype(int)))
    a = np.zeros(r)
    for _ in range(max_rounds):
        idx = np.array(sorted(work))
        # rows: +-(fV - U a) <= t  ->  [-+U | -1].[a; t] <= -+ fV
        Bv = umat[idx]
        fv = fv_all[idx]
        A = np.vstack([np.hstack([-Bv, -np.ones((idx.size, 1))]),
                       np.hstack([+Bv, -np.ones((idx.size, 1))])])
        b = np.concatenate([-fv, +fv])
        A_split = np.hstack([A[:, :r], -A[:, :r], A[:, r:]])
        c = np.zeros(2 * r + 1)
        c[-1] = 1.0
        res = solve_lp(c, A_ub=A_split, b_ub=b, maximize=False, tol=1e-12)
        if res.status != "optimal":
            raise InfeasibleDegenerateError(
                f"approximation master LP: {res.status}")
        a = res.x[:r] - res.x[r:2 * r]
        t_lp = float(res.x[-1])
        err = np.abs(fv_all - umat @ a)
        worst = int(np.argmax(err))
        emax = float(err[worst])
        if emax <= t_lp + tol * (1.0 + emax) or worst in work:
            break
        work.add(worst)
    coeffs = np.real(vh[:r].T @ (a / sing[:r])) / s
    return float(np.max(np.abs(fv_all - umat @ a))), coeffs, \
        np.array(sorted(work))
