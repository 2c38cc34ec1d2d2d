"""Critical-point search on the Nehari constraint.

The descent iterates v <- t_w w with w = v - s d(v), where the default
direction is the duality-residual d = v - |Kv|^{p-2} Kv (the fixed-point
residual of the critical equation; its pairing with J'(v) is pointwise
nonnegative, so it is always a descent direction).  Steps pass a monotone
Armijo gate: either sufficient energy decrease, or, once energy differences
fall below resolution, an energy plateau combined with strict residual
decrease.  The accepted-step energies are therefore nonincreasing to within
1e-13, which is the computable analogue of descent along a pseudo-gradient
flow.

Two accelerations wrap the plain iteration without weakening the gate:

* Anderson extrapolation over a short history of Picard images (combinations
  reuse the cached linear images of K, so no extra transforms);
* once the residual settles, a Levenberg-regularized Newton-GMRES polish of
  the smooth residual r(v) = v - |Kv|^{p-2} Kv.  The polish is accepted only
  if it reaches the requested dual-residual tolerance; otherwise the
  pre-polish state is restored and descent resumes.  Polish steps solve the
  critical equation directly and are exempt from the flow-monotonicity
  guarantee (they move the energy by O(residual) at most); the recorded
  trajectory is the descent phase.

Every run ends in exactly one of three ways: a converged SolutionRecord,
DivergedError (energy under the configured floor), or MaxIterationsError.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergedError,
    GridMismatchError,
    MaxIterationsError,
    NoSolutionFoundError,
    NotInUPlusError,
)
from .dual_functional import FunctionalContext, odd_power
from .kernel import Field

PLATEAU_SLACK = 1e-13        # allowed energy non-decrease, below the 1e-12 contract
RESIDUAL_SHRINK = 0.999      # required residual progress on plateau steps
SETTLE_WINDOW = 50           # iterations over which "stalled" is judged
SETTLE_FRACTION = 0.5        # residual must improve by less than this to count as settled
POLISH_ENTRY_RES = 1e-4      # residual gate for the first polish attempt
POLISH_COOLDOWN = 50         # descent steps between polish attempts
KREFRESH = 20                # accepted steps between fresh transforms of the cached K image


@dataclass
class DescentConfig:
    """Tolerances and budgets of the constrained descent."""

    tol_residual: float = 1e-8
    max_iters: int = 2000
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    step_init: float = 1.0
    dedup_rel_threshold: float = 1e-2
    multistart_count: int = 20
    rng_seed: int = 0
    divergence_floor: float = -1e9
    anderson_depth: int = 6

    def __post_init__(self):
        if self.tol_residual <= 0 or self.step_init <= 0 or self.dedup_rel_threshold <= 0:
            raise ValueError("tolerances and step sizes must be positive")
        if not (0 < self.armijo_c < 1 and 0 < self.armijo_shrink < 1):
            raise ValueError("armijo parameters must lie in (0, 1)")
        if self.max_iters <= 0 or self.multistart_count <= 0:
            raise ValueError("iteration and start counts must be positive")


@dataclass
class SolutionRecord:
    """Converged dual critical point with its primal partner and diagnostics."""

    v_star: Field
    u_star: Field
    level: float
    dual_residual: float
    primal_residual: float
    iterations: int
    orbit_shift: tuple
    sign: int
    j_values: np.ndarray
    grad_norms: np.ndarray
    v_norms: np.ndarray
    bound_constant: float
    iterate_snapshots: list
    newton_steps: int = 0
    start_index: int = -1


@dataclass
class MultistartResult:
    records: list
    level_estimate: float
    outcomes: list  # one (status, detail) pair per start


def descent_direction(ctx: FunctionalContext, v: Field) -> Field:
    """Duality-mapped gradient d = |g|^{p-2} g with g = J'(v).

    Satisfies <g, d> = ||g||_p^p and ||d||_{p'} = ||g||_p^{p-1}; used as the
    line-search fallback direction (the primary direction is the
    duality-residual of the critical equation, see module docstring).
    """
    g = ctx.gradient(v)
    return Field(ctx.grid, odd_power(g.values, ctx.exponents.p - 1.0))


# ---------------------------------------------------------------------------
# internal solver machinery (array level)
# ---------------------------------------------------------------------------


def _project(ctx, v, kv):
    """Fibering projection onto the Nehari constraint; None outside U^+."""
    qf = ctx.inner(v, kv)
    if not np.isfinite(qf) or qf <= 0.0:
        return None
    m = ctx.dual_mass(v)
    if m == 0.0:
        return None
    t = (m / qf) ** (1.0 / (2.0 - ctx.exponents.p_conj))
    pc = ctx.exponents.p_conj
    level = (1.0 / pc - 0.5) * t ** pc * m
    return t * v, t * kv, level


def _gmres(apply_a, b, maxk, rtol):
    """Unrestarted GMRES with Givens rotations on flat float64 arrays."""
    n0 = np.linalg.norm(b)
    if n0 == 0.0:
        return np.zeros_like(b)
    basis = [b / n0]
    hess = np.zeros((maxk + 1, maxk))
    cs = np.zeros(maxk)
    sn = np.zeros(maxk)
    resid = np.zeros(maxk + 1)
    resid[0] = n0
    k_used = 0
    for k in range(maxk):
        w = apply_a(basis[k])
        for j in range(k + 1):
            hess[j, k] = np.dot(basis[j], w)
            w = w - hess[j, k] * basis[j]
        hess[k + 1, k] = np.linalg.norm(w)
        basis.append(w / hess[k + 1, k] if hess[k + 1, k] > 1e-300 else 0.0 * w)
        for j in range(k):
            t = cs[j] * hess[j, k] + sn[j] * hess[j + 1, k]
            hess[j + 1, k] = -sn[j] * hess[j, k] + cs[j] * hess[j + 1, k]
            hess[j, k] = t
        denom = np.hypot(hess[k, k], hess[k + 1, k])
        if denom == 0.0:
            k_used = k
            break
        cs[k] = hess[k, k] / denom
        sn[k] = hess[k + 1, k] / denom
        hess[k, k] = denom
        hess[k + 1, k] = 0.0
        resid[k + 1] = -sn[k] * resid[k]
        resid[k] = cs[k] * resid[k]
        k_used = k + 1
        if abs(resid[k + 1]) <= rtol * n0:
            break
    y = np.linalg.solve(hess[:k_used, :k_used], resid[:k_used])
    return sum(y[j] * basis[j] for j in range(k_used))


def _newton_polish(ctx, v, kv, tol, max_steps=40):
    """Levenberg-regularized Newton-GMRES on r(v) = v - |Kv|^{p-2} Kv.

    Accepts steps on the Euclidean norm of r (the quantity Newton models);
    declares success only when the scale-invariant dual residual meets tol.
    Picard sweeps before each step and on exit restore the exact power
    structure of the iterate's tails, without which rounding noise under the
    (p'-1)-th root would floor the dual residual.
    """
    p = ctx.exponents.p
    shape = v.shape
    steps = 0
    enter_norm = ctx.lp_norm(v, ctx.exponents.p_conj)
    fails = 0
    for _ in range(max_steps):
        picard = odd_power(kv, p - 1.0)
        k_picard = ctx.apply_k_array(picard)
        projected = _project(ctx, picard, k_picard)
        if projected is not None:
            vs, kvs, _ = projected
            if ctx.dual_residual_arrays(vs, kvs) <= tol:
                return vs, kvs, steps, True
        if ctx.dual_residual_arrays(v, kv) <= tol:
            return v, kv, steps, True

        r = v - picard
        rn0 = np.linalg.norm(r.ravel())
        damping = np.abs(kv) ** (p - 2.0) * (p - 1.0)
        mu = rn0 / max(np.linalg.norm(v.ravel()), 1e-300)

        def apply_a(wflat):
            w = wflat.reshape(shape)
            return ((1.0 + mu) * w - damping * ctx.apply_k_array(w)).ravel()

        step = _gmres(apply_a, r.ravel(), maxk=120, rtol=1e-10).reshape(shape)
        s, ok = 1.0, False
        for _bt in range(12):
            vn = v - s * step
            if ctx.lp_norm(vn, ctx.exponents.p_conj) < 0.3 * enter_norm:
                s *= 0.5
                continue
            kvn = ctx.apply_k_array(vn)
            rn = np.linalg.norm((vn - odd_power(kvn, p - 1.0)).ravel())
            if rn < rn0 * (1.0 - 0.1 * s):
                v, kv = vn, kvn
                ok = True
                steps += 1
                break
            s *= 0.5
        if not ok:
            fails += 1
            if fails >= 2:
                break
        else:
            fails = 0
    picard = odd_power(kv, p - 1.0)
    projected = _project(ctx, picard, ctx.apply_k_array(picard))
    if projected is not None:
        vs, kvs, _ = projected
        if ctx.dual_residual_arrays(vs, kvs) <= tol:
            return vs, kvs, steps, True
    return v, kv, steps, ctx.dual_residual_arrays(v, kv) <= tol


class _SnapshotReservoir:
    """Deterministically thinned trajectory snapshots with bounded memory."""

    def __init__(self, grid):
        field_bytes = grid.size * 8
        self.cap = max(4, min(32, 4_000_000 // max(field_bytes, 1)))
        self.stride = 1
        self.items = []

    def offer(self, index, values):
        if index % self.stride != 0:
            return
        self.items.append((index, values.copy()))
        if len(self.items) > self.cap:
            self.items = self.items[::2]
            self.stride *= 2


def find_critical_point(ctx: FunctionalContext, v0: Field, cfg: DescentConfig) -> SolutionRecord:
    """Run the constrained descent from v0 until the dual residual meets tol.

    Raises NotInUPlusError when the projected seed is inadmissible,
    DivergedError when the energy crosses cfg.divergence_floor, and
    MaxIterationsError when the budget runs out.
    """
    pc = ctx.exponents.p_conj
    p = ctx.exponents.p
    v = np.asarray(ctx._own(v0), dtype=float).copy()
    if not np.any(v):
        raise NotInUPlusError("zero initial field is inadmissible")
    kv = ctx.apply_k_array(v)
    projected = _project(ctx, v, kv)
    if projected is None:
        raise NotInUPlusError("initial field has nonpositive quadratic form")
    v, kv, level = projected

    g = ctx.gradient_arrays(v, kv)
    grad_norm = ctx.lp_norm(g, p)
    v_norm = ctx.lp_norm(v, pc)
    res = grad_norm / v_norm ** (pc - 1.0)

    j_values = [level]
    grad_norms = [grad_norm]
    v_norms = [v_norm]
    snapshots = _SnapshotReservoir(ctx.grid)
    snapshots.offer(0, v)

    history_v, history_g, history_kg = [], [], []
    iterations = 0
    newton_steps = 0
    res_window = [res]
    polish_gate = POLISH_ENTRY_RES
    cooldown = 0

    def _record(jv, gn, vn):
        j_values.append(jv)
        grad_norms.append(gn)
        v_norms.append(vn)

    def _finish(v_fin, kv_fin):
        g_fin = ctx.gradient_arrays(v_fin, kv_fin)
        grad_fin = ctx.lp_norm(g_fin, p)
        vn_fin = ctx.lp_norm(v_fin, pc)
        res_fin = grad_fin / vn_fin ** (pc - 1.0)
        level_fin = ctx.energy_arrays(v_fin, kv_fin)
        vf = Field(ctx.grid, v_fin)
        u = ctx.dual_to_primal(vf)
        bound_constant = max(
            max(2.0 * j for j in j_values),
            max(grad_norms),
            1e-300,
        )
        return SolutionRecord(
            v_star=vf,
            u_star=u,
            level=level_fin,
            dual_residual=res_fin,
            primal_residual=ctx.primal_residual(u),
            iterations=iterations,
            orbit_shift=(0,) * ctx.grid.dimension,
            sign=1,
            j_values=np.asarray(j_values),
            grad_norms=np.asarray(grad_norms),
            v_norms=np.asarray(v_norms),
            bound_constant=bound_constant,
            iterate_snapshots=[Field(ctx.grid, arr) for _, arr in snapshots.items],
            newton_steps=newton_steps,
        )

    while True:
        if res <= cfg.tol_residual:
            kv = ctx.apply_k_array(v)  # fresh transform before declaring victory
            res = ctx.dual_residual_arrays(v, kv)
            if res <= cfg.tol_residual:
                return _finish(v, kv)
        if level < cfg.divergence_floor:
            raise DivergedError(
                f"energy {level:.3e} fell under the divergence floor",
                iterations=iterations, level=level,
            )
        if iterations >= cfg.max_iters:
            raise MaxIterationsError(
                f"no convergence within {cfg.max_iters} iterations "
                f"(residual {res:.3e})",
                iterations=iterations, residual=res, level=level,
            )

        # -- Newton polish once the descent has settled ----------------------
        settled = len(res_window) > SETTLE_WINDOW and res > SETTLE_FRACTION * res_window[-SETTLE_WINDOW]
        if cooldown > 0:
            cooldown -= 1
        elif res <= polish_gate and (settled or res <= 1e-6):
            v_try, kv_try, steps, ok = _newton_polish(ctx, v, kv, cfg.tol_residual)
            newton_steps += steps
            iterations += max(steps, 1)
            if ok:
                projected = _project(ctx, v_try, ctx.apply_k_array(v_try))
                if projected is not None:
                    v_fin, kv_fin, _ = projected
                    if ctx.dual_residual_arrays(v_fin, kv_fin) <= cfg.tol_residual:
                        return _finish(v_fin, kv_fin)
            # restore the pre-polish state and demand real progress before retrying
            polish_gate = res / 4.0
            cooldown = POLISH_COOLDOWN
            continue

        # -- one descent step -------------------------------------------------
        picard = odd_power(kv, p - 1.0)
        k_picard = ctx.apply_k_array(picard)
        projected = _project(ctx, picard, k_picard)
        if projected is None:
            raise MaxIterationsError(
                "iteration left the admissible cone",
                iterations=iterations, residual=res, level=level,
            )
        gv, kgv, _ = projected
        history_v.append(v)
        history_g.append(gv)
        history_kg.append(kgv)
        if len(history_v) > cfg.anderson_depth + 1:
            history_v.pop(0)
            history_g.pop(0)
            history_kg.pop(0)

        plateau = PLATEAU_SLACK * max(1.0, abs(level))
        accepted = False

        if len(history_v) >= 2:
            residual_mat = np.stack(
                [(history_g[j] - history_v[j]).ravel() for j in range(len(history_v))],
                axis=1,
            )
            delta = residual_mat[:, 1:] - residual_mat[:, :-1]
            gamma, *_ = np.linalg.lstsq(delta, residual_mat[:, -1], rcond=None)
            theta = np.zeros(len(history_v))
            theta[-1] = 1.0
            theta[1:] -= gamma
            theta[:-1] += gamma
            v_cand = sum(t * history_g[j] for j, t in enumerate(theta))
            kv_cand = sum(t * history_kg[j] for j, t in enumerate(theta))
            projected = _project(ctx, v_cand, kv_cand)
            if projected is not None:
                v_new, kv_new, level_new = projected
                res_new = ctx.dual_residual_arrays(v_new, kv_new)
                if level_new < level or (
                    level_new <= level + plateau and res_new <= RESIDUAL_SHRINK * res
                ):
                    v, kv, level, res = v_new, kv_new, level_new, res_new
                    accepted = True

        if not accepted:
            # damped Picard line search; w = (1-s) v + s G(v) reuses cached images
            d = v - gv
            slope = max(ctx.inner(ctx.gradient_arrays(v, kv), d), 0.0)
            s = min(cfg.step_init, 1.0)
            for _bt in range(60):
                w = (1.0 - s) * v + s * gv
                kw = (1.0 - s) * kv + s * kgv
                projected = _project(ctx, w, kw)
                if projected is not None:
                    v_new, kv_new, level_new = projected
                    res_new = ctx.dual_residual_arrays(v_new, kv_new)
                    if level_new <= level - cfg.armijo_c * s * slope or (
                        level_new <= level + plateau and res_new <= RESIDUAL_SHRINK * res
                    ):
                        v, kv, level, res = v_new, kv_new, level_new, res_new
                        accepted = True
                        break
                s *= cfg.armijo_shrink

        if not accepted:
            # duality-map fallback direction (requires a fresh transform per trial)
            g_now = ctx.gradient_arrays(v, kv)
            d = odd_power(g_now, p - 1.0)
            dn = ctx.lp_norm(d, pc)
            if dn > 0.0:
                d = d / dn
                slope = ctx.lp_norm(g_now, p)
                s = min(cfg.step_init, 1.0)
                for _bt in range(40):
                    w = v - s * d
                    kw = ctx.apply_k_array(w)
                    projected = _project(ctx, w, kw)
                    if projected is not None:
                        v_new, kv_new, level_new = projected
                        res_new = ctx.dual_residual_arrays(v_new, kv_new)
                        if level_new <= level - cfg.armijo_c * s * slope or (
                            level_new <= level + plateau and res_new <= RESIDUAL_SHRINK * res
                        ):
                            v, kv, level, res = v_new, kv_new, level_new, res_new
                            accepted = True
                            break
                    s *= cfg.armijo_shrink

        if not accepted:
            raise MaxIterationsError(
                f"line search stalled at residual {res:.3e}",
                iterations=iterations, residual=res, level=level,
            )

        iterations += 1
        if iterations % KREFRESH == 0:
            kv = ctx.apply_k_array(v)
            res = ctx.dual_residual_arrays(v, kv)
        _record(level, ctx.lp_norm(ctx.gradient_arrays(v, kv), p), ctx.lp_norm(v, pc))
        snapshots.offer(iterations, v)
        res_window.append(res)
        if len(res_window) > SETTLE_WINDOW + 1:
            res_window.pop(0)


# ---------------------------------------------------------------------------
# orbits, seeding, multistart
# ---------------------------------------------------------------------------


def orbit_distance(ctx: FunctionalContext, v: Field, w: Field) -> float:
    """Min over integer lattice shifts and sign of ||v - (+-w)(. - y)||_{p'}.

    Zero exactly when w is a signed unit-cell translate of v.  Requires the
    grid to support unit translations (points_per_axis divisible by L).
    """
    if v.grid != w.grid:
        raise GridMismatchError("orbit distance needs fields on the same grid")
    shift_pts = v.grid.unit_shift_points
    if shift_pts is None:
        raise GridMismatchError("grid does not support unit-cell translations")
    pc = ctx.exponents.p_conj
    cells = int(round(v.grid.box_length))
    best = np.inf
    wv = w.values
    for shifts in itertools.product(range(cells), repeat=v.grid.dimension):
        rolled = wv
        for axis, cell_shift in enumerate(shifts):
            if cell_shift:
                rolled = np.roll(rolled, cell_shift * shift_pts, axis=axis)
        for sign in (1.0, -1.0):
            dist = ctx.lp_norm(v.values - sign * rolled, pc)
            if dist < best:
                best = dist
    return float(best)


def mass_centroid(ctx: FunctionalContext, v: Field) -> np.ndarray:
    """Circular centroid of the |v|^{p'} mass over the torus, in [0, L)^N."""
    weight = np.abs(v.values) ** ctx.exponents.p_conj
    total = weight.sum()
    L = ctx.grid.box_length
    if total == 0.0:
        return np.full(ctx.grid.dimension, L / 2.0)
    mesh = ctx.grid.coordinate_mesh()
    out = np.empty(ctx.grid.dimension)
    for axis in range(ctx.grid.dimension):
        phase = np.sum(weight * np.exp(2j * np.pi * mesh[axis] / L))
        out[axis] = (np.angle(phase) / (2.0 * np.pi) * L) % L
    return out


def recenter(ctx: FunctionalContext, record: SolutionRecord) -> SolutionRecord:
    """Shift the representative by whole unit cells so its mass centroid
    lands nearest the box center, and normalize the sign at the peak."""
    grid = ctx.grid
    shift_pts = grid.unit_shift_points
    if shift_pts is not None and ctx.coefficient.periodic:
        centroid = mass_centroid(ctx, record.v_star)
        cells = int(round(grid.box_length))
        shift_cells = tuple(
            int(np.rint((grid.box_length / 2.0 - c))) % cells for c in centroid
        )
        if any(shift_cells):
            v = record.v_star.values
            u = record.u_star.values
            for axis, cell_shift in enumerate(shift_cells):
                if cell_shift:
                    v = np.roll(v, cell_shift * shift_pts, axis=axis)
                    u = np.roll(u, cell_shift * shift_pts, axis=axis)
            record.v_star = Field(grid, v)
            record.u_star = Field(grid, u)
        record.orbit_shift = shift_cells
    peak = np.unravel_index(np.argmax(np.abs(record.v_star.values)), grid.shape)
    if record.v_star.values[peak] < 0.0:
        record.v_star = -record.v_star
        record.u_star = -record.u_star
        record.sign = -1
    return record


def initial_field(ctx: FunctionalContext, rng: np.random.Generator) -> Field:
    """Random low-mode trigonometric polynomial under a Gaussian bump.

    The bump center is uniform over the box for periodic coefficients and
    jittered around the coefficient's support centroid otherwise, so seeds
    land where the nonlinearity is active.
    """
    grid = ctx.grid
    n = grid.points_per_axis
    L = grid.box_length
    dim = grid.dimension

    if ctx.coefficient.periodic:
        center = rng.uniform(0.0, L, size=dim)
        width = max(L / 7.0, 3.0 * grid.spacing)
    else:
        q = ctx.coefficient.field.values
        mesh = grid.coordinate_mesh()
        total = q.sum()
        centroid = np.array([float((q * m).sum() / total) for m in mesh])
        support = q > 0
        dist2 = sum((m - c) ** 2 for m, c in zip(mesh, centroid))
        support_radius = float(np.sqrt(dist2[support].max())) if support.any() else L / 4.0
        center = centroid + rng.normal(scale=L / 32.0, size=dim)
        width = max(support_radius / 2.0, 3.0 * grid.spacing)

    mesh = grid.coordinate_mesh()
    dist2 = np.zeros(grid.shape)
    for axis in range(dim):
        d = np.abs(mesh[axis] - center[axis])
        d = np.minimum(d, L - d)
        dist2 = dist2 + d ** 2
    envelope = np.exp(-dist2 / (2.0 * width ** 2))

    # Hermitian low-mode spectrum => real trig polynomial in one transform
    spectrum = np.zeros(grid.shape, dtype=complex)
    modes = [m for m in itertools.product(range(-3, 4), repeat=dim) if any(m) and m > tuple(-x for x in m)]
    coeffs = rng.normal(size=(len(modes), 2))
    for (a, b), m in zip(coeffs, modes):
        idx = tuple(mi % n for mi in m)
        neg = tuple((-mi) % n for mi in m)
        spectrum[idx] = a - 1j * b
        spectrum[neg] = a + 1j * b
    trig = np.fft.ifftn(spectrum).real * grid.size

    return Field(grid, envelope * trig)


def _solve_one(args):
    ctx, cfg, index, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    v0 = initial_field(ctx, rng)
    try:
        record = find_critical_point(ctx, v0, cfg)
        record.start_index = index
        return index, "converged", record
    except NotInUPlusError as exc:
        return index, "not_in_u_plus", str(exc)
    except DivergedError as exc:
        return index, "diverged", f"{exc} (iterations={exc.iterations})"
    except MaxIterationsError as exc:
        return index, "max_iters", f"{exc} (residual={exc.residual:.3e})"


def multistart_search(ctx: FunctionalContext, cfg: DescentConfig, workers: int = 1):
    """Seeded multistart descent with orbit deduplication.

    Returns a MultistartResult whose records are geometrically distinct
    (pairwise orbit distance above the configured threshold), sorted by
    (level, lexicographic field bytes).  Deterministic for a fixed seed
    regardless of the worker count.
    """
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.multistart_count)
    jobs = [(ctx, cfg, i, seeds[i]) for i in range(cfg.multistart_count)]

    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_solve_one, jobs))
    else:
        raw = [_solve_one(job) for job in jobs]
    raw.sort(key=lambda item: item[0])

    outcomes = [(status, detail if isinstance(detail, str) else "") for _, status, detail in raw]
    records = [detail for _, status, detail in raw if status == "converged"]
    if not records:
        raise NoSolutionFoundError(
            f"all {cfg.multistart_count} starts failed: "
            + ", ".join(status for status, _ in outcomes)
        )

    records = [recenter(ctx, rec) for rec in records]
    records.sort(key=lambda rec: (rec.level, rec.v_star.values.tobytes()))

    can_dedup = ctx.grid.unit_shift_points is not None
    distinct = []
    for rec in records:
        duplicate = False
        for kept in distinct:
            scale = max(
                rec.v_star.lp_norm(ctx.exponents.p_conj),
                kept.v_star.lp_norm(ctx.exponents.p_conj),
            )
            if can_dedup and ctx.coefficient.periodic:
                dist = orbit_distance(ctx, rec.v_star, kept.v_star)
            else:
                dist = min(
                    (rec.v_star - kept.v_star).lp_norm(ctx.exponents.p_conj),
                    (rec.v_star + kept.v_star).lp_norm(ctx.exponents.p_conj),
                )
            if dist <= cfg.dedup_rel_threshold * scale:
                duplicate = True
                break
        if not duplicate:
            distinct.append(rec)

    return MultistartResult(
        records=distinct,
        level_estimate=min(rec.level for rec in distinct),
        outcomes=outcomes,
    )


def ps_boundedness_check(ctx: FunctionalContext, iterates, C: float) -> bool:
    """Palais-Smale norm bound: every iterate satisfies
    ||v||_{p'}^{p'-1} <= max(1, C / (1/p' - 1/2))."""
    pc = ctx.exponents.p_conj
    bound = max(1.0, C / (1.0 / pc - 0.5))
    for v in iterates:
        if v.lp_norm(pc) ** (pc - 1.0) > bound:
            return False
    return True
