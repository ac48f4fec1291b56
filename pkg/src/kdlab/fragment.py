"""The classical fragment: KD reality, KD positivity, and membership in
the span or convex hull of the KD-positive pure family.

Reality of the KD table is decided two ways that must agree: directly
from the table, and from the support of the bare characteristic function
(a Hermitian operator has a real KD table exactly when that support sits
inside the set where chi(g) = 1).  Hull membership is a least-squares
problem over the probability simplex solved by an active-set method, and
projection onto the KD-positive states alternates, Dykstra style,
between the spectral state set and the polyhedron of real nonnegative
KD tables, which is a plain clamp in KD coordinates because the KD map
is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .classify import enumerate_kd_positive_pure
from .errors import NotHermitianError, NotKdPositiveError
from .groups import SUBGROUP_ORDER_BOUND, FiniteAbelianGroup
from .kd import _kd_kernel, _kd_table
from .operators import Operator, check_state
from .tolerances import DEFAULT


# ---------------------------------------------------------------------------
# real embedding of Hermitian matrices; Frobenius dot = HS inner product


def _embed(matrix: np.ndarray) -> np.ndarray:
    return np.concatenate([matrix.real.reshape(-1), matrix.imag.reshape(-1)])


def _unembed(vec: np.ndarray, d: int) -> np.ndarray:
    half = d * d
    return vec[:half].reshape(d, d) + 1j * vec[half:].reshape(d, d)


@dataclass
class _FragmentContext:
    group: FiniteAbelianGroup
    family: tuple
    projectors: np.ndarray      # (n, d, d) matrix representations
    embed: np.ndarray           # (n, 2 d^2) real embeddings
    span_basis: np.ndarray      # orthonormal rows spanning the family
    span_dimension: int
    gram: np.ndarray            # embed @ embed.T


@lru_cache(maxsize=None)
def _context(group: FiniteAbelianGroup, bound: int = SUBGROUP_ORDER_BOUND) -> _FragmentContext:
    family = enumerate_kd_positive_pure(group, bound)
    projectors = np.stack([m.projector().matrix for m in family])
    embed = np.stack([_embed(p) for p in projectors])
    u, s, vt = np.linalg.svd(embed, full_matrices=False)
    rank = int(np.sum(s > s[0] * 1e-10))
    return _FragmentContext(
        group=group,
        family=family,
        projectors=projectors,
        embed=embed,
        span_basis=vt[:rank],
        span_dimension=rank,
        gram=embed @ embed.T,
    )


# ---------------------------------------------------------------------------
# reality and positivity checks


@dataclass
class KdRealResult:
    is_real: bool
    worst_violation: float
    direct_violation: float     # max |Im KD|
    support_violation: float    # max |char fn| off the chi(g) = 1 set
    methods_agree: bool


def kd_real_dimension(group: FiniteAbelianGroup) -> int:
    """Real dimension of the Hermitian operators with real KD tables.

    One real degree of freedom per phase-space point with chi(g) = 1,
    counted exactly on the integer phase table.
    """
    return int(np.count_nonzero(group.char_phase == 0))


def is_kd_real(op: Operator, tol: float = DEFAULT.structural) -> KdRealResult:
    """Decide KD reality of a Hermitian operator by two routes.

    Route one reads the imaginary part of the KD table; route two checks
    that the bare characteristic function vanishes wherever chi(g) != 1.
    The two violations vanish together, and the verdicts must agree.
    """
    if not op.is_hermitian(tol=1e-10):
        raise NotHermitianError("KD reality is only defined for Hermitian operators")
    group = op.group
    direct = float(np.max(np.abs(_kd_table(group, op.kernel).imag)))
    from .kd import char_fn

    support_values = char_fn(op, "standard0").values
    off_support = group.char_phase.T != 0
    if off_support.any():
        support = float(np.max(np.abs(support_values[off_support])))
    else:
        support = 0.0
    verdict_direct = direct <= tol
    verdict_support = support <= tol
    return KdRealResult(
        is_real=bool(verdict_direct and verdict_support),
        worst_violation=max(direct, support),
        direct_violation=direct,
        support_violation=support,
        methods_agree=verdict_direct == verdict_support,
    )


@dataclass
class KdPositivityResult:
    is_positive: bool
    worst_violation: float
    max_abs_imag: float
    min_real: float


def is_kd_positive_state(rho: Operator, tol: float = DEFAULT.positivity) -> KdPositivityResult:
    """True when the state's KD table is real and nonnegative within tol."""
    check_state(rho, tol)
    table = _kd_table(rho.group, rho.kernel)
    max_imag = float(np.max(np.abs(table.imag)))
    min_real = float(np.min(table.real))
    return KdPositivityResult(
        is_positive=bool(max_imag <= tol and min_real >= -tol),
        worst_violation=max(max_imag, -min(min_real, 0.0)),
        max_abs_imag=max_imag,
        min_real=min_real,
    )


# ---------------------------------------------------------------------------
# membership


@dataclass
class MembershipResult:
    verdict: str                       # "inside" | "outside" | "inconclusive"
    residual: float
    weights: np.ndarray | None = None
    witness: Operator | None = field(default=None, repr=False)
    gap: float | None = None
    span_dimension: int | None = None

    def to_json(self) -> dict:
        payload: dict = {"verdict": self.verdict, "residual": self.residual}
        if self.span_dimension is not None:
            payload["span_dimension"] = self.span_dimension
        if self.weights is not None:
            payload["certificate"] = {
                "weights": [
                    {"index": int(i), "weight": float(w)}
                    for i, w in enumerate(self.weights)
                    if abs(w) > 1e-12
                ]
            }
        if self.witness is not None:
            payload["certificate"] = {
                "witness": self.witness.to_json(),
                "gap": self.gap,
            }
        return payload


def span_membership(
    op: Operator, tol: float = DEFAULT.membership, bound: int = SUBGROUP_ORDER_BOUND
) -> MembershipResult:
    """Distance from the real span of the family projectors.

    Inside: real coefficients reproducing the operator.  Outside: the
    normalized orthogonal remainder W, which pairs to zero with every
    family member while <W, A> equals the reported gap.
    """
    if not op.is_hermitian(tol=1e-10):
        raise NotHermitianError("span membership is defined for Hermitian operators")
    ctx = _context(op.group, bound)
    y = _embed(op.matrix)
    coeffs, *_ = np.linalg.lstsq(ctx.embed.T, y, rcond=None)
    r = y - ctx.embed.T @ coeffs
    residual = float(np.linalg.norm(r))
    if residual <= tol:
        return MembershipResult(
            "inside", residual, weights=coeffs, span_dimension=ctx.span_dimension
        )
    w = r / residual
    gap = float(w @ y)
    family_side = float(np.max(np.abs(ctx.embed @ w)))
    witness = Operator.from_matrix(op.group, _unembed(w, op.group.order))
    if family_side <= max(tol, 1e-9 * max(1.0, gap)):
        return MembershipResult(
            "outside", residual, witness=witness, gap=gap, span_dimension=ctx.span_dimension
        )
    return MembershipResult("inconclusive", residual, span_dimension=ctx.span_dimension)


def _simplex_nnls(gram, corr, embed_cols, y, opt_tol=1e-12, max_iter=None):
    """Least squares over the probability simplex by active sets.

    Minimizes ``||y - A lam||`` subject to ``lam >= 0`` and
    ``sum(lam) = 1``.  The passive-set subproblem keeps the equality
    constraint in its KKT system; negative subproblem solutions trigger
    the usual interpolation step back to the feasible region.

    Parameters
    ----------
    gram : (n, n) precomputed A^T A
    corr : (n,) precomputed A^T y
    embed_cols : (m, n) the matrix A, used for direct residuals
    y : (m,) embedded target

    Returns (weights, residual, converged).
    """
    n = gram.shape[0]
    if max_iter is None:
        max_iter = 50 * n + 200
    scale = max(1.0, float(np.max(np.abs(corr))), float(np.max(gram)))
    start = int(np.argmax(2.0 * corr - np.diag(gram)))
    passive = [start]
    lam = np.zeros(n)
    lam[start] = 1.0
    converged = False
    for _ in range(max_iter):
        idx = np.array(passive)
        k = idx.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = gram[np.ix_(idx, idx)]
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.append(corr[idx], 1.0)
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        s, nu = sol[:k], float(sol[k])
        if s.min() >= -1e-12:
            lam = np.zeros(n)
            lam[idx] = np.clip(s, 0.0, None)
            lam /= lam.sum()
            grad = corr - gram @ lam
            slack = grad - nu
            slack[idx] = -np.inf
            j = int(np.argmax(slack))
            if slack[j] <= opt_tol * scale:
                converged = True
                break
            passive.append(j)
        else:
            lam_p = lam[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = np.where(s < 0, lam_p / np.maximum(lam_p - s, 1e-300), np.inf)
            alpha = min(max(float(np.min(steps)), 0.0), 1.0)
            lam_p = lam_p + alpha * (s - lam_p)
            keep = lam_p > 1e-14
            lam = np.zeros(n)
            lam[idx[keep]] = lam_p[keep]
            passive = [int(i) for i in idx[keep]]
            if not passive:
                passive = [start]
                lam[:] = 0.0
                lam[start] = 1.0
    total = lam.sum()
    if total > 0:
        lam = lam / total
    residual = float(np.linalg.norm(y - embed_cols @ lam))
    return lam, residual, converged


def conv_membership(
    rho: Operator,
    tol: float = DEFAULT.membership,
    positivity_tol: float = DEFAULT.positivity,
    bound: int = SUBGROUP_ORDER_BOUND,
) -> MembershipResult:
    """Membership of a KD-positive state in the hull of the pure family.

    Inside: simplex weights reconstructing the state within tol in HS
    norm.  Outside: the normalized residual direction W, whose value gap
    <W, rho> - max_i <W, Pi_i> is re-evaluated directly and certifies
    separation.  Queries outside the KD-positive set are rejected.
    """
    probe = is_kd_positive_state(rho, tol=positivity_tol)
    if not probe.is_positive:
        raise NotKdPositiveError(
            "hull membership asked for a state outside the KD-positive set "
            f"(worst violation {probe.worst_violation:.3e})"
        )
    ctx = _context(rho.group, bound)
    y = _embed(rho.matrix)
    corr = ctx.embed @ y
    lam, residual, converged = _simplex_nnls(ctx.gram, corr, ctx.embed.T, y)
    if residual <= tol:
        return MembershipResult("inside", residual, weights=lam)
    r = y - ctx.embed.T @ lam
    w = r / np.linalg.norm(r)
    gap = float(w @ y - np.max(ctx.embed @ w))
    witness = Operator.from_matrix(rho.group, _unembed(w, rho.group.order))
    if converged and gap > tol:
        return MembershipResult("outside", residual, witness=witness, gap=gap)
    return MembershipResult("inconclusive", residual, witness=witness, gap=gap)


# ---------------------------------------------------------------------------
# projection onto the KD-positive states


def _project_simplex(values: np.ndarray) -> np.ndarray:
    u = np.sort(values)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, values.size + 1)
    k = np.max(np.nonzero(u - css / ks > 0)[0]) + 1
    theta = css[k - 1] / k
    return np.clip(values - theta, 0.0, None)


def _project_states(matrix: np.ndarray) -> np.ndarray:
    herm = (matrix + matrix.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    w = _project_simplex(vals)
    return (vecs * w) @ vecs.conj().T


def _project_kd_nonneg(group: FiniteAbelianGroup, matrix: np.ndarray) -> np.ndarray:
    d = group.order
    table = _kd_table(group, matrix * d)
    clamped = np.clip(table.real, 0.0, None).astype(complex)
    return _kd_kernel(group, clamped) / d


def _dykstra(group: FiniteAbelianGroup, m0: np.ndarray, max_iter: int, tol: float):
    """Dykstra alternation between the state set and the KD polyhedron.

    Returns (state-side iterate, set gap, iterations); the first output
    is exactly positive semidefinite with unit trace.
    """
    x = m0
    p = np.zeros_like(m0)
    q = np.zeros_like(m0)
    y = x
    gap = np.inf
    its = 0
    for its in range(1, max_iter + 1):
        y = _project_states(x + p)
        p = x + p - y
        x = _project_kd_nonneg(group, y + q)
        q = y + q - x
        gap = float(np.linalg.norm(y - x))
        if gap <= tol:
            break
    return y, gap, its


@dataclass
class ProjectionResult:
    state: Operator
    distance: float
    residual: float        # worst KD violation of the returned state
    converged: bool
    iterations: int


def project_onto_kdpos(
    rho0: Operator, max_iter: int = 2000, tol: float = DEFAULT.structural
) -> ProjectionResult:
    """HS projection of a Hermitian operator onto the KD-positive states.

    Alternates between the spectral projection onto {PSD, trace 1} and
    the clamp onto {KD real and nonnegative} with Dykstra corrections,
    so the limit is the metric projection onto the intersection.  The
    returned state is exactly positive with unit trace; `residual`
    reports its remaining KD violation and `converged` whether the two
    sets met within tol.
    """
    if not rho0.is_hermitian(tol=1e-10):
        raise NotHermitianError("projection input must be Hermitian")
    group = rho0.group
    m0 = rho0.matrix
    y, gap, its = _dykstra(group, m0, max_iter, tol)
    table = _kd_table(group, y * group.order)
    residual = max(float(np.max(np.abs(table.imag))), -min(float(np.min(table.real)), 0.0))
    state = Operator.from_matrix(group, y)
    return ProjectionResult(
        state=state,
        distance=float(np.linalg.norm(y - m0)),
        residual=residual,
        converged=bool(gap <= tol),
        iterations=its,
    )


# ---------------------------------------------------------------------------
# hull gap witness search


@dataclass
class GapWitness:
    state: Operator
    functional: Operator
    gap: float
    conv_residual: float
    iterations_used: int
    directions_tried: int

    def to_json(self) -> dict:
        return {
            "gap": self.gap,
            "conv_residual": self.conv_residual,
            "iterations_used": self.iterations_used,
            "directions_tried": self.directions_tried,
            "state": self.state.to_json(),
            "functional": self.functional.to_json(),
        }


def _random_direction(ctx: _FragmentContext, rng: np.random.Generator) -> np.ndarray:
    d = ctx.group.order
    raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    herm = (raw + raw.conj().T) / 2.0
    vec = _embed(herm)
    vec = ctx.span_basis.T @ (ctx.span_basis @ vec)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return _random_direction(ctx, rng)
    return vec / norm


def _verify_outside_candidate(ctx, matrix, gap_tol, positivity_tol, membership_tol):
    """Polish a raw candidate and certify it independently, or reject it.

    The candidate is projected tightly onto the KD-positive states, must
    pass the strict feasibility check, and its hull residual must come
    with a separating functional whose value gap, re-evaluated directly
    against every family member, clears the witness tolerance.
    """
    group = ctx.group
    polished, _, _ = _dykstra(group, matrix, 4000, 1e-13)
    rho = Operator.from_matrix(group, polished)
    if not is_kd_positive_state(rho, tol=positivity_tol).is_positive:
        return None
    result = conv_membership(rho, tol=membership_tol, positivity_tol=positivity_tol)
    if result.verdict != "outside" or result.witness is None:
        return None
    w_vec = _embed(result.witness.matrix)
    gap = float(w_vec @ _embed(polished) - np.max(ctx.embed @ w_vec))
    if gap <= gap_tol:
        return None
    return rho, result.witness, gap, result.residual


def find_conv_gap_witness(
    group: FiniteAbelianGroup,
    seed: int = 0,
    budget: int = 10000,
    gap_tol: float = DEFAULT.witness_gap,
    positivity_tol: float = DEFAULT.positivity,
    membership_tol: float = DEFAULT.membership,
    steps_per_direction: int = 100,
    step_size: float = 0.25,
    search_proj_iters: int = 12,
    bound: int = SUBGROUP_ORDER_BOUND,
) -> GapWitness | None:
    """Search for a KD-positive state outside the hull of the pure family.

    Random Hermitian directions W (projected onto the family span, where
    the whole KD-positive set lives) drive projected gradient ascent of
    <W, rho> over the set, using a lightweight Dykstra projection per
    step.  Every iterate is scored by its hull residual discounted by
    the projection slack; the best iterate of a promising direction is
    polished tightly and certified by an independent verification
    (strict feasibility, fresh hull solve, direct re-evaluation of the
    separating gap against all family members).  The budget counts
    ascent steps; None means no verified witness within the budget,
    never a proof of absence.
    """
    ctx = _context(group, bound)
    rng = np.random.default_rng(seed)
    used = 0
    directions = 0
    trigger = max(3.0 * gap_tol, 1e-4)
    mixed = np.eye(group.order, dtype=complex) / group.order
    while used < budget:
        directions += 1
        w_vec = _random_direction(ctx, rng)
        # Ascent from the interior crosses the mid-boundary region where
        # hull gaps live; vertex starts stall on hull faces.
        current = mixed.copy()
        w_mat = _unembed(w_vec, group.order)
        best_score = -np.inf
        best_matrix = None
        for _ in range(steps_per_direction):
            if used >= budget:
                break
            used += 1
            stepped = current + step_size * w_mat
            current, set_gap, _ = _dykstra(group, stepped, search_proj_iters, 1e-12)
            yv = _embed(current)
            _, hull_residual, _ = _simplex_nnls(ctx.gram, ctx.embed @ yv, ctx.embed.T, yv)
            score = hull_residual - 3.0 * set_gap
            if score > best_score:
                best_score = score
                best_matrix = current
        if best_matrix is not None and best_score > trigger:
            verified = _verify_outside_candidate(
                ctx, best_matrix, gap_tol, positivity_tol, membership_tol
            )
            if verified is not None:
                rho, witness, gap, conv_residual = verified
                return GapWitness(
                    state=rho,
                    functional=witness,
                    gap=gap,
                    conv_residual=conv_residual,
                    iterations_used=used,
                    directions_tried=directions,
                )
    return None
