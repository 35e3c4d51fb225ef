"""Classical-quantum discord and constructive classicality certification.

Discord is the smallest mutual-information loss caused by block-dephasing
the A factor, minimized over all A bases (optionally after isometric
enlargement of A to dimension d_A^2, which realizes minimization over
rank-one POVMs). Certification extracts, at a discord-zero basis, the
partition of A indices with equal conditional B states and the basis that
block-diagonalizes the state, then verifies the result against its own
tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar, nnls

from .errors import (
    BadConfig,
    CertificateInconsistent,
    NotAtEquality,
    WrongDimension,
)
from .channels import dephase, embed_state
from .linalg import kron, matrix_function_on_support, support_cutoff, trace_distance
from .measures import mutual_information, spectrum_entropy
from .petz import recovery_residual
from .states import (
    ZERO_PROB_CUTOFF,
    BipartiteState,
    ConditionalEnsemble,
    DensityMatrix,
    bipartite,
    conditional_ensemble,
    haar_unitary,
)

# Default tolerances: discord-zero threshold in bits, conditional-state
# grouping in trace distance, certificate off-diagonal residual relative to
# the Frobenius norm of the state. An order of magnitude above accumulated
# eigensolver error at these dimensions.
ZERO_DISCORD_TOL = 1e-6
GROUPING_TOL = 1e-6
CERT_RESIDUAL_FACTOR = 1e-7

# Restarts stop early once a basis this close to zero gap is found.
_EARLY_STOP = 1e-10

# Consistency gates for the extraction path. These catch structural failure
# (wrong basis, wrong grouping); the strict soundness check is the final
# off-diagonal residual.
_EQ_TOL = 1e-5
_CROSS_TOL = 1e-4
_P_ORTHO_TOL = 1e-4

_DENOM_CUTOFF = 1e-8


@dataclass(frozen=True)
class DiscordConfig:
    """Multi-start optimizer settings; identical seeds give identical runs."""

    restarts: int = 16
    max_iters: int = 200
    step_tol: float = 1e-10
    enlarge: bool = False
    seed: int = 0


@dataclass(frozen=True)
class DiscordResult:
    """Outcome of the discord minimization.

    ``value`` equals I(rho) - I(D_basis(rho)) recomputed at ``best_basis``
    (on the enlarged state when ``enlarged``). ``converged`` reports whether
    the best restart terminated by tolerance rather than iteration cap.
    """

    value: float
    best_basis: np.ndarray
    enlarged: bool
    restarts_used: int
    converged: bool


@dataclass(frozen=True)
class ClassicalityCertificate:
    """Constructive witness that a state is classical-quantum.

    In ``basis``, the state's off-diagonal blocks all have Frobenius norm at
    most the certification tolerance; ``partition`` groups the
    nonzero-probability basis indices by equal conditional B state, and
    ``conditional_states`` holds one representative per part. ``residual``
    is the largest off-diagonal block norm actually measured.
    """

    basis: np.ndarray
    partition: tuple
    conditional_states: tuple
    residual: float


@dataclass(frozen=True)
class NotClassical:
    """Witness that certification failed: best basis still loses information."""

    value: float
    basis: np.ndarray
    residual: float


@dataclass(frozen=True)
class PeelingTrace:
    """Diagnostic record of the convex-hull peeling rounds.

    ``groups`` partitions indices by equal conditional state; ``rounds``
    lists, per peeling round, the indices whose states were extremal in the
    remaining hull; ``vanishing_pairs`` are the index pairs whose
    root-overlap cross terms the argument forces to zero;
    ``eq_residuals[a]`` is the convex-combination identity residual (NaN
    where the denominator made the row vacuous).
    """

    groups: tuple
    rounds: tuple
    vanishing_pairs: tuple
    eq_residuals: np.ndarray


class _DephasingGap:
    """f(U) = I(rho) - I(D_U(rho)), evaluated through the block shortcut.

    Dephasing leaves rho_B fixed, so the gap reduces to
    S(rho_A) - S(rho_AB) + sum_a p_a S(rho^B_a) with p_a and rho^B_a the
    diagonal-block data in the measured basis. Only d_a eigenproblems of
    size d_b are needed per evaluation.
    """

    def __init__(self, mat: np.ndarray, d_a: int, d_b: int):
        self.d_a = d_a
        self.d_b = d_b
        self.r = mat.reshape(d_a, d_b, d_a, d_b)
        rho_a = np.einsum("ibjb->ij", self.r)
        self.const = spectrum_entropy(np.linalg.eigvalsh(rho_a)) - spectrum_entropy(
            np.linalg.eigvalsh(mat)
        )

    def batch(self, us: np.ndarray) -> np.ndarray:
        """Evaluate on a stack of bases of shape (g, d_a, d_a)."""
        blocks = np.einsum("gia,ibjc,gja->gabc", us.conj(), self.r, us)
        w = np.clip(np.linalg.eigvalsh(blocks), 0.0, None)
        p = w.sum(axis=2)
        wl = np.where(w > 0.0, w * np.log2(np.where(w > 0.0, w, 1.0)), 0.0)
        pl = np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
        return self.const - wl.sum(axis=(1, 2)) + pl.sum(axis=1)

    def __call__(self, u: np.ndarray) -> float:
        return float(self.batch(u[np.newaxis])[0])


def _unitary_from_params(x: np.ndarray, dim: int, base: np.ndarray) -> np.ndarray:
    """base @ exp(iH) for the Hermitian H packed into dim^2 real parameters."""
    h = np.zeros((dim, dim), dtype=complex)
    h[np.arange(dim), np.arange(dim)] = x[:dim]
    iu, ju = np.triu_indices(dim, k=1)
    n_off = iu.size
    re = x[dim:dim + n_off]
    im = x[dim + n_off:dim + 2 * n_off]
    h[iu, ju] = re + 1j * im
    h[ju, iu] = re - 1j * im
    vals, vecs = np.linalg.eigh(h)
    return base @ ((vecs * np.exp(1j * vals)) @ vecs.conj().T)


def _check_config(cfg: DiscordConfig) -> None:
    if cfg.restarts < 1:
        raise BadConfig(f"restarts must be >= 1, got {cfg.restarts}")
    if cfg.max_iters < 1:
        raise BadConfig(f"max_iters must be >= 1, got {cfg.max_iters}")
    if not cfg.step_tol > 0:
        raise BadConfig(f"step_tol must be positive, got {cfg.step_tol}")


def discord(s: BipartiteState, cfg: DiscordConfig | None = None) -> DiscordResult:
    """Minimize the dephasing mutual-information gap over A bases.

    Multi-start local minimization: the unitary is parametrized as
    U0 exp(iH) with H Hermitian (d^2 real parameters) and minimized with
    Powell's derivative-free method. The first start is the eigenbasis of
    rho_A (exact for generic classical-quantum states); the remaining starts
    are Haar random from the seed. Restarts stop early once a basis with
    numerically zero gap is found. With ``enlarge`` the A factor is first
    zero-padded into dimension d_A^2 so the scan ranges over rank-one POVMs
    rather than projective measurements only.

    The returned value is recomputed as I(rho) - I(D(rho)) at the best
    basis through the validated entropy path, so it satisfies the
    :class:`DiscordResult` contract by construction. Local minimization
    carries no global-optimality guarantee.
    """
    cfg = cfg or DiscordConfig()
    _check_config(cfg)
    work = embed_state(s, s.d_a * s.d_a) if cfg.enlarge else s
    dim = work.d_a
    gap = _DephasingGap(work.mat, work.d_a, work.d_b)
    rho_a = np.einsum("ibjb->ij", work.mat.reshape(dim, work.d_b, dim, work.d_b))
    smart_start = np.linalg.eigh(rho_a)[1]
    rng = np.random.default_rng(cfg.seed)

    n_params = dim * dim
    x0 = np.zeros(n_params)
    best_val = np.inf
    best_u = smart_start
    best_ok = False
    used = 0
    for restart in range(cfg.restarts):
        u0 = smart_start if restart == 0 else haar_unitary(dim, rng)
        res = minimize(
            lambda x: gap(_unitary_from_params(x, dim, u0)),
            x0,
            method="Powell",
            options={
                "maxiter": cfg.max_iters,
                "maxfev": 200_000,
                "xtol": 1e-10,
                "ftol": cfg.step_tol,
            },
        )
        used += 1
        if res.fun < best_val:
            best_val = float(res.fun)
            best_u = _unitary_from_params(res.x, dim, u0)
            best_ok = bool(res.success)
        if best_val < _EARLY_STOP:
            break

    value = _exact_gap(work, best_u)
    return DiscordResult(
        value=value,
        best_basis=best_u,
        enlarged=cfg.enlarge,
        restarts_used=used,
        converged=bool(best_ok or best_val < _EARLY_STOP),
    )


def _exact_gap(s: BipartiteState, basis: np.ndarray) -> float:
    """I(rho) - I(D_basis(rho)) through the validated entropy path."""
    dephased = bipartite(dephase(s, basis), s.d_a, s.d_b, tol=1e-8)
    return mutual_information(s) - mutual_information(dephased)


def qubit_discord_oracle(s: BipartiteState, grid: int = 400) -> float:
    """Independent discord oracle for d_A = 2 by exhaustive Bloch-angle grid.

    Projective qubit measurements are exactly the bases
    {(cos t/2, e^{i p} sin t/2), (sin t/2, -e^{i p} cos t/2)}, so the gap is
    scanned on a grid x grid lattice over (t, p) and the best cell is
    refined by alternating golden-section line searches. Shares no search
    machinery with :func:`discord`.
    """
    if s.d_a != 2:
        raise WrongDimension(f"oracle requires d_a = 2, got {s.d_a}")
    if grid < 8:
        raise BadConfig(f"grid must be >= 8, got {grid}")
    gap = _DephasingGap(s.mat, 2, s.d_b)

    thetas = np.linspace(0.0, np.pi, grid)
    phis = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    us = _bloch_bases(tg.ravel(), pg.ravel())
    vals = gap.batch(us)
    k = int(np.argmin(vals))
    best = float(vals[k])
    t0, p0 = tg.ravel()[k], pg.ravel()[k]

    def f_angles(t, p):
        return gap(_bloch_bases(np.array([t]), np.array([p]))[0])

    ht = thetas[1] - thetas[0]
    hp = phis[1] - phis[0]
    t, p = float(t0), float(p0)
    for _ in range(3):
        res_t = minimize_scalar(
            lambda x: f_angles(x, p), bounds=(t - 2 * ht, t + 2 * ht), method="bounded",
            options={"xatol": 1e-12},
        )
        t = float(res_t.x)
        res_p = minimize_scalar(
            lambda x: f_angles(t, x), bounds=(p - 2 * hp, p + 2 * hp), method="bounded",
            options={"xatol": 1e-12},
        )
        p = float(res_p.x)
        best = min(best, float(res_p.fun))
    return best


def _bloch_bases(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    ct = np.cos(0.5 * theta)
    st = np.sin(0.5 * theta)
    ph = np.exp(1j * phi)
    us = np.empty(theta.shape + (2, 2), dtype=complex)
    us[..., 0, 0] = ct
    us[..., 1, 0] = st * ph
    us[..., 0, 1] = st
    us[..., 1, 1] = -ct * ph
    return us


# ---------------------------------------------------------------------------
# Equality-case identity and convex peeling
# ---------------------------------------------------------------------------


def equality_weights(sqrt_a: np.ndarray, probs: np.ndarray,
                     denom_cutoff: float = _DENOM_CUTOFF):
    """Convex weights of the equality-case identity, rows as constraints.

    With c[a, a'] = |<a| rho_A^{1/2} |a'>|^2 in the measured basis, the
    identity says rho^B_a = sum_{a' != a} w[a, a'] rho^B_{a'} with
    w[a, a'] = c[a, a'] / (p_a - c[a, a]). A row whose denominator is at or
    below ``denom_cutoff`` imposes no constraint and is flagged ineligible.
    Returns ``(weights, eligible)``.
    """
    c = np.abs(np.asarray(sqrt_a)) ** 2
    probs = np.asarray(probs, dtype=float)
    n = probs.size
    w = np.zeros((n, n))
    eligible = np.zeros(n, dtype=bool)
    for a in range(n):
        denom = probs[a] - c[a, a]
        if probs[a] > ZERO_PROB_CUTOFF and denom > denom_cutoff:
            eligible[a] = True
            w[a] = c[a] / denom
            w[a, a] = 0.0
    return w, eligible


def equality_residuals(ensemble: ConditionalEnsemble, weights: np.ndarray,
                       eligible: np.ndarray) -> np.ndarray:
    """Frobenius residual of the convex-combination identity per row.

    Ineligible rows (vacuous denominator or zero probability) come back NaN.
    """
    n = ensemble.probs.size
    out = np.full(n, np.nan)
    for a in range(n):
        if not eligible[a] or ensemble.states[a] is None:
            continue
        combo = np.zeros_like(ensemble.states[a].mat)
        for a2, st in enumerate(ensemble.states):
            if a2 == a or st is None:
                continue
            combo += weights[a, a2] * st.mat
        out[a] = float(np.linalg.norm(ensemble.states[a].mat - combo))
    return out


def _real_vec(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def _convex_gap(target: np.ndarray, others: list) -> float:
    """Trace distance from ``target`` to the simplex hull of ``others``.

    Solved as nonnegative least squares with a penalty row enforcing that
    the weights sum to one.
    """
    if not others:
        return np.inf
    penalty = 1e3
    a = np.stack([_real_vec(o) for o in others], axis=1)
    a = np.vstack([a, penalty * np.ones((1, len(others)))])
    b = np.concatenate([_real_vec(target), [penalty]])
    x, _ = nnls(a, b)
    total = float(x.sum())
    if total <= 1e-12:
        return np.inf
    combo = sum(xi * o for xi, o in zip(x, others)) / total
    return trace_distance(target, combo)


def peel_extremal(ensemble: ConditionalEnsemble, weights: np.ndarray,
                  eligible: np.ndarray | None = None,
                  eq_tol: float = _EQ_TOL,
                  grouping_tol: float = GROUPING_TOL) -> PeelingTrace:
    """Round-by-round convex-hull peeling of the conditional states.

    First validates the convex-combination identity on every eligible row
    (raising :class:`NotAtEquality` past ``eq_tol``: the basis does not
    achieve the mutual-information equality). Indices with equal states
    (trace distance within ``grouping_tol``, transitive closure) are grouped;
    each round marks the groups whose states are not convex combinations of
    the other remaining groups' states as extremal, records the cross terms
    that must vanish between them and everything else still present, and
    removes them. If a round finds no extremal group (a numerically flat
    hull), all remaining groups are taken in one final layer; downstream
    orthogonality checks remain in force either way.
    """
    probs = ensemble.probs
    n = probs.size
    if eligible is None:
        eligible = np.ones(n, dtype=bool) & (probs > ZERO_PROB_CUTOFF)
    residuals = equality_residuals(ensemble, weights, eligible)
    worst = np.nanmax(residuals) if np.any(~np.isnan(residuals)) else 0.0
    if worst > eq_tol:
        a = int(np.nanargmax(residuals))
        raise NotAtEquality(
            f"identity residual {worst:.3e} at index {a} exceeds {eq_tol:.1e}"
        )

    active = [a for a in range(n) if ensemble.states[a] is not None]
    groups = _group_equal_states(ensemble, active, grouping_tol)

    working = list(range(len(groups)))
    rounds = []
    pairs = set()
    while working:
        extremal = []
        for g in working:
            others = [
                ensemble.states[groups[g2][0]].mat
                for g2 in working
                if g2 != g
            ]
            target = ensemble.states[groups[g][0]].mat
            if _convex_gap(target, others) > grouping_tol:
                extremal.append(g)
        if not extremal:
            extremal = list(working)
        round_indices = sorted(a for g in extremal for a in groups[g])
        rounds.append(tuple(round_indices))
        for g in extremal:
            for g2 in working:
                if g2 == g:
                    continue
                for a in groups[g]:
                    for a2 in groups[g2]:
                        pairs.add((min(a, a2), max(a, a2)))
        working = [g for g in working if g not in extremal]

    return PeelingTrace(
        groups=tuple(tuple(g) for g in groups),
        rounds=tuple(rounds),
        vanishing_pairs=tuple(sorted(pairs)),
        eq_residuals=residuals,
    )


def _group_equal_states(ensemble: ConditionalEnsemble, active: list,
                        grouping_tol: float) -> list:
    """Transitive-closure grouping by trace distance; lowest index leads."""
    parent = {a: a for a in active}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, a in enumerate(active):
        for a2 in active[i + 1:]:
            d = trace_distance(ensemble.states[a].mat, ensemble.states[a2].mat)
            if d <= grouping_tol:
                ra, rb = find(a), find(a2)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    buckets: dict[int, list] = {}
    for a in active:
        buckets.setdefault(find(a), []).append(a)
    return [sorted(buckets[r]) for r in sorted(buckets)]


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


def certify_classical(s: BipartiteState, tol: float = ZERO_DISCORD_TOL,
                      cfg: DiscordConfig | None = None,
                      grouping_tol: float = GROUPING_TOL,
                      residual_factor: float = CERT_RESIDUAL_FACTOR):
    """Certify a state classical-quantum, or return a NotClassical witness.

    Runs :func:`discord` (projective, non-enlarged: the block-diagonalization
    statement concerns bases of the original A factor). When the optimum gap
    exceeds ``tol`` the result is a :class:`NotClassical` witness. Otherwise
    the certificate is extracted along the constructive path: conditional
    ensemble at the best basis, grouping of equal conditional states, convex
    peeling with its vanishing cross terms, the root-weighted group
    projectors with pairwise orthogonal supports, and their simultaneous
    diagonalization. The resulting basis is polished against the off-diagonal
    block mass when needed and the certificate is verified against its own
    invariants before being returned; any failed check raises
    :class:`CertificateInconsistent`.
    """
    cfg = cfg or DiscordConfig()
    if cfg.enlarge:
        cfg = DiscordConfig(
            restarts=cfg.restarts, max_iters=cfg.max_iters,
            step_tol=cfg.step_tol, enlarge=False, seed=cfg.seed,
        )
    result = discord(s, cfg)
    if result.value > tol:
        return NotClassical(
            value=result.value,
            basis=result.best_basis,
            residual=recovery_residual(s, result.best_basis),
        )

    u = result.best_basis
    rotated = _rotate_a(s, u)
    rho_a = np.einsum(
        "ibjb->ij", rotated.mat.reshape(s.d_a, s.d_b, s.d_a, s.d_b)
    )
    # Indices outside the numerical support of rho_A carry no usable
    # conditional state and are excluded from the partition outright; their
    # contribution is bounded by the support cutoff and stays far below the
    # certificate residual threshold.
    prob_cutoff = max(
        ZERO_PROB_CUTOFF, support_cutoff(np.linalg.eigvalsh(rho_a))
    )
    ens = conditional_ensemble(rotated, zero_prob_cutoff=prob_cutoff)
    sqrt_a = matrix_function_on_support(rho_a, np.sqrt)
    weights, eligible = equality_weights(sqrt_a, ens.probs)
    try:
        trace = peel_extremal(ens, weights, eligible, grouping_tol=grouping_tol)
    except NotAtEquality as exc:
        raise CertificateInconsistent(
            f"peeling rejected the discord-zero basis: {exc}"
        ) from exc

    for a, a2 in trace.vanishing_pairs:
        overlap = abs(sqrt_a[a, a2])
        if overlap > _CROSS_TOL:
            raise CertificateInconsistent(
                f"cross term |<{a}|rho_A^(1/2)|{a2}>| = {overlap:.3e} "
                f"should vanish but exceeds {_CROSS_TOL:.1e}"
            )

    projectors = []
    for group in trace.groups:
        sel = np.zeros((s.d_a, s.d_a))
        for a in group:
            sel[a, a] = 1.0
        projectors.append(sqrt_a @ sel @ sqrt_a)
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            cross = float(np.linalg.norm(projectors[i] @ projectors[j]))
            if cross > _P_ORTHO_TOL:
                raise CertificateInconsistent(
                    f"group projectors {i} and {j} overlap: ||P_i P_j|| = {cross:.3e}"
                )

    w_cols = []
    part_sizes = []
    for i, p_mat in enumerate(projectors):
        vals, vecs = np.linalg.eigh(0.5 * (p_mat + p_mat.conj().T))
        cut = support_cutoff(vals)
        keep = np.nonzero(vals > cut)[0][::-1]
        if len(keep) == 0:
            raise CertificateInconsistent(
                f"group projector {i} has numerically empty support"
            )
        part_sizes.append(len(keep))
        for k in keep:
            w_cols.append(vecs[:, k])
    if not w_cols:
        raise CertificateInconsistent("no supported group projectors found")
    w = _complete_basis(np.array(w_cols).T, s.d_a)
    basis = u @ w

    threshold = residual_factor * float(np.linalg.norm(s.mat))
    residual = _offdiag_residual(s, basis)
    if residual > 0.25 * threshold:
        basis = _polish_basis(s, basis)
        residual = _offdiag_residual(s, basis)
    if residual > threshold:
        raise CertificateInconsistent(
            f"off-diagonal residual {residual:.3e} exceeds {threshold:.3e} "
            "in the extracted basis"
        )

    partition = []
    offset = 0
    for size in part_sizes:
        partition.append(tuple(range(offset, offset + size)))
        offset += size

    final = conditional_ensemble(_rotate_a(s, basis), zero_prob_cutoff=prob_cutoff)
    conditional_states = []
    for part, group in zip(partition, trace.groups):
        rep = None
        for j in part:
            st = final.states[j]
            if st is None:
                raise CertificateInconsistent(
                    f"certified index {j} has vanishing probability"
                )
            if rep is None:
                rep = st
            elif trace_distance(rep.mat, st.mat) > grouping_tol:
                raise CertificateInconsistent(
                    f"conditional states inside part {part} differ beyond "
                    f"{grouping_tol:.1e}"
                )
        conditional_states.append(rep)
    for i in range(len(conditional_states)):
        for j in range(i + 1, len(conditional_states)):
            d = trace_distance(conditional_states[i].mat, conditional_states[j].mat)
            if d <= grouping_tol:
                raise CertificateInconsistent(
                    f"parts {i} and {j} carry equal conditional states "
                    f"(distance {d:.3e}); grouping is inconsistent"
                )

    return ClassicalityCertificate(
        basis=basis,
        partition=tuple(partition),
        conditional_states=tuple(conditional_states),
        residual=residual,
    )


def _complete_basis(cols: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormalize near-orthonormal columns and complete them to a unitary.

    Modified Gram-Schmidt keeps each column close to its input; the kernel
    directions are filled from the eigenvectors of the complement projector.
    """
    q_cols: list[np.ndarray] = []
    for j in range(cols.shape[1]):
        v = cols[:, j].astype(complex)
        for u in q_cols:
            v = v - u * (u.conj() @ v)
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-6:
            raise CertificateInconsistent(
                "group eigenvectors are not linearly independent"
            )
        q_cols.append(v / nrm)
    if len(q_cols) < dim:
        q = np.array(q_cols).T
        vals, vecs = np.linalg.eigh(np.eye(dim) - q @ q.conj().T)
        for j in range(dim):
            if vals[j] > 0.5:
                v = vecs[:, j].astype(complex)
                for u in q_cols:
                    v = v - u * (u.conj() @ v)
                q_cols.append(v / float(np.linalg.norm(v)))
    if len(q_cols) != dim:
        raise CertificateInconsistent(
            f"basis completion produced {len(q_cols)} of {dim} columns"
        )
    return np.array(q_cols).T


def _rotate_a(s: BipartiteState, u: np.ndarray) -> BipartiteState:
    rot = kron(u.conj().T, np.eye(s.d_b))
    mat = rot @ s.mat @ rot.conj().T
    return BipartiteState(
        state=DensityMatrix(
            mat=0.5 * (mat + mat.conj().T),
            spectrum=s.state.spectrum,
            support_rank=s.state.support_rank,
        ),
        d_a=s.d_a,
        d_b=s.d_b,
    )


def _offdiag_residual(s: BipartiteState, basis: np.ndarray) -> float:
    """Largest Frobenius norm over off-diagonal blocks in the given basis."""
    rotated = _rotate_a(s, basis)
    r = rotated.mat.reshape(s.d_a, s.d_b, s.d_a, s.d_b)
    worst = 0.0
    for a in range(s.d_a):
        for a2 in range(s.d_a):
            if a != a2:
                worst = max(worst, float(np.linalg.norm(r[a, :, a2, :])))
    return worst


def _offdiag_mass(mat: np.ndarray, d_a: int, d_b: int, u: np.ndarray) -> float:
    rot = np.kron(u.conj().T, np.eye(d_b))
    m = (rot @ mat @ rot.conj().T).reshape(d_a, d_b, d_a, d_b)
    total = float(np.sum(np.abs(m) ** 2))
    diag = float(sum(np.sum(np.abs(m[a, :, a, :]) ** 2) for a in range(d_a)))
    return total - diag


def _polish_basis(s: BipartiteState, basis: np.ndarray) -> np.ndarray:
    """Locally minimize off-diagonal block mass to sharpen a certificate basis.

    The constructive extraction lands within optimizer accuracy of an exact
    block-diagonalizing basis; the mass function has an exact zero there, so
    a short derivative-free descent recovers it to near machine precision.
    """
    dim = s.d_a
    res = minimize(
        lambda x: _offdiag_mass(s.mat, s.d_a, s.d_b,
                                _unitary_from_params(x, dim, basis)),
        np.zeros(dim * dim),
        method="Powell",
        options={"maxiter": 60, "maxfev": 100_000, "xtol": 1e-12, "ftol": 1e-16},
    )
    return _unitary_from_params(res.x, dim, basis)
