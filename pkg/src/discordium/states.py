"""Validated density matrices, bipartite block structure, and random-state
generators.

Generators take explicit seeds (or ``numpy.random.Generator`` instances) and
never touch global PRNG state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadRank,
    DimensionMismatch,
    IndexOutOfRange,
    NotHermitian,
    NotPositive,
    TraceNotOne,
)
from .linalg import (
    as_square_matrix,
    hermiticity_defect,
    kron,
    partial_trace,
    support_cutoff,
)

VALIDATION_TOL = 1e-10

# Blocks with probability at or below this are treated as absent; the
# classicality machinery only constrains nonzero-probability indices.
ZERO_PROB_CUTOFF = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state.

    ``spectrum`` caches the ascending eigenvalues computed during
    validation; ``support_rank`` counts eigenvalues above the support
    cutoff. Construct through :func:`validate_density`.
    """

    mat: np.ndarray
    spectrum: np.ndarray
    support_rank: int

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix tagged with factor dimensions (d_a, d_b)."""

    state: DensityMatrix
    d_a: int
    d_b: int

    def __post_init__(self):
        if self.d_a * self.d_b != self.state.dim:
            raise DimensionMismatch(
                f"d_a*d_b = {self.d_a * self.d_b} != state dimension {self.state.dim}"
            )

    @property
    def mat(self) -> np.ndarray:
        return self.state.mat


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Block traces p_a and normalized diagonal blocks of a bipartite state.

    ``states[a]`` is ``None`` where ``probs[a]`` is at or below the
    zero-probability cutoff: those conditional states are undefined.
    """

    probs: np.ndarray
    states: tuple = field(default=())

    def defined_indices(self) -> list[int]:
        return [a for a, s in enumerate(self.states) if s is not None]


def validate_density(m, tol: float = VALIDATION_TOL) -> DensityMatrix:
    """Validate (and minimally repair) a candidate density matrix.

    Violations of hermiticity, positivity, or unit trace within ``tol`` are
    repaired (symmetrize, clip eigenvalues to zero, renormalize); anything
    larger raises the error naming the violated invariant and its magnitude.
    """
    a = as_square_matrix(m)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    h = 0.5 * (a + a.conj().T)
    vals, vecs = np.linalg.eigh(h)
    if vals[0] < -tol:
        raise NotPositive(f"eigenvalue {vals[0]:.3e} below -{tol:.1e}")
    tr = float(np.sum(vals))
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace deviates from 1 by {tr - 1.0:.3e}")
    if vals[0] < 0.0 or abs(tr - 1.0) > 0.0:
        vals = np.clip(vals, 0.0, None)
        vals = vals / np.sum(vals)
        h = (vecs * vals) @ vecs.conj().T
        h = 0.5 * (h + h.conj().T)
    rank = int(np.count_nonzero(vals > support_cutoff(vals)))
    return DensityMatrix(mat=h, spectrum=vals, support_rank=rank)


def bipartite(m, d_a: int, d_b: int, tol: float = VALIDATION_TOL) -> BipartiteState:
    """Validate a matrix as a bipartite state with the given factor dims."""
    return BipartiteState(state=validate_density(m, tol), d_a=d_a, d_b=d_b)


def block(s: BipartiteState, a: int, a2: int) -> np.ndarray:
    """The d_b x d_b block of ``s`` at block position (a, a2), A-major."""
    if not (0 <= a < s.d_a and 0 <= a2 < s.d_a):
        raise IndexOutOfRange(f"block ({a}, {a2}) outside 0..{s.d_a - 1}")
    d_b = s.d_b
    return s.mat[a * d_b:(a + 1) * d_b, a2 * d_b:(a2 + 1) * d_b].copy()


def conditional_ensemble(s: BipartiteState,
                         zero_prob_cutoff: float = ZERO_PROB_CUTOFF) -> ConditionalEnsemble:
    """Probabilities p_a = tr(block(a, a)) and conditional states block/p_a.

    Dividing by a tiny probability amplifies the state's own rounding noise
    by 1/p_a, so the validation tolerance grows accordingly rather than
    rejecting blocks that are PSD up to floating error.
    """
    probs = np.empty(s.d_a)
    states: list[DensityMatrix | None] = []
    for a in range(s.d_a):
        blk = block(s, a, a)
        p = float(np.trace(blk).real)
        probs[a] = p
        if p > zero_prob_cutoff:
            tol = max(1e-8, 1e-14 / p)
            states.append(validate_density(blk / p, tol=tol))
        else:
            states.append(None)
    return ConditionalEnsemble(probs=probs, states=tuple(states))


def assemble_blocks(blocks: np.ndarray) -> np.ndarray:
    """Inverse of block access: stack a (d_a, d_a) grid of d_b x d_b blocks."""
    d_a = blocks.shape[0]
    d_b = blocks.shape[2]
    return blocks.transpose(0, 2, 1, 3).reshape(d_a * d_b, d_a * d_b)


def assemble_cq(basis: np.ndarray, probs, b_states) -> BipartiteState:
    """Build sum_i p_i |u_i><u_i| (x) rho_i with |u_i> the basis columns."""
    basis = np.asarray(basis, dtype=complex)
    d_a = basis.shape[0]
    d_b = np.asarray(b_states[0]).shape[0]
    out = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for i, (p, rho) in enumerate(zip(probs, b_states)):
        u = basis[:, i]
        out += p * kron(np.outer(u, u.conj()), np.asarray(rho, dtype=complex))
    return bipartite(out, d_a, d_b)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The R diagonal phases are divided out so the distribution is exactly
    Haar rather than QR-convention dependent.
    """
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _random_density(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_state(d: int, rank: int | None = None, seed: int = 0) -> DensityMatrix:
    """Random state G G† / tr(G G†) with G a d x rank complex Gaussian matrix."""
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise BadRank(f"rank {rank} outside 1..{d}")
    rng = np.random.default_rng(seed)
    return validate_density(_random_density(d, rank, rng))


def random_cq_state_with_parts(d_a: int, d_b: int, seed: int = 0):
    """Random classical-quantum state plus its generating pieces.

    Returns ``(state, basis, probs, b_states)``: a Haar-random basis of the
    A factor, Dirichlet-uniform probabilities, and full-rank random
    conditional B states, assembled as sum_i p_i |u_i><u_i| (x) rho_i.
    """
    rng = np.random.default_rng(seed)
    basis = haar_unitary(d_a, rng)
    probs = rng.dirichlet(np.ones(d_a))
    b_states = [_random_density(d_b, d_b, rng) for _ in range(d_a)]
    return assemble_cq(basis, probs, b_states), basis, probs, b_states


def random_cq_state(d_a: int, d_b: int, seed: int = 0) -> BipartiteState:
    """Random classical-quantum state; deterministic given the seed."""
    return random_cq_state_with_parts(d_a, d_b, seed)[0]


def reduced_state(s: BipartiteState, keep: str) -> np.ndarray:
    """Reduced operator of a bipartite state on the kept factor."""
    return partial_trace(s.mat, s.d_a, s.d_b, keep=keep)
