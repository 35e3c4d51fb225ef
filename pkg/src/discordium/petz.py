"""Petz recovery maps and the closed-form block reconstruction.

For a channel E and reference state sigma, the recovery map is

    R(Y) = sigma^{1/2} E*( E(sigma)^{-1/2} Y E(sigma)^{-1/2} ) sigma^{1/2}

with all matrix functions taken on supports. R always restores sigma from
E(sigma); it restores a state rho exactly when E preserves the relative
entropy between rho and sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotUnitary
from .channels import KrausMap, adjoint, apply_matrix
from .linalg import (
    kron,
    matrix_function_on_support,
    trace_distance,
    unitarity_defect,
)
from .states import (
    BipartiteState,
    DensityMatrix,
    conditional_ensemble,
    reduced_state,
)

@dataclass(frozen=True)
class PetzMap:
    """Recovery map for (forward, reference), with cached matrix roots."""

    forward: KrausMap
    reference: DensityMatrix
    sigma_sqrt: np.ndarray
    e_sigma_inv_sqrt: np.ndarray


def build_petz(e: KrausMap, sigma: DensityMatrix) -> PetzMap:
    """Construct the recovery map of channel ``e`` at reference ``sigma``."""
    if sigma.dim != e.in_dim:
        raise DimensionMismatch(f"sigma dimension {sigma.dim} vs in_dim {e.in_dim}")
    sigma_sqrt = matrix_function_on_support(sigma.mat, np.sqrt)
    e_sigma = apply_matrix(e, sigma.mat)
    e_sigma = 0.5 * (e_sigma + e_sigma.conj().T)
    e_sigma_inv_sqrt = matrix_function_on_support(e_sigma, lambda x: x ** -0.5)
    return PetzMap(
        forward=e,
        reference=sigma,
        sigma_sqrt=sigma_sqrt,
        e_sigma_inv_sqrt=e_sigma_inv_sqrt,
    )


def apply_petz(p: PetzMap, y: np.ndarray) -> np.ndarray:
    """Evaluate the recovery map on an operator of the output space.

    Linear in ``y`` and Hermitian-preserving; no symmetrization is applied
    so linearity holds exactly for non-Hermitian inputs too.
    """
    y = np.asarray(y, dtype=complex)
    out_dim = p.forward.out_dim
    if y.shape != (out_dim, out_dim):
        raise DimensionMismatch(f"operator shape {y.shape} vs out_dim {out_dim}")
    w = p.e_sigma_inv_sqrt
    inner = apply_matrix(adjoint(p.forward), w @ y @ w)
    return p.sigma_sqrt @ inner @ p.sigma_sqrt


def reconstruct_cq(s: BipartiteState, basis: np.ndarray) -> np.ndarray:
    """Closed form of the recovery output for the block-dephasing channel.

    Returns sum_a rho_A^{1/2} |a><a| rho_A^{1/2} (x) rho^B_a with |a> the
    basis columns and rho^B_a the conditional states in that basis. This is
    exactly the Petz map of the dephasing channel at reference
    rho_A (x) rho_B applied to the dephased state, and it reproduces the
    state itself precisely when dephasing in ``basis`` loses no mutual
    information.
    """
    u = np.asarray(basis, dtype=complex)
    if u.shape != (s.d_a, s.d_a):
        raise DimensionMismatch(f"basis shape {u.shape} != ({s.d_a}, {s.d_a})")
    defect = unitarity_defect(u)
    if defect > 1e-10:
        raise NotUnitary(f"unitarity defect {defect:.3e} exceeds 1e-10")
    rho_a = reduced_state(s, "A")
    sqrt_a = matrix_function_on_support(rho_a, np.sqrt)
    rot = kron(u.conj().T, np.eye(s.d_b))
    rotated = BipartiteState(
        state=DensityMatrix(
            mat=rot @ s.mat @ rot.conj().T,
            spectrum=s.state.spectrum,
            support_rank=s.state.support_rank,
        ),
        d_a=s.d_a,
        d_b=s.d_b,
    )
    ens = conditional_ensemble(rotated)
    out = np.zeros_like(s.mat)
    for a, rho_b_a in enumerate(ens.states):
        if rho_b_a is None:
            continue
        w = sqrt_a @ u[:, a]
        out += kron(np.outer(w, w.conj()), rho_b_a.mat)
    return 0.5 * (out + out.conj().T)


def recovery_residual(s: BipartiteState, basis: np.ndarray) -> float:
    """Trace distance between a state and its block reconstruction."""
    return trace_distance(s.mat, reconstruct_cq(s, basis))
