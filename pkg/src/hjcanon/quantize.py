"""Finite matrix realization of the odd sector and physical-state checks.

Dirac-basis gamma matrices for signature (+,-,-,-); the odd generators are
realized as psi_mu = gamma5 gamma_mu / sqrt(2) and psi5 = gamma5 / sqrt(2)
with gamma5 = gamma_0 gamma_1 gamma_2 gamma_3 (lower indices), so that the
anticommutators are {psi_mu, psi_nu} = g_mu_nu, {psi5, psi5} = -1,
{psi_mu, psi5} = 0. Physical states are the null space of
gamma5 (p.gamma - m), which coincides with the Dirac-equation null space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


@dataclass
class MatrixRep:
    gammas_upper: list  # gamma^mu, Dirac basis
    gammas_lower: list  # gamma_mu = g_mu_mu gamma^mu
    gamma5: np.ndarray
    psi: list  # realized psi_mu
    psi5: np.ndarray
    metric: tuple


def build_representation(metric=(1, -1, -1, -1)) -> MatrixRep:
    g0 = np.diag([1, 1, -1, -1]).astype(complex)
    gammas_upper = [g0]
    for s in _SIGMA:
        blk = np.zeros((4, 4), dtype=complex)
        blk[:2, 2:] = s
        blk[2:, :2] = -s
        gammas_upper.append(blk)
    gammas_lower = [metric[mu] * gammas_upper[mu] for mu in range(4)]
    gamma5 = gammas_lower[0] @ gammas_lower[1] @ gammas_lower[2] @ gammas_lower[3]
    inv_sqrt2 = 1 / np.sqrt(2)
    psi = [inv_sqrt2 * gamma5 @ gammas_lower[mu] for mu in range(4)]
    psi5 = inv_sqrt2 * gamma5
    return MatrixRep(gammas_upper, gammas_lower, gamma5, psi, psi5, tuple(metric))


def _anticommutator(a, b):
    return a @ b + b @ a


@dataclass
class AnticommutatorReport:
    deviations: dict  # relation label -> max entrywise deviation
    max_deviation: float

    def passed(self, tol=1e-12) -> bool:
        return self.max_deviation < tol


def check_anticommutators(rep: MatrixRep) -> AnticommutatorReport:
    """Max deviation over the 15 odd-sector relations (10 psi-psi pairs,
    4 psi-psi5 pairs, and the psi5 self relation)."""
    ident = np.eye(4, dtype=complex)
    devs = {}
    for mu in range(4):
        for nu in range(mu, 4):
            want = (rep.metric[mu] if mu == nu else 0) * ident
            got = _anticommutator(rep.psi[mu], rep.psi[nu])
            devs[f"{{psi{mu},psi{nu}}}"] = float(np.abs(got - want).max())
    for mu in range(4):
        got = _anticommutator(rep.psi[mu], rep.psi5)
        devs[f"{{psi{mu},psi5}}"] = float(np.abs(got).max())
    got = _anticommutator(rep.psi5, rep.psi5)
    devs["{psi5,psi5}"] = float(np.abs(got + ident).max())
    return AnticommutatorReport(devs, max(devs.values()))


def clifford_deviation(rep: MatrixRep) -> float:
    """Max deviation over the 10 relations {gamma_mu, gamma_nu} = 2 g_mu_nu."""
    ident = np.eye(4, dtype=complex)
    worst = 0.0
    for mu in range(4):
        for nu in range(mu, 4):
            want = (2 * rep.metric[mu] if mu == nu else 0) * ident
            got = _anticommutator(rep.gammas_lower[mu], rep.gammas_lower[nu])
            worst = max(worst, float(np.abs(got - want).max()))
    return worst


@dataclass
class PhysicalStates:
    mass_shell: bool
    null_dimension: int
    null_basis: np.ndarray  # columns span the null space
    mass_shell_residual: float


def physical_states(rep: MatrixRep, p, m: float) -> PhysicalStates:
    """Null space of gamma5 (p_mu gamma^mu - m) with an SVD rank cutoff.

    ``p`` holds the four lower-index momentum components.
    """
    if m <= 0:
        raise DomainError("mass must be positive")
    p = [float(x) for x in p]
    if len(p) != 4:
        raise DomainError("p must have four components")
    p_sq = sum(rep.metric[mu] * p[mu] * p[mu] for mu in range(4))
    on_shell = abs(p_sq - m * m) < 1e-9 * m * m
    slash = sum(p[mu] * rep.gammas_upper[mu] for mu in range(4))
    mat = rep.gamma5 @ (slash - m * np.eye(4, dtype=complex))
    _, svals, vh = np.linalg.svd(mat)
    cutoff = 1e-10 * (svals[0] if svals.size else 1.0)
    null_rows = [vh[i].conj() for i in range(4) if i >= len(svals) or svals[i] < cutoff]
    basis = np.array(null_rows).T if null_rows else np.zeros((4, 0), dtype=complex)
    return PhysicalStates(on_shell, basis.shape[1], basis, abs(p_sq - m * m))
