"""Lindblad master equation on the truncated two-mode space.

d rho/dt = i[rho, H] + sum_k rate_k D[A_k] rho with thermal up/down channels
on both modes. The right-hand side applies operators by left/right
multiplication on the density matrix; no superoperator matrix is ever formed.
Also hosts the closed first-moment system (occupations + coherence) and its
finite-difference consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .fock import FockOperator, FockSpace, QuantumState, beam_splitter_hamiltonian, \
    mode_annihilator
from .observables import ObservableOps, ObservableTrajectory
from .ode import OdeProblem, integrate_adaptive
from .params import SystemParams, thermal_occupation

_DENSE_CUTOFF = 256  # joint dimension below which the RHS uses dense BLAS


@dataclass(frozen=True)
class LindbladChannel:
    """Jump operator with its nonnegative rate."""

    operator: FockOperator
    rate: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.rate) or self.rate < 0.0:
            raise ValueError(f"channel rate must be finite and >= 0, got {self.rate}")


def thermal_channels(params: SystemParams, space: FockSpace) -> list[LindbladChannel]:
    """Thermal dissipation channels for both modes.

    Mode a: rate gamma_a*(nbar_a+1) on c and gamma_a*nbar_a on c^dag; likewise
    for mode b. Zero-rate channels are dropped.
    """
    nbar_a = thermal_occupation(params.omega_a, params.temperature) \
        if params.temperature > 0 else 0.0
    nbar_b = thermal_occupation(params.omega_b, params.temperature) \
        if params.temperature > 0 else 0.0
    c = mode_annihilator("a", space)
    d = mode_annihilator("b", space)
    raw = [
        (c, params.gamma_a * (nbar_a + 1.0)),
        (c.dag(), params.gamma_a * nbar_a),
        (d, params.gamma_b * (nbar_b + 1.0)),
        (d.dag(), params.gamma_b * nbar_b),
    ]
    return [LindbladChannel(op, rate) for op, rate in raw if rate > 0.0]


def _right_mul(dense: np.ndarray, sp: sparse.spmatrix) -> np.ndarray:
    # dense @ sparse without relying on ndarray.__matmul__ dispatch
    return (sp.T @ dense.T).T


def dissipator_apply(channel_op: FockOperator, rho: np.ndarray) -> np.ndarray:
    """D[A] rho = A rho A^dag - (A^dag A rho + rho A^dag A)/2 at unit rate."""
    a = channel_op.matrix
    ad = a.conj().T.tocsr()
    ada = (ad @ a).tocsr()
    rho = np.asarray(rho, dtype=complex)
    out = _right_mul(a @ rho, ad)
    out -= 0.5 * (ada @ rho + _right_mul(rho, ada))
    return out


def lindblad_rhs(rho: np.ndarray, hamiltonian: FockOperator,
                 channels: list[LindbladChannel]) -> np.ndarray:
    """Full generator i[rho, H] + sum rate*D[A]rho (test-facing slow path)."""
    h = hamiltonian.matrix
    rho = np.asarray(rho, dtype=complex)
    out = 1j * (_right_mul(rho, h) - h @ rho)
    for ch in channels:
        out += ch.rate * dissipator_apply(ch.operator, rho)
    return out


def _make_rhs(hamiltonian: FockOperator, channels: list[LindbladChannel],
              dim: int):
    """Flat-vector RHS closure; dense matrices below the BLAS cutoff."""
    if dim <= _DENSE_CUTOFF:
        h = hamiltonian.matrix.toarray()
        chans = []
        for ch in channels:
            a = ch.operator.matrix.toarray()
            ad = a.conj().T
            chans.append((ch.rate, a, ad, ad @ a))

        def rhs(t, yflat):
            rho = yflat.reshape(dim, dim)
            out = 1j * (rho @ h - h @ rho)
            for rate, a, ad, ada in chans:
                out += rate * ((a @ rho) @ ad - 0.5 * (ada @ rho + rho @ ada))
            return out.ravel()
    else:
        h = hamiltonian.matrix
        chans = []
        for ch in channels:
            a = ch.operator.matrix
            ad = a.conj().T.tocsr()
            chans.append((ch.rate, a, ad, (ad @ a).tocsr()))

        def rhs(t, yflat):
            rho = yflat.reshape(dim, dim)
            out = 1j * (_right_mul(rho, h) - h @ rho)
            for rate, a, ad, ada in chans:
                out += rate * (_right_mul(a @ rho, ad)
                               - 0.5 * (ada @ rho + _right_mul(rho, ada)))
            return out.ravel()
    return rhs


def evolve_density(state0, params: SystemParams, space: FockSpace,
                   sample_times, *, rtol: float = 1e-9, atol: float = 1e-12,
                   interaction_picture: bool = True,
                   keep_states: bool = False) -> ObservableTrajectory:
    """Evolve a density matrix and record observables at the sample times.

    ``state0`` may be a QuantumState (pure states are promoted to projectors)
    or a raw density matrix. With ``interaction_picture`` the omega_b*(n_a+n_b)
    rotation is removed from the Hamiltonian; all recorded observables are
    invariant under that choice. A warning is attached when the top Fock level
    of either mode accumulates more than 1e-6 population.
    """
    if not isinstance(state0, QuantumState):
        state0 = QuantumState(space, state0)
    rho0 = state0.density()
    omega = 0.0 if interaction_picture else params.omega_b
    h = beam_splitter_hamiltonian(omega, params.g, space)
    channels = thermal_channels(params, space)
    rhs = _make_rhs(h, channels, space.dim)

    samples = np.asarray(sample_times, dtype=float)
    problem = OdeProblem(rhs, rho0.ravel(), (0.0, float(samples[-1])), samples,
                         rtol=rtol, atol=atol)
    sol = integrate_adaptive(problem)

    ops = ObservableOps(space, params.gamma_a, params.gamma_b)
    records = []
    snapshots = [] if keep_states else None
    max_leak = 0.0
    t_leak = 0.0
    for t, flat in zip(sol.times, sol.states):
        rho = flat.reshape(space.dim, space.dim)
        records.append(ops.record_from_density(t, rho))
        leak = ops.top_level_population(np.diagonal(rho).real)
        if leak > max_leak:
            max_leak, t_leak = leak, t
        if keep_states:
            snapshots.append(rho.copy())
    warnings = []
    if max_leak > 1e-6:
        warnings.append(f"truncation leakage: top-level population "
                        f"{max_leak:.3e} at t={t_leak:.6e}")
    return ObservableTrajectory("lindblad", params.omega_b, sol.times, records,
                                sol.stats, warnings, snapshots)


def moment_rhs(m, params: SystemParams, temperature: float = 0.0):
    """Closed system for (x, y, z) = (<c^dag c>, <d^dag d>, <c^dag d>).

    dx/dt = 2 g Im z - gamma_a x + gamma_a nbar_a
    dy/dt = -2 g Im z - gamma_b y + gamma_b nbar_b
    dz/dt = i g (y - x) - (gamma_a + gamma_b) z / 2

    The thermal sources vanish at zero temperature; the coherence has no
    thermal source at any temperature.
    """
    x, y, z = m
    nbar_a = thermal_occupation(params.omega_a, temperature) \
        if temperature > 0 else 0.0
    nbar_b = thermal_occupation(params.omega_b, temperature) \
        if temperature > 0 else 0.0
    g = params.g
    dx = 2.0 * g * z.imag - params.gamma_a * x + params.gamma_a * nbar_a
    dy = -2.0 * g * z.imag - params.gamma_b * y + params.gamma_b * nbar_b
    dz = 1j * g * (y - x) - 0.5 * (params.gamma_a + params.gamma_b) * z
    return np.array([dx, dy, dz], dtype=complex)


def moment_closure_residual(traj: ObservableTrajectory, params: SystemParams,
                            temperature: float = 0.0) -> float:
    """Deviation of a trajectory's raw moments from the closed moment system.

    Central finite differences of (x, y, z) against moment_rhs, both measured
    in time units of the fastest rate max(gamma_a, gamma_b, 2g), so the result
    is dimensionless. Endpoints are excluded. Needs at least five samples.
    """
    if len(traj.records) < 5:
        raise ValueError("insufficient sampling density for finite differences")
    scale = max(params.gamma_a, params.gamma_b, 2.0 * params.g)
    if scale <= 0.0:
        raise ValueError("all rates vanish; residual scale undefined")
    tau = traj.times * scale
    x = traj.n_a_raw
    y = traj.n_b_raw
    z = traj.coherence
    dx = np.gradient(x, tau, edge_order=2)
    dy = np.gradient(y, tau, edge_order=2)
    dz = np.gradient(z, tau, edge_order=2)
    rx, ry, rz = moment_rhs((x, y, z), params, temperature)
    core = slice(1, -1)
    res_x = np.abs(dx - rx / scale)[core]
    res_y = np.abs(dy - ry / scale)[core]
    res_z = np.abs(dz - rz / scale)[core]
    return float(max(res_x.max(), res_y.max(), res_z.max()))
