"""Lindblad generator, time evolution, stationary states, observable rates.

The generator is used in its unhalved form,

    d rho/dt = -i [H, rho] + sum_j ( [R_j rho, R_j+] + [R_j, rho R_j+] )
             = -i [H, rho] + sum_j ( 2 R_j rho R_j+ - {R_j+ R_j, rho} ),

which is exactly twice the 1/2-normalized dissipator found in most
textbooks: a single channel R = a empties a level at rate 2, not 1.  All
closed-form rates in this package (oscillator decay, rotator moment
equations) assume this normalization; divide channel rates by sqrt(2) to
convert a conventional model.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegenerateStationaryState, NumericalFailure, PositivityViolation
from .quantize import FockSpace, OperatorMatrix, SpinRep

__all__ = [
    "DensityMatrix",
    "LindbladModel",
    "lindblad_rhs",
    "evolve",
    "EvolveResult",
    "liouvillian_matrix",
    "stationary",
    "expectation",
    "adjoint_generator",
    "adjoint_rate",
    "export_expectations_csv",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


class DensityMatrix:
    """Hermitian, positive, unit-trace operator, validated on construction."""

    __slots__ = ("op",)

    def __init__(
        self,
        op: OperatorMatrix,
        herm_tol: float = HERMITICITY_TOL,
        trace_tol: float = TRACE_TOL,
        pos_tol: float = POSITIVITY_TOL,
    ):
        if not isinstance(op, OperatorMatrix):
            op = OperatorMatrix(op)
        mat = op.mat
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > herm_tol:
            raise ValueError(f"density matrix is not Hermitian: deviation {herm_dev:.3e}")
        trace_dev = abs(np.trace(mat) - 1.0)
        if trace_dev > trace_tol:
            raise ValueError(f"density matrix trace differs from 1 by {trace_dev:.3e}")
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min())
        if min_eig < -pos_tol:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        self.op = op

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def basis(self):
        return self.op.basis

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    @classmethod
    def pure_state(cls, vector, basis=None) -> "DensityMatrix":
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ValueError("state vector must be non-zero")
        vector = vector / norm
        return cls(OperatorMatrix(np.outer(vector, vector.conj()), basis))

    @classmethod
    def fock_state(cls, dim: int, n: int) -> "DensityMatrix":
        if not 0 <= n < dim:
            raise ValueError(f"level {n} outside truncation {dim}")
        vector = np.zeros(dim, dtype=complex)
        vector[n] = 1.0
        return cls.pure_state(vector, FockSpace((dim,)))

    @classmethod
    def coherent_state(cls, dim: int, alpha: complex) -> "DensityMatrix":
        """Truncated coherent state |alpha>, renormalized after the cut."""
        ns = np.arange(dim)
        log_fact = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, dim))]))
        amps = np.exp(ns * np.log(complex(alpha)) - 0.5 * log_fact) if alpha != 0 else np.eye(dim)[0].astype(complex)
        return cls.pure_state(amps, FockSpace((dim,)))

    @classmethod
    def spin_level(cls, rep: SpinRep, index: int) -> "DensityMatrix":
        vector = np.zeros(rep.dim, dtype=complex)
        vector[index] = 1.0
        return cls.pure_state(vector, rep)


@dataclass(frozen=True)
class LindbladModel:
    """Generator data: Hermitian H plus interaction channels R_j."""

    h: OperatorMatrix
    channels: tuple[OperatorMatrix, ...] = ()

    def __post_init__(self):
        channels = tuple(self.channels)
        object.__setattr__(self, "channels", channels)
        if not self.h.is_hermitian(1e-12):
            raise ValueError("H must be Hermitian to 1e-12")
        for j, channel in enumerate(channels):
            if channel.dim != self.h.dim:
                raise ValueError(f"channel {j} dimension does not match H")
        object.__setattr__(
            self, "_channel_data",
            tuple((r.mat, r.mat.conj().T, r.mat.conj().T @ r.mat) for r in channels),
        )

    @property
    def dim(self) -> int:
        return self.h.dim

    def _rhs_mat(self, rho: np.ndarray) -> np.ndarray:
        h = self.h.mat
        out = -1j * (h @ rho - rho @ h)
        for r, r_dag, rdr in self._channel_data:
            out += 2.0 * (r @ rho @ r_dag) - rdr @ rho - rho @ rdr
        return out


def lindblad_rhs(model: LindbladModel, rho: OperatorMatrix | DensityMatrix) -> OperatorMatrix:
    """Apply the generator to rho; traceless and Hermiticity-preserving."""
    op = rho.op if isinstance(rho, DensityMatrix) else rho
    if op.dim != model.dim:
        raise ValueError(f"dimension mismatch: rho {op.dim}, model {model.dim}")
    return OperatorMatrix(model._rhs_mat(op.mat), op.basis)


@dataclass(frozen=True)
class EvolveResult:
    final: DensityMatrix
    times: np.ndarray
    expectations: dict[str, np.ndarray]
    max_trace_deviation: float
    max_hermiticity_deviation: float
    min_eigenvalue: float


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_end: float,
    dt: float,
    observables: Mapping[str, OperatorMatrix] | None = None,
    sample_every: int | None = None,
    pos_abort_tol: float = 1e-6,
    validate_pos_tol: float = POSITIVITY_TOL,
) -> EvolveResult:
    """Fixed-step RK4 integration of the master equation.

    Expectations of the named observables are sampled every `sample_every`
    steps (default: about 200 samples per run).  Trace, Hermiticity and
    positivity are monitored at the samples; an eigenvalue below
    -pos_abort_tol aborts, which signals that the step is too large or the
    Fock truncation too small for this state.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if rho0.dim != model.dim:
        raise ValueError("initial state dimension does not match model")
    n_steps = int(round(t_end / dt))
    if sample_every is None:
        sample_every = max(1, n_steps // 200)
    observables = dict(observables or {})
    for name, op in observables.items():
        if op.dim != model.dim:
            raise ValueError(f"observable {name!r} dimension mismatch")

    rho = rho0.mat.copy()
    times = [0.0]
    samples: dict[str, list[complex]] = {name: [] for name in observables}
    max_trace_dev = 0.0
    max_herm_dev = 0.0
    min_eig_seen = np.inf

    def record(t: float, mat: np.ndarray):
        nonlocal max_trace_dev, max_herm_dev, min_eig_seen
        for name, op in observables.items():
            samples[name].append(complex(np.trace(mat @ op.mat)))
        max_trace_dev = max(max_trace_dev, abs(np.trace(mat) - 1.0))
        max_herm_dev = max(max_herm_dev, float(np.max(np.abs(mat - mat.conj().T))))
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min())
        min_eig_seen = min(min_eig_seen, min_eig)
        if min_eig < -pos_abort_tol:
            raise PositivityViolation(
                f"eigenvalue {min_eig:.3e} at t={t:.6g}: step too large or truncation too small"
            )

    record(0.0, rho)
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        k1 = model._rhs_mat(rho)
        k2 = model._rhs_mat(rho + 0.5 * dt * k1)
        k3 = model._rhs_mat(rho + 0.5 * dt * k2)
        k4 = model._rhs_mat(rho + dt * k3)
        rho = rho + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(rho)):
            raise PositivityViolation(f"non-finite density matrix at t={step * dt:.6g}")
        if step % sample_every == 0 or step == n_steps:
            times.append(step * dt)
            record(step * dt, rho)

    final = DensityMatrix(OperatorMatrix(rho, rho0.basis), pos_tol=validate_pos_tol)
    return EvolveResult(
        final=final,
        times=np.array(times),
        expectations={name: np.array(values) for name, values in samples.items()},
        max_trace_deviation=float(max_trace_dev),
        max_hermiticity_deviation=float(max_herm_dev),
        min_eigenvalue=float(min_eig_seen),
    )


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """The generator as a dim^2 x dim^2 matrix on column-stacked matrices."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = model.h.mat
    out = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for r, _r_dag, rdr in model._channel_data:
        out += 2.0 * np.kron(r.conj(), r) - np.kron(eye, rdr) - np.kron(rdr.T, eye)
    return out


def stationary(
    model: LindbladModel,
    null_tol: float = 1e-10,
    residual_tol: float = 1e-10,
    pos_tol: float = POSITIVITY_TOL,
) -> DensityMatrix:
    """Unique stationary state from the null space of the vectorized generator.

    A full SVD of the dim^2 x dim^2 generator is used; singular values below
    null_tol relative to the largest count as null directions.  A null space
    of dimension other than one raises DegenerateStationaryState with the
    computed dimension.  The null vector is Hermitized, trace-normalized and
    validated (residual below residual_tol, eigenvalues above -pos_tol).
    """
    d = model.dim
    gen = liouvillian_matrix(model)
    _u, s, vh = np.linalg.svd(gen)
    scale = s[0] if s[0] > 0 else 1.0
    null_dim = int(np.sum(s <= null_tol * scale))
    if null_dim != 1:
        raise DegenerateStationaryState(null_dim)
    candidate = vh[-1].conj().reshape((d, d), order="F")
    candidate = (candidate + candidate.conj().T) / 2.0
    trace = np.trace(candidate).real
    if abs(trace) < 1e-14:
        raise NumericalFailure("stationary candidate has (near) zero trace")
    candidate = candidate / trace

    residual = float(np.max(np.abs(model._rhs_mat(candidate))))
    if residual > residual_tol:
        raise NumericalFailure(
            f"stationary residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    min_eig = float(np.linalg.eigvalsh(candidate).min())
    if min_eig < -pos_tol:
        raise NumericalFailure(
            f"stationary state has eigenvalue {min_eig:.3e}: truncation too small"
        )
    return DensityMatrix(
        OperatorMatrix(candidate, model.h.basis), pos_tol=pos_tol
    )


def expectation(rho: DensityMatrix | OperatorMatrix, observable: OperatorMatrix) -> complex:
    """tr(rho A); real up to rounding when A is Hermitian."""
    mat = rho.mat
    if mat.shape[0] != observable.dim:
        raise ValueError("dimension mismatch in expectation")
    return complex(np.trace(mat @ observable.mat))


def adjoint_generator(observable: OperatorMatrix, model: LindbladModel) -> OperatorMatrix:
    """Heisenberg-picture rate operator.

    d<A>/dt = tr(rho L+(A)) with
    L+(A) = -i [A, H] + sum_j ( R_j+ [A, R_j] + [R_j+, A] R_j ),
    the trace-dual of the generator used by lindblad_rhs.
    """
    if observable.dim != model.dim:
        raise ValueError("observable dimension does not match model")
    a = observable.mat
    h = model.h.mat
    out = -1j * (a @ h - h @ a)
    for r, r_dag, _rdr in model._channel_data:
        out += r_dag @ (a @ r - r @ a) + (r_dag @ a - a @ r_dag) @ r
    return OperatorMatrix(out, observable.basis if observable.basis == model.h.basis else None)


def adjoint_rate(
    observable: OperatorMatrix,
    model: LindbladModel,
    rho: DensityMatrix | OperatorMatrix,
) -> complex:
    """d<A>/dt for the given state; equals tr(A * lindblad_rhs(rho))."""
    return expectation(rho, adjoint_generator(observable, model))


def export_expectations_csv(result: EvolveResult, path):
    """Write `t, <name>_re, <name>_im, ...` sample rows."""
    names = sorted(result.expectations)
    header = ["t"]
    for name in names:
        header.extend([f"{name}_re", f"{name}_im"])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for i, t in enumerate(result.times):
            row = [f"{t:.17g}"]
            for name in names:
                value = result.expectations[name][i]
                row.extend([f"{value.real:.17g}", f"{value.imag:.17g}"])
            writer.writerow(row)
