"""Steady states and the cross-validation layer.

Everything upstream is algebra; this module is where predictions meet an
independent numerical solve. Kernels of the vectorized generator are turned
into density operators, positivity and uniqueness are measured rather than
assumed, sector-restricted dynamics are solved on their own, and a list of
named consistency checks records whether the algebraic verdicts and the
numerics agree. A disagreement here is a bug by definition, never noise to
be tuned away.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .closure import (
    CERTIFIED_UNIQUE,
    ClosureResult,
    CommutantResult,
    certifier_generators,
    certify_uniqueness,
    commutant,
    effective_hamiltonian,
    restricted_closure,
)
from .liouvillian import (
    NumericalFailure,
    apply_matrices,
    assemble,
    assemble_matrices,
    kernel_and_values,
)
from .modelspec import ModelSpec
from .opalg import HSBasis, Operator
from .symmetry import (
    SectorDecomposition,
    SymmetryCheck,
    resolve_symmetry,
    sector_decompose,
    verify_strong_symmetry,
)

TRIVIAL_COMMUTANT = "trivial_commutant"
NONTRIVIAL_COMMUTANT = "nontrivial_commutant"

STATIONARITY_TOL = 1e-8
POSITIVITY_TOL = 1e-8
MIXED_STATE_TOL = 1e-8


@dataclass
class ConsistencyCheck:
    """One named implication between a verdict and the numerics.

    ``passed`` is the truth value of the implication, so a check whose
    premise does not apply passes with a detail saying why.
    """

    name: str
    passed: bool
    detail: str

    def __bool__(self):
        return self.passed


@dataclass
class SectorReport:
    """Restricted analysis of one symmetry eigenspace."""

    index: int
    eigenvalue: complex
    theta: float
    dim: int
    closure: ClosureResult
    certified: bool
    kernel_dim: int
    state: Operator | None
    min_eigenvalue: float | None
    eigenvalue_ratio: float | None
    stationarity_norm: float | None
    distance_to_mixed: float | None


@dataclass
class KernelInvarianceReport:
    """Whether the kernel of a stationary state is dynamically invariant."""

    kernel_dim: int
    residuals: dict
    max_residual: float
    passed: bool
    tol: float


@dataclass
class NessReport:
    """The hub every analysis fills a slice of.

    Fields left at None were not computed by the operation that produced
    the report; full_verdict fills everything it can. ``steady_states``
    holds only trace-one, positive representatives; the complete kernel
    always sits in ``hermitian_kernel_basis``.
    """

    model: dict
    tol: float
    generation_verdict: str | None = None
    closure: ClosureResult | None = None
    all_lindblads_hermitian: bool | None = None
    mixed_state_residual: float | None = None
    frigerio_verdict: str | None = None
    commutant: CommutantResult | None = None
    symmetry: str | None = None
    symmetry_check: SymmetryCheck | None = None
    sectors: SectorDecomposition | None = None
    per_sector: list | None = None
    kernel_dim: int | None = None
    kernel_cutoff: float | None = None
    kernel_sigma_below: float | None = None
    kernel_sigma_above: float | None = None
    hermitian_kernel_basis: list | None = None
    steady_states: list = field(default_factory=list)
    min_eigenvalues: list = field(default_factory=list)
    eigenvalue_ratios: list = field(default_factory=list)
    stationarity_norms: list = field(default_factory=list)
    canonical_state: Operator | None = None
    canonical_is_positive: bool | None = None
    consistency: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def all_consistent(self) -> bool:
        return all(c.passed for c in self.consistency)


def _model_echo(spec: ModelSpec) -> dict:
    echo = spec.to_dict()
    echo["dim"] = spec.dim
    return echo


def _hermitian_kernel_basis(raw: np.ndarray, d: int, tol: float) -> HSBasis:
    """Re-express a kernel as an orthonormal basis of Hermitian operators.

    The generator commutes with the adjoint map, so the kernel is closed
    under Hermitian conjugation and is spanned by the Hermitian and
    anti-Hermitian parts of its elements. Gram-Schmidt coefficients between
    Hermitian operators are real (Tr(AB) is real for Hermitian A, B), so
    feeding only Hermitian candidates keeps every accepted basis element
    Hermitian.
    """
    basis = HSBasis(d)
    cands = np.empty((2 * raw.shape[1], d * d), dtype=complex)
    for i, col in enumerate(raw.T):
        m = col.reshape(d, d, order="F")
        cands[2 * i] = (0.5 * (m + m.conj().T)).ravel()
        cands[2 * i + 1] = (-0.5j * (m - m.conj().T)).ravel()
    basis.extend_block(cands, tol)
    if len(basis) != raw.shape[1]:
        raise NumericalFailure(
            f"kernel of dimension {raw.shape[1]} yielded {len(basis)} Hermitian "
            "directions; the kernel is not adjoint-closed at this tolerance"
        )
    return basis


def _canonical_state(basis: HSBasis, d: int) -> Operator | None:
    """Project the maximally mixed state onto the kernel span, trace one.

    For a one-dimensional kernel this reduces to plain normalization of the
    Hermitian representative. Returns None when the projection is traceless,
    in which case no canonical choice is made.
    """
    mixed = (np.eye(d, dtype=complex) / d).ravel()
    coeffs = basis.rows.conj() @ mixed
    m = (coeffs @ basis.rows).reshape(d, d)
    m = 0.5 * (m + m.conj().T)
    tr = float(np.trace(m).real)
    if abs(tr) < 1e-12:
        return None
    return Operator(m / tr)


def _state_metrics(state: Operator, ham_mat, jump_mats):
    evals = np.linalg.eigvalsh(state.mat)
    min_eig = float(evals[0])
    max_eig = float(evals[-1])
    ratio = min_eig / max_eig if max_eig > 0 else float("nan")
    resid = float(np.linalg.norm(apply_matrices(ham_mat, jump_mats, state.mat)))
    return min_eig, ratio, resid


def _kernel_slice(spec: ModelSpec, tol: float) -> dict:
    ham, jumps = spec.operators()
    jump_mats = [j.mat for j in jumps]
    lm = assemble(spec)
    raw, svals = kernel_and_values(lm, tol)
    k = raw.shape[1]
    d = spec.dim
    cutoff = tol * float(svals[0]) if svals.size else 0.0
    sigma_below = float(svals[-k]) if k >= 1 and k <= svals.size else None
    sigma_above = float(svals[-k - 1]) if k < svals.size else None

    basis = _hermitian_kernel_basis(raw, d, tol)
    canonical = _canonical_state(basis, d)
    positive = None
    states, min_eigs, ratios, stat_norms = [], [], [], []
    if canonical is not None:
        min_eig, ratio, resid = _state_metrics(canonical, ham.mat, jump_mats)
        positive = min_eig >= -POSITIVITY_TOL
        if positive:
            states = [canonical]
            min_eigs = [min_eig]
            ratios = [ratio]
            stat_norms = [resid]
        else:
            canonical = None
    return {
        "kernel_dim": k,
        "kernel_cutoff": cutoff,
        "kernel_sigma_below": sigma_below,
        "kernel_sigma_above": sigma_above,
        "hermitian_kernel_basis": basis.vectors,
        "steady_states": states,
        "min_eigenvalues": min_eigs,
        "eigenvalue_ratios": ratios,
        "stationarity_norms": stat_norms,
        "canonical_state": canonical,
        "canonical_is_positive": positive,
    }


def steady_states(spec: ModelSpec, tol: float = 1e-9) -> NessReport:
    """Solve the vectorized generator's kernel and extract density operators.

    The kernel basis is re-expressed in Hermitian form; a canonical
    trace-one state is the projection of I/d onto the kernel (for a unique
    steady state this is the state itself). The canonical state enters
    ``steady_states`` only when it passes the positivity check; a
    degenerate kernel is reported in full either way.
    """
    report = NessReport(model=_model_echo(spec), tol=tol)
    t0 = time.perf_counter()
    for key, value in _kernel_slice(spec, tol).items():
        setattr(report, key, value)
    report.timings["kernel"] = time.perf_counter() - t0
    return report


def _sector_slice(spec: ModelSpec, sectors: SectorDecomposition, tol: float):
    """Restricted closure plus an independent restricted solve, per sector."""
    gens = certifier_generators(spec)
    closures = restricted_closure(gens, sectors, tol)
    ham, jumps = spec.operators()
    reports = []
    for i, iso in enumerate(sectors.isometries):
        d_a = iso.shape[1]
        h_a = iso.conj().T @ ham.mat @ iso
        l_a = [iso.conj().T @ j.mat @ iso for j in jumps]
        lm_a = assemble_matrices(h_a, l_a)
        raw, _ = kernel_and_values(lm_a, tol)
        basis = _hermitian_kernel_basis(raw, d_a, tol)
        state = _canonical_state(basis, d_a)
        min_eig = ratio = resid = dist = None
        if state is not None:
            min_eig, ratio, resid = _state_metrics(state, h_a, l_a)
            dist = float(
                np.linalg.norm(state.mat - np.eye(d_a, dtype=complex) / d_a)
            )
        eigenvalue = complex(sectors.eigenvalues[i])
        reports.append(
            SectorReport(
                index=i,
                eigenvalue=eigenvalue,
                theta=float(np.mod(np.angle(eigenvalue), 2 * np.pi)),
                dim=d_a,
                closure=closures[i],
                certified=closures[i].is_full,
                kernel_dim=raw.shape[1],
                state=state,
                min_eigenvalue=min_eig,
                eigenvalue_ratio=ratio,
                stationarity_norm=resid,
                distance_to_mixed=dist,
            )
        )
    return reports


def _symmetry_name(descriptor) -> str:
    return descriptor if isinstance(descriptor, str) else "custom"


def per_sector_ness(spec: ModelSpec, S, tol: float = 1e-9) -> NessReport:
    """Sector-by-sector restricted analysis under a verified strong symmetry.

    Raises when S fails the commutation test: restricting a model to the
    eigenspaces of a non-symmetry produces numbers with no meaning.
    """
    s_op = resolve_symmetry(S, spec)
    check = verify_strong_symmetry(s_op, spec)
    if not check.ok:
        worst = max(check.commutator_norms, key=check.commutator_norms.get)
        raise ValueError(
            "not a strong symmetry: largest commutator "
            f"||[S, {worst}]|| = {check.commutator_norms[worst]:.3e}"
        )
    report = NessReport(model=_model_echo(spec), tol=tol)
    report.symmetry = _symmetry_name(S)
    report.symmetry_check = check
    t0 = time.perf_counter()
    report.sectors = sector_decompose(s_op)
    report.per_sector = _sector_slice(spec, report.sectors, tol)
    report.timings["sectors"] = time.perf_counter() - t0
    all_herm = all(j.is_hermitian() for j in spec.lindblads())
    report.all_lindblads_hermitian = all_herm
    report.consistency = [_sector_mixed_check(all_herm, report.per_sector)]
    return report


def kernel_invariance_diagnostic(
    spec: ModelSpec, rho: Operator, tol: float = 1e-9
) -> KernelInvarianceReport:
    """Check that the kernel of a stationary state is preserved dynamically.

    For a positive semidefinite stationary rho, every vector annihilated by
    rho must stay annihilated under the adjoint jump operators and under
    H + (i/2) sum_m L_m† L_m; this is the structural fact that lets a full
    operator algebra force strict positivity. The reported residuals are
    ||(1 - WW†) G W|| with W spanning the numerical kernel of rho
    (eigenvalues below tol). A full-rank state has an empty kernel and
    passes trivially.

    Raises ValueError when rho is not approximately stationary, Hermitian,
    and positive semidefinite; the diagnostic is meaningless otherwise.
    """
    if rho.dim != spec.dim:
        raise ValueError(f"rho has dim {rho.dim}, model has dim {spec.dim}")
    herm_defect = float(np.linalg.norm(rho.mat - rho.mat.conj().T))
    if herm_defect > STATIONARITY_TOL * (1.0 + rho.hs_norm()):
        raise ValueError(f"rho is not Hermitian: defect {herm_defect:.3e}")
    evals, evecs = np.linalg.eigh(0.5 * (rho.mat + rho.mat.conj().T))
    if evals[0] < -POSITIVITY_TOL:
        raise ValueError(f"rho is not positive semidefinite: {evals[0]:.3e}")
    ham, jumps = spec.operators()
    stat = float(
        np.linalg.norm(apply_matrices(ham.mat, [j.mat for j in jumps], rho.mat))
    )
    if stat > STATIONARITY_TOL * (1.0 + rho.hs_norm()):
        raise ValueError(f"rho is not stationary: residual {stat:.3e}")

    w = evecs[:, evals < tol]
    if w.shape[1] == 0:
        return KernelInvarianceReport(0, {}, 0.0, True, tol)
    proj_out = np.eye(spec.dim, dtype=complex) - w @ w.conj().T
    checks = [("K_adjoint", effective_hamiltonian(spec, adjoint=True).mat)]
    checks += [
        (f"{label}_dag", op.mat.conj().T)
        for (label, _), op in zip(spec.lindblad_ops, jumps)
    ]
    residuals = {}
    passed = True
    for name, mat in checks:
        r = float(np.linalg.norm(proj_out @ mat @ w))
        residuals[name] = r
        if r > tol * (1.0 + float(np.linalg.norm(mat))):
            passed = False
    return KernelInvarianceReport(
        kernel_dim=w.shape[1],
        residuals=residuals,
        max_residual=max(residuals.values()),
        passed=passed,
        tol=tol,
    )


@contextmanager
def _stage(name: str, timings: dict):
    t0 = time.perf_counter()
    try:
        yield
    except Exception as exc:
        if exc.args and isinstance(exc.args[0], str):
            exc.args = (f"[{name}] {exc.args[0]}",) + exc.args[1:]
        raise
    finally:
        timings[name] = time.perf_counter() - t0


def _implication(name, premise, conclusion, detail_applies, detail_not):
    if not premise:
        return ConsistencyCheck(name, True, detail_not)
    return ConsistencyCheck(name, bool(conclusion), detail_applies)


def _sector_mixed_check(all_herm, per_sector):
    name = "hermitian_certified_sectors_maximally_mixed"
    if not all_herm or per_sector is None:
        return ConsistencyCheck(name, True, "premise absent: needs Hermitian jumps and sector analysis")
    bad = [
        s.index
        for s in per_sector
        if s.certified
        and (s.distance_to_mixed is None or s.distance_to_mixed > MIXED_STATE_TOL)
    ]
    detail = (
        "every certified sector state is maximally mixed"
        if not bad
        else f"sectors {bad} certified but not maximally mixed"
    )
    return ConsistencyCheck(name, not bad, detail)


def full_verdict(
    spec: ModelSpec, tol: float = 1e-9, max_basis: int | None = None
) -> NessReport:
    """Run the whole pipeline on one model and cross-check the pieces.

    Stages: generation certificate, Hermitian-jump shortcut, commutant test
    (advisory: it presumes a full-rank steady state exists), sector analysis
    under the first declared symmetry, numerical kernel solve, consistency
    checks. A declared symmetry that fails verification is recorded and its
    sector analysis skipped; it does not abort the rest. Errors inside a
    stage propagate with the stage name prefixed.
    """
    report = NessReport(model=_model_echo(spec), tol=tol)
    timings = report.timings
    total0 = time.perf_counter()
    ham, jumps = spec.operators()
    d = spec.dim

    with _stage("closure", timings):
        cert = certify_uniqueness(spec, tol=tol, max_basis=max_basis)
        report.generation_verdict = cert.verdict
        report.closure = cert.closure

    with _stage("hermitian_path", timings):
        all_herm = all(j.is_hermitian() for j in jumps)
        report.all_lindblads_hermitian = all_herm
        if all_herm:
            mixed = np.eye(d, dtype=complex) / d
            report.mixed_state_residual = float(
                np.linalg.norm(apply_matrices(ham.mat, [j.mat for j in jumps], mixed))
            )

    with _stage("commutant", timings):
        gens = [ham] + list(jumps) + [j.dag() for j in jumps]
        report.commutant = commutant(gens, d, tol)
        report.frigerio_verdict = (
            TRIVIAL_COMMUTANT
            if report.commutant.commutant_dim == 1
            else NONTRIVIAL_COMMUTANT
        )

    if spec.declared_symmetries:
        with _stage("sectors", timings):
            descriptor = spec.declared_symmetries[0]
            report.symmetry = _symmetry_name(descriptor)
            s_op = resolve_symmetry(descriptor, spec)
            report.symmetry_check = verify_strong_symmetry(s_op, spec)
            if report.symmetry_check.ok:
                report.sectors = sector_decompose(s_op)
                report.per_sector = _sector_slice(spec, report.sectors, tol)

    with _stage("kernel", timings):
        for key, value in _kernel_slice(spec, tol).items():
            setattr(report, key, value)

    with _stage("consistency", timings):
        certified = report.generation_verdict == CERTIFIED_UNIQUE
        report.consistency = [
            _implication(
                "certified_implies_unique_kernel",
                certified,
                report.kernel_dim == 1,
                f"kernel_dim = {report.kernel_dim}",
                "not certified; no uniqueness claim to check",
            ),
            _implication(
                "certified_implies_positive_state",
                certified,
                report.min_eigenvalues and report.min_eigenvalues[0] > 0,
                f"min eigenvalue = {report.min_eigenvalues[0]:.3e}"
                if report.min_eigenvalues
                else "no positive state found",
                "not certified; no positivity claim to check",
            ),
        ]
        if certified and all_herm and report.canonical_state is not None:
            dist = float(
                np.linalg.norm(
                    report.canonical_state.mat - np.eye(d, dtype=complex) / d
                )
            )
            report.consistency.append(
                ConsistencyCheck(
                    "hermitian_certified_implies_maximally_mixed",
                    dist <= MIXED_STATE_TOL,
                    f"||rho - I/d|| = {dist:.3e}",
                )
            )
        else:
            report.consistency.append(
                ConsistencyCheck(
                    "hermitian_certified_implies_maximally_mixed",
                    True,
                    "premise absent: needs certification and Hermitian jumps",
                )
            )
        if report.per_sector is not None:
            bad = [
                s.index for s in report.per_sector if s.certified and s.kernel_dim != 1
            ]
            report.consistency.append(
                ConsistencyCheck(
                    "sector_certified_implies_unique_sector_kernel",
                    not bad,
                    "all certified sectors have one-dimensional kernels"
                    if not bad
                    else f"sectors {bad} certified with degenerate kernels",
                )
            )
        else:
            report.consistency.append(
                ConsistencyCheck(
                    "sector_certified_implies_unique_sector_kernel",
                    True,
                    "no sector analysis",
                )
            )
        report.consistency.append(_sector_mixed_check(all_herm, report.per_sector))

    timings["total"] = time.perf_counter() - total0
    return report
