"""Backward errors of approximate eigenvalues of Rosenbrock system matrices
under block-perturbation patterns.

For a shift lambda and a nonempty pattern of perturbable blocks among
{A, B, C, P}, the backward error is the smallest aggregate perturbation
norm making lambda an exact eigenvalue.  Every pattern is computable:

* A, B, P, AB, CP reduce to a Hermitian pencil on the null space of one
  block-row Gram matrix (possibly semidefinite on the right-hand side);
* AP, BC, ABC, ABP, BCP, ABCP reduce to a two-quotient minimization on
  the sphere;
* C, AC, BP, ACP follow by transposing the system and renaming blocks.

``backward_error`` dispatches the pattern and attaches a reconstructed
minimal perturbation and an independently recomputed certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import linalg, srq2
from .rosenbrock import ErrorMatrices, RosenbrockSystem, assemble_error_matrices

__all__ = [
    "BackwardErrorResult",
    "Certificate",
    "CertificateCheck",
    "METHOD_PENCIL",
    "METHOD_SRQ2",
    "METHOD_TRANSPOSED_PENCIL",
    "METHOD_TRANSPOSED_SRQ2",
    "METHOD_ZERO_EIGENVALUE",
    "PerturbationPattern",
    "ReconstructionError",
    "SystemDelta",
    "all_patterns",
    "backward_error",
    "certify",
    "reconstruct_perturbation",
    "srq2_problem_for",
]

METHOD_ZERO_EIGENVALUE = "zero_eigenvalue"
METHOD_PENCIL = "pencil"
METHOD_SRQ2 = "srq2"
METHOD_TRANSPOSED_PENCIL = "transposed_pencil"
METHOD_TRANSPOSED_SRQ2 = "transposed_srq2"

_LETTERS = "ABCP"
_TRANSPOSE_MAP = {"C": "B", "AC": "AB", "BP": "CP", "ACP": "ABP"}
_PENCIL_CASES = {"A", "B", "P", "AB", "CP"}
_SRQ2_CASES = {"AP", "BC", "ABC", "ABP", "BCP", "ABCP"}

_ZERO_GATE = 1e-12
_RHS_ZERO_TOL = 1e-12
_NULL_TOL = 1e-10
_FEAS_VEC_TOL = 1e-8
_RESIDUAL_FACTOR = 1e-8
_NORM_MATCH_TOL = 1e-10
_NEPV_CERT_TOL = 1e-9
_PENCIL_CERT_TOL = 1e-10


class ReconstructionError(ValueError):
    """The given minimizer violates a feasibility constraint of the pattern,
    so no pattern-restricted perturbation maps exist at it."""


@dataclass(frozen=True)
class PerturbationPattern:
    """A nonempty subset of the perturbable blocks A, B, C, P."""

    blocks: frozenset[str]

    def __post_init__(self):
        blocks = frozenset(self.blocks)
        bad = sorted(blocks - set(_LETTERS))
        if bad:
            raise ValueError(
                f"unknown block letter(s) {bad}; valid letters are A, B, C, P"
            )
        if not blocks:
            raise ValueError("a perturbation pattern must name at least one block")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_string(cls, text: str) -> "PerturbationPattern":
        return cls(frozenset(text.strip()))

    @property
    def letters(self) -> str:
        """Canonical spelling, letters in the fixed order A < B < C < P."""
        return "".join(c for c in _LETTERS if c in self.blocks)

    def __str__(self) -> str:
        return self.letters

    def __contains__(self, letter: str) -> bool:
        return letter in self.blocks

    def issubset(self, other: "PerturbationPattern") -> bool:
        return self.blocks <= other.blocks


def all_patterns() -> tuple[PerturbationPattern, ...]:
    """All 15 patterns, ordered by size then canonical spelling."""
    out = []
    for size in range(1, 5):
        for mask in range(1, 16):
            letters = [c for i, c in enumerate(_LETTERS) if mask >> i & 1]
            if len(letters) == size:
                out.append(PerturbationPattern(frozenset(letters)))
    seen = sorted(set(p.letters for p in out), key=lambda s: (len(s), s))
    return tuple(PerturbationPattern.from_string(s) for s in seen)


def _as_pattern(pattern) -> PerturbationPattern:
    if isinstance(pattern, PerturbationPattern):
        return pattern
    return PerturbationPattern.from_string(str(pattern))


@dataclass(frozen=True)
class SystemDelta:
    """Blockwise perturbation with the same shapes as a system's blocks.
    Blocks outside the generating pattern are identically zero."""

    dA: np.ndarray
    dB: np.ndarray
    dC: np.ndarray
    d_poly: tuple[np.ndarray, ...]

    def __post_init__(self):
        dA = linalg.as_complex_matrix(self.dA, "dA")
        dB = linalg.as_complex_matrix(self.dB, "dB")
        dC = linalg.as_complex_matrix(self.dC, "dC")
        r = dA.shape[0]
        n = dB.shape[1]
        if dA.shape != (r, r) or dB.shape != (r, n) or dC.shape != (n, r):
            raise ValueError("delta block shapes are inconsistent")
        coeffs = tuple(
            linalg.as_complex_matrix(m, f"d_poly[{j}]") for j, m in enumerate(self.d_poly)
        )
        if not coeffs or any(m.shape != (n, n) for m in coeffs):
            raise ValueError("d_poly must hold d+1 matrices of shape (n, n)")
        object.__setattr__(self, "dA", dA)
        object.__setattr__(self, "dB", dB)
        object.__setattr__(self, "dC", dC)
        object.__setattr__(self, "d_poly", coeffs)

    @classmethod
    def zero(cls, r: int, n: int, d: int) -> "SystemDelta":
        return cls(
            dA=np.zeros((r, r), dtype=np.complex128),
            dB=np.zeros((r, n), dtype=np.complex128),
            dC=np.zeros((n, r), dtype=np.complex128),
            d_poly=tuple(np.zeros((n, n), dtype=np.complex128) for _ in range(d + 1)),
        )

    def norm(self) -> float:
        total = (
            np.linalg.norm(self.dA) ** 2
            + np.linalg.norm(self.dB) ** 2
            + np.linalg.norm(self.dC) ** 2
            + sum(np.linalg.norm(m) ** 2 for m in self.d_poly)
        )
        return float(np.sqrt(total))

    def poly_at(self, z) -> np.ndarray:
        z = complex(z)
        acc = np.array(self.d_poly[-1], copy=True)
        for coeff in reversed(self.d_poly[:-1]):
            acc = acc * z + coeff
        return acc

    def transpose(self) -> "SystemDelta":
        """The matching perturbation of the transposed system."""
        return SystemDelta(
            dA=self.dA.T.copy(),
            dB=self.dC.T.copy(),
            dC=self.dB.T.copy(),
            d_poly=tuple(m.T.copy() for m in self.d_poly),
        )

    def subtract_from(self, system: RosenbrockSystem) -> RosenbrockSystem:
        """The perturbed system whose blocks are the originals minus these."""
        return RosenbrockSystem(
            A=system.A - self.dA,
            B=system.B - self.dB,
            C=system.C - self.dC,
            poly_coeffs=tuple(c - m for c, m in zip(system.poly_coeffs, self.d_poly)),
        )


@dataclass(frozen=True)
class CertificateCheck:
    name: str
    value: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class Certificate:
    """Certification quantities re-derived from a result's (eta, x) alone."""

    checks: tuple[CertificateCheck, ...]
    passed: bool
    delta_norm: float
    sigma_min_perturbed: float
    nepv_residual: float | None
    pencil_residual: float | None
    failure: str | None = None


@dataclass(frozen=True)
class BackwardErrorResult:
    """Backward error ``eta`` (may be +inf) with its minimizer and audit data.

    For transposed patterns ``x`` is the minimizer of the transposed
    problem (flagged by ``transposed``); the stored perturbation always
    applies to the original system.
    """

    eta: float
    x: np.ndarray | None
    method: str
    pattern: PerturbationPattern
    lam: complex
    transposed: bool
    converged: bool
    perturbation: SystemDelta | None
    solver: srq2.Srq2Solution | None
    infeasibility_witness: str | None
    certificate: Certificate | None


def srq2_problem_for(pattern, em: ErrorMatrices) -> srq2.Srq2Problem:
    """Quotient data for the patterns that reduce to the two-quotient
    minimization (A3 is always the trailing-coordinate projector)."""
    letters = _as_pattern(pattern).letters
    g = em.gamma
    table = {
        "AP": (em.g1, 1.0, -1.0, em.g2 / g, 0.0, 1.0),
        "BC": (em.g1, 0.0, 1.0, em.g2, 1.0, -1.0),
        "ABC": (em.g1, 1.0, 0.0, em.g2, 1.0, -1.0),
        "ABP": (em.g1, 1.0, 0.0, em.g2 / g, 0.0, 1.0),
        "BCP": (em.g1, 0.0, 1.0, em.g2, 1.0, g - 1.0),
        "ABCP": (em.g1, 1.0, 0.0, em.g2, 1.0, g - 1.0),
    }
    if letters not in table:
        raise ValueError(
            f"pattern {letters} does not reduce to a two-quotient minimization"
        )
    a1, al1, be1, a2, al2, be2 = table[letters]
    return srq2.Srq2Problem(a1, a2, em.h2, al1, be1, al2, be2)


class _PencilOutcome:
    __slots__ = ("value_sq", "x", "witness", "residual")

    def __init__(self, value_sq=math.inf, x=None, witness=None, residual=None):
        self.value_sq = value_sq
        self.x = x
        self.witness = witness
        self.residual = residual


def _pencil_data(letters: str, em: ErrorMatrices):
    """Null-space basis, pencil matrices and the scale factor on the squared
    value for the five direct pencil patterns."""
    if letters in ("A", "B", "AB"):
        basis = linalg.psd_nullspace(em.g2, _NULL_TOL)
        numerator = em.g1
    elif letters in ("P", "CP"):
        basis = linalg.psd_nullspace(em.g1, _NULL_TOL)
        numerator = em.g2
    else:
        raise ValueError(f"pattern {letters} is not a direct pencil case")
    k = basis.shape[1]
    m = basis.conj().T @ numerator @ basis
    m = (m + m.conj().T) / 2.0
    selector = {
        "A": ("V*H1V", em.h1),
        "B": ("V*H2V", em.h2),
        "AB": (None, None),
        "P": ("U*H2U", em.h2),
        "CP": (None, em.h_lambda),
    }[letters]
    if selector[1] is None:
        nmat = np.eye(k, dtype=np.complex128)
    else:
        nmat = basis.conj().T @ selector[1] @ basis
        nmat = (nmat + nmat.conj().T) / 2.0
    scale = 1.0 / em.gamma if letters == "P" else 1.0
    return basis, m, nmat, selector[0], scale


def _solve_pencil_case(letters: str, em: ErrorMatrices) -> _PencilOutcome:
    basis, m, nmat, selector_name, scale = _pencil_data(letters, em)
    k = basis.shape[1]
    if k == 0:
        return _PencilOutcome(witness="the feasibility null space is trivial")
    if selector_name is not None and linalg.norm1(nmat) <= _RHS_ZERO_TOL * max(1.0, float(k)):
        return _PencilOutcome(witness=f"{selector_name} = 0")
    if letters == "AB":
        w, vecs = np.linalg.eigh(m)
        value, y = float(w[0]), vecs[:, 0]
    else:
        value, y = linalg.semidefinite_pencil_smallest(m, nmat, _NULL_TOL)
    residual = float(np.linalg.norm(m @ y - value * (nmat @ y)))
    x = linalg.fix_phase(linalg.normalize(basis @ y))
    return _PencilOutcome(value_sq=scale * value, x=x, witness=None, residual=residual)


def backward_error(
    system: RosenbrockSystem,
    lam,
    pattern,
    *,
    restarts: int = 5,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 400,
    max_shift_tries: int = 40,
) -> BackwardErrorResult:
    """Backward error of the shift ``lam`` under the given pattern, with a
    reconstructed minimal perturbation and a from-scratch certificate.

    Returns eta = 0 immediately when lam is already a numerical eigenvalue
    (the zero perturbation works for every pattern), eta = +inf with a
    witness when the pattern admits no feasible perturbation.
    """
    pattern = _as_pattern(pattern)
    lam = complex(lam)
    s_mat = system.evaluate(lam)
    scale = max(1.0, linalg.norm1(s_mat))
    if linalg.smallest_singular_value(s_mat) <= _ZERO_GATE * scale:
        _, _, vh = np.linalg.svd(s_mat)
        x = linalg.fix_phase(vh[-1].conj())
        result = BackwardErrorResult(
            eta=0.0,
            x=x,
            method=METHOD_ZERO_EIGENVALUE,
            pattern=pattern,
            lam=lam,
            transposed=False,
            converged=True,
            perturbation=SystemDelta.zero(system.r, system.n, system.d),
            solver=None,
            infeasibility_witness=None,
            certificate=None,
        )
        return replace(result, certificate=certify(system, lam, pattern, result))

    letters = pattern.letters
    if letters in _TRANSPOSE_MAP:
        inner = backward_error(
            system.transpose(),
            lam,
            _TRANSPOSE_MAP[letters],
            restarts=restarts,
            seed=seed,
            tol=tol,
            max_iter=max_iter,
            max_shift_tries=max_shift_tries,
        )
        if inner.method == METHOD_ZERO_EIGENVALUE:
            method = METHOD_ZERO_EIGENVALUE
        elif inner.method == METHOD_SRQ2:
            method = METHOD_TRANSPOSED_SRQ2
        else:
            method = METHOD_TRANSPOSED_PENCIL
        witness = inner.infeasibility_witness
        if witness is not None:
            witness = f"transposed system: {witness}"
        result = BackwardErrorResult(
            eta=inner.eta,
            x=inner.x,
            method=method,
            pattern=pattern,
            lam=lam,
            transposed=True,
            converged=inner.converged,
            perturbation=None if inner.perturbation is None else inner.perturbation.transpose(),
            solver=inner.solver,
            infeasibility_witness=witness,
            certificate=None,
        )
        if math.isfinite(result.eta):
            result = replace(result, certificate=certify(system, lam, pattern, result))
        return result

    em = assemble_error_matrices(system, lam)
    if letters in _PENCIL_CASES:
        outcome = _solve_pencil_case(letters, em)
        if outcome.witness is not None:
            return BackwardErrorResult(
                eta=math.inf,
                x=None,
                method=METHOD_PENCIL,
                pattern=pattern,
                lam=lam,
                transposed=False,
                converged=True,
                perturbation=None,
                solver=None,
                infeasibility_witness=outcome.witness,
                certificate=None,
            )
        eta = math.sqrt(max(outcome.value_sq, 0.0))
        result = BackwardErrorResult(
            eta=eta,
            x=outcome.x,
            method=METHOD_PENCIL,
            pattern=pattern,
            lam=lam,
            transposed=False,
            converged=True,
            perturbation=_try_reconstruct(system, lam, pattern, outcome.x),
            solver=None,
            infeasibility_witness=None,
            certificate=None,
        )
        return replace(result, certificate=certify(system, lam, pattern, result))

    problem = srq2_problem_for(pattern, em)
    sol = srq2.solve(
        problem,
        restarts=restarts,
        seed=seed,
        tol=tol,
        max_iter=max_iter,
        max_shift_tries=max_shift_tries,
    )
    if not math.isfinite(sol.value):
        return BackwardErrorResult(
            eta=math.inf,
            x=None,
            method=METHOD_SRQ2,
            pattern=pattern,
            lam=lam,
            transposed=False,
            converged=False,
            perturbation=None,
            solver=sol,
            infeasibility_witness="quotient-sum objective was unbounded at every candidate",
            certificate=None,
        )
    eta = math.sqrt(max(sol.value, 0.0))
    result = BackwardErrorResult(
        eta=eta,
        x=sol.x,
        method=METHOD_SRQ2,
        pattern=pattern,
        lam=lam,
        transposed=False,
        converged=sol.converged,
        perturbation=_try_reconstruct(system, lam, pattern, sol.x),
        solver=sol,
        infeasibility_witness=None,
        certificate=None,
    )
    return replace(result, certificate=certify(system, lam, pattern, result))


def _try_reconstruct(system, lam, pattern, x) -> SystemDelta | None:
    """Reconstruction that reports feasibility violations through the
    certificate instead of raising."""
    try:
        return reconstruct_perturbation(system, lam, pattern, x)
    except ReconstructionError:
        return None


def _stacked_trailing(x2: np.ndarray, lam: complex, d: int) -> np.ndarray:
    """The vector [x2; lam x2; ...; lam^d x2]."""
    return np.concatenate([(lam**j) * x2 for j in range(d + 1)])


def reconstruct_perturbation(system: RosenbrockSystem, lam, pattern, x) -> SystemDelta:
    """Minimal-Frobenius-norm perturbation supported on the pattern that
    makes lam an exact eigenvalue with null vector x.

    Each block row of S(lam) x is cancelled by the minimal map onto the
    coordinates the pattern opens up; a row whose blocks are all frozen by
    the pattern must already be annihilated by x, else the point is
    infeasible and ReconstructionError is raised.  For transposed patterns
    x is interpreted against the transposed system and the perturbation is
    mapped back.
    """
    pattern = _as_pattern(pattern)
    lam = complex(lam)
    letters = pattern.letters
    if letters in _TRANSPOSE_MAP:
        inner = reconstruct_perturbation(
            system.transpose(), lam, _TRANSPOSE_MAP[letters], x
        )
        return inner.transpose()
    r, n, d = system.r, system.n, system.d
    x = np.asarray(x, dtype=np.complex128).ravel()
    if x.size != r + n:
        raise ValueError(f"minimizer must have length {r + n}")
    x = linalg.normalize(x)
    x1, x2 = x[:r], x[r:]
    s_mat = system.evaluate(lam)
    res_tol = _RESIDUAL_FACTOR * max(1.0, linalg.norm1(s_mat))
    r1 = s_mat[:r] @ x
    r2 = s_mat[r:] @ x

    delta = SystemDelta.zero(r, n, d)
    dA, dB, dC = delta.dA.copy(), delta.dB.copy(), delta.dC.copy()
    d_poly = [m.copy() for m in delta.d_poly]

    in_a, in_b = "A" in pattern, "B" in pattern
    in_c, in_p = "C" in pattern, "P" in pattern

    if in_a and in_b:
        full = linalg.min_frobenius_map(x, r1)
        dA, dB = full[:, :r], full[:, r:]
    elif in_a:
        dA = _partial_row_map(r1, x1, res_tol, "leading")
    elif in_b:
        dB = _partial_row_map(r1, x2, res_tol, "trailing")
    else:
        if np.linalg.norm(r1) > res_tol:
            raise ReconstructionError(
                "first block row is not annihilated at the minimizer although "
                "the pattern freezes A and B"
            )

    if in_c and in_p:
        tilde = np.concatenate([x1, _stacked_trailing(x2, lam, d)])
        full = linalg.min_frobenius_map(tilde, r2)
        dC = full[:, :r]
        for j in range(d + 1):
            d_poly[j] = full[:, r + j * n : r + (j + 1) * n]
    elif in_c:
        dC = _partial_row_map(r2, x1, res_tol, "leading")
    elif in_p:
        if np.linalg.norm(x2) <= _FEAS_VEC_TOL:
            if np.linalg.norm(r2) > res_tol:
                raise ReconstructionError(
                    "second block row needs a perturbation but the minimizer "
                    "has no trailing component for P to act on"
                )
        else:
            stacked = _stacked_trailing(x2, lam, d)
            full = linalg.min_frobenius_map(stacked, r2)
            for j in range(d + 1):
                d_poly[j] = full[:, j * n : (j + 1) * n]
    else:
        if np.linalg.norm(r2) > res_tol:
            raise ReconstructionError(
                "second block row is not annihilated at the minimizer although "
                "the pattern freezes C and P"
            )

    return SystemDelta(dA=dA, dB=dB, dC=dC, d_poly=tuple(d_poly))


def _partial_row_map(rhs: np.ndarray, part: np.ndarray, res_tol: float, which: str) -> np.ndarray:
    if np.linalg.norm(part) <= _FEAS_VEC_TOL:
        if np.linalg.norm(rhs) > res_tol:
            raise ReconstructionError(
                f"minimizer has zero {which} component but the corresponding "
                "block row residual is nonzero"
            )
        return np.zeros((rhs.size, part.size), dtype=np.complex128)
    return linalg.min_frobenius_map(part, rhs)


def _route(letters: str) -> tuple[str, str, bool]:
    if letters in _TRANSPOSE_MAP:
        mapped = _TRANSPOSE_MAP[letters]
        transposed = True
    else:
        mapped = letters
        transposed = False
    kind = "srq2" if mapped in _SRQ2_CASES else "pencil"
    return kind, mapped, transposed


def certify(system: RosenbrockSystem, lam, pattern, result: BackwardErrorResult) -> Certificate:
    """Re-derive every certification quantity from the stored (eta, x):
    rebuild the pattern perturbation at x, compare its aggregate norm with
    eta, measure the smallest singular value of the perturbed evaluation,
    and recompute the stationarity or pencil residual for the route the
    pattern takes.  Passes only when every check meets its bound."""
    pattern = _as_pattern(pattern)
    lam = complex(lam)
    s_mat = system.evaluate(lam)
    scale = max(1.0, linalg.norm1(s_mat))
    smin_bound = _RESIDUAL_FACTOR * scale

    if result.method == METHOD_ZERO_EIGENVALUE:
        smin = linalg.smallest_singular_value(s_mat)
        check = CertificateCheck(
            name="sigma_min of the unperturbed evaluation",
            value=smin,
            bound=smin_bound,
            passed=smin <= smin_bound,
        )
        return Certificate(
            checks=(check,),
            passed=check.passed,
            delta_norm=0.0,
            sigma_min_perturbed=smin,
            nepv_residual=None,
            pencil_residual=None,
        )

    if not math.isfinite(result.eta) or result.x is None:
        raise ValueError("certify requires a finite result carrying a minimizer")

    try:
        delta = reconstruct_perturbation(system, lam, pattern, result.x)
    except ReconstructionError as exc:
        return Certificate(
            checks=(),
            passed=False,
            delta_norm=math.nan,
            sigma_min_perturbed=math.nan,
            nepv_residual=None,
            pencil_residual=None,
            failure=str(exc),
        )

    checks = []
    delta_norm = delta.norm()
    if result.eta > 0.0:
        norm_match = abs(delta_norm - result.eta) / result.eta
    else:
        norm_match = abs(delta_norm)
    checks.append(
        CertificateCheck(
            name="perturbation norm matches eta (relative)",
            value=norm_match,
            bound=_NORM_MATCH_TOL,
            passed=norm_match <= _NORM_MATCH_TOL,
        )
    )
    perturbed = delta.subtract_from(system).evaluate(lam)
    smin = linalg.smallest_singular_value(perturbed)
    checks.append(
        CertificateCheck(
            name="sigma_min of the perturbed evaluation",
            value=smin,
            bound=smin_bound,
            passed=smin <= smin_bound,
        )
    )

    kind, mapped, transposed = _route(pattern.letters)
    work_system = system.transpose() if transposed else system
    nepv_residual = None
    pencil_residual = None
    if kind == "srq2":
        em = assemble_error_matrices(work_system, lam)
        problem = srq2_problem_for(mapped, em)
        try:
            info = srq2.nepv_residuals(problem, result.x)
        except srq2.NondifferentiablePointError:
            info = None
        if info is not None:
            nepv_residual = info.rel_residual
            checks.append(
                CertificateCheck(
                    name="stationarity residual (relative)",
                    value=info.rel_residual,
                    bound=_NEPV_CERT_TOL,
                    passed=info.rel_residual <= _NEPV_CERT_TOL,
                )
            )
    else:
        em = assemble_error_matrices(work_system, lam)
        basis, m, nmat, _, value_scale = _pencil_data(mapped, em)
        if basis.shape[1] > 0:
            y = basis.conj().T @ np.asarray(result.x, dtype=np.complex128).ravel()
            mu = result.eta**2 / value_scale
            pencil_residual = float(np.linalg.norm(m @ y - mu * (nmat @ y)))
            bound = _PENCIL_CERT_TOL * (linalg.norm1(m) + abs(mu) * linalg.norm1(nmat))
            checks.append(
                CertificateCheck(
                    name="pencil eigenpair residual",
                    value=pencil_residual,
                    bound=bound,
                    passed=pencil_residual <= bound,
                )
            )

    passed = all(c.passed for c in checks)
    return Certificate(
        checks=tuple(checks),
        passed=passed,
        delta_norm=delta_norm,
        sigma_min_perturbed=smin,
        nepv_residual=nepv_residual,
        pencil_residual=pencil_residual,
    )
