"""Dense complex linear-algebra helpers used by the solvers.

All matrices here are tiny (a few hundred rows at most), so the default
path leans on LAPACK through ``numpy.linalg.eigh``.  A plain power iteration
is kept as an alternative for callers that want an iterative method.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericalFailure

HERMITIAN_TOL = 1e-10
MAX_ITER = 10_000
EIG_RTOL = 1e-14
COND_LIMIT = 1e12


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


def canonical_phase(x):
    """Rotate `x` so its largest-magnitude entry is real and nonnegative."""
    x = np.asarray(x, dtype=complex)
    k = int(np.argmax(np.abs(x)))
    if x[k] == 0:
        return x.copy()
    return x * (np.conj(x[k]) / abs(x[k]))


def _as_hermitian(A, name="A"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidArgument(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > HERMITIAN_TOL * scale:
        raise InvalidArgument(f"{name} is not Hermitian")
    return 0.5 * (A + A.conj().T)


def _power_iteration(A):
    n = A.shape[0]
    # shift so the spectrum is nonnegative; the dominant magnitude is then the top eigenvalue
    shift = np.linalg.norm(A, 1)
    B = A + shift * np.eye(n)
    scale = max(np.linalg.norm(A, 2), 1e-300)
    # deterministic start with every eigen-direction represented generically
    x = np.exp(1j * np.arange(n)) * (1.0 + np.arange(n) / n)
    x /= np.linalg.norm(x)
    lam = np.real(np.vdot(x, B @ x))
    residual = np.inf
    for _ in range(MAX_ITER):
        y = B @ x
        x = y / np.linalg.norm(y)
        Bx = B @ x
        lam_new = np.real(np.vdot(x, Bx))
        residual = float(np.linalg.norm(Bx - lam_new * x))
        small_change = abs(lam_new - lam) <= EIG_RTOL * max(abs(lam_new), 1e-300)
        lam = lam_new
        if residual <= 1e-11 * scale or (small_change and residual <= 1e-10 * scale):
            break
    else:
        raise NumericalFailure("power iteration hit the iteration cap", residual=residual)
    return lam - shift, x


def dominant_eigpair(A, method="dense"):
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian within a relative tolerance of 1e-10; it is symmetrized
        before use.
    method : {"dense", "power"}
        ``"dense"`` uses a full LAPACK eigensolve.  ``"power"`` runs a
        shifted power iteration capped at 10 000 steps.

    Returns
    -------
    EigenPair
        Eigenvector phase is canonicalized (largest entry real, >= 0).

    Raises
    ------
    InvalidArgument
        Non-square or non-Hermitian input.
    NumericalFailure
        The iteration did not converge or the residual check failed.
    """
    A = _as_hermitian(A)
    if method == "dense":
        w, V = np.linalg.eigh(A)
        lam, x = float(w[-1]), V[:, -1]
    elif method == "power":
        lam, x = _power_iteration(A)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    x = canonical_phase(x / np.linalg.norm(x))
    residual = float(np.linalg.norm(A @ x - lam * x))
    if residual > 1e-9 * max(np.linalg.norm(A, 2), 1e-300):
        raise NumericalFailure("eigenpair residual too large", residual=residual)
    return EigenPair(float(lam), x)


def generalized_dominant_eigpair(A, B):
    """Maximize the generalized Rayleigh quotient ``x^H A x / x^H B x``.

    Reduces to an ordinary Hermitian problem through the Cholesky factor of
    `B`.  The returned vector has unit Euclidean norm.
    """
    A = _as_hermitian(A, "A")
    B = _as_hermitian(B, "B")
    if A.shape != B.shape:
        raise InvalidArgument(f"dimension mismatch: {A.shape} vs {B.shape}")
    if np.linalg.cond(B) > COND_LIMIT:
        raise NumericalFailure("B is numerically singular")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise InvalidArgument("B is not positive definite") from exc
    Linv = np.linalg.inv(L)
    C = Linv @ A @ Linv.conj().T
    pair = dominant_eigpair(0.5 * (C + C.conj().T))
    x = Linv.conj().T @ pair.vector
    x = canonical_phase(x / np.linalg.norm(x))
    value = np.real(np.vdot(x, A @ x)) / np.real(np.vdot(x, B @ x))
    return EigenPair(float(value), x)


def dominant_left_singular(A):
    """Unit vector ``u`` maximizing ``||A^H u||``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise InvalidArgument("expected a matrix")
    if not np.any(A):
        raise InvalidArgument("zero matrix has no dominant singular vector")
    return dominant_eigpair(A @ A.conj().T).vector
