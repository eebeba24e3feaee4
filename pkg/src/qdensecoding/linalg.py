"""Dense 4x4 Hermitian linear algebra: eigenvalues, entropies and fidelities.

Every function accepts a single ``(4, 4)`` matrix or a stack of shape
``(..., 4, 4)`` and works elementwise over the leading axes.  Eigenvalues
come from a cyclic Jacobi sweep written directly against numpy arrays, so a
whole time grid of density matrices is diagonalised in one pass.
"""

from __future__ import annotations

import numpy as np

from qdensecoding.errors import ValidationError

DIM = 4

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
TRACE_IMAG_ATOL = 1e-12
NEGATIVE_EIGENVALUE_ATOL = 1e-10
PROBABILITY_SUM_ATOL = 1e-9
PROBABILITY_NEGATIVE_ATOL = 1e-12

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50

# Eigenvalues below this are treated as exact zeros before taking square roots;
# Jacobi leaves roundoff of order 1e-16 in null directions, whose square root
# would otherwise leak ~1e-8 into fidelities.
SQRT_CUTOFF = 1e-13
_NEGLIGIBLE = 1e-30

_PAIRS = tuple((p, q) for p in range(DIM) for q in range(p + 1, DIM))


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi iteration exceeds its sweep budget."""


def _as_stack(a) -> tuple[np.ndarray, tuple[int, ...]]:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim < 2 or arr.shape[-2:] != (DIM, DIM):
        raise ValidationError(f"expected (..., 4, 4) matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix contains NaN or Inf entries")
    lead = arr.shape[:-2]
    return arr.reshape((-1, DIM, DIM)), lead


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def max_asymmetry(a) -> float:
    """Largest ``|A[i, j] - conj(A[j, i])|`` over all entries (and the stack)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr - dagger(arr))))


def check_hermitian(a, atol: float = HERMITIAN_ATOL) -> None:
    asym = max_asymmetry(a)
    if asym > atol:
        raise ValidationError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} exceeds {atol:.0e}"
        )


def _jacobi(stack: np.ndarray, vectors: bool) -> tuple[np.ndarray, np.ndarray | None]:
    a = stack.copy()
    n_mat = a.shape[0]
    v = np.broadcast_to(np.eye(DIM, dtype=np.complex128), a.shape).copy() if vectors else None

    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2))))
    mask = ~np.eye(DIM, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=-1))
        if not np.any(off > JACOBI_TOL * scale):
            break
        for p, q in _PAIRS:
            apq = a[:, p, q]
            mag = np.abs(apq)
            # entries this small cannot move the spectrum; skipping them also
            # keeps the phase division away from denormals
            rotate = mag > _NEGLIGIBLE * scale
            if not np.any(rotate):
                continue
            safe = np.where(rotate, mag, 1.0)
            phase = np.where(rotate, apq / safe, 1.0)
            theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
            c = np.where(rotate, 1.0 / np.sqrt(t * t + 1.0), 1.0)
            s = np.where(rotate, t * c, 0.0)
            ph_c = np.conj(phase)

            # A <- A J   (columns p, q)
            col_p = a[:, :, p].copy()
            col_q = a[:, :, q]
            a[:, :, p] = c[:, None] * col_p - (s * ph_c)[:, None] * col_q
            a[:, :, q] = s[:, None] * col_p + (c * ph_c)[:, None] * col_q
            # A <- J^H A   (rows p, q)
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :]
            a[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
            a[:, q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            if v is not None:
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c[:, None] * vp - (s * ph_c)[:, None] * vq
                v[:, :, q] = s[:, None] * vp + (c * ph_c)[:, None] * vq
    else:
        off = np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=-1))
        if np.any(off > JACOBI_TOL * scale):
            raise ConvergenceError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(max off-diagonal norm {float(off.max()):.3e})"
            )

    values = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(-values, axis=-1, kind="stable")
    values = np.take_along_axis(values, order, axis=-1)
    if v is not None:
        v = np.take_along_axis(v, order[:, None, :], axis=-1)
    assert values.shape == (n_mat, DIM)
    return values, v


def hermitian_eigh(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvector columns of Hermitian ``a``."""
    stack, lead = _as_stack(a)
    check_hermitian(stack)
    values, vecs = _jacobi(stack, vectors=True)
    return values.reshape(lead + (DIM,)), vecs.reshape(lead + (DIM, DIM))


def hermitian_eigenvalues(a) -> np.ndarray:
    """Real eigenvalues of a Hermitian 4x4 matrix, sorted in descending order.

    Args:
        a: Hermitian matrix, or stack of matrices with shape ``(..., 4, 4)``.

    Returns:
        Array of shape ``(..., 4)``.

    Raises:
        ValidationError: if ``a`` departs from Hermiticity by more than 1e-12.
    """
    stack, lead = _as_stack(a)
    check_hermitian(stack)
    values, _ = _jacobi(stack, vectors=False)
    return values.reshape(lead + (DIM,))


def density_spectrum(rho) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return its clamped spectrum.

    Eigenvalues in ``[-1e-10, 0)`` are set to zero; anything more negative,
    a trace away from one, or a non-Hermitian input raises.
    """
    stack, lead = _as_stack(rho)
    check_hermitian(stack)
    tr = np.trace(stack, axis1=-2, axis2=-1)
    bad_re = np.abs(tr.real - 1.0)
    if np.any(bad_re > TRACE_ATOL):
        raise ValidationError(f"density matrix trace off by {float(bad_re.max()):.3e}")
    bad_im = np.abs(tr.imag)
    if np.any(bad_im > TRACE_IMAG_ATOL):
        raise ValidationError(
            f"density matrix trace has imaginary part {float(bad_im.max()):.3e}"
        )
    values, _ = _jacobi(stack, vectors=False)
    lowest = float(values.min())
    if lowest < -NEGATIVE_EIGENVALUE_ATOL:
        raise ValidationError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return np.clip(values, 0.0, None).reshape(lead + (DIM,))


def _entropy_bits(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, -p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def shannon_entropy(p) -> np.ndarray | float:
    """Shannon entropy in bits along the last axis, with ``0 log 0 = 0``."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim == 0 or not np.all(np.isfinite(arr)):
        raise ValidationError("probability vector must be a finite 1-d (or stacked) array")
    if np.any(arr < -PROBABILITY_NEGATIVE_ATOL):
        raise ValidationError(f"negative probability {float(arr.min()):.3e}")
    dev = np.abs(arr.sum(axis=-1) - 1.0)
    if np.any(dev > PROBABILITY_SUM_ATOL):
        raise ValidationError(
            f"probabilities must sum to 1 (deviation {float(np.max(dev)):.3e})"
        )
    out = _entropy_bits(np.clip(arr, 0.0, None))
    return float(out) if out.ndim == 0 else out


def von_neumann_entropy(rho) -> np.ndarray | float:
    """``S(rho) = -tr(rho log2 rho)`` in bits."""
    out = _entropy_bits(density_spectrum(rho))
    return float(out) if np.ndim(out) == 0 else out


def _psd_sqrt(stack: np.ndarray) -> np.ndarray:
    values, vecs = _jacobi(stack, vectors=True)
    roots = np.sqrt(np.where(values > SQRT_CUTOFF, values, 0.0))
    return (vecs * roots[:, None, :]) @ dagger(vecs)


def _singular_value_sum(x: np.ndarray) -> np.ndarray:
    """Trace norm of each matrix via one-sided (Hestenes) Jacobi.

    Orthogonalising columns directly keeps absolute accuracy near machine
    epsilon; going through eigenvalues of ``X X^H`` would square it away.
    """
    x = x.copy()
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p, q in _PAIRS:
            xp = x[:, :, p].copy()
            xq = x[:, :, q]
            alpha = np.sum(np.abs(xp) ** 2, axis=-1)
            beta = np.sum(np.abs(xq) ** 2, axis=-1)
            gamma = np.sum(np.conj(xp) * xq, axis=-1)
            mag = np.abs(gamma)
            rotate = (mag > 1e-15 * np.sqrt(alpha * beta)) & (mag > _NEGLIGIBLE)
            if not np.any(rotate):
                continue
            rotated = True
            safe = np.where(rotate, mag, 1.0)
            phase = np.where(rotate, gamma / safe, 1.0)
            theta = (beta - alpha) / (2.0 * safe)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
            c = np.where(rotate, 1.0 / np.sqrt(t * t + 1.0), 1.0)
            s = np.where(rotate, t * c, 0.0)
            ph_c = np.conj(phase)
            x[:, :, p] = c[:, None] * xp - (s * ph_c)[:, None] * xq
            x[:, :, q] = s[:, None] * xp + (c * ph_c)[:, None] * xq
        if not rotated:
            break
    else:
        raise ConvergenceError(f"one-sided Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return np.sqrt(np.sum(np.abs(x) ** 2, axis=-2)).sum(axis=-1)


def uhlmann_fidelity(rho, sigma) -> np.ndarray | float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Squared convention: orthogonal states give 0, identical states 1, and a
    pure ``rho = |psi><psi|`` gives ``<psi|sigma|psi>``.  The trace is taken
    as the sum of singular values of ``sqrt(rho) sqrt(sigma)``, which is the
    same quantity.
    """
    density_spectrum(rho)
    density_spectrum(sigma)
    r, lead_r = _as_stack(rho)
    s, lead_s = _as_stack(sigma)
    if lead_r != lead_s:
        r_full, s_full = np.broadcast_arrays(
            r.reshape(lead_r + (DIM, DIM)), s.reshape(lead_s + (DIM, DIM))
        )
        lead = r_full.shape[:-2]
        r, s = r_full.reshape((-1, DIM, DIM)), s_full.reshape((-1, DIM, DIM))
    else:
        lead = lead_r
    tr = _singular_value_sum(_psd_sqrt(r) @ _psd_sqrt(s))
    out = np.clip(tr * tr, 0.0, 1.0).reshape(lead)
    return float(out) if out.ndim == 0 else out
