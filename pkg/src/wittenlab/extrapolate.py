"""Richardson extrapolation in powers of sqrt(t) on geometric t-sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["RichardsonResult", "default_t_sequence", "richardson_sqrt"]


def default_t_sequence(t0=1.0, steps=12):
    """Geometric sequence t0 * 2^-j, j = 0..steps-1."""
    return tuple(t0 * 0.5**j for j in range(steps))


@dataclass(frozen=True)
class RichardsonResult:
    value: complex
    ts: tuple
    raw: tuple
    column: tuple  # final extrapolation column
    diffs: tuple  # successive differences within the final column
    converged: bool


def richardson_sqrt(ts, values, order=1) -> RichardsonResult:
    """Extrapolate t -> 0 assuming corrections c_1 sqrt(t) + c_2 t + ...

    ``ts`` must decrease geometrically with ratio 2; ``order`` powers of
    sqrt(t) are eliminated.  The final column's tail differences serve as a
    convergence diagnostic; oscillation marks the result unconverged.
    """
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(values, dtype=complex)
    if ts.size != vals.size or ts.size < order + 1:
        raise DomainError("need at least order+1 matching samples")
    if np.any(np.abs(ts[:-1] / ts[1:] - 2.0) > 1e-9):
        raise DomainError("t-sequence must be geometric with ratio 2")
    col = vals.copy()
    for m in range(1, order + 1):
        kappa = 2.0 ** (m / 2.0)
        col = (kappa * col[1:] - col[:-1]) / (kappa - 1.0)
    diffs = np.abs(np.diff(col))
    value = complex(col[-1])
    scale = 1.0 + abs(value)
    if diffs.size == 0:
        converged = True
    else:
        converged = bool(
            np.isfinite(value)
            and diffs[-1] <= max(diffs[0], 1e-12 * scale)
        )
    return RichardsonResult(
        value=value,
        ts=tuple(ts),
        raw=tuple(vals),
        column=tuple(col),
        diffs=tuple(diffs),
        converged=converged,
    )


def require_converged(result: RichardsonResult, what="extrapolation"):
    if not result.converged:
        raise ConvergenceError(
            f"{what} oscillates: tail differences {result.diffs[-3:]}",
            data=result,
        )
    return result


def oscillating(result: RichardsonResult) -> bool:
    """True when the final column is non-finite or its increments alternate
    in sign with non-decreasing magnitude (a genuinely unstable tail);
    monotone slow approach does not count as oscillation."""
    col = np.asarray(result.column)
    if not np.all(np.isfinite(col)):
        return True
    inc = np.diff(col)
    if inc.size < 3:
        return False
    tail = inc[-3:]
    signs = np.sign(np.real(tail))
    mags = np.abs(tail)
    alternating = signs[0] != 0 and np.all(signs[:-1] == -signs[1:])
    return bool(alternating and mags[-1] >= mags[0])
