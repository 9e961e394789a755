"""Finite-difference gradient checking.

Compares every analytic parameter gradient against central differences
(f(t+h) - f(t-h)) / 2h at 64-bit precision. Run models in eval mode so
the probed function is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import NonFiniteError, Parameter, Tape, backward

# Relative error denominator floor: below this magnitude the comparison is
# effectively absolute, which keeps finite-difference roundoff (~1e-10) from
# producing spurious failures on near-zero gradients.
REL_FLOOR = 1e-3


@dataclass
class ParamCheck:
    name: str
    max_rel_err: float
    worst_index: tuple
    n_elements: int


@dataclass
class GradCheckReport:
    checks: list
    tol: float
    h: float

    @property
    def passed(self) -> bool:
        return all(c.max_rel_err < self.tol for c in self.checks)

    @property
    def max_rel_err(self) -> float:
        return max((c.max_rel_err for c in self.checks), default=0.0)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            verdict = "ok" if c.max_rel_err < self.tol else "FAIL"
            lines.append(f"{verdict:4s} {c.name or '<unnamed>'}: max rel err {c.max_rel_err:.3e} "
                         f"at {c.worst_index} ({c.n_elements} elements)")
        lines.append(f"{'PASS' if self.passed else 'FAIL'} overall: max rel err {self.max_rel_err:.3e} "
                     f"(tol {self.tol:g})")
        return "\n".join(lines)


def grad_check(f, params, h: float = 1e-5, tol: float = 1e-4) -> GradCheckReport:
    """Check d f() / d p for every element of every parameter in params.

    f is a zero-argument callable returning a scalar Tensor; it must be a
    pure function of the parameter values. Raises NonFiniteError if f is
    non-finite at any probe point.
    """
    params = list(params)
    for p in params:
        if not isinstance(p, Parameter):
            raise TypeError(f"grad_check expects Parameters, got {type(p).__name__}")
        if p.dtype != np.float64:
            raise ValueError(f"grad_check requires 64-bit parameters, {p.name!r} is {p.dtype}")
        p.grad = None

    with Tape():
        loss = f()
    backward(loss)
    analytic = {id(p): (p.grad.copy() if p.grad is not None else np.zeros(p.shape)) for p in params}

    checks = []
    for p in params:
        a = analytic[id(p)]
        worst = 0.0
        worst_idx = ()
        flat = p.data.reshape(-1)
        a_flat = a.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = f().item()
            flat[i] = orig - h
            f_minus = f().item()
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise NonFiniteError(f"objective non-finite while probing {p.name!r}")
            numeric = (f_plus - f_minus) / (2.0 * h)
            rel = abs(a_flat[i] - numeric) / max(abs(a_flat[i]), abs(numeric), REL_FLOOR)
            if rel > worst:
                worst = rel
                worst_idx = np.unravel_index(i, p.shape) if p.shape else ()
        checks.append(ParamCheck(p.name, worst, worst_idx, flat.size))
    return GradCheckReport(checks, tol, h)
