"""Propagation of error measures through series operators and of
guarantees through scalar arithmetic."""
from __future__ import annotations

import math

from ..core import ApproxScalar, ErrorMeasures
from ..errors import EvaluationError, UnboundedGuaranteeError


def _norm_op(op):
    return {"x": "*", "×": "*", "−": "-", "÷": "/", "sqrt": "√"}.get(op, op)


def propagate_measures(op: str, es1: ErrorMeasures, es2: ErrorMeasures, vs_flag: bool) -> ErrorMeasures:
    """Measures of ``T1 op T2`` from the measures of the operands.

    ``vs_flag`` marks that the product is taken on one aligned segment pair
    of a vector-space family, where the residual is orthogonal to the other
    operand's estimate and the sum error collapses to ``fes1*fes2``.
    """
    op = _norm_op(op)
    if op in ("+", "-"):
        return ErrorMeasures(es1.fes + es2.fes, es1.ses + es2.ses, es1.tes + es2.tes)
    if op == "*":
        full = es1.fes * es2.fes + es1.fes * es2.ses + es2.fes * es1.ses
        tes = es1.fes * es2.fes if vs_flag else full
        return ErrorMeasures(full, es1.ses * es2.ses, tes)
    raise ValueError(f"unknown series operator {op!r}")


def _as_approx(x) -> ApproxScalar:
    if isinstance(x, ApproxScalar):
        return x
    return ApproxScalar(float(x), 0.0)


def propagate_scalar(op: str, a1, a2=None) -> ApproxScalar:
    """Guarantee of ``a1 op a2`` given guarantees on the operands.

    A plain number as operand is a literal with zero guarantee, which makes
    the general formulas reduce to the literal-operand forms.
    """
    op = _norm_op(op)
    x = _as_approx(a1)
    v1, e1 = x.value, x.guarantee
    if op == "√":
        if v1 + e1 < 0:
            raise EvaluationError(f"square root of a negative value ({v1} ± {e1})")
        v = max(v1, 0.0)
        r = math.sqrt(v)
        g = max(math.sqrt(v1 + e1) - r, r - math.sqrt(max(v1 - e1, 0.0)))
        return ApproxScalar(r, max(g, 0.0))
    if a2 is None:
        raise ValueError(f"operator {op!r} needs two operands")
    y = _as_approx(a2)
    v2, e2 = y.value, y.guarantee
    if op == "+":
        return ApproxScalar(v1 + v2, e1 + e2)
    if op == "-":
        return ApproxScalar(v1 - v2, e1 + e2)
    if op == "*":
        return ApproxScalar(v1 * v2, e1 * abs(v2) + e2 * abs(v1) + e1 * e2)
    if op == "/":
        if e2 == 0.0 and v2 == 0.0:
            raise EvaluationError("division by zero")
        if abs(v2) - e2 <= 0.0:
            raise UnboundedGuaranteeError(
                f"divisor interval {v2} ± {e2} contains zero; the quotient is unbounded"
            )
        g = (e1 * abs(v2) + e2 * abs(v1)) / ((abs(v2) - e2) * abs(v2))
        return ApproxScalar(v1 / v2, g)
    raise ValueError(f"unknown scalar operator {op!r}")
