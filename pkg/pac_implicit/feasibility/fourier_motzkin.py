from __future__ import annotations

from fractions import Fraction

from pac_implicit.errors import SizeLimitExceeded, UnexpectedNeq
from pac_implicit.feasibility.constants import FM_MAX_ATOMS, FM_MAX_VARIABLES, Status
from pac_implicit.linarith.atoms import ConjunctiveFormula
from pac_implicit.linarith.constants import Relation

# A constraint is (coefficients by variable index, constant, strict): Σ a·x + c (<|<=) 0
Constraint = tuple[dict[int, Fraction], Fraction, bool]


def fm_feasible(formula: ConjunctiveFormula) -> Status:
    """
    Fourier–Motzkin variable elimination. Exponential, so only used as an
    independent oracle on small systems.
    """
    if formula.has_neq():
        raise UnexpectedNeq("Disequalities must be split before elimination")
    if len(formula) > FM_MAX_ATOMS or len(formula.variables) > FM_MAX_VARIABLES:
        raise SizeLimitExceeded(
            f"Fourier–Motzkin handles at most {FM_MAX_VARIABLES} variables "
            f"and {FM_MAX_ATOMS} atoms"
        )

    equalities: list[tuple[dict[int, Fraction], Fraction]] = []
    constraints: list[Constraint] = []
    for atom in formula:
        coeffs = {var.index: coeff for var, coeff in atom.expr.coefficients.items()}
        if atom.relation == Relation.EQ:
            equalities.append((coeffs, atom.expr.constant))
        else:
            constraints.append((coeffs, atom.expr.constant, atom.is_strict))

    # Substitute equalities away first
    while equalities:
        coeffs, constant = equalities.pop()
        if not coeffs:
            if constant != 0:
                return Status.UNSAT
            continue
        var, a = next(iter(coeffs.items()))
        # var = -(constant + Σ_{k != var} c_k x_k) / a
        equalities = [_substitute(c, k, var, coeffs, constant, a) for c, k in equalities]
        constraints = [
            (*_substitute(c, k, var, coeffs, constant, a), strict) for c, k, strict in constraints
        ]

    variables = sorted({var for coeffs, _, _ in constraints for var in coeffs})
    for var in variables:
        positive, negative, rest = [], [], []
        for constraint in constraints:
            a = constraint[0].get(var, 0)
            if a > 0:
                positive.append(constraint)
            elif a < 0:
                negative.append(constraint)
            else:
                rest.append(constraint)
        for p_coeffs, p_const, p_strict in positive:
            for n_coeffs, n_const, n_strict in negative:
                p_scale = -n_coeffs[var]
                n_scale = p_coeffs[var]
                combined = {}
                for k in set(p_coeffs) | set(n_coeffs):
                    value = p_coeffs.get(k, 0) * p_scale + n_coeffs.get(k, 0) * n_scale
                    if value != 0:
                        combined[k] = value
                rest.append(
                    (combined, p_const * p_scale + n_const * n_scale, p_strict or n_strict)
                )
        constraints = rest

    for coeffs, constant, strict in constraints:
        if strict and not constant < 0:
            return Status.UNSAT
        if not strict and not constant <= 0:
            return Status.UNSAT
    return Status.SAT


def _substitute(
    coeffs: dict[int, Fraction],
    constant: Fraction,
    var: int,
    eq_coeffs: dict[int, Fraction],
    eq_constant: Fraction,
    a: Fraction,
) -> tuple[dict[int, Fraction], Fraction]:
    factor = coeffs.get(var)
    if not factor:
        return coeffs, constant
    scale = factor / a
    result = dict(coeffs)
    del result[var]
    for k, c in eq_coeffs.items():
        if k == var:
            continue
        value = result.get(k, 0) - scale * c
        if value != 0:
            result[k] = value
        else:
            result.pop(k, None)
    return result, constant - scale * eq_constant
