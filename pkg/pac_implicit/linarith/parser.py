from __future__ import annotations

import ast
import re
from fractions import Fraction

from pac_implicit.errors import ParseError
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.constants import SYMBOL_RELATIONS
from pac_implicit.linarith.expr import LinearExpr, VariableSet

# Longest symbols first so "<=" is not read as "<"
RELOP_RE = re.compile(
    "|".join(re.escape(symbol) for symbol in sorted(SYMBOL_RELATIONS, key=len, reverse=True))
)


def parse_expr(text: str, variables: VariableSet, line: int = 0) -> LinearExpr:
    """
    Parse a linear expression such as ``hr - 5*(ox - 90)`` or the rendered
    form ``1*hr + -5*ox + 450``. New variable names are interned into
    ``variables``.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ParseError(line, f"invalid expression {text.strip()!r}: {e.msg}") from None
    return _eval_linear(tree.body, text.strip(), variables, line)


def parse_atom(text: str, variables: VariableSet, line: int = 0) -> LinearAtom:
    """Parse ``lhs <relop> rhs`` where both sides are linear."""
    matches = list(RELOP_RE.finditer(text))
    if len(matches) != 1:
        raise ParseError(line, f"expected exactly one relation in {text.strip()!r}")
    match = matches[0]
    lhs = parse_expr(text[: match.start()], variables, line)
    rhs = parse_expr(text[match.end() :], variables, line)
    return LinearAtom.compare(lhs, SYMBOL_RELATIONS[match.group()], rhs)


def parse_query(text: str, variables: VariableSet) -> list[LinearAtom]:
    """A conjunction of atoms separated by ``&`` or ``;``."""
    parts = [part for part in re.split(r"[&;]", text) if part.strip()]
    if not parts:
        raise ParseError(0, "empty query")
    return [parse_atom(part, variables) for part in parts]


def parse_formula(text: str, variables: VariableSet) -> ConjunctiveFormula:
    """One atom per line; blank lines and ``#`` comments are skipped."""
    atoms = []
    for line_num, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if content:
            atoms.append(parse_atom(content, variables, line_num))
    return ConjunctiveFormula(atoms)


def _eval_linear(node: ast.AST, source: str, variables: VariableSet, line: int) -> LinearExpr:
    if isinstance(node, ast.Constant):
        literal = ast.get_source_segment(source, node)
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ParseError(line, f"not a number: {literal}")
        # Read the literal's source text so "0.1" stays exactly 1/10
        try:
            return LinearExpr.of_constant(Fraction(literal))
        except ValueError:
            raise ParseError(line, f"unsupported number literal: {literal}") from None
    if isinstance(node, ast.Name):
        return LinearExpr.of_variable(variables.intern(node.id))
    if isinstance(node, ast.UnaryOp):
        operand = _eval_linear(node.operand, source, variables, line)
        if isinstance(node.op, ast.USub):
            return -operand
        if isinstance(node.op, ast.UAdd):
            return operand
        raise ParseError(line, f"unsupported unary operator: {type(node.op).__name__}")
    if isinstance(node, ast.BinOp):
        left = _eval_linear(node.left, source, variables, line)
        right = _eval_linear(node.right, source, variables, line)
        op = node.op
        if isinstance(op, ast.Add):
            return left + right
        if isinstance(op, ast.Sub):
            return left - right
        if isinstance(op, ast.Mult):
            if left.is_constant:
                return right * left.constant
            if right.is_constant:
                return left * right.constant
            raise ParseError(line, "product of two variables is not linear")
        if isinstance(op, ast.Div):
            if not right.is_constant or right.constant == 0:
                raise ParseError(line, "division must be by a nonzero constant")
            return left / right.constant
        raise ParseError(line, f"unsupported binary operator: {type(op).__name__}")
    raise ParseError(line, f"unsupported expression node: {type(node).__name__}")
