from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Mapping, Sequence

from pac_implicit.bench.constants import (
    EXACT_OPTIMUM_ACCURACY,
    EXACT_OPTIMUM_ROUNDS,
    GOAL_TOKENS,
    PROBLEM_SUFFIX,
    SHIPPED_PROBLEMS,
    VERTEX_SEARCH_SLACK,
    KbMode,
)
from pac_implicit.errors import InfeasibleProblem, ParseError
from pac_implicit.feasibility.solver import check_feasible, concretize
from pac_implicit.linarith.atoms import TOP, ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import IDENTIFIER_RE, LinearExpr, Variable, VariableSet
from pac_implicit.linarith.parser import parse_atom, parse_expr
from pac_implicit.optimise.constants import Goal
from pac_implicit.utils import format_rational, to_rational

log = logging.getLogger(__name__)


@dataclass
class ProblemSpec:
    name: str
    variables: VariableSet
    domain: dict[Variable, tuple[Fraction, Fraction]]
    hard_constraints: ConjunctiveFormula
    objective: LinearExpr
    goal: Goal
    true_optimum: Fraction | None = None
    description: list[str] = field(default_factory=list)

    @property
    def dims(self) -> int:
        return len(self.variables)

    @property
    def box(self) -> ConjunctiveFormula:
        """The domain box as ``lo <= v`` and ``v <= hi`` atoms."""
        atoms = []
        for variable, (lo, hi) in self.domain.items():
            term = LinearExpr.of_variable(variable)
            atoms.append(LinearAtom(term - lo, Relation.GE))
            atoms.append(LinearAtom(term - hi, Relation.LE))
        return ConjunctiveFormula(atoms)

    @property
    def region(self) -> ConjunctiveFormula:
        """The feasible region: hard constraints within the domain box."""
        return self.hard_constraints & self.box

    def knowledge_base(self, mode: KbMode = KbMode.HARD) -> ConjunctiveFormula:
        mode = KbMode(mode)
        if mode == KbMode.HARD:
            return self.region
        if mode == KbMode.BOX:
            return self.box
        return TOP

    def in_box(self, point: Mapping[Variable, Fraction]) -> bool:
        return all(lo <= point[var] <= hi for var, (lo, hi) in self.domain.items())

    def is_feasible(self, point: Mapping[Variable, Fraction]) -> bool:
        return self.in_box(point) and self.hard_constraints.satisfied_by(point)

    def render(self) -> str:
        lines = [f"# {line}" for line in self.description]
        lines += [
            f"name: {self.name}",
            f"dims: {self.dims}",
            f"goal: {self.goal.name.lower()}",
        ]
        if self.true_optimum is not None:
            lines.append(f"optimum: {format_rational(self.true_optimum)}")
        for variable, (lo, hi) in self.domain.items():
            lines.append(f"var {variable.name} {format_rational(lo)} {format_rational(hi)}")
        for atom in self.hard_constraints:
            lines.append(f"con {atom.render()}")
        lines.append(f"obj {self.objective.render()}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | os.PathLike):
        with open(path, "w") as problem_file:
            problem_file.write(self.render())


def parse_problem(text: str, check: bool = True) -> ProblemSpec:
    """
    Read the line-oriented problem format::

        name: <name>
        dims: <n>
        goal: maximise | minimise
        optimum: <rational>            (optional)
        var <name> <lo> <hi>           (one per variable, in order)
        con <linear atom>              (one per hard constraint)
        obj <linear expression>

    Blank lines and ``#`` comments are ignored. With ``check`` the hard
    constraints must be satisfiable inside the box.
    """
    header: dict[str, str] = {}
    variables = VariableSet()
    domain: dict[Variable, tuple[Fraction, Fraction]] = {}
    constraint_lines: list[tuple[int, str]] = []
    objective_line: tuple[int, str] | None = None
    description: list[str] = []

    for line_num, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("#"):
            if not domain and not header:
                description.append(raw.lstrip()[1:].strip())
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        keyword, _, rest = line.partition(" ")
        if keyword.endswith(":"):
            key = keyword[:-1]
            if key not in ("name", "dims", "goal", "optimum"):
                raise ParseError(line_num, f"unknown header {key!r}")
            header[key] = rest.strip()
        elif keyword == "var":
            fields = rest.split()
            if len(fields) != 3 or not IDENTIFIER_RE.fullmatch(fields[0]):
                raise ParseError(line_num, "expected 'var <name> <lo> <hi>'")
            if fields[0] in variables:
                raise ParseError(line_num, f"variable {fields[0]!r} declared twice")
            try:
                lo, hi = to_rational(fields[1]), to_rational(fields[2])
            except ValueError:
                raise ParseError(line_num, "domain bounds must be finite rationals") from None
            if lo > hi:
                raise ParseError(line_num, f"empty domain [{fields[1]}, {fields[2]}]")
            domain[variables.intern(fields[0])] = (lo, hi)
        elif keyword == "con":
            constraint_lines.append((line_num, rest))
        elif keyword == "obj":
            if objective_line is not None:
                raise ParseError(line_num, "objective given twice")
            objective_line = (line_num, rest)
        else:
            raise ParseError(line_num, f"unknown keyword {keyword!r}")

    if "name" not in header:
        raise ParseError(0, "missing 'name:' header")
    if header.get("goal", "").lower() not in GOAL_TOKENS:
        raise ParseError(0, f"goal must be maximise or minimise, got {header.get('goal')!r}")
    if objective_line is None:
        raise ParseError(0, "missing 'obj' line")

    declared = set(variables.names)

    def check_declared(line_num: int, used: tuple[Variable, ...]):
        for variable in used:
            if variable.name not in declared:
                raise ParseError(line_num, f"undeclared variable {variable.name!r}")

    atoms = []
    for line_num, source in constraint_lines:
        atom = parse_atom(source, variables, line_num)
        check_declared(line_num, atom.expr.variables)
        atoms.append(atom)
    objective = parse_expr(objective_line[1], variables, objective_line[0])
    check_declared(objective_line[0], objective.variables)

    if "dims" in header and header["dims"] != str(len(domain)):
        raise ParseError(0, f"dims: {header['dims']} but {len(domain)} variables declared")
    true_optimum = None
    if "optimum" in header:
        try:
            true_optimum = to_rational(header["optimum"])
        except ValueError:
            raise ParseError(0, f"invalid optimum {header['optimum']!r}") from None

    spec = ProblemSpec(
        name=header["name"],
        variables=variables,
        domain=domain,
        hard_constraints=ConjunctiveFormula(atoms),
        objective=objective,
        goal=GOAL_TOKENS[header["goal"].lower()],
        true_optimum=true_optimum,
        description=description,
    )
    if check and not check_feasible(spec.region).is_sat:
        raise InfeasibleProblem(f"Problem '{spec.name}' has no feasible point inside its box")
    return spec


def load_problem(path: str | os.PathLike) -> ProblemSpec:
    with open(path, "r") as problem_file:
        return parse_problem(problem_file.read())


def load_shipped_problem(name: str) -> ProblemSpec:
    if name not in SHIPPED_PROBLEMS:
        raise ValueError(f"No shipped problem named '{name}'")
    data = resources.files("pac_implicit.bench").joinpath("data", name + PROBLEM_SUFFIX)
    return parse_problem(data.read_text())


def _solve_equalities(
    atoms: Sequence[LinearAtom],
    variables: Sequence[Variable],
) -> dict[Variable, Fraction] | None:
    """The unique point where every ``atom.expr`` is zero, or None when the system is singular."""
    rows = [
        [atom.expr.coefficients.get(variable, Fraction(0)) for variable in variables]
        + [-atom.expr.constant]
        for atom in atoms
    ]
    size = len(variables)
    for column in range(size):
        pivot = next((row for row in range(column, size) if rows[row][column] != 0), None)
        if pivot is None:
            return None
        rows[column], rows[pivot] = rows[pivot], rows[column]
        lead = rows[column][column]
        rows[column] = [value / lead for value in rows[column]]
        for row in range(size):
            factor = rows[row][column]
            if row != column and factor != 0:
                rows[row] = [value - factor * top for value, top in zip(rows[row], rows[column])]
    return {variable: rows[k][size] for k, variable in enumerate(variables)}


def _tightness(atom: LinearAtom, point: Mapping[Variable, Fraction]) -> Fraction:
    scale = max(abs(coeff) for coeff in atom.expr.coefficients.values())
    return abs(atom.expr.evaluate(point)) / scale


def _direction(atom: LinearAtom) -> tuple:
    # Atoms over the same hyperplane share a direction key
    _, lead = next(iter(atom.expr.coefficients.items()))
    terms = tuple((var.index, coeff / lead) for var, coeff in atom.expr.coefficients.items())
    return terms, atom.expr.constant / lead


def optimal_vertex(
    region: ConjunctiveFormula,
    objective: LinearExpr,
    point: Mapping[Variable, Fraction],
    slack: int = VERTEX_SEARCH_SLACK,
) -> dict[Variable, Fraction] | None:
    """
    Look for a vertex of ``region`` maximising ``objective`` near ``point``.

    Candidates intersect ``dims`` of the constraints tightest at ``point``,
    drawn from the ``dims + slack`` tightest distinct hyperplanes. A
    candidate is returned only once it lies in the region and nothing in the
    region scores strictly higher, so a result is always exact.
    """
    variables = sorted(region.variables, key=lambda variable: variable.index)
    hyperplanes: dict[tuple, LinearAtom] = {}
    for atom in sorted(
        (atom for atom in region if not atom.expr.is_constant),
        key=lambda atom: _tightness(atom, point),
    ):
        hyperplanes.setdefault(_direction(atom), atom)
    pool = list(hyperplanes.values())[: len(variables) + slack]

    floor = objective.evaluate(point)
    for chosen in itertools.combinations(pool, len(variables)):
        vertex = _solve_equalities(chosen, variables)
        if vertex is None or not region.satisfied_by(vertex):
            continue
        value = objective.evaluate(vertex)
        if value < floor:
            continue
        better = region & [LinearAtom(objective - value, Relation.GT)]
        if not check_feasible(better).is_sat:
            return vertex
    return None


def exact_optimum(
    spec: ProblemSpec,
    accuracy: int = EXACT_OPTIMUM_ACCURACY,
) -> tuple[Fraction, Fraction]:
    """
    The optimum of ``spec``, using the feasibility check as an LP oracle.

    Bisects on ``b`` with ``region ∧ f >= b`` (``<=`` for minimise) until
    the best model found sits close to the optimal vertex, then reads the
    vertex off the constraints tight there with :func:`optimal_vertex`.
    Returns ``(low, high)`` with ``low == high`` once a vertex is verified.
    If none is found within ``EXACT_OPTIMUM_ROUNDS`` rounds of bisection the
    last bracket is returned, its feasible end (``low`` for maximise,
    ``high`` for minimise) attained.
    """
    region = spec.region
    objective = spec.objective if spec.goal == Goal.MAXIMISE else -spec.objective

    verdict = check_feasible(region)
    if not verdict.is_sat:
        raise InfeasibleProblem(f"Problem '{spec.name}' has no feasible point inside its box")

    # Largest value of the objective anywhere in the box, plus one
    high = objective.constant + 1
    for variable, coeff in objective.coefficients.items():
        lo, hi = spec.domain[variable]
        high += coeff * (hi if coeff > 0 else lo)

    best = concretize(verdict.model, region)
    low = objective.evaluate(best)
    for _ in range(EXACT_OPTIMUM_ROUNDS):
        for _ in range(accuracy):
            middle = (low + high) / 2
            bounded = region & [LinearAtom(objective - middle, Relation.GE)]
            verdict = check_feasible(bounded)
            if not verdict.is_sat:
                high = middle
                continue
            best = concretize(verdict.model, bounded)
            low = max(middle, objective.evaluate(best))
        vertex = optimal_vertex(region, objective, best)
        if vertex is not None:
            low = high = objective.evaluate(vertex)
            break
    else:
        log.warning("No optimal vertex found for %s, keeping the bracket", spec.name)

    log.debug("Exact optimum of %s in [%s, %s]", spec.name, float(low), float(high))
    if spec.goal == Goal.MAXIMISE:
        return low, high
    return -high, -low


def attained_optimum(spec: ProblemSpec, accuracy: int = EXACT_OPTIMUM_ACCURACY) -> Fraction:
    """The feasible end of :func:`exact_optimum`'s bracket, the exact optimum when found."""
    low, high = exact_optimum(spec, accuracy)
    return low if spec.goal == Goal.MAXIMISE else high
