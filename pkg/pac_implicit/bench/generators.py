from __future__ import annotations

import itertools
import math
import os
import re
import zlib
from fractions import Fraction

import numpy as np

from pac_implicit.bench.constants import (
    GENERATED_FAMILIES,
    GENERATOR_GRID,
    MAX_GENERATED_DIMS,
    MIN_GENERATED_DIMS,
    SHIPPED_PROBLEMS,
)
from pac_implicit.bench.problem import (
    ProblemSpec,
    attained_optimum,
    load_problem,
    load_shipped_problem,
)
from pac_implicit.errors import InfeasibleProblem, OutOfRange
from pac_implicit.feasibility.solver import check_feasible
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import LinearExpr, VariableSet
from pac_implicit.optimise.constants import Goal
from pac_implicit.utils import quantise

FAMILY_RE = re.compile(r"^(simplex|cube)(n|\d)$")

Point2 = tuple[Fraction, Fraction]


def _check_dims(n: int):
    if not MIN_GENERATED_DIMS <= n <= MAX_GENERATED_DIMS:
        raise OutOfRange(
            f"Generated problems have {MIN_GENERATED_DIMS} to {MAX_GENERATED_DIMS} "
            f"dimensions, got {n}"
        )


def _uniform(rng: np.random.Generator, lo: float, hi: float) -> Fraction:
    return quantise(rng.uniform(lo, hi), GENERATOR_GRID)


def random_objective(variables: VariableSet, rng: np.random.Generator) -> LinearExpr:
    """Coefficients and constant uniform in [-1, 1], so |f| <= n + 1 on the unit box."""
    coefficients = {variable: _uniform(rng, -1, 1) for variable in variables}
    return LinearExpr(coefficients, _uniform(rng, -1, 1))


def triangle_half_planes(
    x: LinearExpr,
    y: LinearExpr,
    vertices: tuple[Point2, Point2, Point2],
) -> list[LinearAtom]:
    """The three half-planes whose intersection is the triangle ``vertices`` in the (x, y) plane."""
    atoms = []
    for k in range(3):
        p, q, opposite = vertices[k], vertices[(k + 1) % 3], vertices[(k + 2) % 3]
        a = q[1] - p[1]
        b = p[0] - q[0]
        c = -(a * p[0] + b * p[1])
        edge = x * a + y * b + c
        side = a * opposite[0] + b * opposite[1] + c
        atoms.append(LinearAtom(edge, Relation.GE if side > 0 else Relation.LE))
    return atoms


def gen_simplexn(n: int, rng: np.random.Generator) -> ProblemSpec:
    """
    The intersection of one uniform triangular prism per pair of variables.

    Each prism's footprint is an equilateral triangle in the (x_i, x_j)
    plane, extended along the other axes. All triangles are placed around
    a common anchor point so the region is never empty, and they stay
    inside the unit square.
    """
    _check_dims(n)
    variables = VariableSet(f"x{i}" for i in range(1, n + 1))
    anchor = [rng.uniform(0.35, 0.65) for _ in range(n)]

    atoms = []
    for i, j in itertools.combinations(range(n), 2):
        radius = rng.uniform(0.15, 0.25)
        # Offset within a quarter radius keeps the anchor inside the triangle's incircle
        offset = rng.uniform(0, radius / 4)
        direction = rng.uniform(0, 2 * math.pi)
        centre = (
            anchor[i] + offset * math.cos(direction),
            anchor[j] + offset * math.sin(direction),
        )
        rotation = rng.uniform(0, 2 * math.pi / 3)
        angles = [rotation + k * 2 * math.pi / 3 for k in range(3)]
        vertices = tuple(
            (
                quantise(centre[0] + radius * math.cos(angle), GENERATOR_GRID),
                quantise(centre[1] + radius * math.sin(angle), GENERATOR_GRID),
            )
            for angle in angles
        )
        x_i = LinearExpr.of_variable(variables[f"x{i + 1}"])
        x_j = LinearExpr.of_variable(variables[f"x{j + 1}"])
        atoms += triangle_half_planes(x_i, x_j, vertices)

    return _finish(f"simplex{n}", variables, ConjunctiveFormula(atoms), rng)


def gen_cuben(n: int, rng: np.random.Generator) -> ProblemSpec:
    """
    An axis-aligned box inside the unit hypercube, with slack on every face.

    Stand-in geometry: per axis the region is ``[lo, hi]`` with ``lo`` drawn
    from [0, 0.4] and ``hi`` from [0.6, 1].
    """
    _check_dims(n)
    variables = VariableSet(f"x{i}" for i in range(1, n + 1))
    atoms = []
    faces = {}
    for variable in variables:
        term = LinearExpr.of_variable(variable)
        faces[variable] = (_uniform(rng, 0.0, 0.4), _uniform(rng, 0.6, 1.0))
        atoms.append(LinearAtom(term - faces[variable][0], Relation.GE))
        atoms.append(LinearAtom(term - faces[variable][1], Relation.LE))
    spec = _finish(f"cube{n}", variables, ConjunctiveFormula(atoms), rng, optimise=False)
    # The best corner takes each upper face with a positive coefficient, else the lower one
    corner = {
        variable: hi if spec.objective.coefficients.get(variable, 0) > 0 else lo
        for variable, (lo, hi) in faces.items()
    }
    spec.true_optimum = spec.objective.evaluate(corner)
    return spec


def _finish(
    name: str,
    variables: VariableSet,
    hard_constraints: ConjunctiveFormula,
    rng: np.random.Generator,
    optimise: bool = True,
) -> ProblemSpec:
    spec = ProblemSpec(
        name=name,
        variables=variables,
        domain={variable: (Fraction(0), Fraction(1)) for variable in variables},
        hard_constraints=hard_constraints,
        objective=random_objective(variables, rng),
        goal=Goal.MAXIMISE,
    )
    if not check_feasible(spec.region).is_sat:
        raise InfeasibleProblem(f"Generated problem {name} is empty")
    if optimise:
        spec.true_optimum = attained_optimum(spec)
    return spec


def problem_rng(seed: int, name: str) -> np.random.Generator:
    """The stream a generated problem is drawn from, shared by every run of a grid."""
    sequence = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),))
    return np.random.Generator(np.random.PCG64(sequence))


def resolve_problem(problem: str, dims: int | None = None, seed: int = 0) -> ProblemSpec:
    """
    Turn a command-line problem argument into a :class:`ProblemSpec`.

    Accepts a shipped problem name (``pollution``, ``police``), a generated
    family (``simplexn``/``cuben`` with ``dims``, or ``simplex3`` style
    shorthands) or a path to a ``.prob`` file.
    """
    if problem in SHIPPED_PROBLEMS:
        return load_shipped_problem(problem)

    match = FAMILY_RE.match(problem)
    if match:
        family, size = match.groups()
        if size == "n":
            if dims is None:
                raise ValueError(f"{problem} needs a dimension (--dims)")
            n = dims
        else:
            n = int(size)
            if dims is not None and dims != n:
                raise ValueError(f"{problem} conflicts with --dims {dims}")
        rng = problem_rng(seed, f"{family}{n}")
        return gen_simplexn(n, rng) if family == "simplex" else gen_cuben(n, rng)

    if os.path.exists(problem):
        return load_problem(problem)

    known = ", ".join(SHIPPED_PROBLEMS + GENERATED_FAMILIES)
    raise ValueError(f"Unknown problem '{problem}' (expected one of {known}, or a .prob file)")
