import io
from fractions import Fraction

import numpy as np
import pytest

from pac_implicit.bench.constants import KbMode, Label
from pac_implicit.bench.dataset import (
    LabelledSample,
    parse_dataset,
    positive_observations,
    sample_dataset,
    write_dataset,
)
from pac_implicit.bench.generators import gen_cuben, gen_simplexn, problem_rng, resolve_problem
from pac_implicit.bench.problem import (
    attained_optimum,
    exact_optimum,
    load_shipped_problem,
    optimal_vertex,
    parse_problem,
)
from pac_implicit.errors import InfeasibleProblem, OutOfRange, ParseError
from pac_implicit.feasibility.solver import check_feasible, concretize
from pac_implicit.linarith.atoms import TOP, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import VariableSet
from pac_implicit.optimise.constants import Goal
from pac_implicit.pac.interval import PartialInterval

POLLUTION_OPTIMUM = Fraction(1225413, 38110)
POLICE_OPTIMUM = Fraction(337, 100)

TWO_VARS = """\
name: strip
dims: 2
goal: maximise
var x 0 1
var y 0 2
con x + y <= 1.5
obj x + y
"""


def assert_optimum_attained(spec):
    objective = spec.objective - spec.true_optimum
    assert check_feasible(spec.region & [LinearAtom(objective, Relation.EQ)]).is_sat
    better = Relation.GT if spec.goal == Goal.MAXIMISE else Relation.LT
    assert not check_feasible(spec.region & [LinearAtom(objective, better)]).is_sat


def test_load_pollution(check):
    spec = load_shipped_problem("pollution")
    check.equal(spec.dims, 6)
    check.equal(spec.goal, Goal.MINIMISE)
    check.equal(spec.true_optimum, Fraction(3215, 100))
    check.equal(len(spec.hard_constraints), 3)
    check.equal(len(spec.box), 12)
    check.is_true(spec.description)


def test_pollution_exact_optimum(problem_factory, check):
    spec = problem_factory("pollution")
    check.equal(exact_optimum(spec), (POLLUTION_OPTIMUM, POLLUTION_OPTIMUM))
    check.equal(attained_optimum(spec), POLLUTION_OPTIMUM)


def test_police_exact_optimum(problem_factory, check):
    spec = problem_factory("police")
    check.equal(spec.dims, 5)
    check.equal(spec.true_optimum, POLICE_OPTIMUM)
    check.is_true(any("Reconstruction" in line for line in spec.description))
    check.equal(attained_optimum(spec), POLICE_OPTIMUM)
    assert_optimum_attained(spec)
    x = {var.name: var for var in spec.variables}
    best = {
        x["x1"]: Fraction("0.365"),
        x["x2"]: Fraction("0.435"),
        x["x3"]: Fraction("0.265"),
        x["x4"]: Fraction("0.385"),
        x["x5"]: Fraction("0.235"),
    }
    check.is_true(spec.is_feasible(best))
    check.equal(spec.objective.evaluate(best), POLICE_OPTIMUM)


def test_knowledge_base_modes(check):
    spec = parse_problem(TWO_VARS)
    check.equal(spec.knowledge_base(KbMode.HARD), spec.region)
    check.equal(spec.knowledge_base(KbMode.BOX), spec.box)
    check.equal(spec.knowledge_base(KbMode.NONE), TOP)
    check.equal(exact_optimum(spec), (Fraction(3, 2), Fraction(3, 2)))


@pytest.mark.parametrize(
    "text, reason",
    [
        (TWO_VARS.replace("goal: maximise", "goal: sideways"), "goal"),
        (TWO_VARS.replace("obj x + y", "obj x + w"), "undeclared"),
        (TWO_VARS.replace("dims: 2", "dims: 3"), "dims"),
        (TWO_VARS.replace("var y 0 2", "var x 0 2"), "twice"),
        (TWO_VARS.replace("var y 0 2", "var y 2 0"), "empty domain"),
        (TWO_VARS.replace("obj x + y\n", ""), "obj"),
        (TWO_VARS.replace("name: strip\n", ""), "name"),
        (TWO_VARS + "lim x <= 1\n", "unknown keyword"),
        (TWO_VARS.replace("con x + y <= 1.5", "con x <= True"), "not a number"),
    ],
)
def test_problem_parse_errors(text, reason):
    with pytest.raises(ParseError, match=reason):
        parse_problem(text)


def test_infeasible_problem():
    text = TWO_VARS.replace("con x + y <= 1.5", "con x + y >= 4")
    with pytest.raises(InfeasibleProblem):
        parse_problem(text)
    assert parse_problem(text, check=False).name == "strip"


def test_render_parses_back(problem_factory):
    spec = problem_factory("police")
    again = parse_problem(spec.render())
    assert again.render() == spec.render()
    assert again.region == spec.region


def test_problem_file(tmp_path, problem_factory):
    spec = problem_factory("simplexn", 2)
    path = tmp_path / "simplex2.prob"
    spec.save(path)
    loaded = resolve_problem(str(path))
    assert loaded.objective == spec.objective
    assert loaded.true_optimum == spec.true_optimum


@pytest.mark.parametrize("n, constraints", [(2, 3), (3, 9), (4, 18)])
def test_simplexn_shape(n, constraints, check):
    spec = gen_simplexn(n, problem_rng(7, f"simplex{n}"))
    check.equal(spec.dims, n)
    check.equal(len(spec.hard_constraints), constraints)
    check.equal(spec.goal, Goal.MAXIMISE)
    check.is_true(all(bounds == (0, 1) for bounds in spec.domain.values()))


def test_cuben_shape(check):
    spec = gen_cuben(2, problem_rng(7, "cube2"))
    check.equal(len(spec.hard_constraints), 4)
    with pytest.raises(OutOfRange):
        gen_cuben(5, problem_rng(7, "cube5"))
    with pytest.raises(OutOfRange):
        gen_simplexn(1, problem_rng(7, "simplex1"))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cube_corner_matches_search(n):
    for seed in range(5):
        spec = gen_cuben(n, problem_rng(seed, f"cube{n}"))
        assert attained_optimum(spec) == spec.true_optimum


def test_optimal_vertex(check):
    spec = parse_problem(TWO_VARS)
    x, y = spec.variables["x"], spec.variables["y"]
    origin = {x: Fraction(0), y: Fraction(0)}
    vertex = optimal_vertex(spec.region, spec.objective, origin)
    check.is_true(spec.is_feasible(vertex))
    check.equal(spec.objective.evaluate(vertex), Fraction(3, 2))
    # Only the two axes are tight at the origin, and their corner is not optimal
    check.is_none(optimal_vertex(spec.region, spec.objective, origin, slack=0))


def check_generated(spec):
    verdict = check_feasible(spec.region)
    assert verdict.is_sat
    assert spec.is_feasible(concretize(verdict.model, spec.region))
    assert abs(spec.objective.constant) <= 1
    assert all(abs(coeff) <= 1 for coeff in spec.objective.coefficients.values())
    assert abs(spec.true_optimum) <= spec.dims + 1
    assert_optimum_attained(spec)


@pytest.mark.parametrize("family", ["simplex", "cube"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_generated_regions_are_nonempty(family, n):
    generator = gen_simplexn if family == "simplex" else gen_cuben
    for seed in range(5):
        check_generated(generator(n, problem_rng(seed, f"{family}{n}")))


@pytest.mark.slow
@pytest.mark.parametrize("family", ["simplex", "cube"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_generated_regions_are_nonempty_many_seeds(family, n):
    generator = gen_simplexn if family == "simplex" else gen_cuben
    for seed in range(100):
        check_generated(generator(n, problem_rng(seed, f"{family}{n}")))


def test_generation_is_reproducible(check):
    first = resolve_problem("simplexn", 3, seed=42)
    second = resolve_problem("simplex3", seed=42)
    check.equal(first.hard_constraints, second.hard_constraints)
    check.equal(first.objective, second.objective)
    check.not_equal(first.objective, resolve_problem("simplexn", 3, seed=43).objective)


@pytest.mark.parametrize(
    "problem, dims",
    [("simplexn", None), ("simplex3", 2), ("nonsense", None), ("cube9", None)],
)
def test_resolve_errors(problem, dims):
    with pytest.raises((ValueError, OutOfRange)):
        resolve_problem(problem, dims)


@pytest.mark.seed(3)
def test_dataset_split(rng, problem_factory, check):
    spec = problem_factory("cuben", 2)
    samples = sample_dataset(spec, 41, Fraction(1, 2), 0, 0, rng)
    positives = [sample for sample in samples if sample.positive]
    check.equal(len(samples), 41)
    check.equal(len(positives), 20)
    for sample in samples:
        check.equal(sample.positive, spec.is_feasible(sample.point))
        check.is_true(spec.in_box(sample.point))
        check.is_false(sample.flipped)
    for sample in positives:
        # Noise 0 leaves the exact point
        check.equal(sample.observation(), PartialInterval.point(sample.point))


@pytest.mark.seed(4)
def test_dataset_noise_and_outliers(rng, problem_factory, check):
    spec = problem_factory("simplexn", 2)
    samples = sample_dataset(spec, 200, Fraction(1, 2), "0.25", "0.1", rng)
    flipped = [sample for sample in samples if sample.flipped]
    check.is_true(0 < len(flipped) < 60)
    for sample in samples:
        truly_positive = spec.is_feasible(sample.point)
        check.equal(sample.positive, truly_positive != sample.flipped)
        if sample.positive:
            interval = sample.observation()
            for var, (lo, hi) in spec.domain.items():
                check.is_true(lo <= interval.lower(var) <= interval.upper(var) <= hi)
        else:
            check.is_true(sample.blurred is None)


def test_dataset_is_reproducible(problem_factory):
    spec = problem_factory("simplexn", 2)

    def draw():
        rng = np.random.default_rng(8)
        return positive_observations(sample_dataset(spec, 30, Fraction(1, 2), "0.1", 0, rng))

    assert draw() == draw()


def test_dataset_invalid_arguments(problem_factory, rng):
    spec = problem_factory("cuben", 2)
    with pytest.raises(OutOfRange):
        sample_dataset(spec, 0, Fraction(1, 2), 0, 0, rng)
    with pytest.raises(OutOfRange):
        sample_dataset(spec, 10, Fraction(3, 2), 0, 0, rng)
    with pytest.raises(OutOfRange):
        sample_dataset(spec, 10, Fraction(1, 2), -1, 0, rng)


@pytest.mark.seed(6)
def test_dataset_file(rng, problem_factory):
    spec = problem_factory("cuben", 3)
    samples = sample_dataset(spec, 12, Fraction(1, 2), "0.2", 0, rng, mask_probability=0.3)
    stream = io.StringIO()
    write_dataset(samples, spec.variables, stream)

    variables = VariableSet()
    loaded = parse_dataset(stream.getvalue(), variables)
    assert variables.names == spec.variables.names
    assert [sample.label for sample in loaded] == [sample.label for sample in samples]
    assert positive_observations(loaded) == positive_observations(samples)


def test_fitness_watch_data(data_dir, check):
    variables = VariableSet()
    samples = parse_dataset((data_dir / "fitness_watch.data").read_text(), variables)
    check.equal(variables.names, ["hr", "ox"])
    check.equal([sample.label for sample in samples], [Label.POSITIVE] * 3)
    hr, ox = variables["hr"], variables["ox"]
    masked = samples[2].observation()
    check.equal((masked.lower(hr), masked.upper(hr)), (110, 120))
    check.is_true(masked.is_masked(ox))
    check.equal(samples[2].point, {})


@pytest.mark.parametrize(
    "line",
    ["maybe;1,2;", "pos;1;", "pos;1,2;1,2,3", "pos;;", "pos;1,2", "pos;a,2;"],
)
def test_dataset_parse_errors(line):
    with pytest.raises(ParseError):
        parse_dataset(f"# vars: x,y\n{line}\n", VariableSet())


def test_observation_prefers_blurred(variables):
    x = variables["x"]
    sample = LabelledSample({x: Fraction(1)}, Label.POSITIVE, PartialInterval({x: (0, 2)}))
    assert sample.observation() == PartialInterval({x: (0, 2)})
