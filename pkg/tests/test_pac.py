import itertools
import logging
import math
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np
import pytest

from pac_implicit import PacImplicit
from pac_implicit.errors import EmptySampleList, InvalidConfig, OutOfRange
from pac_implicit.linarith.atoms import TOP, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import LinearExpr, VariableSet
from pac_implicit.pac.blur import BlurConfig, blur, noise_interval_width
from pac_implicit.pac.constants import PacVerdict, SampleOutcome
from pac_implicit.pac.decide import decide_pac
from pac_implicit.pac.interval import PartialInterval, ground, witnessed
from pac_implicit.pac.sampling import PacParams, sample_count

ENTAILED = SampleOutcome.ENTAILED
NOT_ENTAILED = SampleOutcome.NOT_ENTAILED


@pytest.fixture
def fitness_watch(data_dir):
    return PacImplicit.from_files(
        data_dir / "fitness_watch.kb",
        data_dir / "fitness_watch.data",
        epsilon=Fraction(3, 5),
    )


def test_ground_interval(parse, variables):
    x, y = variables["x"], variables["y"]
    phi = PartialInterval({x: (1, 5), y: (2, 6)})
    expected = parse("x >= 1\nx <= 5\ny >= 2\ny <= 6")
    assert ground(phi) == expected


def test_ground_fully_masked(variables):
    assert ground(PartialInterval.masked(variables)) == TOP
    assert ground(PartialInterval()) == TOP


def test_ground_point(check):
    variables = VariableSet(["hr", "ox"])
    hr, ox = variables["hr"], variables["ox"]
    grounded = ground(PartialInterval.point({hr: Fraction(92), ox: Fraction(99)}))
    check.is_true(grounded.satisfied_by({hr: Fraction(92), ox: Fraction(99)}))
    check.is_false(grounded.satisfied_by({hr: Fraction(92), ox: Fraction(98)}))
    check.equal(len(grounded), 4)


def test_ground_half_open(variables):
    x = variables["x"]
    grounded = ground(PartialInterval({x: (None, 3)}))
    assert len(grounded) == 1
    assert grounded[0] == LinearAtom(LinearExpr.of_variable(x) - 3, Relation.LE)


def test_empty_interval_rejected(variables):
    with pytest.raises(OutOfRange):
        PartialInterval({variables["x"]: (2, 1)})


def test_witnessed(parse, variables, check):
    x = variables["x"]
    x_gt_5 = [parse("x > 5")]
    check.is_true(witnessed(PartialInterval({x: (6, 6)}), x_gt_5))
    check.is_false(witnessed(PartialInterval({x: (None, None)}), x_gt_5))
    check.is_true(witnessed(PartialInterval({x: (1, 2)}), [parse("x >= 1")]))
    check.is_false(witnessed(PartialInterval({x: (5, 6)}), x_gt_5))


@pytest.mark.seed(7)
def test_grounding_soundness(rng, variables):
    names = ["x", "y", "z"]
    for _ in range(2000):
        bounds = {}
        for name in names:
            lo = Fraction(int(rng.integers(-20, 20)), 4) if rng.random() < 0.8 else None
            hi = Fraction(int(rng.integers(-20, 20)), 4) if rng.random() < 0.8 else None
            if lo is not None and hi is not None and lo > hi:
                lo, hi = hi, lo
            bounds[variables[name]] = (lo, hi)
        phi = PartialInterval(bounds)
        grounded = ground(phi)

        point = {}
        for var, (lo, hi) in bounds.items():
            low = lo if lo is not None else (hi if hi is not None else Fraction(0)) - 5
            high = hi if hi is not None else low + 10
            point[var] = low + (high - low) * Fraction(int(rng.integers(0, 101)), 100)
        assert phi.contains(point)
        assert grounded.satisfied_by(point)

        finite = [(var, lo, hi) for var, (lo, hi) in bounds.items() if lo is not None]
        if finite:
            var, lo, _ = finite[int(rng.integers(len(finite)))]
            outside = dict(point)
            outside[var] = lo - Fraction(1, 8)
            assert not grounded.satisfied_by(outside)


@pytest.mark.parametrize(
    "gamma, delta_conf, expected",
    [
        (Fraction(1, 10), Fraction(1, 20), 150),
        (Fraction(1, 20), Fraction(1, 100), 922),
        ("0.1", "0.05", 150),
    ],
)
def test_sample_count(gamma, delta_conf, expected):
    assert sample_count(gamma, delta_conf) == expected


def test_sample_count_for_e_squared():
    with localcontext() as ctx:
        ctx.prec = 100
        delta_conf = Decimal(-2).exp()
    assert sample_count(Fraction(1, 2), delta_conf) == 4


def test_sample_count_matches_float_evaluation():
    for gamma, delta_conf in itertools.product([0.3, 0.15, 0.07], [0.2, 0.05, 0.001]):
        approx = math.log(1 / delta_conf) / (2 * gamma * gamma)
        assert abs(sample_count(gamma, delta_conf) - approx) < 1 + 1e-9


@pytest.mark.parametrize("gamma, delta_conf", [(0, "0.1"), (1, "0.1"), ("0.1", 0), ("0.1", 1)])
def test_sample_count_out_of_range(gamma, delta_conf):
    with pytest.raises(OutOfRange):
        sample_count(gamma, delta_conf)


def test_pac_params(caplog, check):
    params = PacParams("0.05", "0.1", "0.05")
    check.equal(params.sample_count, 150)
    check.equal(params.epsilon, Fraction(1, 20))
    with caplog.at_level(logging.WARNING):
        PacParams("0.95", "0.1", "0.05")
    check.is_true(any("exceeds 1" in record.message for record in caplog.records))
    with pytest.raises(OutOfRange):
        PacParams("1.5", "0.1", "0.05")


def test_fitness_watch(fitness_watch, check):
    decision = fitness_watch.decide("stress > 50")
    check.equal(decision.verdict, PacVerdict.ACCEPT)
    check.equal(decision.per_sample, [ENTAILED, NOT_ENTAILED, ENTAILED])
    check.equal(decision.failed_count, 1)
    check.equal(decision.budget, 1)


def test_fitness_watch_zero_budget(fitness_watch, check):
    fitness_watch.epsilon = Fraction(0)
    decision = fitness_watch.decide("stress > 50")
    check.equal(decision.verdict, PacVerdict.REJECT)
    check.equal(decision.budget, 0)
    # The search stops at the first failure
    check.equal(decision.per_sample, [ENTAILED, NOT_ENTAILED])


def test_full_evaluation(fitness_watch, check):
    fitness_watch.epsilon = Fraction(0)
    decision = fitness_watch.decide("stress > 50", full_evaluation=True)
    check.equal(decision.verdict, PacVerdict.REJECT)
    check.equal(decision.per_sample, [ENTAILED, NOT_ENTAILED, ENTAILED])
    check.equal(decision.sample_total, 3)


def test_empty_samples(parse):
    with pytest.raises(EmptySampleList):
        decide_pac(TOP, [parse("x > 0")], Fraction(1, 2), [])


def test_fully_masked_samples_fall_back_to_kb(parse, variables, check):
    masked = [PartialInterval.masked(variables)] * 5
    query = [parse("x > 5")]
    for epsilon in (Fraction(0), Fraction(1, 2), Fraction(9, 10)):
        check.is_false(decide_pac(parse("x >= 0\nx <= 10"), query, epsilon, masked).accepted)
    check.is_true(decide_pac(parse("x >= 6\nx <= 10"), query, Fraction(0), masked).accepted)
    check.is_true(decide_pac(TOP, query, Fraction(1), masked).accepted)


def random_point_samples(rng, variables, count):
    x, y = variables["x"], variables["y"]
    return [
        PartialInterval.point(
            {x: Fraction(int(rng.integers(0, 50)), 5), y: Fraction(int(rng.integers(0, 50)), 5)}
        )
        for _ in range(count)
    ]


@pytest.mark.seed(11)
def test_budget_monotonicity(rng, parse, variables):
    epsilons = [Fraction(k, 10) for k in range(11)]
    for _ in range(60):
        samples = random_point_samples(rng, variables, int(rng.integers(1, 12)))
        query = [parse(f"x + y <= {int(rng.integers(0, 20))}")]
        verdicts = [decide_pac(TOP, query, epsilon, samples).accepted for epsilon in epsilons]
        first_accept = verdicts.index(True) if True in verdicts else len(verdicts)
        assert all(verdicts[first_accept:])


@pytest.mark.seed(12)
def test_sample_order_does_not_change_verdict(rng, parse, variables):
    for _ in range(40):
        samples = random_point_samples(rng, variables, int(rng.integers(1, 8)))
        query = [parse(f"x - y < {int(rng.integers(-5, 5))}")]
        epsilon = Fraction(int(rng.integers(0, 5)), 10)
        expected = decide_pac(TOP, query, epsilon, samples).verdict
        for _ in range(5):
            shuffled = [samples[i] for i in rng.permutation(len(samples))]
            assert decide_pac(TOP, query, epsilon, shuffled).verdict == expected


def test_custom_entailment_is_used(parse, variables):
    samples = [PartialInterval.masked(variables)] * 4
    calls = []

    def entailment(index, sample):
        calls.append(index)
        return index % 2 == 0

    decision = decide_pac(TOP, [parse("x > 0")], Fraction(1, 2), samples, entailment=entailment)
    assert decision.accepted
    assert calls == [0, 1, 2, 3]


def test_noise_interval_width(check):
    check.equal(noise_interval_width(0.5, 1), 2.0)
    check.equal(noise_interval_width(0.5, 2), 2.0)
    check.almost_equal(noise_interval_width(0.5, 6), 4 * math.log(6) * 0.5)
    check.equal(noise_interval_width(0.0, 6), 0.0)


def unit_box(variables, *names):
    return {variables[name]: (Fraction(0), Fraction(10)) for name in names}


def test_identity_blur(rng, variables):
    x, y = variables["x"], variables["y"]
    config = BlurConfig(unit_box(variables, "x", "y"))
    phi = blur({x: Fraction(4), y: Fraction(5)}, config, rng)
    assert phi == PartialInterval({x: (4, 4), y: (5, 5)})


def test_full_mask(rng, variables):
    config = BlurConfig(unit_box(variables, "x", "y"), mask_probability=1.0)
    phi = blur({variables["x"]: Fraction(4), variables["y"]: Fraction(5)}, config, rng)
    assert phi.fully_masked
    assert ground(phi) == TOP


@pytest.mark.parametrize(
    "kwargs",
    [{"mask_probability": 1.5}, {"mask_probability": -0.1}, {"sigma": -1.0}, {"grid": 0}],
)
def test_invalid_blur_config(variables, kwargs):
    with pytest.raises(InvalidConfig):
        BlurConfig(unit_box(variables, "x"), **kwargs)


def test_blur_needs_domain(rng, variables):
    config = BlurConfig(unit_box(variables, "x"))
    with pytest.raises(InvalidConfig):
        blur({variables["x"]: Fraction(1), variables["y"]: Fraction(1)}, config, rng)


@pytest.mark.seed(111921)
def test_blur_consistency(rng, variables):
    names = ["x", "y", "z"]
    domain = unit_box(variables, *names)
    noiseless = BlurConfig(domain)
    masking = BlurConfig(domain, mask_probability=0.3)
    noisy = BlurConfig(domain, sigma=0.5)

    for trial in range(10_000):
        point = {variables[name]: Fraction(int(rng.integers(0, 10_001)), 1000) for name in names}
        assert blur(point, noiseless, rng).contains(point)
        assert blur(point, masking, rng).contains(point)

        if trial % 10 == 0:
            phi = blur(point, noisy, rng)
            for var, (lo, hi) in domain.items():
                assert lo <= phi.lower(var) <= phi.upper(var) <= hi
                assert phi.upper(var) - phi.lower(var) <= Fraction(noisy.interval_width) + 1


def test_blur_is_reproducible(variables):
    domain = unit_box(variables, "x", "y")
    config = BlurConfig(domain, sigma=0.3, mask_probability=0.2)
    point = {variables["x"]: Fraction(3), variables["y"]: Fraction(7)}
    first = [blur(point, config, np.random.default_rng(5)) for _ in range(3)]
    second = [blur(point, config, np.random.default_rng(5)) for _ in range(3)]
    assert first == second
