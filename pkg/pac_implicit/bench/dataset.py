from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from pac_implicit.bench.constants import (
    DATASET_VARS_HEADER,
    LABEL_TOKENS,
    MIN_ACCEPTANCE_RATE,
    REJECTION_CHECK_BATCH,
    TOKEN_LABELS,
    Label,
)
from pac_implicit.bench.problem import ProblemSpec
from pac_implicit.errors import OutOfRange, ParseError, RejectionBudgetExceeded
from pac_implicit.linarith.expr import Variable, VariableSet
from pac_implicit.pac.blur import BlurConfig, blur
from pac_implicit.pac.constants import COORDINATE_GRID
from pac_implicit.pac.interval import PartialInterval
from pac_implicit.utils import (
    RationalLike,
    format_bound,
    format_rational,
    parse_bound,
    quantise,
    to_rational,
)

log = logging.getLogger(__name__)


@dataclass
class LabelledSample:
    point: dict[Variable, Fraction]
    label: Label
    blurred: PartialInterval | None = None
    flipped: bool = False

    @property
    def positive(self) -> bool:
        return self.label == Label.POSITIVE

    def observation(self) -> PartialInterval:
        """What the learner sees: the blurred interval, else the exact point."""
        if self.blurred is not None:
            return self.blurred
        return PartialInterval.point(self.point)


def _draw_point(spec: ProblemSpec, rng: np.random.Generator) -> dict[Variable, Fraction]:
    uniforms = rng.random(spec.dims)
    point = {}
    for u, (variable, (lo, hi)) in zip(uniforms, spec.domain.items()):
        value = quantise(float(lo) + float(hi - lo) * float(u), COORDINATE_GRID)
        point[variable] = min(max(value, lo), hi)
    return point


def sample_dataset(
    spec: ProblemSpec,
    count: int,
    pos_ratio: RationalLike,
    noise: RationalLike,
    outlier_ratio: RationalLike,
    rng: np.random.Generator,
    mask_probability: float = 0.0,
) -> list[LabelledSample]:
    """
    Draw ``count`` labelled points from the domain box of ``spec``.

    Positives come from the feasible region and negatives from the rest of
    the box, both by rejection sampling over uniform box points. Each label
    is then flipped with probability ``outlier_ratio``, and every sample
    labelled positive is blurred with noise of std ``noise / sqrt(dims)``.

    :param pos_ratio: share of positives, rounded down
    :param noise: noise level n, the Gaussian std is n / sqrt(dims)
    :param outlier_ratio: probability that a sample carries the wrong label
    :param mask_probability: chance of hiding each coordinate of a positive
    """
    pos_ratio = to_rational(pos_ratio)
    noise = to_rational(noise)
    outlier_ratio = to_rational(outlier_ratio)
    if count < 1:
        raise OutOfRange(f"count must be positive, got {count}")
    if not 0 <= pos_ratio <= 1:
        raise OutOfRange(f"pos_ratio must be in [0, 1], got {pos_ratio}")
    if noise < 0:
        raise OutOfRange(f"noise must be >= 0, got {noise}")
    if not 0 <= outlier_ratio <= 1:
        raise OutOfRange(f"outlier_ratio must be in [0, 1], got {outlier_ratio}")

    wanted = {Label.POSITIVE: math.floor(pos_ratio * count)}
    wanted[Label.NEGATIVE] = count - wanted[Label.POSITIVE]
    hits = {Label.POSITIVE: 0, Label.NEGATIVE: 0}
    kept = {Label.POSITIVE: 0, Label.NEGATIVE: 0}
    draws = 0

    samples: list[LabelledSample] = []
    while len(samples) < count:
        point = _draw_point(spec, rng)
        label = Label.POSITIVE if spec.hard_constraints.satisfied_by(point) else Label.NEGATIVE
        draws += 1
        hits[label] += 1
        if kept[label] < wanted[label]:
            kept[label] += 1
            samples.append(LabelledSample(point, label))

        if draws % REJECTION_CHECK_BATCH == 0:
            for needed, hit in hits.items():
                if kept[needed] < wanted[needed] and Fraction(hit, draws) < MIN_ACCEPTANCE_RATE:
                    raise RejectionBudgetExceeded(
                        f"Only {hit} of {draws} box points were {needed.name.lower()} "
                        f"for problem '{spec.name}'"
                    )

    log.debug("Drew %d box points for %d samples of %s", draws, count, spec.name)

    if outlier_ratio > 0:
        threshold = float(outlier_ratio)
        for sample in samples:
            if rng.random() < threshold:
                sample.label = Label(1 - sample.label)
                sample.flipped = True

    config = BlurConfig(
        domain=spec.domain,
        mask_probability=mask_probability,
        sigma=float(noise) / math.sqrt(spec.dims),
    )
    for sample in samples:
        if sample.positive:
            sample.blurred = blur(sample.point, config, rng)

    return samples


def positive_observations(samples: Iterable[LabelledSample]) -> list[PartialInterval]:
    """The intervals handed to the PAC procedures; negatives are never used."""
    return [sample.observation() for sample in samples if sample.positive]


def write_dataset(
    samples: Sequence[LabelledSample],
    variables: VariableSet,
    stream: TextIO,
):
    """
    One sample per line: ``label;x1,...,xd;lo1,hi1,...,lod,hid``.

    The point field is empty when the true point is unknown and the
    interval field is empty when the sample was never blurred. Masked ends
    are written ``-inf``/``inf``. A ``# vars:`` header names the columns.
    """
    stream.write(f"{DATASET_VARS_HEADER} {','.join(variables.names)}\n")
    for sample in samples:
        point = ""
        if sample.point:
            point = ",".join(format_rational(sample.point[var]) for var in variables)
        intervals = ""
        if sample.blurred is not None:
            ends = []
            for var in variables:
                ends.append(format_bound(sample.blurred.lower(var), upper=False))
                ends.append(format_bound(sample.blurred.upper(var), upper=True))
            intervals = ",".join(ends)
        stream.write(f"{LABEL_TOKENS[sample.label]};{point};{intervals}\n")


def save_dataset(
    samples: Sequence[LabelledSample],
    variables: VariableSet,
    path: str | os.PathLike,
):
    with open(path, "w") as data_file:
        write_dataset(samples, variables, data_file)


def parse_dataset(text: str, variables: VariableSet) -> list[LabelledSample]:
    """
    Read the dataset format written by :func:`write_dataset`.

    Columns follow the ``# vars:`` header when present (names are interned
    into ``variables``), otherwise the order of ``variables``.
    """
    columns = list(variables)
    samples = []
    for line_num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(DATASET_VARS_HEADER):
            names = [name.strip() for name in line[len(DATASET_VARS_HEADER) :].split(",")]
            columns = [variables.intern(name) for name in names if name]
            continue
        if not line or line.startswith("#"):
            continue

        fields = line.split(";")
        if len(fields) != 3:
            raise ParseError(line_num, "expected 'label;point;intervals'")
        label_token, point_field, interval_field = (field.strip() for field in fields)
        if label_token not in TOKEN_LABELS:
            raise ParseError(line_num, f"unknown label {label_token!r}")

        try:
            point = {}
            if point_field:
                values = point_field.split(",")
                if len(values) != len(columns):
                    raise ParseError(line_num, f"expected {len(columns)} coordinates")
                point = {var: to_rational(value) for var, value in zip(columns, values)}

            blurred = None
            if interval_field:
                ends = [parse_bound(token) for token in interval_field.split(",")]
                if len(ends) != 2 * len(columns):
                    raise ParseError(line_num, f"expected {2 * len(columns)} interval ends")
                blurred = PartialInterval(
                    {var: (ends[2 * k], ends[2 * k + 1]) for k, var in enumerate(columns)}
                )
        except (ValueError, ZeroDivisionError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(line_num, str(e)) from None

        if not point and blurred is None:
            raise ParseError(line_num, "sample has neither a point nor intervals")
        samples.append(LabelledSample(point, TOKEN_LABELS[label_token], blurred))
    return samples


def load_dataset(path: str | os.PathLike, variables: VariableSet) -> list[LabelledSample]:
    with open(path, "r") as data_file:
        return parse_dataset(data_file.read(), variables)
