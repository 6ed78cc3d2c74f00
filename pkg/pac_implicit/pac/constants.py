from enum import IntEnum


class PacVerdict(IntEnum):
    ACCEPT = 0
    REJECT = 1


class SampleOutcome(IntEnum):
    ENTAILED = 0
    NOT_ENTAILED = 1


# Digits carried when evaluating ln(1/δ) for the sample count
SAMPLE_COUNT_PRECISION = 120

# Results this close to an integer are snapped to it; only inputs that
# approximate an irrational (such as exp(-2)) land this close
SAMPLE_COUNT_SNAP_DIGITS = 60

# Noise intervals are 4·ln(d)·σ wide, but never narrower than 4σ
NOISE_WIDTH_FACTOR = 4

# Sample coordinates and interval ends live on the grid k / COORDINATE_GRID
COORDINATE_GRID = 10**6
