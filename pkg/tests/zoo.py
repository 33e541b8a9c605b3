"""Operator zoo and random inputs shared by the test modules."""
from fractions import Fraction

import numpy as np

from chaoscope.operators import parse_operator
from chaoscope.spaces import LazyVector, TorusPoint

SHIFT_SPECS = {
    "2B": "2B",
    "halfB": "0.5B",
    "B": "B",
    "periodic": {"kind": "weighted_backward_shift",
                 "weights": {"kind": "periodic", "values": [2, 0.5, 3]}},
    "signed": {"kind": "weighted_backward_shift",
               "weights": {"kind": "periodic", "values": [-1.5, 1.0]}},
    "complex": {"kind": "weighted_backward_shift",
                "weights": {"kind": "periodic", "values": [[1, 1], [0, 0.5]]}},
    "ramp": {"kind": "weighted_backward_shift",
             "weights": {"kind": "ramp", "start": 0.5, "stop": 2.0, "length": 300}},
    "table": {"kind": "weighted_backward_shift",
              "weights": {"kind": "table", "values": [1, 2, 0, 3], "default": 1.5}},
}
DIAGONAL_SPECS = {
    "diag": {"kind": "diagonal", "diagonal": {"kind": "constant", "value": 1.01}},
    "diag_signed": {"kind": "diagonal", "diagonal": {"kind": "periodic", "values": [-1.5, 0.5, 1.0]}},
    "diag_complex": {"kind": "diagonal", "diagonal": {"kind": "constant", "value": [0.6, 0.8]}},
}
OTHER_SPECS = {
    "scaled": {"kind": "scalar_multiple", "lambda": -3, "inner": "B"},
    "identity": "I",
    "zero": {"kind": "zero"},
}
TORUS_SPECS = {
    "doubling": "doubling",
    "cat": {"kind": "torus_matrix", "matrix": [[2, 1], [1, 1]]},
    "tripling": {"kind": "torus_matrix", "matrix": [[3]]},
}

SEQUENCE_ZOO = {k: parse_operator(v) for k, v in {**SHIFT_SPECS, **DIAGONAL_SPECS, **OTHER_SPECS}.items()}
TORUS_ZOO = {k: parse_operator(v) for k, v in TORUS_SPECS.items()}


def random_finite(rng, max_index=200, max_terms=12, space=None):
    k = int(rng.integers(1, max_terms + 1))
    idx = np.sort(rng.choice(np.arange(1, max_index + 1), size=k, replace=False))
    pairs = list(zip(idx.tolist(), rng.normal(size=k).tolist()))
    return LazyVector.finite(pairs) if space is None else LazyVector.finite(pairs, space)


def random_torus_point(rng, dim, dyadic=True):
    if dyadic:
        e = int(rng.integers(1, 80))
        nums = [int.from_bytes(rng.bytes(10), "little") % 2 ** e for _ in range(dim)]
        return TorusPoint.dyadic(nums, e)
    den = int(rng.integers(2, 10_000))
    return TorusPoint.from_fractions([Fraction(int(rng.integers(0, den)), den) for _ in range(dim)])
