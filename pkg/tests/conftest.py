import numpy as np
import pytest

from grouplll.fixtures import load_example, parse_exact, parse_matrix
from grouplll.matrix import RationalMatrix


@pytest.fixture(scope="session")
def so8_example():
    d = load_example("so8")
    H, sigma = parse_matrix(d["H"])
    return {
        "T": parse_exact(d["T"]),
        "H": H,
        "sigma": sigma,
        "gamma": parse_exact(d["gamma"]),
        "conjugated_T": parse_exact(d["conjugated_T"]),
    }


@pytest.fixture(scope="session")
def g2_example():
    d = load_example("g2")
    H, sigma = parse_matrix(d["H"])
    reduced, reduced_sigma = parse_matrix(d["reduced_H"])
    return {"H": H, "sigma": sigma, "gamma": parse_exact(d["gamma"]),
            "reduced_H": reduced, "reduced_sigma": reduced_sigma}


def as_int(m: RationalMatrix) -> np.ndarray:
    return m.to_int_array()
