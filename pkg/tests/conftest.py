import json

import numpy as np
import pytest

from rmtlab import Potential, make_eynard


@pytest.fixture(scope="session")
def quadratic():
    return Potential((0.0, 0.0, 1.0))


@pytest.fixture(scope="session")
def eynard3():
    pot, ee = make_eynard(3.0)
    return pot, ee


@pytest.fixture(scope="session")
def eynard3_pot(eynard3):
    return eynard3[0]


@pytest.fixture
def eynard_config(tmp_path):
    path = tmp_path / "eynard3.json"
    path.write_text(json.dumps({"type": "eynard", "e": 3.0}))
    return str(path)


@pytest.fixture
def quadratic_config(tmp_path):
    path = tmp_path / "x2.json"
    path.write_text(json.dumps({"type": "poly", "coeffs": [0.0, 0.0, 1.0]}))
    return str(path)


def brute_log_potential(eq, x, npts=200001):
    """Trapezoid oracle for the logarithmic potential of a band measure.

    Interior points use singularity subtraction with the closed form of
    int_a^b log|x-y| dy so the trapezoid rule sees a continuous integrand.
    """
    from numpy.polynomial import polynomial as npoly

    y = np.linspace(eq.a, eq.b, npts)
    dens = (
        np.sqrt(np.maximum((eq.b - y) * (y - eq.a), 0.0))
        * npoly.polyval(y, np.asarray(eq.h_coeffs))
        / np.pi
    )
    if eq.a < x < eq.b:
        dens_x = (
            np.sqrt((eq.b - x) * (x - eq.a))
            * npoly.polyval(x, np.asarray(eq.h_coeffs))
            / np.pi
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.log(np.abs(x - y)) * (dens - dens_x)
        vals[~np.isfinite(vals)] = 0.0
        flat = (
            (eq.b - x) * np.log(eq.b - x)
            + (x - eq.a) * np.log(x - eq.a)
            - (eq.b - eq.a)
        )
        return np.trapezoid(vals, y) + dens_x * flat
    with np.errstate(divide="ignore"):
        vals = np.log(np.abs(x - y)) * dens
    vals[~np.isfinite(vals)] = 0.0
    return np.trapezoid(vals, y)
