"""Shared fixtures and independent closed-form oracles.

The oracles here are deliberately computed by a different route than the
library (symbolic recursions and elementary antiderivatives), so the
tests compare two independent derivations of the same quantity.
"""

from __future__ import annotations

import numpy as np
import pytest

from meanscope.funcspace import DomainTag, corpus_lookup


@pytest.fixture(scope="session")
def sin_fn():
    return corpus_lookup("sin").function


@pytest.fixture(scope="session")
def decay_fn():
    return corpus_lookup("decay").function


@pytest.fixture(scope="session")
def sinlog_fn():
    return corpus_lookup("sinlog").function


@pytest.fixture(scope="session")
def dyadic_fn():
    return corpus_lookup("dyadic-indicator").function


@pytest.fixture(scope="session")
def dyadic_log_fn():
    return corpus_lookup("dyadic-indicator-log").function


@pytest.fixture(scope="session")
def const_add_fn():
    return corpus_lookup("const:1", DomainTag.ADDITIVE).function


@pytest.fixture(scope="session")
def const_mult_fn():
    return corpus_lookup("const:1", DomainTag.MULTIPLICATIVE).function


def exp_iterate_sin_oracle(k: int, x) -> np.ndarray:
    """Exact k-fold exponential average of sin, by symbolic recursion.

    Tracks the image of ``e^{ix}`` as ``a e^{ix} + sum_j c_j x^j e^{-x}``:
    one averaging step maps ``e^{ix}`` to ``e^{ix}/(1+i) - e^{-x}/(1+i)``
    and ``x^j e^{-x}`` to ``x^{j+1} e^{-x}/(j+1)``; the imaginary part is
    the answer.
    """
    a = 1.0 + 0.0j
    coeffs: dict[int, complex] = {}
    for _ in range(k):
        stepped: dict[int, complex] = {0: -a / (1 + 1j)}
        for j, c in coeffs.items():
            stepped[j + 1] = stepped.get(j + 1, 0.0) + c / (j + 1)
        a = a / (1 + 1j)
        coeffs = stepped
    xv = np.asarray(x, dtype=float)
    val = a * np.exp(1j * xv)
    for j, c in coeffs.items():
        val = val + c * xv**j * np.exp(-xv)
    return val.imag


def cesaro2_sinlog_oracle(x) -> np.ndarray:
    """Exact 2-fold running mean of sin(log x).

    One step maps ``x^i`` to ``x^i/(1+i) - 1/(x(1+i))`` and ``1/x`` to
    ``log(x)/x``; collecting terms and taking imaginary parts gives the
    closed form below.
    """
    xv = np.asarray(x, dtype=float)
    val = (xv**1j / (1 + 1j) ** 2 - 1.0 / (xv * (1 + 1j) ** 2)
           - np.log(xv) / (xv * (1 + 1j)))
    return val.imag
