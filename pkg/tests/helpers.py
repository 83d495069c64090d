"""Random instances and golden-file comparison shared by the tests."""
import json
import pathlib

import numpy as np
import pytest

from modular_value.tensor import Ket, Operator
from modular_value.values import PrePostEnsemble

ASSETS = pathlib.Path(__file__).parent / 'assets'


def random_ket(rng, dims):
    size = int(np.prod(dims))
    amplitudes = rng.normal(size=size) + 1j * rng.normal(size=size)
    return Ket(tuple(dims), amplitudes).normalize()


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, eigenvalues, dims=None):
    """V diag(eigenvalues) V^dagger for a random unitary V."""
    n = len(eigenvalues)
    v = random_unitary(rng, n)
    matrix = (v * np.asarray(eigenvalues, dtype=float)) @ v.conj().T
    matrix = (matrix + matrix.conj().T) / 2
    return Operator(dims or (n,), matrix, hermitian=True)


def spread_eigenvalues(rng, n, min_gap=0.3):
    steps = rng.uniform(min_gap, 1.0, size=n)
    return (np.cumsum(steps) - steps.sum() / 2).tolist()


def random_ensemble(rng, dims, min_overlap=0.2):
    while True:
        psi, phi = random_ket(rng, dims), random_ket(rng, dims)
        if abs(np.vdot(phi.amplitudes, psi.amplitudes)) > min_overlap:
            return PrePostEnsemble.create(psi, phi)


def load_asset(name):
    with open(ASSETS / name) as inf:
        return json.load(inf)


def assert_matches(expected, actual, tol=1e-9, path='root'):
    """Every number and string in ``expected`` is present in ``actual``."""
    if isinstance(expected, dict):
        for key, value in expected.items():
            assert key in actual, f'{path}.{key} is missing'
            assert_matches(value, actual[key], tol, f'{path}.{key}')
    elif isinstance(expected, list):
        assert len(expected) == len(actual), f'{path} has a different length'
        for k, (value, other) in enumerate(zip(expected, actual)):
            assert_matches(value, other, tol, f'{path}[{k}]')
    elif isinstance(expected, (int, float)) and not isinstance(expected, bool):
        assert actual == pytest.approx(expected, abs=tol), path
    else:
        assert actual == expected, path
