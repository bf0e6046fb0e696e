"""Shared fixtures and the dense kron-product oracle.

The oracle builds Hamiltonians in the full 2^n space by explicit Kronecker
products, independently of the bit-twiddling sector machinery under test.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

from spinchannel.chain import ChainSpec, chain_bonds

# single-site operators in basis order {down, up} so that bit i of the
# composite index (site 0 least significant) encodes the state of site i
S_Z = np.diag([-0.5, 0.5])
S_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])
S_MINUS = S_PLUS.T
IDENT = np.eye(2)


def site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    ops = [IDENT] * n_sites
    ops[site] = op
    return reduce(np.kron, ops[::-1])


def dense_bond_hamiltonian(n_sites: int, bonds) -> np.ndarray:
    """Full-space Heisenberg Hamiltonian via Kronecker products."""
    dim = 2**n_sites
    h = np.zeros((dim, dim))
    for i, j, coupling in bonds:
        zz = site_operator(S_Z, i, n_sites) @ site_operator(S_Z, j, n_sites)
        pm = site_operator(S_PLUS, i, n_sites) @ site_operator(S_MINUS, j, n_sites)
        h += coupling * (zz + 0.5 * (pm + pm.T))
    return h


def dense_chain_hamiltonian(spec: ChainSpec) -> np.ndarray:
    return dense_bond_hamiltonian(spec.L, chain_bonds(spec))


def dense_transfer_hamiltonian(spec: ChainSpec) -> np.ndarray:
    bonds = [(0, 1, spec.gamma)] + chain_bonds(spec, offset=1)
    return dense_bond_hamiltonian(spec.L + 1, bonds)


def random_pure_qubit(rng) -> np.ndarray:
    psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return psi / np.linalg.norm(psi)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
