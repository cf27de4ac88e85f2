import numpy as np
import pytest
from hypothesis import settings

from dpsqkd.attacks import (UnitaryClonerParams, aligned_cloning_basis,
                            apply_unitary_cloner, med_attack, med_on_cloned,
                            optimal_cloner, optimize_unitary_q)
from dpsqkd.dps import dps_ensemble

settings.register_profile("suite", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def ens3():
    return dps_ensemble(3)


@pytest.fixture(scope="session")
def med3(ens3):
    return med_attack(ens3)


@pytest.fixture(scope="session")
def med4():
    return med_attack(dps_ensemble(4))


@pytest.fixture(scope="session")
def med5():
    return med_attack(dps_ensemble(5))


@pytest.fixture(scope="session")
def clone3(ens3):
    return optimal_cloner(ens3)


@pytest.fixture(scope="session")
def clone_med3(ens3, clone3):
    return med_on_cloned(clone3.eve_states, ens3.priors, ens3.bit_map)


@pytest.fixture(scope="session")
def unitary3(ens3):
    """(basis, q_opt, avg_fidelity, params, bob_states) of the unitary cloner."""
    basis = aligned_cloning_basis(ens3)
    q_opt, avg_fid = optimize_unitary_q(ens3, basis)
    params = UnitaryClonerParams(d=3, q=q_opt, basis=basis)
    bobs = [apply_unitary_cloner(params, s)[0] for s in ens3.states]
    return basis, q_opt, avg_fid, params, bobs


@pytest.fixture(scope="session")
def unitary_med3(ens3, unitary3):
    _, _, _, _, bobs = unitary3
    return med_on_cloned(bobs, ens3.priors, ens3.bit_map)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
