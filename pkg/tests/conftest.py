import math

import pytest

from qkdr.ldpc import construct_ldpc_peg, default_degree_sequence
from qkdr.polar import construct_polar

N_FULL = 2048


@pytest.fixture(scope="session")
def ldpc_r07():
    return construct_ldpc_peg(N_FULL, round(0.3 * N_FULL),
                              default_degree_sequence(N_FULL, "r07"))


@pytest.fixture(scope="session")
def ldpc_r06():
    return construct_ldpc_peg(N_FULL, round(0.4 * N_FULL),
                              default_degree_sequence(N_FULL, "r06"))


@pytest.fixture(scope="session")
def polar_r07_a01(ldpc_r07):
    # rate matched to R_base=0.7, alpha=0.1 (integer-budget rule)
    d = round(0.1 * N_FULL)
    K = N_FULL - math.floor(N_FULL * (ldpc_r07.M - d) / (N_FULL - d))
    return construct_polar(11, K, 24, 0.02, method="mc")
