# Copyright 2026 The gaussgeo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Information geometry of bosonic Gaussian thermal states.

Quadratures are ordered (q_1..q_n, p_1..p_n); a state is given by its mean
vector and the Hamiltonian matrix H of rho ~ exp(-(x - mu)^T H (x - mu) / 2).
"""

import json

from ._gaussgeo import (
    GaussgeoError,
    cov_from_ham,
    crb,
    fisher_bures,
    ham_from_cov,
    kernel_ft,
    kubo_mori,
    log_partition_function,
    omega,
    p_density,
    q_density,
    sld,
    state_derivative,
    symplectic_eigenvalues,
    williamson,
)
from . import _gaussgeo

__all__ = [
    "GaussgeoError",
    "cov_from_ham",
    "crb",
    "discriminate_prefactor",
    "fisher_bures",
    "ham_from_cov",
    "kernel_ft",
    "kubo_mori",
    "log_partition_function",
    "omega",
    "oracle_check",
    "p_density",
    "q_density",
    "sld",
    "state_derivative",
    "symplectic_eigenvalues",
    "williamson",
]


def discriminate_prefactor(cutoff=60):
    return json.loads(_gaussgeo.discriminate_prefactor(cutoff))


def oracle_check(quick=True):
    return json.loads(_gaussgeo.oracle_check(quick))
