# Copyright 2026 Thin Orbit Sieve Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
orbitsieve - almost-prime values along thin orbits of SL2(Z).

    group_core   exact matrix arithmetic and presentations
    orbit_enum   orbit slices below a height, smoothed weights
    congruence   reductions mod q and local densities
    sieve        Legendre identity, remainders and beta-sieve levels
    spectral     scalar kernels and growth-exponent fits
"""

__version__ = "0.1.0"
