'''
    ---------------------------------------------------------------------------
    oscidecay: example_bilinear.py
    ---------------------------------------------------------------------------

    Copyright 2024 The oscidecay Authors

    Licensed under the Apache License, Version 2.0 (the "License"); you may not
    use this file except in compliance with the License. You may obtain a copy
    of the License at http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.

    Bilinear Hilbert transform with polynomial phase: the quadratic
    modulation identity on one random phase, then a norm ratio sweep over
    cubic coefficient scales.
'''

import os
import sys

import numpy as np

baseDir = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..')
sys.path.append(baseDir)

from utilsBilinear import (BilinearPhase, PrincipalValueSpec, bht_apply,
                           norm_ratio_sweep, quadratic_reduction, random_bump)

# %% User inputs.
seed = 0
spec = PrincipalValueSpec()
x_grid = np.linspace(-1, 1, 65)

# %% Quadratic reduction.
rng = np.random.default_rng(seed)
phase = BilinearPhase.from_coefficients(2, rng.uniform(-4, 4, 6))
f, g = random_bump(rng, 1.0), random_bump(rng, 1.0)
reduction = quadratic_reduction(phase)
lhs = bht_apply(phase, f, g, x_grid, spec)
rhs = bht_apply(BilinearPhase.zero(), reduction.modulate_f(f),
                reduction.modulate_g(g), x_grid, spec)
print('Max discrepancy: {:.3e}'.format(
    np.max(np.abs(np.abs(lhs.values) - np.abs(rhs.values)))))

# %% Norm ratio sweep.
report = norm_ratio_sweep(3, 2.0, 2.0, trials=10, seed=seed, scale_max=10,
                          spec=spec, threads=4)
print(report.summary())
