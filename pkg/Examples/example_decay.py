'''
    ---------------------------------------------------------------------------
    oscidecay: example_decay.py
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

    Decay sweeps: the Fresnel integral (no functions), P = x1 x2 against
    the axes with worst-case trig polynomials, and the degenerate
    P = x1 + x2^2 with its adversarial functions (no decay).
'''

import os
import sys

baseDir = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..')
sys.path.append(baseDir)

from utils import ProblemFile
from utilsDegeneracy import is_degenerate
from utilsFunctions import CutoffFunction
from utilsOscillatory import (QuadratureSpec, adversarial_functions,
                              decay_sweep, geometric_grid, worst_case_family)

# %% User inputs.
problemDir = os.path.join(baseDir, 'Examples', 'problems')
lambdas = geometric_grid(2 ** 4, 2 ** 12, 9)
spec = QuadratureSpec(relative_tolerance=1e-8)
threads = 4

# %% Fresnel.
fresnel = ProblemFile.load(os.path.join(problemDir, 'fresnel.json'))
result = decay_sweep(fresnel.polynomial, fresnel.family, None, fresnel.cutoff,
                     lambdas, spec, threads)
print('Fresnel: epsilon_hat = {:.4f}, r2 = {:.4f}'.format(
    result.fitted_epsilon, result.fit_r2))

# %% Nondegenerate, worst case over random functions.
axes = ProblemFile.load(os.path.join(problemDir, 'axes_x1x2.json'))
family = worst_case_family(axes.family, degree=3, samples=8, seed=0)
result = decay_sweep(axes.polynomial, axes.family, family, axes.cutoff,
                     geometric_grid(2 ** 2, 2 ** 8, 7), spec, threads)
print('x1 x2: epsilon_hat = {:.4f}, r2 = {:.4f}'.format(
    result.fitted_epsilon, result.fit_r2))

# %% Degenerate with adversarial functions.
degenerate = ProblemFile.load(os.path.join(problemDir,
                                           'degenerate_axes.json'))
_, minimizers = is_degenerate(degenerate.polynomial, degenerate.family)
eta = degenerate.cutoff or CutoffFunction([0.0, 0.0])
result = decay_sweep(degenerate.polynomial, degenerate.family,
                     [adversarial_functions(minimizers)], eta,
                     geometric_grid(1, 2 ** 12, 13), spec, threads)
print('x1 + x2^2: |Lambda| = {}'.format(abs(result.values)))
