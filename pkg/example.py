'''
    ---------------------------------------------------------------------------
    oscidecay: example.py
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

    Nondegeneracy analysis of P = x1 x4 - x2 x3 relative to three planes in
    R^4: P is nondegenerate but has no simple witness, its dual operator is
    proportional to d1 d4 - d2 d3, and the products of the vanishing forms
    of the planes vanish on their union.
'''

import os

from utils import ProblemFile
from utilsDegeneracy import (analyze, difference_scheme,
                             dual_annihilating_operator, simple_witness,
                             verify_monomial_generators)

# %% User inputs.
problem_path = os.path.join('Examples', 'problems', 'rank_two_r4.json')

# %% Load problem.
problem = ProblemFile.load(problem_path)
P, F = problem.polynomial, problem.family

# %% Analyze.
report = analyze(P, F)
print('P = {}'.format(P))
print('Degenerate: {}'.format(report.degenerate))
print('Relative norm: {}'.format(report.relative_norm.text))
print('Simple witness: {}'.format(simple_witness(P, F)))

operator = dual_annihilating_operator(P, F)
print('Dual operator: {}'.format(operator))

scheme = difference_scheme(P, F)
print('Difference scheme: kind={}, C_S={:.4f}, exact for functions={}'.format(
    scheme.kind, scheme.constant(), scheme.annihilates_functions))

# %% Ideal generators.
forms = [[[1, 0, 0, 0], [0, 1, 0, 0]],
         [[0, 0, 1, 0], [0, 0, 0, 1]],
         [[1, 0, -1, 0], [0, 1, 0, -1]]]
print('Monomial generators vanish: {}'.format(
    verify_monomial_generators(F, forms)))
