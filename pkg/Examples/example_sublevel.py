'''
    ---------------------------------------------------------------------------
    oscidecay: example_sublevel.py
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

    Sublevel measures of P = x1 x2 on the unit square against the closed
    form eps - eps log(eps), and a corner configuration search.
'''

import os
import sys

import numpy as np

baseDir = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..')
sys.path.append(baseDir)

from utils import ProblemFile
from utilsDegeneracy import difference_scheme
from utilsSublevel import (SublevelProblem, corner_obstruction_check,
                           sublevel_scaling)

# %% User inputs.
problemPath = os.path.join(baseDir, 'Examples', 'problems', 'sublevel_xy.json')
eps_grid = np.geomspace(1e-1, 1e-3, 5)
samples = 1_000_000
seed = 0

# %% Scaling.
problem = ProblemFile.load(problemPath)
prob = SublevelProblem(P=problem.polynomial, F=problem.family,
                       g=(None,) * len(problem.family), region=problem.region,
                       eps=float(eps_grid[0]))
scaling = sublevel_scaling(prob, eps_grid, samples, seed, threads=4)
frame = scaling.to_frame()
frame['closed_form'] = frame['eps'] - frame['eps'] * np.log(frame['eps'])
print(frame)
print('delta_hat = {:.4f}, r2 = {:.4f}'.format(scaling.delta_hat, scaling.r2))

# %% Corner configurations.
scheme = difference_scheme(problem.polynomial, problem.family)
report = corner_obstruction_check(scheme, prob.with_eps(1e-4), 100_000, seed)
print(report.to_json())
