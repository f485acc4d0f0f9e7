'''
    ---------------------------------------------------------------------------
    oscidecay: settingsOscidecay.py
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

    This script contains default settings of each subcommand. They worked
    well on the example problems in Examples/; larger lam, smaller eps or
    higher degrees usually need more refinements, samples or nodes.
    Command-line flags are overlaid on top of these dictionaries and the
    resolved result is written to the run manifest.
'''

import copy


def get_setup(task):

    setups = {}
    setups['analyze'] = {
        'seed': 0,
    }
    setups['witness'] = {
        'seed': 0,
        'scheme_kind': 'auto',
    }
    setups['decay'] = {
        'seed': 0,
        'lambda_min': 2.0 ** 4,
        'lambda_max': 2.0 ** 12,
        'points': 9,
        'fit_fraction': 0.5,
        'min_points': 6,
        # Worst case over random trig polynomial tuples when the problem
        # file does not list functions.
        'family': {
            'degree': 3,
            'samples': 8,
            'real': False},
        'quadrature': {
            'nodes_per_wavelength': 8,
            'base_panels_per_axis': 4,
            'max_refinements': 6,
            'relative_tolerance': 1e-8,
            'absolute_tolerance': 1e-12,
            'gauss_order': 8,
            'max_points': 200_000_000,
            'chunk_points': 2_000_000},
        'cutoff': {
            'center': None,
            'radius': 1.0,
            'order': 6,
            'kind': 'smooth'},
    }
    setups['sublevel'] = {
        'seed': 0,
        'eps_max': 1e-1,
        'eps_min': 1e-3,
        'points': 5,
        'samples': 1_000_000,
        'corner_trials': 0,
        'corner_eps': 1e-4,
    }
    setups['bht'] = {
        'seed': 0,
        'degree': 3,
        'p1': 2.0,
        'p2': 2.0,
        'trials': 10,
        'scale_max': 10,
        'grid_points': 257,
        'principal_value': {
            'eps0': 2.0 ** -8,
            'R': 2.0,
            'nodes': 16,
            'nodes_per_wavelength': 8,
            'max_refinements': 8,
            'relative_tolerance': 1e-9,
            'absolute_tolerance': 1e-13},
    }
    setups['uniformity'] = {
        'seed': 0,
        'lambda': 2.0 ** 6,
        'degree': 2,
        'tau': 0.1,
        'interval': [-1.0, 1.0],
        'samples': None,
        'grid': {
            'extent_factor': 3.0,
            'max_phase_step': 0.7853981633974483,
            'nodes_per_wavelength': 8,
            'max_phases': 50_000_000},
    }

    if task not in setups:
        raise ValueError('Unknown task "{}"; expected one of {}.'.format(
            task, sorted(setups)))

    return copy.deepcopy(setups[task])
