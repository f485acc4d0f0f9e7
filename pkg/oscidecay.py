'''
    ---------------------------------------------------------------------------
    oscidecay: oscidecay.py
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

    Batch command-line driver. Subcommands:

        analyze     nondegeneracy report of P relative to the family
        witness     simple witness, dual operator and difference scheme
        decay       lam sweep of the multilinear oscillatory functional
        sublevel    Monte Carlo sublevel measures and their eps scaling
        bht         norm ratio sweep of the polynomial bilinear Hilbert
                    transform
        uniformity  generalized Fourier coefficient scan of one function

    Exit codes: 0 success, 2 malformed input, 3 flagged non-convergence
    with --strict.

    Example:
        python oscidecay.py analyze Examples/problems/axes_x1x2.json --out Results
'''

import argparse
import logging
import os
import sys

import numpy as np
import yaml

import settingsOscidecay
from utils import ProblemFile, RunManifest, write_csv, write_json
from utilsBilinear import PrincipalValueSpec, norm_ratio_sweep
from utilsConfig import clamp_threads, get_log_level, get_output_dir, \
    get_threads
from utilsDegeneracy import (analyze, difference_scheme,
                             dual_annihilating_operator,
                             homogeneous_nondegeneracy_reduction,
                             is_degenerate, relative_norm, simple_witness,
                             verify_monomial_generators)
from utilsFunctions import CutoffFunction, TestFunction
from utilsLinearAlgebra import fraction_to_string
from utilsOscillatory import (AlternatingSteps, CoefficientGridSpec,
                              QuadratureSpec, adversarial_functions,
                              decay_sweep, geometric_grid, uniformity_scan,
                              worst_case_family)
from utilsSublevel import (SublevelProblem, corner_obstruction_check,
                           decomposition_functions, sublevel_scaling)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3


# %% Helpers.
def setup_logging(outputDir):
    logPath = os.path.join(outputDir, 'oscidecay.log')
    if os.path.exists(logPath):
        os.remove(logPath)
    # Remove all handlers associated with the root logger object.
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
    logging.basicConfig(filename=logPath, format='%(message)s',
                        level=getattr(logging, get_log_level(), logging.INFO))


def _load_problem(args, task, required=True):
    if getattr(args, 'problem', None) is None:
        if required:
            raise ValueError('{} needs a problem file.'.format(task))
        return None
    problem = ProblemFile.load(args.problem)
    problem.warn_unused(task)
    return problem


def _overlay(settings, args, keys):
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _minimizers(P, F):
    degenerate, decomposition = is_degenerate(P, F)
    if degenerate:
        return decomposition
    logging.warning('P is nondegenerate; using best-fit minimizers.')
    return relative_norm(P, F).minimizers


def _manifest(task, settings, problem, seed):
    return RunManifest(subcommand=task, parameters=settings, seed=seed,
                       input_digest=None if problem is None
                       else problem.digest)


# %% Subcommands.
def run_analyze(args, settings, threads):
    problem = _load_problem(args, 'analyze')
    manifest = _manifest('analyze', settings, problem, settings['seed'])
    report = analyze(problem.polynomial, problem.family)
    data = report.to_json()
    outputs = [write_json(data, os.path.join(args.out, 'report.json'),
                          manifest.digest)]
    print('degenerate: {}, relative norm: {}'.format(data['degenerate'],
                                                     data['relative_norm']))
    return manifest, outputs, False


def run_witness(args, settings, threads):
    problem = _load_problem(args, 'witness')
    manifest = _manifest('witness', settings, problem, settings['seed'])
    P, F = problem.polynomial, problem.family
    data = {'simple_witness': None, 'dual_operator_symbol': None,
            'top_summand_degree': None, 'scheme': None}
    witness = simple_witness(P, F)
    if witness is not None:
        data['simple_witness'] = [[fraction_to_string(c) for c in w]
                                  for w in witness]
    top = homogeneous_nondegeneracy_reduction(P, F)
    if top is not None:
        degree, part = top
        data['top_summand_degree'] = degree
        operator = dual_annihilating_operator(part, F)
        if operator is not None:
            data['dual_operator_symbol'] = operator.symbol.to_json()
            data['dual_operator'] = str(operator)
        scheme = difference_scheme(part, F, settings['scheme_kind'])
        if scheme is not None:
            data['scheme'] = scheme.to_json()
            data['scheme']['coefficients'] = [
                {'pattern': list(sigma), 'coefficient': fraction_to_string(c)}
                for sigma, c in sorted(scheme.coefficients.items())]
    data['monomial_generators_vanish'] = \
        verify_monomial_generators(F) if len(F) else None
    outputs = [write_json(data, os.path.join(args.out, 'witness.json'),
                          manifest.digest)]
    print('simple witness: {}, scheme: {}'.format(
        'none' if witness is None else 'found',
        'none' if data['scheme'] is None else data['scheme']['kind']))
    return manifest, outputs, False


def run_decay(args, settings, threads):
    problem = _load_problem(args, 'decay')
    settings = _overlay(settings, args, ('lambda_min', 'lambda_max', 'points'))
    if args.tolerance is not None:
        settings['quadrature']['relative_tolerance'] = args.tolerance
    manifest = _manifest('decay', settings, problem, settings['seed'])
    P, F = problem.polynomial, problem.family
    lambdas = geometric_grid(settings['lambda_min'], settings['lambda_max'],
                             settings['points'])
    if len(lambdas) < settings['min_points']:
        raise ValueError('The lam grid needs at least {} points, got {}.'
                         .format(settings['min_points'], len(lambdas)))
    eta = problem.cutoff or CutoffFunction.from_json(settings['cutoff'],
                                                     problem.dimension)
    if problem.functions == 'adversarial':
        family = [adversarial_functions(_minimizers(P, F))]
    elif problem.functions is not None:
        family = [problem.test_functions()]
    elif len(F):
        options = settings['family']
        family = worst_case_family(F, options['degree'], options['samples'],
                                   settings['seed'], options['real'])
    else:
        family = None
    spec = QuadratureSpec.from_settings(settings['quadrature'])
    result = decay_sweep(P, F, family, eta, lambdas, spec, threads,
                         settings['fit_fraction'], settings['min_points'])
    summary = result.summary()
    summary['all_converged'] = bool(np.all(result.converged))
    outputs = [
        write_csv(result.to_frame(), os.path.join(args.out, 'decay.csv'),
                  manifest.digest),
        write_json(summary, os.path.join(args.out, 'decay_summary.json'),
                   manifest.digest)]
    if result.samples is not None:
        outputs.append(write_csv(
            result.samples, os.path.join(args.out, 'decay_samples.csv'),
            manifest.digest))
    print('epsilon_hat: {}, r2: {}'.format(summary['epsilon_hat'],
                                           summary['r2']))
    flagged = not (summary['all_converged'] and result.fit_ok)
    return manifest, outputs, flagged


def run_sublevel(args, settings, threads):
    problem = _load_problem(args, 'sublevel')
    settings = _overlay(settings, args, ('eps_max', 'eps_min', 'points',
                                         'samples', 'corner_trials'))
    manifest = _manifest('sublevel', settings, problem, settings['seed'])
    P, F = problem.polynomial, problem.family
    if problem.functions == 'adversarial':
        g = decomposition_functions(_minimizers(P, F))
    elif problem.functions is not None:
        g = tuple(problem.test_functions())
    else:
        g = (None,) * len(F)
    region = problem.region if problem.region is not None else \
        [[0.0, 1.0]] * problem.dimension
    eps_grid = np.geomspace(settings['eps_max'], settings['eps_min'],
                            settings['points'])
    prob = SublevelProblem(P=P, F=F, g=tuple(g), region=region,
                           eps=float(eps_grid[0]))
    scaling = sublevel_scaling(prob, eps_grid, settings['samples'],
                               settings['seed'], threads)
    summary = scaling.summary()
    if settings['corner_trials']:
        top = homogeneous_nondegeneracy_reduction(P, F)
        scheme = None if top is None else difference_scheme(top[1], F)
        corner = corner_obstruction_check(
            scheme, prob.with_eps(settings['corner_eps']),
            settings['corner_trials'], settings['seed'])
        summary['corner_check'] = corner.to_json()
    outputs = [
        write_csv(scaling.to_frame(), os.path.join(args.out, 'sublevel.csv'),
                  manifest.digest),
        write_json(summary, os.path.join(args.out, 'sublevel_summary.json'),
                   manifest.digest)]
    print('delta_hat: {}, r2: {}'.format(summary['delta_hat'],
                                         summary['r2']))
    return manifest, outputs, not scaling.fit_ok


def run_bht(args, settings, threads):
    settings = _overlay(settings, args, ('degree', 'p1', 'p2', 'trials',
                                         'scale_max'))
    manifest = _manifest('bht', settings, None, settings['seed'])
    spec = PrincipalValueSpec.from_settings(settings['principal_value'])
    report = norm_ratio_sweep(settings['degree'], settings['p1'],
                              settings['p2'], settings['trials'],
                              settings['seed'], settings['scale_max'],
                              settings['grid_points'], spec, threads)
    outputs = [
        write_csv(report.to_frame(), os.path.join(args.out, 'bht.csv'),
                  manifest.digest),
        write_json(report.summary(), os.path.join(args.out,
                                                  'bht_summary.json'),
                   manifest.digest)]
    print('max_ratio: {:.6e}, slope_vs_scale: {}, slope_per_scale_max: {}'
          .format(report.max_ratio, report.slope_vs_scale,
                  report.slope_per_scale_max))
    return manifest, outputs, not report.all_converged


def run_uniformity(args, settings, threads):
    settings = _overlay(settings, args, ('degree', 'tau', 'steps'))
    if args.lam is not None:
        settings['lambda'] = args.lam
    problem = _load_problem(args, 'uniformity',
                            required=settings.get('steps') is None)
    manifest = _manifest('uniformity', settings, problem, settings['seed'])
    interval = tuple(settings['interval'])
    if settings.get('steps') is not None:
        f = AlternatingSteps(int(settings['steps']), interval)
    else:
        if not isinstance(problem.functions, list) or not problem.functions:
            raise ValueError('uniformity needs --steps or a "functions" list '
                             'in the problem file.')
        f = TestFunction.from_json(problem.functions[0], 1)
    report = uniformity_scan(f, interval, settings['lambda'],
                             settings['degree'], settings['tau'],
                             CoefficientGridSpec(**settings['grid']),
                             settings['samples'])
    outputs = [write_json(report.to_json(),
                          os.path.join(args.out, 'uniformity.json'),
                          manifest.digest)]
    print('classification: {}, max coefficient: {:.6e}'.format(
        report.classification, report.max_coefficient))
    return manifest, outputs, False


COMMANDS = {
    'analyze': run_analyze,
    'witness': run_witness,
    'decay': run_decay,
    'sublevel': run_sublevel,
    'bht': run_bht,
    'uniformity': run_uniformity,
}


# %% Parser.
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', type=str, default=None,
                        help='Output directory (default OSCIDECAY_OUTPUT_DIR '
                             'or Results).')
    common.add_argument('--strict', action='store_true',
                        help='Exit with code 3 on flagged non-convergence.')
    common.add_argument('--threads', type=int, default=None,
                        help='Worker cap (default OSCIDECAY_THREADS or 1).')
    common.add_argument('--seed', type=int, default=None,
                        help='Master seed.')

    parser = argparse.ArgumentParser(
        description='Nondegeneracy, decay and sublevel analyses of '
                    'multilinear oscillatory functionals.')
    sub = parser.add_subparsers(dest='command', required=True)

    for name in ('analyze', 'witness'):
        p = sub.add_parser(name, parents=[common])
        p.add_argument('problem', type=str)

    p = sub.add_parser('decay', parents=[common])
    p.add_argument('problem', type=str)
    p.add_argument('--lambda-min', dest='lambda_min', type=float)
    p.add_argument('--lambda-max', dest='lambda_max', type=float)
    p.add_argument('--points', type=int)
    p.add_argument('--tolerance', type=float,
                   help='Relative quadrature tolerance.')

    p = sub.add_parser('sublevel', parents=[common])
    p.add_argument('problem', type=str)
    p.add_argument('--eps-max', dest='eps_max', type=float)
    p.add_argument('--eps-min', dest='eps_min', type=float)
    p.add_argument('--points', type=int)
    p.add_argument('--samples', type=int)
    p.add_argument('--corner-trials', dest='corner_trials', type=int,
                   help='Also search for corner configurations.')

    p = sub.add_parser('bht', parents=[common])
    p.add_argument('--degree', type=int)
    p.add_argument('--p1', type=float)
    p.add_argument('--p2', type=float)
    p.add_argument('--trials', type=int)
    p.add_argument('--scale-max', dest='scale_max', type=int)

    p = sub.add_parser('uniformity', parents=[common])
    p.add_argument('problem', type=str, nargs='?', default=None)
    p.add_argument('--lambda', dest='lam', type=float)
    p.add_argument('--degree', type=int)
    p.add_argument('--tau', type=float)
    p.add_argument('--steps', type=int,
                   help='Scan the sign-alternating step function with this '
                        'many steps instead of a problem function.')
    return parser


# %% Main.
def main(args):
    args.out = args.out or get_output_dir()
    os.makedirs(args.out, exist_ok=True)
    setup_logging(args.out)
    threads = clamp_threads(args.threads) if args.threads is not None \
        else get_threads()
    settings = settingsOscidecay.get_setup(args.command)
    if args.seed is not None:
        settings['seed'] = args.seed
    try:
        manifest, outputs, flagged = COMMANDS[args.command](args, settings,
                                                            threads)
    except (ValueError, FileNotFoundError, yaml.YAMLError) as err:
        logging.error('Input error: {}'.format(err))
        print('Error: {}'.format(err), file=sys.stderr)
        return EXIT_INPUT
    manifest.write(args.out)
    print(manifest.dump())
    for path in outputs:
        logging.info('Wrote {}.'.format(path))
    if flagged:
        logging.warning('Results carry non-convergence flags.')
        if args.strict:
            return EXIT_NOT_CONVERGED
    return EXIT_OK


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INPUT if err.code else EXIT_OK
    return main(args)


if __name__ == "__main__":
    sys.exit(run())
