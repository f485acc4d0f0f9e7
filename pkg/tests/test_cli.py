import json
import multiprocessing
import os

import pytest
import yaml

import settingsOscidecay
import utilsConfig
from oscidecay import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, run
from utils import ProblemFile, RunManifest, read_csv, read_json


def _problem(problem_dir, name):
    return os.path.join(problem_dir, name)


def _read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


@pytest.fixture
def clean_config(monkeypatch):
    for name in ('OSCIDECAY_THREADS', 'OSCIDECAY_LOG_LEVEL',
                 'OSCIDECAY_OUTPUT_DIR'):
        monkeypatch.delenv(name, raising=False)
    utilsConfig.reset()
    yield monkeypatch
    utilsConfig.reset()


# %% Subcommands.
def test_analyze_writes_report_and_manifest(problem_dir, tmp_path):
    out = str(tmp_path)
    code = run(['analyze', _problem(problem_dir, 'axes_x1x2.json'),
                '--out', out])
    assert code == EXIT_OK
    report = read_json(os.path.join(out, 'report.json'))
    assert report['relative_norm'] == '1'
    assert report['degenerate'] is False
    with open(os.path.join(out, 'manifest.yaml')) as f:
        manifest = yaml.safe_load(f)
    assert manifest['subcommand'] == 'analyze'
    assert manifest['manifest_digest'] == report['manifest_digest']
    assert len(manifest['input_digest']) == 64
    assert os.path.exists(os.path.join(out, 'oscidecay.log'))


def test_witness_on_rank_two_example(problem_dir, tmp_path):
    out = str(tmp_path)
    assert run(['witness', _problem(problem_dir, 'rank_two_r4.json'),
                '--out', out]) == EXIT_OK
    data = read_json(os.path.join(out, 'witness.json'))
    assert data['simple_witness'] is None
    assert data['dual_operator_symbol'] is not None
    assert data['top_summand_degree'] == 2
    assert data['scheme']['kind'] == 'dual'
    assert data['monomial_generators_vanish'] is True


def test_decay_on_fresnel_phase(problem_dir, tmp_path):
    out = str(tmp_path)
    code = run(['decay', _problem(problem_dir, 'fresnel.json'), '--out', out,
                '--points', '6', '--lambda-min', '16', '--lambda-max', '512'])
    assert code == EXIT_OK
    path = os.path.join(out, 'decay.csv')
    with open(path) as f:
        assert f.readline().startswith('# manifest_digest: ')
    frame = read_csv(path)
    assert len(frame) == 6 and frame['converged'].all()
    summary = read_json(os.path.join(out, 'decay_summary.json'))
    assert summary['fit_ok'] and summary['all_converged']
    samples = read_csv(os.path.join(out, 'decay_samples.csv'))
    assert len(samples) == 6


def test_decay_with_adversarial_functions(problem_dir, tmp_path):
    out = str(tmp_path)
    path = _problem(problem_dir, 'degenerate_axes.json')
    assert run(['analyze', path, '--out', out]) == EXIT_OK
    assert read_json(os.path.join(out, 'report.json'))['degenerate'] is True
    code = run(['decay', path, '--out', out, '--points', '6',
                '--lambda-min', '1', '--lambda-max', '32'])
    assert code == EXIT_OK
    frame = read_csv(os.path.join(out, 'decay.csv'))
    assert frame['converged'].all()
    assert frame['abs'].max() - frame['abs'].min() < 1e-6


def test_decay_rejects_short_grid(problem_dir, tmp_path):
    code = run(['decay', _problem(problem_dir, 'fresnel.json'), '--out',
                str(tmp_path), '--points', '3'])
    assert code == EXIT_INPUT


def test_missing_problem_file(tmp_path):
    code = run(['analyze', str(tmp_path / 'absent.json'), '--out',
                str(tmp_path)])
    assert code == EXIT_INPUT


def test_malformed_problem_files(tmp_path):
    unknown = tmp_path / 'unknown.json'
    unknown.write_text(json.dumps({'dimension': 1, 'polynomial': 'x1^2',
                                   'subspaces': [], 'colour': 'red'}))
    broken = tmp_path / 'broken.yaml'
    broken.write_text('dimension: [1\n')
    for path in (unknown, broken):
        assert run(['analyze', str(path), '--out', str(tmp_path)]) == \
            EXIT_INPUT


def test_unknown_subcommand_is_an_input_error():
    assert run(['transform']) == EXIT_INPUT


def test_sublevel_strict_flags_missing_fit(problem_dir, tmp_path):
    args = ['sublevel', _problem(problem_dir, 'sublevel_xy.json'), '--out',
            str(tmp_path), '--samples', '10000', '--eps-max', '1e-6',
            '--eps-min', '1e-8']
    assert run(args) == EXIT_OK
    assert run(args + ['--strict']) == EXIT_NOT_CONVERGED
    summary = read_json(os.path.join(str(tmp_path), 'sublevel_summary.json'))
    assert summary['fit_ok'] is False


def test_sublevel_with_corner_check(problem_dir, tmp_path):
    code = run(['sublevel', _problem(problem_dir, 'sublevel_xy.json'),
                '--out', str(tmp_path), '--samples', '20000',
                '--corner-trials', '2000'])
    assert code == EXIT_OK
    summary = read_json(os.path.join(str(tmp_path), 'sublevel_summary.json'))
    assert summary['corner_check']['violations'] == 0


def test_uniformity_with_steps(tmp_path):
    code = run(['uniformity', '--steps', '1', '--lambda', '8', '--degree',
                '1', '--out', str(tmp_path)])
    assert code == EXIT_OK
    data = read_json(os.path.join(str(tmp_path), 'uniformity.json'))
    assert data['classification'] == 'nonuniform'


def test_uniformity_needs_a_function(tmp_path):
    assert run(['uniformity', '--out', str(tmp_path)]) == EXIT_INPUT


def test_outputs_are_byte_identical(tmp_path):
    args = ['bht', '--degree', '1', '--trials', '2', '--scale-max', '1',
            '--seed', '4']
    runs = []
    for name, extra in (('a', []), ('b', []), ('c', ['--threads', '2'])):
        out = str(tmp_path / name)
        assert run(args + ['--out', out] + extra) == EXIT_OK
        runs.append([_read_bytes(os.path.join(out, f)) for f in
                     ('bht.csv', 'bht_summary.json', 'manifest.yaml')])
    assert runs[0] == runs[1] == runs[2]


# %% Files and settings.
def test_problem_file_sections(problem_dir):
    problem = ProblemFile.load(_problem(problem_dir, 'sublevel_xy_trig.json'))
    assert problem.sections == ('dimension', 'polynomial', 'subspaces',
                                'functions', 'region')
    assert [f.is_real for f in problem.test_functions()] == [True, True]
    assert problem.warn_unused('analyze') == ['functions', 'region']


def test_problem_file_validation():
    base = {'dimension': 2, 'polynomial': 'x1*x2',
            'subspaces': [{'basis': [['1', '0']]}, [[0, 1]]]}
    assert len(ProblemFile.from_dict(base).family) == 2
    for change in ({'dimension': 0}, {'subspaces': [[[1, 0, 0]]]},
                   {'functions': [{}]}, {'region': [[0, 1]]},
                   {'polynomial': 'x3'}):
        with pytest.raises(ValueError):
            ProblemFile.from_dict(dict(base, **change))
    with pytest.raises(ValueError):
        ProblemFile.from_dict({'dimension': 2})


def test_manifest_digest_ignores_key_order():
    a = RunManifest('bht', {'p1': 2.0, 'p2': 2.0}, seed=1)
    b = RunManifest('bht', {'p2': 2.0, 'p1': 2.0}, seed=1)
    assert a.digest == b.digest
    assert RunManifest('bht', {'p1': 2.0, 'p2': 2.0}, seed=2).digest != \
        a.digest
    assert 'manifest_digest' in yaml.safe_load(a.dump())


def test_get_setup_returns_independent_copies():
    first = settingsOscidecay.get_setup('decay')
    first['quadrature']['gauss_order'] = 2
    assert settingsOscidecay.get_setup('decay')['quadrature'][
        'gauss_order'] == 8
    with pytest.raises(ValueError):
        settingsOscidecay.get_setup('plot')


def test_environment_configuration(clean_config):
    clean_config.setenv('OSCIDECAY_THREADS', '1000')
    clean_config.setenv('OSCIDECAY_LOG_LEVEL', 'debug')
    clean_config.setenv('OSCIDECAY_OUTPUT_DIR', 'Elsewhere')
    assert utilsConfig.get_threads() == multiprocessing.cpu_count()
    assert utilsConfig.get_log_level() == 'DEBUG'
    assert utilsConfig.get_output_dir() == 'Elsewhere'
    assert utilsConfig.clamp_threads(0) == 1
