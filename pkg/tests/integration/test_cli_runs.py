"""
Integration tests for experiment runs
=====================================

Each test runs a real experiment into a temporary run directory and checks
the files a user would read: the CSV tables, summary.json and manifest.json.
"""

import hashlib
import json
from pathlib import Path

import pytest

from src.cli import EXIT_ERROR, EXIT_INVALID, EXIT_INVARIANT, EXIT_OK, execute, parse_config, run
from src.core.errors import InputError
from src.main import main

GAUNERSDORFER = {'alpha_plus': 1.0, 'alpha_minus': 2.0, 'beta_plus': 1.0, 'beta_minus': 2.0}

ORBIT_ROTATION = {
    'kind': 'orbit',
    'seed': 0,
    'system': {'family': {'name': 'rotation', 'alpha': 0.25}},
    'x0': 0.0,
    'n': 4,
}


def _run(data, settings, root):
    raw = json.dumps(data, indent=2).encode('utf-8')
    return run(parse_config(data, settings), raw, root, settings)


def _summary(manifest):
    return json.loads((Path(manifest.directory) / 'summary.json').read_text())


def _header(manifest, name):
    return (Path(manifest.directory) / name).read_text().splitlines()[0]


@pytest.mark.integration
class TestDiscreteRuns:
    """Runs on discrete-time systems"""

    def test_orbit_golden(self, small_settings, runs_dir):
        manifest = _run(ORBIT_ROTATION, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        text = (Path(manifest.directory) / 'orbit.csv').read_text()
        assert text == "k,x\n0,0\n1,0.25\n2,0.5\n3,0.75\n"

    def test_shift_orbit_words(self, small_settings, runs_dir):
        data = {'kind': 'orbit', 'seed': 0, 'n': 3,
                'system': {'family': {'name': 'shift_on_blocks', 'blocks': [2, 4]}}}
        manifest = _run(data, small_settings, runs_dir)
        rows = (Path(manifest.directory) / 'orbit.csv').read_text().splitlines()
        assert rows[0] == 'k,word'
        assert rows[1] == '0,' + '0001010101010101010101'[:20]

    def test_empirical_logistic(self, small_settings, runs_dir):
        data = {'kind': 'empirical', 'seed': 0, 'n': 2000, 'x0': 0.1234,
                'system': {'family': {'name': 'logistic', 'lam': 4.0}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'measure.csv') == 'x,weight'
        results = _summary(manifest)['results']
        assert results['w1_to_reference'] <= 0.1
        assert results['last_step_w1'] <= 1.0 / 2000 + 1e-12
        assert any(c['name'] == 'contraction' for c in manifest.invariant_checks)

    def test_oscillation_shift(self, small_settings, runs_dir):
        data = {'kind': 'oscillation', 'seed': 0, 'N': 10, 'M': 1110,
                'system': {'family': {'name': 'shift_on_blocks', 'blocks': [10, 100, 1000]}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'oscillation.csv') == 'N,M,n,m,w1'
        results = _summary(manifest)['results']
        assert 0.0 < results['score'] <= 1.0

    def test_delta_self(self, small_settings, runs_dir):
        data = {'kind': 'delta', 'seed': 7, 'N_list': [10, 20], 'M': 100,
                'system': {'family': {'name': 'logistic', 'lam': 3.9}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'delta.csv') == \
            'kind,N,M,value,interpolation_bound,mesh_error,sample_size,schedule_length'
        summary = _summary(manifest)
        assert summary['resolved']['mesh'] == 1.0 / 512
        assert summary['results']['verdict'] in ('NON_STATISTICAL_AT_HORIZON', 'NOT_FLAGGED_AT_HORIZON')
        assert summary['results']['sample_size'] == 8

    def test_delta_pair_rows(self, small_settings, runs_dir):
        data = {'kind': 'delta', 'seed': 7, 'N_list': [10, 20], 'M': 100,
                'system': {'family': {'name': 'logistic', 'lam': 3.9}}}
        manifest = _run(data, small_settings, runs_dir)
        assert 'delta_pairs.csv' in manifest.outputs
        rows = (Path(manifest.directory) / 'delta_pairs.csv').read_text().splitlines()
        assert rows[0] == 'n,m,mean_w1,max_w1'
        results = _summary(manifest)['results']
        pairs = [tuple(float(v) for v in r.split(',')) for r in rows[1:]]
        assert len(pairs) == results['schedule_length'] ** 2
        assert all(mean <= top for _, _, mean, top in pairs)
        assert all(mean == 0.0 for n, m, mean, _ in pairs if n == m)
        assert max(mean for _, _, mean, _ in pairs) == pytest.approx(results['delta_l1'][0]['value'])

    def test_delta_perturbed_triangle(self, small_settings, runs_dir):
        data = {'kind': 'delta', 'seed': 7, 'N': 10, 'M': 60,
                'system': {'family': {'name': 'rotation', 'alpha': 0.3}},
                'perturbed': {'family': {'name': 'rotation', 'alpha': 0.31}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        triangle = _summary(manifest)['results']['triangle']
        assert triangle['lhs'] <= triangle['rhs'] + 1e-12

    def test_meta_gap_with_saved_meta(self, small_settings, runs_dir):
        data = {'kind': 'meta_gap', 'seed': 3, 'n_list': [1, 10, 100], 'save_meta': True,
                'system': {'family': {'name': 'rotation', 'alpha': 0.6180339887498949}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'meta_gap.csv') == 'n,gap,bound,mesh_error,matched_l1'
        assert 'meta/index.json' in manifest.outputs
        assert 'meta/atom_0007.csv' in manifest.outputs

    def test_bifurcation_probe(self, small_settings, runs_dir):
        data = {'kind': 'bifurcation_probe', 'seed': 1,
                'bifurcation': {'s': 0.5, 'ks': [2, 4, 8, 16], 'resolution': 256}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        rows = (Path(manifest.directory) / 'probe.csv').read_text().splitlines()
        assert rows[0] == 'k,n_k,distance'
        assert [r.split(',')[1] for r in rows[1:]] == ['1', '2', '4', '8']

    def test_hk_scan(self, small_settings, runs_dir):
        data = {'kind': 'hk_scan', 'seed': 2, 'lambda_grid': [2.0, 3.9], 'N': 10, 'M': 50}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'hk_scan.csv') == 'lam,N,M,delta_e,q50,q90,max_score'
        assert _summary(manifest)['results']['lambdas'] == 2


@pytest.mark.integration
class TestContinuousAndConstructionRuns:
    """Runs of the Bowen surrogate and the Anosov-Katok stage"""

    def test_bowen_limits(self, small_settings, runs_dir):
        data = {'kind': 'bowen', 'seed': 0, 'x0': 0.1, 'passages': 60, 'window': [30, 60],
                'system': {'family': {'name': 'bowen_surrogate', 'params': GAUNERSDORFER}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _header(manifest, 'bowen.csv') == 'passage,saddle,sojourn,exit_time,average'
        results = _summary(manifest)['results']
        assert results['limsup_closed_form'] == pytest.approx(2 / 3)
        assert results['liminf_closed_form'] == pytest.approx(1 / 3)
        assert results['simulated_sup'] == pytest.approx(2 / 3, abs=0.02)
        assert results['simulated_inf'] == pytest.approx(1 / 3, abs=0.02)

    def test_bowen_oscillation(self, small_settings, runs_dir):
        data = {'kind': 'oscillation', 'seed': 0, 'x0': 0.1, 'passages': 30, 'N': 100, 'M': 1000000,
                'system': {'family': {'name': 'bowen_surrogate', 'params': GAUNERSDORFER}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        assert _summary(manifest)['results']['score'] > 0.05

    @pytest.mark.slow
    def test_anosov_katok_stage(self, small_settings, runs_dir):
        data = {'kind': 'anosov_katok', 'seed': 0,
                'anosov_katok': {'grid_n': 100, 'iterations': 20000, 'horizon': 50}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_OK
        results = _summary(manifest)['results']
        assert results['sublemma']['passed'] is True
        assert results['commutation_residual'] <= 1e-9
        assert results['band_occupancy_error'] <= 5e-3
        assert _header(manifest, 'anosov_katok.csv') == 'quantity,value,reference'


@pytest.mark.integration
class TestRunDirectory:
    """Run directory layout, reproducibility and exit codes"""

    def test_manifest(self, small_settings, runs_dir):
        manifest = _run(ORBIT_ROTATION, small_settings, runs_dir)
        directory = Path(manifest.directory)
        config_bytes = (directory / 'config.json').read_bytes()
        assert manifest.config_hash == hashlib.sha256(config_bytes).hexdigest()
        assert directory.name == f"orbit-{manifest.config_hash[:12]}"
        assert all((directory / name).exists() for name in manifest.outputs)
        on_disk = json.loads((directory / 'manifest.json').read_text())
        assert on_disk['status'] == 'completed'
        assert [s['to'] for s in on_disk['state_history']] == \
            ['validated', 'running', 'checking', 'completed']

    def test_rerun_is_byte_identical(self, small_settings, tmp_path):
        data = {'kind': 'delta', 'seed': 11, 'N_list': [5, 10], 'M': 40,
                'system': {'family': {'name': 'logistic', 'lam': 3.8}}}
        first = _run(data, small_settings, tmp_path / 'a')
        second = _run(data, small_settings, tmp_path / 'b')
        for name in ('delta.csv', 'summary.json', 'config.json'):
            assert (Path(first.directory) / name).read_bytes() == \
                (Path(second.directory) / name).read_bytes()

    def test_invariant_failure_exit(self, small_settings, runs_dir, monkeypatch, write_config, capsys):
        monkeypatch.setattr('src.cli.runner.BOWEN_TOLERANCE', -0.5)
        path = write_config({'kind': 'bowen', 'seed': 0, 'x0': 0.1, 'passages': 60,
                             'system': {'family': {'name': 'bowen_surrogate',
                                                   'params': GAUNERSDORFER}}})
        assert execute(path, runs_dir, small_settings) == EXIT_INVARIANT
        directory = Path(capsys.readouterr().out.strip())
        manifest = json.loads((directory / 'manifest.json').read_text())
        assert manifest['status'] == 'failed'
        assert manifest['exit_code'] == EXIT_INVARIANT
        assert (directory / 'summary.json').exists()
        assert any(c['status'] == 'failed' for c in manifest['invariant_checks'])

    def test_flat_bowen_averages_fail(self, small_settings, runs_dir):
        # transit dominates every sojourn, so the running averages sit at 1/2
        params = {**GAUNERSDORFER, 'transit_time': 1e9}
        data = {'kind': 'bowen', 'seed': 0, 'x0': 0.1, 'passages': 4, 'window': [2, 4],
                'system': {'family': {'name': 'bowen_surrogate', 'params': params}}}
        manifest = _run(data, small_settings, runs_dir)
        assert manifest.exit_code == EXIT_INVARIANT
        results = _summary(manifest)['results']
        assert results['simulated_sup'] == pytest.approx(0.5, abs=1e-3)
        assert results['simulated_inf'] == pytest.approx(0.5, abs=1e-3)
        failed = {c['name'] for c in manifest.invariant_checks if c['status'] == 'failed'}
        assert failed == {'running_sup_near_limsup', 'running_inf_near_liminf'}

    def test_computation_error_exit(self, small_settings, runs_dir, monkeypatch, write_config):
        def broken(*args, **kwargs):
            raise InputError("orbit unavailable")

        monkeypatch.setattr('src.cli.runner.orbit', broken)
        path = write_config(ORBIT_ROTATION)
        assert execute(path, runs_dir, small_settings) == EXIT_ERROR
        (directory,) = list(runs_dir.iterdir())
        manifest = json.loads((directory / 'manifest.json').read_text())
        assert manifest['error'].startswith('InputError')

    def test_unexpected_exception_exit(self, small_settings, runs_dir, monkeypatch, write_config):
        def broken(*args, **kwargs):
            raise ZeroDivisionError("division by zero")

        monkeypatch.setattr('src.cli.runner.orbit', broken)
        assert execute(write_config(ORBIT_ROTATION), runs_dir, small_settings) == EXIT_ERROR
        (directory,) = list(runs_dir.iterdir())
        manifest = json.loads((directory / 'manifest.json').read_text())
        assert manifest['status'] == 'failed'
        assert manifest['exit_code'] == EXIT_ERROR
        assert manifest['error'] == 'ZeroDivisionError: division by zero'
        assert manifest['state_history'][-1]['to'] == 'failed'

    def test_invalid_config_exit(self, small_settings, runs_dir, write_config, capsys):
        path = write_config({**ORBIT_ROTATION, 'system': {'family': {'name': 'logistic', 'lam': 4.5}}})
        assert execute(path, runs_dir, small_settings) == EXIT_INVALID
        assert '[0,4]' in capsys.readouterr().err
        assert list(runs_dir.iterdir()) == []

    def test_preflight_failure_exit(self, small_settings, runs_dir, write_config):
        data = {k: v for k, v in ORBIT_ROTATION.items() if k != 'x0'}
        assert execute(write_config(data), runs_dir, small_settings) == EXIT_INVALID
        assert list(runs_dir.iterdir()) == []

    def test_missing_config_exit(self, small_settings, tmp_path):
        assert execute(tmp_path / 'absent.json', tmp_path, small_settings) == EXIT_INVALID

    def test_main_run(self, write_config, runs_dir, capsys):
        path = write_config(ORBIT_ROTATION)
        assert main(['--log-level', 'WARNING', 'run', str(path), '--output', str(runs_dir)]) == EXIT_OK
        directory = Path(capsys.readouterr().out.strip())
        assert (directory / 'orbit.csv').exists()

    def test_shipped_configs_validate(self):
        configs = Path(__file__).parent.parent.parent / 'configs' / 'experiments'
        for path in sorted(configs.glob('*.json')):
            assert main(['--log-level', 'WARNING', 'validate', str(path)]) == EXIT_OK, path.name
