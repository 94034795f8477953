import json

import pytest

from mixtree import cli
from mixtree.cli import ExperimentConfig, run


def test_oracle_example_exits_zero(capsys):
    assert run(['oracle', '--n', '8', '--r', '2', '--g', 'product', '--seed', '7']) == 0
    assert '512 entries equal' in capsys.readouterr().out


def test_mixed_oracle():
    argv = ['oracle', '--mixed', '--spec-kind', 'separation', '--n', '8', '--k', '1',
            '--r', '2', '--g', 'relu-sum', '--seed', '3']
    assert run(argv) == 0


def test_oracle_mismatch_exits_one(monkeypatch, capsys):
    original = cli.tree_decompose

    def doubled(*args, **kwargs):
        batch = original(*args, **kwargs)
        return batch.add(batch)

    monkeypatch.setattr(cli, 'tree_decompose', doubled)
    assert run(['oracle', '--n', '4', '--r', '2', '--seed', '1']) == 1
    assert 'MISMATCH' in capsys.readouterr().out


def test_build_then_bounds(tmp_path, capsys):
    path = str(tmp_path / 'baseline16.json')
    assert run(['tree', 'build', '--kind', 'baseline', '--n', '16', '--out', path]) == 0
    with open(path) as fp:
        payload = json.load(fp)
    assert payload['n'] == 16 and payload['root'] == 0
    capsys.readouterr()
    assert run(['bounds', '--tree', path, '--index-set', 'exemplar', '--r', '2']) == 0
    assert 'lower=64 upper=64' in capsys.readouterr().out


def test_theorem1_rejects_full_index_set():
    assert run(['verify', 'theorem1', '--n', '8', '--index-set', '1-8', '--r', '2']) == 2


def test_usage_errors_exit_two():
    assert run(['frobnicate']) == 2
    assert run(['tree', 'build', '--kind', 'spiral', '--n', '8']) == 2
    assert run(['bounds', '--index-set', '1,2', '--kind', 'baseline', '--n', '12']) == 2


def test_theorem1_writes_csv_with_seed_header(tmp_path):
    csv = tmp_path / 'trials.csv'
    out = tmp_path / 'report.json'
    argv = ['verify', 'theorem1', '--n', '8', '--index-set', '1,3,5,7', '--r', '2',
            '--trials', '3', '--seed', '11', '--csv', str(csv), '--out', str(out)]
    assert run(argv) == 0
    lines = csv.read_text().splitlines()
    assert lines[0].startswith('# ') and 'seed=11' in lines[0]
    assert lines[1].split(',')[:4] == ['trial', 'kind', 'seed', 'rank']
    assert len(lines) == 2 + 3 + 1
    report = json.loads(out.read_text())
    assert report['header']['seed'] == 11
    assert report['header']['index_set'] == '1,3,5,7'


def test_artifacts_are_byte_identical(tmp_path):
    paths = [tmp_path / 'a.json', tmp_path / 'b.json']
    for path, threads in zip(paths, ('1', '2')):
        argv = ['--threads', threads, 'grid', '--n', '4', '--r', '2', '--M', '3',
                '--seed', '5', '--out', str(path)]
        assert run(argv) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_hybrids_listing(capsys):
    assert run(['hybrids', '--spec-kind', 'even-odd', '--n', '16']) == 0
    assert '32 distinct hybrids' in capsys.readouterr().out


def test_separation_from_bounds(tmp_path):
    out = tmp_path / 'separation.json'
    argv = ['separation', '--k', '2', '--n', '16', '--r-mix', '4', '--nomeasure',
            '--out', str(out)]
    assert run(argv) == 0
    report = json.loads(out.read_text())['report']
    assert report['R_mix'] == 256
    assert report['corollary_exponent'] == '4/3'
    assert report['summation_bound'] == 128
    assert report['corollary_bound'] == pytest.approx(2.5198, abs=1e-3)


def test_rank_of_saved_grid(tmp_path, capsys):
    grid = tmp_path / 'grid.json'
    assert run(['grid', '--n', '4', '--r', '2', '--seed', '2', '--out', str(grid)]) == 0
    capsys.readouterr()
    assert run(['rank', '--grid', str(grid), '--index-set', '1,3']) == 0
    assert 'ranks=' in capsys.readouterr().out


def test_config_header():
    config = ExperimentConfig('bounds', n=8, r=2, index_set=(1, 2, 3, 9), out='x.json')
    header = config.header()
    assert header == {'command': 'bounds', 'scalar': 'rational', 'n': 8, 'r': 2,
                      'index_set': '1-3,9'}
    with pytest.raises(TypeError):
        ExperimentConfig('bounds', colour='blue')


def test_log_file_records_the_run(tmp_path):
    log = tmp_path / 'run.log'
    argv = ['--log-file', str(log), 'bounds', '--kind', 'baseline', '--n', '8',
            '--index-set', '1,3', '--r', '2']
    assert run(argv) == 0
    assert 'command' in log.read_text()
    assert run(['--log-level', 'chatty', 'bounds', '--n', '8', '--index-set', '1']) == 2


def test_tiling_of_the_full_set(tmp_path):
    out = tmp_path / 'tiling.json'
    argv = ['tiling', '--kind', 'baseline', '--n', '8', '--index-set', '1-8', '--out', str(out)]
    assert run(argv) == 0
    payload = json.loads(out.read_text())
    assert payload['tiling'] == [list(range(1, 9))]
    assert payload['complement_tiling'] == []


def test_generic_writes_csv(tmp_path):
    csv = tmp_path / 'generic.csv'
    argv = ['verify', 'generic', '--n', '8', '--index-set', '1,3', '--r', '2', '--trials', '2',
            '--seed', '4', '--csv', str(csv)]
    assert run(argv) == 0
    lines = csv.read_text().splitlines()
    assert lines[0].startswith('# ') and 'seed=4' in lines[0]
    assert lines[1] == 'trial,kind,seed,rank'
    assert [line.split(',')[1] for line in lines[2:]] == ['witness', 'generic', 'generic']


def test_claim1_writes_csv(tmp_path):
    csv = tmp_path / 'claim1.csv'
    out = tmp_path / 'claim1.json'
    argv = ['verify', 'claim1', '--spec-kind', 'separation', '--n', '8', '--k', '1',
            '--r-mix', '2', '--trials', '1', '--csv', str(csv), '--out', str(out)]
    assert run(argv) == 0
    lines = csv.read_text().splitlines()
    assert lines[1] == 'hybrid,choices,trial,seed,equal'
    hybrids = json.loads(out.read_text())['hybrids']
    assert len(lines) == 2 + len(hybrids)
    assert all(line.endswith(',True') for line in lines[2:])


def test_f64_oracle_tolerates_rounding():
    argv = ['--scalar', 'f64', 'oracle', '--n', '8', '--r', '2', '--g', 'relu-sum', '--seed', '9']
    assert run(argv) == 0
