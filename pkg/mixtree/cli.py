#!/usr/bin/env python3
# -*- coding: utf-8 -*-
'''
cli.py - command line front end for the mixtree experiments

Every subcommand prints a short summary on standard output and, with --out,
writes a JSON artifact whose "header" records the command, its parameters
and the seed. Exit codes: 0 success, 1 failed verification, 2 usage error.

Usage:
    python -m mixtree tree build --kind baseline --n 16 --out baseline16.json
    python -m mixtree bounds --tree baseline16.json --index-set exemplar --r 2
    python -m mixtree oracle --n 8 --r 2 --g product --seed 7
    python -m mixtree verify theorem1 --kind even-odd --n 16 --index-set exemplar --r 2
    python -m mixtree separation --k 2 --n 16 --r-mix 4 --out separation.json

Licensed under the MIT License, see LICENSE file for details
'''

import logging
import os
import sys

import fire
import pandas as pd

from mixtree.analysis import (VerificationFailure, exemplar_index_set, generic_sampler,
                              genericity_check, measured_rank, separating_hybrid,
                              separation_report, summation_bound_check, verify_claim1,
                              verify_theorem1, GENERIC_WEIGHT_BOUND, MEASURE_MAX_N)
from mixtree.decomposition import (Discretizers, GridTensorBatch, MixSpec, WeightSet,
                                   enumerate_hybrids, even_odd_mix_spec, identity_discretizers,
                                   lower_bound_weights, mixed_decompose, random_discretizers,
                                   random_weights, separation_spec, tree_decompose)
from mixtree.mode_tree import (ModeTree, build_baseline_tree, build_bit_split_tree,
                               build_even_odd_swap_tree, build_k_group_swap_tree,
                               build_random_bit_split_tree, complement, theorem1_bounds, tiling)
from mixtree.network_oracle import (F64_RTOL, dilation_profile, grid_mixed_bruteforce,
                                    grid_tensor_bruteforce)
from mixtree.tensor_core import NUMERIC_RANK_TOL, SCALAR_KINDS, get_operator
from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.logger import log_to_file, set_log_level
from mixtree.utilities.tools import (PARA, derive_seed, format_index_set, label_key,
                                     parse_index_set, read_json, write_csv, write_json)


DEFAULT_SEED = 0

TREE_KINDS = ('baseline', 'even-odd', 'k-group', 'bit-split', 'random', 'separating-hybrid')


class ExperimentConfig(object):
    ''' Parameters of one command invocation.

    Args:
        command (str): subcommand name, e.g. 'verify theorem1'.
        scalar (str): 'rational' or 'f64'.
        threads (int): worker threads for trials and grid fills.
        **fields: n, r, k, seed, trials, g, index_set, inputs, out. Missing ones stay None.
    '''

    __slots__ = ['command', 'inputs', 'n', 'r', 'k', 'seed', 'trials', 'g', 'index_set',
                 'out', 'scalar', 'threads']

    _fields = ('inputs', 'n', 'r', 'k', 'seed', 'trials', 'g', 'index_set', 'out')

    def __init__(self, command, scalar='rational', threads=1, **fields):
        unknown = set(fields) - set(self._fields)
        if unknown:
            raise TypeError(f'Unknown config fields {sorted(unknown)}.')
        self.command = command
        self.scalar = scalar
        self.threads = int(threads)
        for name in self._fields:
            setattr(self, name, fields.get(name))
        if self.index_set is not None:
            self.index_set = format_index_set(self.index_set)

    def info(self):
        mylog.info(PARA.format('command', self.command))
        for name in self._fields + ('scalar', 'threads'):
            value = getattr(self, name)
            if value is not None:
                mylog.info(PARA.format(name, str(value)))

    def header(self):
        ''' dict written at the top of every artifact; thread count is left out '''

        out = {'command': self.command, 'scalar': self.scalar}
        for name in self._fields:
            value = getattr(self, name)
            if value is None or name == 'out':
                continue
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


def _emit(config, payload, out):
    if out is None:
        return
    write_json(out, {'header': config.header(), **payload})
    mylog.info(PARA.format('written', out))


def _index_set(literal, n):
    if isinstance(literal, str) and literal.strip().lower() == 'exemplar':
        return exemplar_index_set(n)
    return parse_index_set(literal, n)


def _load_spec(path):
    return MixSpec.from_json(read_json(path), base_dir=os.path.dirname(os.path.abspath(path)))


def _resolve_spec(spec_kind, n, k, mix_spec):
    if mix_spec is not None:
        return _load_spec(mix_spec)
    if spec_kind == 'even-odd':
        return even_odd_mix_spec(n)
    if spec_kind == 'separation':
        return separation_spec(n, k)
    raise KeyError(f'Unknown mixture spec kind {spec_kind!r}, use even-odd or separation.')


def _resolve_tree(tree=None, kind='baseline', n=None, k=2, bit_order=None, seed=None):
    ''' load ``tree`` from a JSON file, or build one of TREE_KINDS over n modes '''

    if tree is not None:
        return ModeTree.from_json(read_json(tree))
    if n is None:
        raise ValueError('Give either --tree FILE or --n with --kind.')
    n = int(n)
    if kind == 'baseline':
        return build_baseline_tree(n)
    if kind == 'even-odd':
        return build_even_odd_swap_tree(n)
    if kind == 'k-group':
        return build_k_group_swap_tree(n, k)
    if kind == 'bit-split':
        if bit_order is None:
            raise ValueError('--kind bit-split needs --bit-order.')
        order = (bit_order,) if isinstance(bit_order, int) else bit_order
        if isinstance(order, str):
            order = [int(b) for b in order.split(',')]
        return build_bit_split_tree(n, order)
    if kind == 'random':
        return build_random_bit_split_tree(n, DEFAULT_SEED if seed is None else seed)
    if kind == 'separating-hybrid':
        return separating_hybrid(separation_spec(n, k)).tree
    raise KeyError(f'Unknown tree kind {kind!r}, choose from {", ".join(TREE_KINDS)}.')


class TreeCommands(object):
    ''' mode tree construction '''

    def __init__(self, experiment):
        self._experiment = experiment

    def build(self, kind='baseline', n=16, k=2, bit_order=None, seed=None, out=None):
        ''' Build a mode tree and print its levels.

        Args:
            kind (str): one of baseline, even-odd, k-group, bit-split, random, separating-hybrid.
            n (int): number of modes, a power of two.
            k (int): group size for k-group trees.
            bit_order (tuple): bits split at depths 0..L-1, for bit-split trees.
            seed (int): seed of random trees.
            out (str): path of the tree JSON.
        '''

        tree = _resolve_tree(None, kind, n, k, bit_order, seed)
        self._experiment._config('tree build', n=tree.n, k=k, seed=seed, out=out)
        tree.info()
        try:
            print('dilations: ' + ' '.join(str(d) for d in dilation_profile(tree)))
        except ValueError:
            pass
        if out is not None:
            write_json(out, tree.to_json())
            mylog.info(PARA.format('written', out))
        return None


class VerifyCommands(object):
    ''' hard and statistical checks of the decompositions '''

    def __init__(self, experiment):
        self._experiment = experiment

    def theorem1(self, index_set, r=2, trials=10, seed=DEFAULT_SEED, tree=None, kind='baseline',
                 n=None, k=2, bound=GENERIC_WEIGHT_BOUND, out=None, csv=None):
        ''' Measure matricization ranks against the tiling bounds.

        Random integer weights give the trials, the explicit construction
        gives the witness. Exits 1 when a rank exceeds the upper bound or
        the witness falls short of the lower bound.
        '''

        exp = self._experiment
        tree_ = _resolve_tree(tree, kind, n, k, seed=seed)
        items = _index_set(index_set, tree_.n)
        config = exp._config('verify theorem1', inputs=tree, n=tree_.n, r=r, k=k, seed=seed,
                             trials=trials, g='product', index_set=items, out=out)
        report = verify_theorem1(tree_, items, r, trials, seed, threads=exp.threads,
                                 scalar=exp.scalar, bound=bound, subject=kind if tree is None else tree,
                                 strict=False)
        print(f'lower={report.lower} upper={report.upper}')
        print(f'measured={[min(m) for m in report.measured]} witness={report.witness}')
        print(f'generic hits {report.generic_hits}/{len(report.measured)}')
        _emit(config, {'report': report.to_json()}, out)
        if csv is not None:
            write_csv(csv, report.to_frame(), config.header())
        report.check()
        return None

    def claim1(self, spec_kind='even-odd', n=16, k=2, r_mix=4, trials=5, seed=DEFAULT_SEED,
               g='product', M=2, mix_spec=None, out=None, csv=None):
        ''' Check that the mixed decomposition reproduces every hybrid tree.

        --csv writes one row per (hybrid, trial).
        '''

        exp = self._experiment
        r_mix = int(r_mix)
        if r_mix < 2 or r_mix % 2:
            raise ValueError(f'--r-mix ({r_mix}) should be even and at least 2.')
        spec = _resolve_spec(spec_kind, n, k, mix_spec)
        config = exp._config('verify claim1', inputs=mix_spec, n=spec.n, r=r_mix, k=k,
                             seed=seed, trials=trials, g=get_operator(g).name, out=out)
        results = []
        for i, hybrid in enumerate(enumerate_hybrids(spec)):
            result = verify_claim1(spec, hybrid, r_mix // 2, trials, derive_seed(seed, i), g, M,
                                   threads=exp.threads, scalar=exp.scalar)
            results.append((hybrid, result))
            print(f'{hybrid!r}: {"ok" if result.passed else "MISMATCH"}')
        _emit(config, {'hybrids': [{'choices': list(h.choices), **res.to_json()}
                                   for h, res in results]}, out)
        failed = [(h, res) for h, res in results if not res.passed]
        print(f'{len(results) - len(failed)}/{len(results)} hybrids reproduced')
        if csv is not None:
            frames = [res.to_frame().assign(hybrid=i, choices='-'.join(h.choices))
                      for i, (h, res) in enumerate(results)]
            frame = pd.concat(frames, ignore_index=True)
            write_csv(csv, frame[['hybrid', 'choices', 'trial', 'seed', 'equal']],
                      config.header())
        if failed:
            failed[0][1].check()
        return None

    def generic(self, index_set, r=2, trials=10, seed=DEFAULT_SEED, tree=None, kind='baseline',
                n=None, k=2, bound=GENERIC_WEIGHT_BOUND, witness=True, out=None, csv=None):
        ''' Rank frequencies of random weights, optionally with the explicit witness. '''

        exp = self._experiment
        tree_ = _resolve_tree(tree, kind, n, k, seed=seed)
        items = _index_set(index_set, tree_.n)
        config = exp._config('verify generic', inputs=tree, n=tree_.n, r=r, k=k, seed=seed,
                             trials=trials, g='product', index_set=items, out=out)
        bounds = theorem1_bounds(tree_, items, r)
        witness_batch = None
        if witness and exp.scalar == 'rational':
            witness_batch = tree_decompose(tree_, lower_bound_weights(tree_, items, r),
                                           identity_discretizers(r), 'product')
        report = genericity_check(generic_sampler(tree_, r, bound, exp.scalar), items, r,
                                  trials, seed, witness_batch, exp.threads)
        print(f'lower={bounds.lower} upper={bounds.upper}')
        print(f'ranks={report.ranks} modal={report.modal_rank} '
              f'fraction={report.fraction_at_mode:.3f}')
        _emit(config, {'bounds': bounds.to_json(), 'report': report.to_json()}, out)
        if csv is not None:
            write_csv(csv, report.to_frame(), config.header())
        return None


class Experiment(object):
    ''' Mode-tree decompositions, their mixtures and matricization ranks.

    Args:
        scalar (str): 'rational' (exact, default) or 'f64'.
        threads (int): worker threads; results do not depend on it.
        log_level (str): notset, debug, info, warning, error or critical.
        log_file (str): also write the debug log of the run to this file.
    '''

    def __init__(self, scalar='rational', threads=1, log_level='info', log_file=None):
        if scalar not in SCALAR_KINDS:
            raise ValueError(f'--scalar should be one of {SCALAR_KINDS}, got {scalar!r}.')
        set_log_level(log_level)
        if log_file is not None:
            log_to_file(log_file)
        self.scalar = scalar
        self.threads = max(1, int(threads))
        self.tree = TreeCommands(self)
        self.verify = VerifyCommands(self)

    def _config(self, command, **fields):
        config = ExperimentConfig(command, self.scalar, self.threads, **fields)
        config.info()
        return config

    def tiling(self, index_set, tree=None, kind='baseline', n=None, k=2, out=None):
        ''' Print the tilings of I and of its complement. '''

        tree_ = _resolve_tree(tree, kind, n, k)
        items = _index_set(index_set, tree_.n)
        config = self._config('tiling', inputs=tree, n=tree_.n, k=k, index_set=items, out=out)
        theta = tiling(tree_, items)
        rest = complement(items, tree_.n)
        # I = [N] leaves an empty complement, whose tiling is empty
        theta_c = tiling(tree_, rest).nodes if rest else ()
        fmt = lambda nodes: ' '.join('{' + label_key(lab) + '}' for lab in nodes)
        print(f'Θ(I)   [{len(theta)}]: {fmt(theta.nodes)}')
        print(f'Θ(I^c) [{len(theta_c)}]: {fmt(theta_c)}')
        _emit(config, {'tiling': [list(lab) for lab in theta.nodes],
                       'complement_tiling': [list(lab) for lab in theta_c]}, out)
        return None

    def bounds(self, index_set, r=2, tree=None, kind='baseline', n=None, k=2, out=None):
        ''' Print the rank bounds of the grid tensors' matricization w.r.t. I. '''

        tree_ = _resolve_tree(tree, kind, n, k)
        items = _index_set(index_set, tree_.n)
        config = self._config('bounds', inputs=tree, n=tree_.n, r=r, k=k, index_set=items,
                              out=out)
        report = theorem1_bounds(tree_, items, r)
        print(f'lower={report.lower} upper={report.upper}')
        _emit(config, {'bounds': report.to_json()}, out)
        return None

    def _weights_and_disc(self, tree_, r, seed, M, weights, disc, distribution):
        if weights is not None:
            weights_ = WeightSet.from_json(read_json(weights))
        else:
            weights_ = random_weights(tree_, r, seed, distribution, scalar=self.scalar)
        if disc is not None:
            disc_ = Discretizers.from_json(read_json(disc))
        elif M is not None:
            disc_ = random_discretizers(M, weights_.r, derive_seed(seed, 1),
                                        scalar=weights_.scalar)
        else:
            disc_ = identity_discretizers(weights_.r, weights_.scalar)
        return weights_, disc_

    def grid(self, r=2, seed=DEFAULT_SEED, g='product', tree=None, kind='baseline', n=8, k=2,
             M=None, weights=None, disc=None, distribution='integer', out=None):
        ''' Compute the grid tensors of a tree decomposition.

        Weights are drawn from --seed unless --weights is given. Discretizers
        are the identity unless --M (random) or --disc (file) is given.
        '''

        tree_ = _resolve_tree(tree, kind, n, k, seed=seed)
        config = self._config('grid', inputs=tree, n=tree_.n, r=r, k=k, seed=seed,
                              g=get_operator(g).name, out=out)
        weights_, disc_ = self._weights_and_disc(tree_, r, seed, M, weights, disc, distribution)
        batch = tree_decompose(tree_, weights_, disc_, g)
        print(repr(batch))
        _emit(config, {'tree': tree_.to_json(), 'weights': weights_.to_json(),
                       'discretizers': disc_.to_json(), 'grid': batch.to_json()}, out)
        return None

    def rank(self, index_set, r=2, seed=DEFAULT_SEED, g='product', tree=None, kind='baseline',
             n=None, k=2, grid=None, M=None, weights=None, disc=None, mode=None,
             tol=NUMERIC_RANK_TOL, method='auto', out=None):
        ''' Matricization ranks of grid tensors, loaded with --grid or computed. '''

        if grid is not None:
            payload = read_json(grid)
            batch = GridTensorBatch.from_json(payload.get('grid', payload))
            order = len(batch.dims)
            items = _index_set(index_set, order)
            config = self._config('rank', inputs=grid, n=order, index_set=items, out=out)
        else:
            tree_ = _resolve_tree(tree, kind, n, k, seed=seed)
            items = _index_set(index_set, tree_.n)
            config = self._config('rank', inputs=tree, n=tree_.n, r=r, k=k, seed=seed,
                                  g=get_operator(g).name, index_set=items, out=out)
            weights_, disc_ = self._weights_and_disc(tree_, r, seed, M, weights, disc, 'integer')
            batch = tree_decompose(tree_, weights_, disc_, g)
        ranks = measured_rank(batch, items, mode, tol, method)
        print(f'ranks={ranks}')
        _emit(config, {'ranks': ranks}, out)
        return None

    def hybrids(self, spec_kind='even-odd', n=16, k=2, mix_spec=None, out=None):
        ''' Enumerate the distinct hybrid trees of a mixture spec. '''

        spec = _resolve_spec(spec_kind, n, k, mix_spec)
        config = self._config('hybrids', inputs=mix_spec, n=spec.n, k=k, out=out)
        found = enumerate_hybrids(spec)
        print(f'mixture nodes: ' + ' '.join('{' + label_key(m) + '}' for m in spec.mixture_nodes))
        for hybrid in found:
            print(repr(hybrid))
        print(f'{len(found)} distinct hybrids')
        _emit(config, {'spec': spec.to_json(), 'hybrids': [h.to_json() for h in found]}, out)
        return None

    def oracle(self, n=8, r=2, g='product', seed=DEFAULT_SEED, M=None, kind='baseline', k=2,
               tree=None, mixed=False, spec_kind='even-odd', mix_spec=None, out=None):
        ''' Compare a decomposition with the brute-force network grid, entry by entry.

        With --mixed the mixed decomposition of a spec is checked against the
        interconnected network pair instead. Exits 1 on the first mismatch.
        '''

        seed_w, seed_wb, seed_d = (derive_seed(seed, i) for i in range(3))
        if mixed:
            spec = _resolve_spec(spec_kind, n, k, mix_spec)
            n = spec.n
            weights_t = random_weights(spec.tree_t, r, seed_w, scalar=self.scalar)
            weights_tbar = random_weights(spec.tree_tbar, r, seed_wb, scalar=self.scalar)
        else:
            tree_ = _resolve_tree(tree, kind, n, k, seed=seed)
            n = tree_.n
            weights_t = random_weights(tree_, r, seed_w, scalar=self.scalar)
        config = self._config('oracle', inputs=mix_spec if mixed else tree, n=n, r=r, k=k,
                              seed=seed, g=get_operator(g).name, out=out)
        disc_ = random_discretizers(r if M is None else M, r, seed_d, scalar=self.scalar)
        if mixed:
            got = mixed_decompose(spec, weights_t, weights_tbar, disc_, g)
            expected = grid_mixed_bruteforce(spec, weights_t, weights_tbar, disc_, g,
                                             threads=self.threads)
        else:
            got = tree_decompose(tree_, weights_t, disc_, g)
            expected = grid_tensor_bruteforce(tree_, weights_t, disc_, g, threads=self.threads)
        diff = got.first_difference(expected, F64_RTOL if self.scalar == 'f64' else 0.0)
        entries = got.r * disc_.M ** n
        _emit(config, {'entries': entries, 'equal': diff is None,
                       'first_difference': None if diff is None else
                       {'y': diff[0], 'index': list(diff[1]), 'decomposition': str(diff[2]),
                        'network': str(diff[3])}}, out)
        if diff is not None:
            y, index, mine, theirs = diff
            print(f'MISMATCH at y={y} index={index}: decomposition {mine} network {theirs}')
            mylog.critical(f'decomposition and network differ at y={y}, {index}')
            raise VerificationFailure(f'Decomposition differs from the network at output {y}, '
                                      f'index {index}.', {'y': y, 'index': index})
        print(f'{entries} entries equal')
        return None

    def separation(self, k=2, n=16, r_mix=4, trials=10, seed=DEFAULT_SEED, measure=True,
                   out=None, csv=None):
        ''' Rank gap between the mixed baseline / k-group swap pair and either tree alone. '''

        config = self._config('separation', n=n, r=r_mix, k=k, seed=seed, trials=trials,
                              g='product', out=out)
        report = separation_report(k, n, r_mix, trials, seed, measure, self.threads)
        summed = None
        if measure and int(n) <= MEASURE_MAX_N:
            summed = summation_bound_check(separation_spec(n, k), report.index_set, report.r_h,
                                           seed)
        print(f'R_mix={report.R_mix} ({"measured" if report.measured else "from bounds"})')
        print(f'tree upper bounds={report.tree_upper_bounds} '
              f'summation bound={report.summation_bound}')
        if summed is not None:
            print(f'summed ranks={[max(x) for x in summed.ranks]}')
        print(f'minimal width={report.minimal_width} exponent={report.corollary_exponent} '
              f'bound={report.corollary_bound:.6g}')
        payload = {'report': report.to_json()}
        if summed is not None:
            payload['summation'] = {'ranks': summed.ranks, 'bound': summed.bound,
                                    'seeds': summed.seeds}
        _emit(config, payload, out)
        if csv is not None and report.rank_report is not None:
            write_csv(csv, report.rank_report.to_frame(), config.header())
        if report.rank_report is not None:
            report.rank_report.check()
        return None


def run(argv=None):
    ''' run one command line, return its exit code '''

    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        fire.Fire(Experiment, command=argv, name='mixtree')
    except fire.core.FireExit as err:
        return 0 if err.code is None else int(err.code)
    except VerificationFailure as err:
        mylog.error(f'verification failed: {err}')
        return 1
    except (ValueError, TypeError, KeyError, FileNotFoundError) as err:
        mylog.error(f'{type(err).__name__}: {err}')
        return 2
    finally:
        for handler in [h for h in mylog.handlers if isinstance(h, logging.FileHandler)]:
            mylog.removeHandler(handler)
            handler.close()
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
