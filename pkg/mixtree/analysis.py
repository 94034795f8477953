#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
analysis.py - rank verification suites and the depth-efficiency separation report

Checks grid-tensor matricization ranks against the tiling bounds, confirms
that mixed decompositions reproduce their hybrids, samples rank genericity,
and reports how far a mixed pair outranks either tree alone.

Licensed under the MIT License, see LICENSE file for details
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd

from mixtree.decomposition import (MixSpec, T_TAG, TBAR_TAG, hybrid_from_choices,
                                   hybrid_to_mixed_weights, identity_discretizers,
                                   lower_bound_weights, mixed_decompose, random_discretizers,
                                   random_weights, separation_spec, tree_decompose)
from mixtree.mode_tree import (_check_subset, _log2_exact, build_random_bit_split_tree,
                               theorem1_bounds)
from mixtree.network_oracle import F64_RTOL
from mixtree.tensor_core import get_operator, matricize, matrix_rank
from mixtree.utilities.logger import mtLogger as mylog
from mixtree.utilities.tools import DIME, PARA, PROP, derive_seed, format_index_set


# integer weights for generic sampling are drawn from [-5, 5]
GENERIC_WEIGHT_BOUND = 5

# separation reports measure ranks exactly up to this many modes
MEASURE_MAX_N = 16


class VerificationFailure(AssertionError):
    """A hard check failed; ``counterexample`` holds the first offending entry."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


def _map(fn, items, threads=1):
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


def measured_rank(batch, index_set, mode=None, tol=None, method='auto'):
    """rank of [A^y]_I for every tensor of the batch"""

    if mode is None:
        mode = 'exact' if batch.scalar == 'rational' else 'numeric'
    kwargs = {'method': method}
    if tol is not None:
        kwargs['tol'] = tol
    return [matrix_rank(matricize(t, index_set), mode, **kwargs) for t in batch.tensors]


@dataclass
class RankTrialReport:
    """measured ranks of random trials and of the explicit witness against the bounds"""

    subject: str
    index_set: tuple
    r: int
    lower: int
    upper: int
    seed: int
    seeds: list = field(default_factory=list)
    measured: list = field(default_factory=list)
    witness: tuple = None

    @property
    def upper_ok(self):
        ranks = [x for trial in self.measured for x in trial] + list(self.witness or ())
        return all(x <= self.upper for x in ranks)

    @property
    def witness_ok(self):
        return self.witness is None or min(self.witness) >= self.lower

    @property
    def passed(self):
        return self.upper_ok and self.witness_ok

    @property
    def generic_hits(self):
        """trials whose every output reaches the lower bound"""
        return sum(1 for trial in self.measured if min(trial) >= self.lower)

    def check(self):
        if not self.upper_ok:
            worst = max(x for trial in self.measured for x in trial)
            mylog.critical(f'upper bound {self.upper} violated by rank {worst}')
            raise VerificationFailure(f'{self.subject}: measured rank {worst} exceeds the '
                                      f'upper bound {self.upper}.', {'rank': worst})
        if not self.witness_ok:
            mylog.critical(f'witness rank {min(self.witness)} below lower bound {self.lower}')
            raise VerificationFailure(f'{self.subject}: explicit witness reaches rank '
                                      f'{min(self.witness)} < {self.lower}.',
                                      {'rank': min(self.witness)})
        return True

    def to_frame(self):
        rows = []
        for t, (s, ranks) in enumerate(zip(self.seeds, self.measured)):
            rows.append({'trial': t, 'kind': 'generic', 'seed': s, 'rank': min(ranks),
                         'rank_max': max(ranks), 'within_upper': max(ranks) <= self.upper,
                         'meets_lower': min(ranks) >= self.lower})
        if self.witness is not None:
            rows.append({'trial': len(self.measured), 'kind': 'witness', 'seed': None,
                         'rank': min(self.witness), 'rank_max': max(self.witness),
                         'within_upper': max(self.witness) <= self.upper,
                         'meets_lower': min(self.witness) >= self.lower})
        return pd.DataFrame(rows, columns=['trial', 'kind', 'seed', 'rank', 'rank_max',
                                           'within_upper', 'meets_lower'])

    def to_json(self):
        return {'subject': self.subject, 'index_set': list(self.index_set), 'r': self.r,
                'lower': self.lower, 'upper': self.upper, 'seed': self.seed,
                'seeds': list(self.seeds), 'measured': [list(m) for m in self.measured],
                'witness': None if self.witness is None else list(self.witness),
                'upper_ok': self.upper_ok, 'witness_ok': self.witness_ok,
                'generic_hits': self.generic_hits}


def verify_theorem1(tree, index_set, r, trials=10, seed=0, g='product', threads=1,
                    scalar='rational', bound=GENERIC_WEIGHT_BOUND, subject='tree', strict=True):
    """rank bounds of one (tree, I, r) instance under random and explicit weights

    Identity discretizers (M = r) and the product operator are used
    throughout. Random integer weights give the generic trials; the lower
    bound construction gives the witness. With ``strict`` a violated upper
    bound or a short witness raises VerificationFailure.
    """

    if get_operator(g).name != 'product':
        mylog.critical(f'rank bounds only hold for product g, got {g}')
        raise ValueError(f'Rank bounds are stated for the product operator only, got {g!r}.')
    items = _check_subset(tree, index_set, proper=True)
    bounds = theorem1_bounds(tree, items, r)
    disc = identity_discretizers(r, scalar)
    mylog.info(PARA.format('subject', subject))
    mylog.info(PARA.format('index set', format_index_set(items)))
    mylog.info(PARA.format('r', r))
    mylog.info(PROP.format('bounds', f'{bounds.lower} .. {bounds.upper}'))

    seeds = [derive_seed(seed, t) for t in range(int(trials))]

    def trial(s):
        weights = random_weights(tree, r, s, bound=bound, scalar=scalar)
        return tuple(measured_rank(tree_decompose(tree, weights, disc, 'product'), items))

    measured = _map(trial, seeds, threads)
    witness = None
    if scalar == 'rational':
        witness_batch = tree_decompose(tree, lower_bound_weights(tree, items, r), disc, 'product')
        witness = tuple(measured_rank(witness_batch, items))

    report = RankTrialReport(subject=subject, index_set=items, r=int(r), lower=bounds.lower,
                             upper=bounds.upper, seed=int(seed), seeds=seeds,
                             measured=measured, witness=witness)
    short = [t for t, ranks in enumerate(measured) if min(ranks) < bounds.lower]
    if short:
        mylog.warning(f'{len(short)} of {len(measured)} random trials fell below the lower '
                      f'bound {bounds.lower} (trials {short})')
    mylog.info(DIME.format('generic hits', f'{report.generic_hits}/{len(measured)}'))
    if witness is not None:
        mylog.info(DIME.format('witness rank', min(witness)))
    if strict:
        report.check()
    return report


def verify_lower_bound_witness(tree, index_set, r):
    """ranks of the explicit construction; raises when one is below the lower bound"""

    items = _check_subset(tree, index_set, proper=True)
    bounds = theorem1_bounds(tree, items, r)
    batch = tree_decompose(tree, lower_bound_weights(tree, items, r),
                           identity_discretizers(r), 'product')
    ranks = measured_rank(batch, items)
    if min(ranks) < bounds.lower:
        mylog.critical(f'witness rank {min(ranks)} below {bounds.lower} for I={items}')
        raise VerificationFailure(f'Witness rank {min(ranks)} is below the lower bound '
                                  f'{bounds.lower} for I={items}.',
                                  {'index_set': items, 'rank': min(ranks)})
    return ranks, bounds


def random_proper_index_set(n, rng):
    """uniform random subset of [n] that is neither empty nor everything"""

    while True:
        mask = rng.integers(0, 2, size=n).astype(bool)
        if 0 < mask.sum() < n:
            return tuple(int(i) + 1 for i in np.flatnonzero(mask))


def verify_upper_bound(n, r, instances, seed, threads=1, bound=GENERIC_WEIGHT_BOUND):
    """random (bit-split tree, I, weights) instances; raises on any rank above the bound"""

    def instance(i):
        s = derive_seed(seed, i)
        rng = np.random.default_rng(s)
        tree = build_random_bit_split_tree(n, rng.integers(0, 2**31))
        items = random_proper_index_set(n, rng)
        bounds = theorem1_bounds(tree, items, r)
        weights = random_weights(tree, r, rng.integers(0, 2**31), bound=bound)
        ranks = measured_rank(tree_decompose(tree, weights, identity_discretizers(r)), items)
        return {'instance': i, 'seed': s, 'index_set': format_index_set(items),
                'rank': max(ranks), 'upper': bounds.upper, 'lower': bounds.lower,
                'within_upper': max(ranks) <= bounds.upper}

    frame = pd.DataFrame(_map(instance, range(int(instances)), threads))
    bad = frame[~frame['within_upper']]
    if len(bad):
        row = bad.iloc[0]
        mylog.critical(f'instance {row["instance"]} exceeds its upper bound')
        raise VerificationFailure(f'Instance {row["instance"]} has rank {row["rank"]} above '
                                  f'{row["upper"]}.', row.to_dict())
    return frame


@dataclass
class ReplicationResult:
    """outcome of the hybrid-reproduction check"""

    passed: bool
    trials: int
    seeds: list
    counterexample: dict = None
    equal: list = None

    def check(self):
        if not self.passed:
            mylog.critical(f'mixed decomposition differs from its hybrid: {self.counterexample}')
            raise VerificationFailure('Mixed decomposition does not reproduce the hybrid.',
                                      self.counterexample)
        return True

    def to_json(self):
        cex = None
        if self.counterexample is not None:
            cex = {k: (str(v) if k in ('mixed', 'hybrid') else v)
                   for k, v in self.counterexample.items()}
        return {'passed': self.passed, 'trials': self.trials, 'seeds': list(self.seeds),
                'counterexample': cex}

    def to_frame(self):
        equal = self.equal if self.equal is not None else [self.passed] * len(self.seeds)
        return pd.DataFrame({'trial': range(len(self.seeds)), 'seed': self.seeds,
                             'equal': equal}, columns=['trial', 'seed', 'equal'])


def verify_claim1(spec, hybrid, r_h, trials=5, seed=0, g='product', M=2, threads=1,
                  scalar='rational', bound=GENERIC_WEIGHT_BOUND):
    """compare the hybrid's tree decomposition with the mixed decomposition

    Each trial draws hybrid weights and M random discretizers of dimension r_h.
    The mixed side uses hybrid_to_mixed_weights and zero-padded discretizers,
    and only its first r_h outputs are compared.
    """

    op = get_operator(g)
    if op.name not in ('product', 'relu-sum'):
        mylog.warning(f'operator {op.name} is not one of the verified operators; '
                      f'the outcome is reported but not backed by the construction')
    seeds = [derive_seed(seed, t) for t in range(int(trials))]

    def trial(s):
        weights = random_weights(hybrid.tree, r_h, s, bound=bound, scalar=scalar)
        disc = random_discretizers(M, r_h, derive_seed(s, 1), bound=bound, scalar=scalar)
        expected = tree_decompose(hybrid.tree, weights, disc, op)
        weights_t, weights_tbar = hybrid_to_mixed_weights(spec, hybrid, weights)
        got = mixed_decompose(spec, weights_t, weights_tbar, disc.padded(2 * r_h), op).first(r_h)
        return got.first_difference(expected, F64_RTOL if scalar == 'f64' else 0.0)

    outcomes = _map(trial, seeds, threads)
    equal = [diff is None for diff in outcomes]
    for s, diff in zip(seeds, outcomes):
        if diff is not None:
            y, index, mine, theirs = diff
            cex = {'seed': s, 'y': y, 'index': index, 'mixed': mine, 'hybrid': theirs}
            mylog.error(f'mixed decomposition does not reproduce {hybrid!r}: {cex}')
            return ReplicationResult(False, len(seeds), seeds, cex, equal)
    mylog.debug(f'{hybrid!r} reproduced over {len(seeds)} trials')
    return ReplicationResult(True, len(seeds), seeds, equal=equal)


@dataclass
class GenericityReport:
    """rank frequencies over random draws

    ``modal_rank`` is the largest rank observed, the value generic weights attain.
    """

    ranks: list
    seeds: list
    witness_rank: int = None

    @property
    def distinct(self):
        return tuple(sorted(set(self.ranks)))

    @property
    def modal_rank(self):
        return max(self.ranks)

    @property
    def fraction_at_mode(self):
        return self.ranks.count(self.modal_rank) / len(self.ranks)

    def to_json(self):
        return {'ranks': list(self.ranks), 'seeds': list(self.seeds),
                'distinct': list(self.distinct), 'modal_rank': self.modal_rank,
                'fraction_at_mode': self.fraction_at_mode, 'witness_rank': self.witness_rank}

    def to_frame(self):
        kinds = ['witness' if s is None else 'generic' for s in self.seeds]
        return pd.DataFrame({'trial': range(len(self.ranks)), 'kind': kinds,
                             'seed': pd.Series(self.seeds, dtype=object),
                             'rank': self.ranks},
                            columns=['trial', 'kind', 'seed', 'rank'])


def generic_sampler(tree, r, bound=GENERIC_WEIGHT_BOUND, scalar='rational'):
    """seed -> grid tensors of ``tree`` with random integer weights, identity discretizers"""

    if bound < 3:
        raise ValueError(f'Genericity sampling needs weights in [-B, B] with B >= 3, got {bound}.')
    disc = identity_discretizers(r, scalar)

    def decompose(seed):
        return tree_decompose(tree, random_weights(tree, r, seed, bound=bound, scalar=scalar),
                              disc, 'product')

    return decompose


def genericity_check(decompose, index_set, r, trials=10, seed=0, witness=None, threads=1):
    """sample ranks of ``decompose(seed)`` over ``trials`` derived seeds

    A trial's rank is the smallest rank over its r outputs. When ``witness``
    (a GridTensorBatch) is given it enters as trial 0. Batches with other
    than r outputs raise ValueError.
    """

    items = tuple(index_set)
    r = int(r)

    def batch_rank(batch):
        if batch.r != r:
            raise ValueError(f'Sampled batch has {batch.r} outputs, expected r = {r}.')
        return min(measured_rank(batch, items))

    seeds = [derive_seed(seed, t) for t in range(int(trials))]
    ranks = _map(lambda s: batch_rank(decompose(s)), seeds, threads)
    witness_rank = None
    if witness is not None:
        witness_rank = batch_rank(witness)
        ranks = [witness_rank] + ranks
        seeds = [None] + seeds
    report = GenericityReport(ranks=list(ranks), seeds=seeds, witness_rank=witness_rank)
    mylog.info(PROP.format('distinct ranks', str(report.distinct)))
    mylog.info(PROP.format('modal rank', report.modal_rank))
    mylog.info(PROP.format('fraction at mode', f'{report.fraction_at_mode:.3f}'))
    return report


def exemplar_index_set(n):
    """{2k-1 : k ∈ [n/4]} ∪ {n/2 + 4k - k' : k ∈ [n/8], k' = 2, 3}"""

    n = int(n)
    if n < 8 or n % 8:
        raise ValueError(f'n ({n}) should be a positive multiple of 8.')
    lower = {2 * k - 1 for k in range(1, n // 4 + 1)}
    upper = {n // 2 + 4 * k - kp for k in range(1, n // 8 + 1) for kp in (2, 3)}
    return tuple(sorted(lower | upper))


def separating_index_set(n, k):
    """odd positions in the first half; in the second half, e with bit k-1 of (e-1) clear

    Every leaf pair of the separating hybrid then has one member in I.
    """

    L = _log2_exact(n)
    k = int(k)
    if k < 1 or L % k:
        raise ValueError(f'k ({k}) should divide log2(n) = {L}.')
    half = n // 2
    first = [e for e in range(1, half + 1) if not (e - 1) & 1]
    second = [e for e in range(half + 1, n + 1) if not (e - 1) >> (k - 1) & 1]
    return tuple(first + second)


def separating_hybrid(spec):
    """segments of the first half of the mixture nodes from T, all others from T̄"""

    plan = spec.segment_plan()
    half = len(spec.mixture_nodes) // 2
    first = set(spec.mixture_nodes[:half])
    choices = [T_TAG if mu in first else TBAR_TAG for mu, _, _ in plan]
    return hybrid_from_choices(spec, choices)


def minimal_width(rank, exponent):
    """smallest integer r' with r'^exponent >= rank, None if no width helps"""

    if exponent <= 0:
        return None if rank > 1 else 1
    width = max(1, int(round(rank ** (1.0 / exponent))) - 1)
    while width ** exponent < rank:
        width += 1
    return width


@dataclass
class SeparationReport:
    """mixed-pair rank against what either tree can reach at the same width"""

    k: int
    n: int
    r_mix: int
    index_set: tuple
    hybrid_choices: tuple
    R_mix: int
    measured: bool
    hybrid_lower: int
    hybrid_upper: int
    tree_exponents: dict
    tree_upper_bounds: dict
    minimal_widths: dict
    summation_bound: int
    corollary_exponent: Fraction
    corollary_bound: float
    degenerate: bool
    rank_report: RankTrialReport = None

    @property
    def r_h(self):
        return self.r_mix // 2

    @property
    def minimal_width(self):
        widths = [w for w in self.minimal_widths.values() if w is not None]
        return min(widths) if widths else None

    @property
    def separated(self):
        return max(self.tree_upper_bounds.values()) < self.R_mix

    def info(self):
        mylog.info(PARA.format('k', self.k))
        mylog.info(PARA.format('n', self.n))
        mylog.info(PARA.format('r_mix', self.r_mix))
        mylog.info(PROP.format('R_mix', self.R_mix))
        for tag in (T_TAG, TBAR_TAG):
            mylog.info(PROP.format(f'upper bound {tag}', self.tree_upper_bounds[tag]))
            mylog.info(PROP.format(f'minimal width {tag}', str(self.minimal_widths[tag])))
        mylog.info(PROP.format('summation bound', self.summation_bound))
        mylog.info(PROP.format('corollary exponent', str(self.corollary_exponent)))
        mylog.info(PROP.format('corollary bound', f'{self.corollary_bound:.6g}'))
        if self.degenerate:
            mylog.warning('k = 1: exponent is 1, no super-linear separation')

    def to_json(self):
        return {'k': self.k, 'n': self.n, 'r_mix': self.r_mix, 'r_h': self.r_h,
                'index_set': list(self.index_set), 'hybrid_choices': list(self.hybrid_choices),
                'R_mix': self.R_mix, 'measured': self.measured,
                'hybrid_lower': self.hybrid_lower, 'hybrid_upper': self.hybrid_upper,
                'tree_exponents': dict(self.tree_exponents),
                'tree_upper_bounds': dict(self.tree_upper_bounds),
                'minimal_widths': dict(self.minimal_widths), 'minimal_width': self.minimal_width,
                'summation_bound': self.summation_bound,
                'corollary_exponent': str(self.corollary_exponent),
                'corollary_bound': self.corollary_bound, 'degenerate': self.degenerate,
                'separated': self.separated,
                'rank_report': None if self.rank_report is None else self.rank_report.to_json()}


def corollary_exponent(k):
    """2 / (1 + 2^(1-k)) as an exact fraction"""

    k = int(k)
    return Fraction(2) / (1 + Fraction(2) ** (1 - k))


def separation_report(k, n, r_mix, trials=10, seed=0, measure=True, threads=1):
    """rank gap between the mixed baseline/k-group-swap pair and either tree alone

    R_mix is the rank the separating hybrid reaches at r_h = r_mix / 2, which
    the mixed pair realizes at r_mix. It is measured exactly when n is small
    enough and ``measure`` is set. Otherwise it is taken from the hybrid's
    bounds when they coincide.
    """

    k, n, r_mix = int(k), int(n), int(r_mix)
    L = _log2_exact(n)
    if k < 1 or L % k:
        raise ValueError(f'k ({k}) should divide log2(n) = {L}.')
    if r_mix < 2 or r_mix % 2:
        raise ValueError(f'r_mix ({r_mix}) should be even and at least 2.')
    r_h = r_mix // 2
    spec = separation_spec(n, k)
    hybrid = separating_hybrid(spec)
    items = separating_index_set(n, k)
    hybrid_bounds = theorem1_bounds(hybrid.tree, items, r_h)
    tree_bounds = {tag: theorem1_bounds(spec.tree(tag), items, r_h) for tag in (T_TAG, TBAR_TAG)}

    rank_report = None
    if measure and n <= MEASURE_MAX_N:
        rank_report = verify_theorem1(hybrid.tree, items, r_h, trials, seed, threads=threads,
                                      subject='separating hybrid')
        observed = [x for trial in rank_report.measured for x in trial]
        observed += list(rank_report.witness or ())
        R_mix, measured = max(observed), True
    else:
        if hybrid_bounds.lower != hybrid_bounds.upper:
            mylog.warning('hybrid bounds do not coincide; R_mix taken from the lower bound')
        R_mix, measured = hybrid_bounds.lower, False

    exponents = {tag: b.upper_exponent for tag, b in tree_bounds.items()}
    exponent = corollary_exponent(k)
    bound = float(f'{float(r_h) ** float(exponent):.6g}')
    report = SeparationReport(
        k=k, n=n, r_mix=r_mix, index_set=items, hybrid_choices=hybrid.choices, R_mix=R_mix,
        measured=measured, hybrid_lower=hybrid_bounds.lower, hybrid_upper=hybrid_bounds.upper,
        tree_exponents=exponents,
        tree_upper_bounds={tag: b.upper for tag, b in tree_bounds.items()},
        minimal_widths={tag: minimal_width(R_mix, e) for tag, e in exponents.items()},
        summation_bound=sum(b.upper for b in tree_bounds.values()),
        corollary_exponent=exponent, corollary_bound=bound, degenerate=(k == 1),
        rank_report=rank_report)
    report.info()
    return report


@dataclass
class SummationCheck:
    ranks: list
    bound: int
    seeds: list

    @property
    def passed(self):
        return all(max(r) <= self.bound for r in self.ranks)


def summation_bound_check(spec, index_set, r, seed=0, trials=1, bound=GENERIC_WEIGHT_BOUND):
    """rank of the plain sum of both trees (no mixture nodes) against the summed upper bounds"""

    plain = MixSpec(spec.tree_t, spec.tree_tbar, ())
    items = _check_subset(spec.tree_t, index_set, proper=True)
    limit = (theorem1_bounds(spec.tree_t, items, r).upper
             + theorem1_bounds(spec.tree_tbar, items, r).upper)
    disc = identity_discretizers(r)
    seeds = [derive_seed(seed, t) for t in range(int(trials))]
    ranks = []
    for s in seeds:
        w_t = random_weights(spec.tree_t, r, derive_seed(s, 0), bound=bound)
        w_tbar = random_weights(spec.tree_tbar, r, derive_seed(s, 1), bound=bound)
        ranks.append(measured_rank(mixed_decompose(plain, w_t, w_tbar, disc), items))
    check = SummationCheck(ranks=ranks, bound=limit, seeds=seeds)
    if not check.passed:
        mylog.critical(f'sum of two trees exceeds {limit}: {ranks}')
        raise VerificationFailure(f'Summed decomposition rank exceeds {limit}.', {'ranks': ranks})
    return check
