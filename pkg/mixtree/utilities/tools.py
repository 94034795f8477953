#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""tools.py - some helpful functions.

Index-set literals, rational encoding, seed derivation and the artifact
writers shared by the analysis suites and the command line.

Licensed under the MIT License, see LICENSE file for details
"""

import json
from fractions import Fraction

import numpy as np
import pandas as pd


# format for log
PARA = "Parameter : {0:<20}\t = {1:<10}"
PROP = "========>   {0:<20}\t = {1:<10}"
DIME = "========>   {0:<20}\t : {1:<10}"


def parse_index_set(literal, n=None):
    """turn an index-set literal into a sorted tuple of 1-based integers

    Args:
        literal: "1-4,9,10" style string, a single int, or an iterable of ints.
        n: optional number of modes; when given every index must lie in [n].

    Returns:
        sorted tuple without duplicates.

    Example:
        >>> parse_index_set("1-4,9,10")
        (1, 2, 3, 4, 9, 10)
    """

    if isinstance(literal, (int, np.integer)):
        items = [int(literal)]
    elif isinstance(literal, str):
        items = []
        for chunk in literal.replace(" ", "").split(","):
            if not chunk:
                continue
            if "-" in chunk[1:]:
                lo, hi = chunk.split("-", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ValueError(f"Range '{chunk}' is decreasing.")
                items.extend(range(lo, hi + 1))
            else:
                items.append(int(chunk))
    else:
        items = [int(x) for x in literal]

    if n is not None:
        bad = [i for i in items if i < 1 or i > n]
        if bad:
            raise ValueError(f"Indices {bad} are outside [1, {n}].")
    return tuple(sorted(set(items)))


def format_index_set(index_set):
    """compact "1-4,9,10" form of a sorted index set"""

    parts = []
    items = sorted(index_set)
    start = prev = None
    for i in items:
        if start is None:
            start = prev = i
        elif i == prev + 1:
            prev = i
        else:
            parts.append(f"{start}-{prev}" if prev > start else f"{start}")
            start = prev = i
    if start is not None:
        parts.append(f"{start}-{prev}" if prev > start else f"{start}")
    return ",".join(parts)


def format_rational(value):
    """"p/q" string of an exact rational (int or Fraction)"""

    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text):
    """inverse of format_rational; ints come back as Python int"""

    q = Fraction(text)
    return q.numerator if q.denominator == 1 else q


def label_key(label):
    """JSON key of a node label, e.g. (1, 2, 5) -> "1,2,5" """

    return ",".join(str(i) for i in label)


def parse_label_key(key):
    return tuple(sorted(int(i) for i in key.split(",") if i))


def derive_seed(seed, index):
    """per-trial seed, a pure function of (master seed, trial index)"""

    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(1)
    return int(state[0])


def write_json(path, payload):
    """dump payload with stable key order so reruns are byte-identical"""

    with open(path, "w") as fp:
        json.dump(payload, fp, sort_keys=True, indent=2)
        fp.write("\n")


def read_json(path):
    with open(path, "r") as fp:
        return json.load(fp)


def write_csv(path, frame, header=None):
    """write a DataFrame with one leading '# key=value' comment line"""

    if not isinstance(frame, pd.DataFrame):
        frame = pd.DataFrame(frame)
    with open(path, "w", newline="") as fp:
        if header:
            fields = " ".join(f"{k}={header[k]}" for k in sorted(header))
            fp.write(f"# {fields}\n")
        frame.to_csv(fp, index=False)
