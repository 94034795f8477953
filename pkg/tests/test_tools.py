import importlib
from fractions import Fraction

import pandas as pd
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixtree.utilities import logger
from mixtree.utilities.logger import mtLogger, set_log_level
from mixtree.utilities.tools import (derive_seed, format_index_set, format_rational, label_key,
                                     parse_index_set, parse_label_key, parse_rational, read_json,
                                     write_csv, write_json)


def test_parse_index_set():
    assert parse_index_set("1-4,9,10") == (1, 2, 3, 4, 9, 10)
    assert parse_index_set("") == ()
    assert parse_index_set(5) == (5,)
    assert parse_index_set((3, 1, 3)) == (1, 3)
    with pytest.raises(ValueError):
        parse_index_set("4-2")
    with pytest.raises(ValueError):
        parse_index_set("1,9", n=8)


@given(st.sets(st.integers(1, 64)))
def test_format_index_set_is_parsed_back(items):
    assert parse_index_set(format_index_set(items)) == tuple(sorted(items))


def test_rationals_and_labels():
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(7) == "7/1"
    assert parse_rational("7/1") == 7 and isinstance(parse_rational("7/1"), int)
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert label_key((1, 2, 5)) == "1,2,5"
    assert parse_label_key("5,1,2") == (1, 2, 5)


def test_derive_seed_is_pure():
    assert derive_seed(0, 3) == derive_seed(0, 3)
    assert len({derive_seed(0, t) for t in range(50)}) == 50
    assert derive_seed(1, 0) != derive_seed(0, 1)


def test_artifacts(tmp_path):
    path = tmp_path / "a.json"
    write_json(path, {"b": 1, "a": [1, 2]})
    text = path.read_text()
    assert text.endswith("\n") and text.index('"a"') < text.index('"b"')
    assert read_json(path) == {"a": [1, 2], "b": 1}

    csv = tmp_path / "a.csv"
    write_csv(csv, pd.DataFrame({"rank": [4, 5]}), {"seed": 3, "command": "rank"})
    assert csv.read_text().splitlines() == ["# command=rank seed=3", "rank", "4", "5"]


def test_log_levels():
    set_log_level("Debug")
    assert mtLogger.level == 10
    set_log_level("all")
    assert mtLogger.level == 1
    set_log_level(30)
    assert mtLogger.level == 30
    with pytest.raises(ValueError):
        set_log_level("verbose")
    set_log_level("info")


def test_logger_ignores_the_environment(monkeypatch):
    monkeypatch.setenv("MIXTREE_LOG_LEVEL", "chatty")
    importlib.reload(logger)
    assert logger.mtLogger.level == 20
    assert len(logger.mtLogger.handlers) == 1
