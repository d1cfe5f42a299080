import logging

import pytest

from _levybsde.utils import deep_merge, parse_override_value, timer


@pytest.mark.parametrize(
    "args, expected",
    [
        ((), {}),
        (({"a": 1},), {"a": 1}),
        (({"a": {"b": 1, "c": [1]}}, {"a": {"c": [2]}}), {"a": {"b": 1, "c": [2]}}),
        (({"a": 1}, {"b": 2}, {"a": 3}), {"a": 3, "b": 2}),
        (({"a": {"b": 1}}, {"a": 2}), {"a": 2}),
        (
            ({"model": {"kind": "cgmy", "Y": 0.8}}, {"model": {"kind": "merton"}}),
            {"model": {"kind": "merton"}},
        ),
        (
            ({"model": {"kind": "cgmy", "Y": 0.8}}, {"model": {"kind": "cgmy", "C": 2.0}}),
            {"model": {"kind": "cgmy", "Y": 0.8, "C": 2.0}},
        ),
    ],
)
def test_deep_merge(args, expected):
    assert deep_merge(*args) == expected


def test_deep_merge_order():
    merged = deep_merge({"b": 1, "a": 1}, {"c": 1, "a": 2})
    assert list(merged) == ["b", "a", "c"]


@pytest.mark.parametrize(
    "value, expected",
    [
        ("0.8", 0.8),
        ("12", 12),
        ("true", True),
        ("abc", "abc"),
        ("", ""),
        ("[2, 4, 8]", [2, 4, 8]),
        ("{kind: merton, sigma: 0.5}", {"kind": "merton", "sigma": 0.5}),
    ],
)
def test_parse_override_value(value, expected):
    parsed = parse_override_value(value)
    assert parsed == expected
    assert type(parsed) is type(expected)


def test_timer_logs_duration(caplog):
    logger = logging.getLogger("levybsde-test")
    with caplog.at_level(logging.INFO, logger="levybsde-test"):
        with timer(logger, "sweep"):
            pass
    assert "sweep took" in caplog.text
