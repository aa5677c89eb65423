import io
import json

import pytest
from hypothesis import given

from xstates.io import StateFileError, parse_states, write_states_csv, write_states_jsonl, xstate_from_json
from xstates.state import BELL_PHI_PLUS, MAXIMALLY_MIXED, XStateError

from conftest import xstates


def test_json_object_array_and_lines():
    obj = json.dumps(BELL_PHI_PLUS.to_json())
    assert parse_states(obj) == [BELL_PHI_PLUS]
    assert parse_states(json.dumps(BELL_PHI_PLUS.to_json(), indent=2)) == [BELL_PHI_PLUS]
    arr = json.dumps([BELL_PHI_PLUS.to_json(), MAXIMALLY_MIXED.to_json()])
    assert parse_states(arr) == [BELL_PHI_PLUS, MAXIMALLY_MIXED]
    lines = obj + "\n\n# comment\n" + json.dumps(MAXIMALLY_MIXED.to_json()) + "\n"
    assert parse_states(lines) == [BELL_PHI_PLUS, MAXIMALLY_MIXED]


def test_missing_coherences_default_to_zero():
    assert xstate_from_json({"d": [0.25] * 4}) == MAXIMALLY_MIXED


def test_json_errors_carry_line_numbers():
    text = json.dumps(MAXIMALLY_MIXED.to_json()) + "\n" + '{"d": [0.5, 0, 0, 0.5], "c14": {"re": 0.6}}\n'
    with pytest.raises(StateFileError) as info:
        parse_states(text)
    assert info.value.lineno == 2 and "line 2" in str(info.value)
    with pytest.raises(StateFileError) as info:
        parse_states('{"d": [0.25, 0.25, 0.25, 0.25]}\n{"d": [0.25, \n')
    assert info.value.lineno == 2


@pytest.mark.parametrize("obj", [{"d": [0.5, 0.5]}, {"x": 1}, {"d": [0.25] * 4, "c14": "big"},
                                 {"d": [0.25] * 4, "extra": 0}])
def test_json_schema_errors(obj):
    with pytest.raises(XStateError):
        xstate_from_json(obj)


def test_csv_rows_with_header_and_comments():
    text = "# fixture\nd1,d2,d3,d4,c14re,c14im,c23re,c23im\n0.5,0,0,0.5,0.5,0,0,0\n\n0.25,0.25,0.25,0.25,0,0,0,0\n"
    assert parse_states(text) == [BELL_PHI_PLUS, MAXIMALLY_MIXED]


@pytest.mark.parametrize("text,line", [
    ("0.25,0.25,0.25,0.25,0,0,0,0\n0.25,0.25,0.25,0.25,0,0,0\n", 2),
    ("0.25,0.25,0.25,0.25,0,0,0,x\n", 1),
    ("0.25,0.25,0.25,0.25,0,0,0,0\n0.3,0.3,0.3,0.3,0,0,0,0\n", 2),
    ("0.25,0.25,0.25,0.25,0,0,0,0\n0.25,nan,0.25,0.25,0,0,0,0\n", 2),
])
def test_csv_errors_carry_line_numbers(text, line):
    with pytest.raises(StateFileError) as info:
        parse_states(text)
    assert info.value.lineno == line


def test_header_records_are_skipped():
    text = '{"record": "header", "command": "sample"}\n' + json.dumps(MAXIMALLY_MIXED.to_json())
    assert parse_states(text) == [MAXIMALLY_MIXED]


def test_unknown_format():
    with pytest.raises(ValueError):
        parse_states("", fmt="xml")


@given(xstates())
def test_writers_round_trip(x):
    for writer in (write_states_csv, write_states_jsonl):
        buf = io.StringIO()
        writer([x, x], buf)
        assert parse_states(buf.getvalue()) == [x, x]
