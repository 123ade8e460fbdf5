import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from envrig.errors import DumpFormatError
from envrig.records import (
    DumpHeader,
    StepRecord,
    parse_dump,
    parse_header,
    parse_record,
    serialize_header,
    serialize_record,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_record_wire_format_is_pinned():
    record = StepRecord(t=0.01, obs=(0.0, -0.5), act=(1.0,), rew=1.0, done=False)
    assert (
        serialize_record(record)
        == '{"t":0.01,"obs":[0.0,-0.5],"act":[1.0],"rew":1.0,"done":false}'
    )


@given(
    st.floats(min_value=0, max_value=1e6, allow_nan=False),
    st.lists(finite, max_size=6),
    st.lists(finite, max_size=3),
    finite,
    st.booleans(),
)
def test_record_round_trip_full_precision(t, obs, act, rew, done):
    record = StepRecord(t=t, obs=tuple(obs), act=tuple(act), rew=rew, done=done)
    assert parse_record(serialize_record(record), 1) == record


def test_negative_zero_round_trips():
    record = StepRecord(t=0.0, obs=(-0.0,), act=(), rew=-0.0, done=False)
    back = parse_record(serialize_record(record), 1)
    assert math.copysign(1.0, back.obs[0]) == -1.0


def test_non_finite_values_are_rejected():
    with pytest.raises(DumpFormatError):
        StepRecord(t=0.0, obs=(math.nan,), act=(), rew=0.0, done=False)
    with pytest.raises(DumpFormatError):
        StepRecord(t=math.inf, obs=(), act=(), rew=0.0, done=False)


def test_header_round_trip():
    header = DumpHeader(
        env="cartpole-balance", engine="euler-si", seed=42, physics_dt=1e-3, agent_period=0.01
    )
    assert parse_header(serialize_header(header)) == header


def test_parse_dump_reports_line_numbers():
    header = serialize_header(
        DumpHeader("cartpole-balance", "rk4", 1, 1e-3, 0.01)
    )
    good = serialize_record(StepRecord(0.01, (0.0,), (0.0,), 1.0, False))
    with pytest.raises(DumpFormatError) as err:
        parse_dump(header + "\n" + good + "\n" + good[:20])
    assert err.value.line_number == 3
    assert "line 3" in str(err.value)


def test_parse_dump_rejects_missing_keys_and_bad_done():
    header = serialize_header(DumpHeader("x", "rk4", 1, 1e-3, 0.01))
    with pytest.raises(DumpFormatError):
        parse_dump(header + "\n" + '{"t":0.0,"obs":[],"act":[]}')
    with pytest.raises(DumpFormatError):
        parse_dump(header + "\n" + '{"t":0.0,"obs":[],"act":[],"rew":0.0,"done":1}')


def test_parse_dump_rejects_empty_and_non_object():
    with pytest.raises(DumpFormatError):
        parse_dump("")
    with pytest.raises(DumpFormatError):
        parse_dump("[1,2,3]")


def test_header_missing_key_is_named():
    with pytest.raises(DumpFormatError) as err:
        parse_header('{"env":"a","engine":"rk4","seed":1,"physics_dt":0.001}')
    assert "agent_period" in str(err.value)
