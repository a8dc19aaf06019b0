"""Binary field container: bit-exact round trips and precise failure offsets.

Corrupt files are built by byte surgery on a freshly written valid file,
so every expected offset is computed from the same layout the writer
produced rather than hard-coded.
"""

import json
import struct

import numpy as np
import pytest

from regscan.fieldio import CANARY, FieldFormatError, read_field, write_field
from regscan.grid import Box3, SpaceTimeField, VectorGrid

MAGIC = b"#rsf 1\n"


def small_field(rng, frames=2, n=(4, 5, 3)):
    box = Box3((-0.5, 0.0, 1.0), (0.5, 2.0, 1.75), n)
    times = tuple(0.1 * k for k in range(frames))
    return SpaceTimeField(times, [
        VectorGrid.from_array(box, rng.normal(size=(3, *n))) for _ in times])


def payload_offset(raw):
    return raw.find(b"\n", len(MAGIC)) + 1 + 4


def test_round_trip_is_bit_exact(tmp_path, rng):
    f = small_field(rng)
    path = tmp_path / "field.rsf"
    write_field(path, f)
    g = read_field(path)
    assert np.array_equal(g.times, f.times)
    assert g.box == f.box
    for a, b in zip(g.frames, f.frames):
        assert np.array_equal(a.stack(), b.stack())


def test_single_vector_grid_becomes_one_frame(tmp_path, rng):
    f = small_field(rng, frames=1)
    path = tmp_path / "frame.rsf"
    write_field(path, f.frames[0])
    g = read_field(path)
    assert np.array_equal(g.times, [0.0])
    assert np.array_equal(g.frames[0].stack(), f.frames[0].stack())


def test_header_is_one_json_line(tmp_path, rng):
    path = tmp_path / "field.rsf"
    write_field(path, small_field(rng))
    raw = path.read_bytes()
    assert raw.startswith(MAGIC)
    header = json.loads(raw[len(MAGIC):raw.find(b"\n", len(MAGIC))])
    assert header["components"] == 3
    assert header["times"] == [0.0, 0.1]


def valid_bytes(tmp_path, rng):
    path = tmp_path / "good.rsf"
    write_field(path, small_field(rng))
    return path.read_bytes()


def reject(tmp_path, raw):
    path = tmp_path / "bad.rsf"
    path.write_bytes(raw)
    with pytest.raises(FieldFormatError) as err:
        read_field(path)
    return err.value


def test_bad_magic_reports_offset_zero(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    err = reject(tmp_path, b"#rsg 1\n" + raw[len(MAGIC):])
    assert err.offset == 0
    assert str(err).startswith("format error at byte 0:")
    assert "bad magic" in str(err)


def test_corrupt_header_json(tmp_path, rng):
    err = reject(tmp_path, MAGIC + b'{"lo": [0, 0, 0\n' + b"\0" * 16)
    assert err.offset == len(MAGIC)
    assert "not valid JSON" in str(err)


def test_missing_header_key(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    nl = raw.find(b"\n", len(MAGIC))
    header = json.loads(raw[len(MAGIC):nl])
    del header["times"]
    doctored = (MAGIC + json.dumps(header, sort_keys=True).encode() + b"\n"
                + raw[nl + 1:])
    err = reject(tmp_path, doctored)
    assert "missing field 'times'" in str(err)


def test_unsupported_component_count(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    err = reject(tmp_path, raw.replace(b'"components": 3', b'"components": 2'))
    assert "unsupported component count 2" in str(err)
    assert err.offset == len(MAGIC)


def test_file_truncated_before_canary(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    nl = raw.find(b"\n", len(MAGIC))
    err = reject(tmp_path, raw[:nl + 3])
    assert "before the endianness canary" in str(err)
    assert err.offset == nl + 1


def test_byte_swapped_canary_names_the_endianness(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    pos = payload_offset(raw) - 4
    swapped = raw[:pos] + struct.pack(">I", CANARY) + raw[pos + 4:]
    err = reject(tmp_path, swapped)
    assert "written big-endian" in str(err)
    assert err.offset == pos


def test_garbage_canary(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    pos = payload_offset(raw) - 4
    err = reject(tmp_path, raw[:pos] + b"\xde\xad\xbe\xef" + raw[pos + 4:])
    assert "bad canary" in str(err)


def test_truncated_payload_reports_both_sizes(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    err = reject(tmp_path, raw[:-8])
    expected = len(raw) - payload_offset(raw)
    assert f"payload holds {expected - 8} bytes" in str(err)
    assert f"header promises {expected}" in str(err)
    assert err.offset == payload_offset(raw)


def test_non_finite_rejected_on_write(tmp_path, rng):
    f = small_field(rng)
    f.frames[1].components[2].data[0, 0, 0] = np.nan
    with pytest.raises(FieldFormatError, match="non-finite"):
        write_field(tmp_path / "nan.rsf", f)


def test_non_finite_rejected_on_read_with_value_offset(tmp_path, rng):
    raw = valid_bytes(tmp_path, rng)
    base = payload_offset(raw)
    bad_at = base + 5 * 8                      # sixth value of the payload
    doctored = raw[:bad_at] + struct.pack("<d", np.inf) + raw[bad_at + 8:]
    err = reject(tmp_path, doctored)
    assert "non-finite value in frame 0 component 0" in str(err)
    assert err.offset == bad_at
