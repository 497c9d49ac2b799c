import io
import json
import math

import numpy as np
import pytest

from stochgram.expr import ExpressionError
from stochgram.model_io import (
    GramianSweepRecord,
    SchemaError,
    ValidationError,
    dump_system,
    load_system,
    read_sweep_csv,
    sweep_header,
    system_from_document,
    write_sweep_csv,
)
from stochgram.system import TimeInvariantLinearSystem, TimeVaryingLinearSystem

from conftest import fig2_system, random_ltv

FIG2_DOC = {
    "kind": "ltv",
    "n": 2,
    "p": 1,
    "N": 30,
    "phi": [[2, "-1+sin(k*pi/18)"], ["cos(k*pi/18)", 1]],
    "c": [[1, 0]],
    "q": [[3.6e-2, 1.2e-2], [1.2e-2, 6e-2]],
    "r": [[0.1]],
}


def test_load_time_varying_document():
    sys = system_from_document(FIG2_DOC)
    assert isinstance(sys, TimeVaryingLinearSystem)
    assert sys.horizon == 30
    np.testing.assert_array_equal(sys.phi[0], [[2, -1], [1, 1]])
    ref = fig2_system()
    assert sys.equals(ref, rtol=1e-15)


def test_load_lti_document(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({"kind": "lti", "n": 2, "p": 1, "phi": [[1, -1], [0, 1]],
                                "c": [[1, 0]], "q": [[1, 0], [0, 1]], "r": [[1]]}))
    sys = load_system(path)
    assert isinstance(sys, TimeInvariantLinearSystem)
    np.testing.assert_array_equal(sys.phi, [[1, -1], [0, 1]])


def test_bundled_documents_load():
    from stochgram.experiments import bundled_system

    assert bundled_system("fig1_lti.json").q[0, 1] == -5e-18
    assert bundled_system("fig2_ltv.json").horizon == 30


def test_invalid_q_propagates_validation():
    doc = dict(FIG2_DOC, q=[[1, 2], [2, 1]])
    with pytest.raises(ValidationError) as info:
        system_from_document(doc)
    assert ("q", 0) in info.value.report.indices
    assert system_from_document(doc, check=False).q[0][0, 1] == 2.0


@pytest.mark.parametrize(
    "change",
    [
        {"kind": "dae"},
        {"n": 0},
        {"N": -1},
        {"c": [[1, 0, 0]]},
        {"phi": [[1, 2]]},
        {"r": [[0.1], [0.2, 0.3]]},
        {"extra": 1},
    ],
)
def test_schema_violations(change):
    with pytest.raises(SchemaError):
        system_from_document(dict(FIG2_DOC, **change))


def test_expression_error_in_document():
    with pytest.raises(ExpressionError) as info:
        system_from_document(dict(FIG2_DOC, phi=[[2, "-1+sin(k*pi/18"], [0, 1]]))
    assert info.value.offset is not None


def test_round_trip_is_exact():
    sys = system_from_document(FIG2_DOC)
    again = system_from_document(json.loads(json.dumps(dump_system(sys))))
    assert again.equals(sys)
    rnd = random_ltv(np.random.default_rng(9), n=3, p=2, N=5)
    assert system_from_document(json.loads(json.dumps(dump_system(rnd)))).equals(rnd)


def test_round_trip_without_process_noise():
    sys = random_ltv(np.random.default_rng(2), N=3).without_process_noise()
    doc = dump_system(sys)
    assert doc["q"] is None
    assert system_from_document(doc).equals(sys)


def _record(w, n=2):
    return GramianSweepRecord("recursive_dual", w, tuple(float(i + w) for i in range(n * n)), 0.0, 1.0, 5)


def test_csv_empty_is_header_only():
    buf = io.StringIO()
    write_sweep_csv([], buf, n=2)
    assert buf.getvalue() == ",".join(sweep_header(2)) + "\n"
    assert sweep_header(2) == [
        "method", "w", "f11", "f12", "f21", "f22", "sym_err", "min_eig", "wall_ns", "error"
    ]


def test_csv_one_record_and_round_trip():
    buf = io.StringIO()
    write_sweep_csv([_record(1)], buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 2
    back = read_sweep_csv(io.StringIO(buf.getvalue()))
    assert back == [_record(1)]


def test_csv_row_count():
    records = [
        GramianSweepRecord(m, w, (1.0, 0.0, 0.0, 1.0), 0.0, 1.0, 0)
        for m in ("direct_thm1", "direct_mform", "recursive_dual")
        for w in range(1, 32)
    ]
    buf = io.StringIO()
    write_sweep_csv(records, buf)
    assert len(buf.getvalue().splitlines()) == 1 + 93


def test_csv_error_rows_have_no_numbers():
    buf = io.StringIO()
    write_sweep_csv([GramianSweepRecord("direct_mform", 30, None, error="boom")], buf, n=2)
    row = buf.getvalue().splitlines()[1].split(",")
    assert row[0] == "direct_mform" and row[-1] == "boom"
    assert all(cell == "" for cell in row[2:8])
