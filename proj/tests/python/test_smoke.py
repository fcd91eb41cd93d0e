import json
import math
import os
import pathlib

import pytest

import observatory as ob

DATA = pathlib.Path(os.environ.get("OBSERVATORY_DATA_DIR", pathlib.Path(__file__).parents[2] / "data"))


def test_kernels():
    assert ob.mcv_az([[1, 0], [1, 2]]) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert ob.cosine([1, 1], [1, 0]) == pytest.approx(math.sqrt(0.5))
    assert ob.spearman([(1, 2), (2, 4), (3, 9)]) == 1.0
    assert ob.containment(["a", "b"], ["b", "c", "c"]) == 0.5
    assert ob.jaccard(["a", "b"], ["b", "c"]) == pytest.approx(1 / 3)
    assert ob.multiset_jaccard(["a", "b"], ["b", "a"]) == 0.5


def test_errors_map_to_python_exceptions():
    with pytest.raises(ob.MeasureError):
        ob.cosine([1, 0], [0, 0])
    with pytest.raises(ob.ParseError):
        ob.parse_table("a,b\n1\n")
    assert issubclass(ob.ParseError, ValueError)


def test_fd_discovery_on_fixture():
    t = ob.parse_table((DATA / "fixtures" / "residence.csv").read_text(), "csv", "residence")
    fds = ob.discover_unary_fds(t)
    assert (2, 3) in fds and (3, 2) not in fds


def test_adapter_output_round_trips(tmp_path):
    # The path an external adapter takes: build records, write, measure.
    records = []
    for variant, values in enumerate([["x", "y", "z"], ["z", "x", "y"]]):
        r = ob.EmbeddingRecord()
        r.model_id, r.table_id, r.variant_id = "toy", "t", variant
        r.level, r.target = "column", [0]
        r.vector = ob.embed_column(values, "h", dim=8)
        records.append(r)
    back = ob.EmbeddingRecord.from_json_line(records[1].to_json_line())
    assert back.vector == records[1].vector and back.level == "column"

    manifest = ob.Manifest()
    manifest.property, manifest.models, manifest.dim = "row_order", ["toy"], 8
    manifest.corpus, manifest.generator = "toy", "adapter"
    ob.write_embeddings(tmp_path, records, manifest)
    assert ob.validate_jsonl((tmp_path / "embeddings.jsonl").read_text()) == (2, 8)
    assert ob.Manifest.from_json((tmp_path / "manifest.json").read_text()).models == ["toy"]

    report = json.loads(ob.measure_embeddings("row-order", str(tmp_path)))
    assert report["scalars"]["mcv_max"] == 0.0


def test_invalid_jsonl_is_rejected():
    with pytest.raises(ob.ValidationError):
        ob.validate_jsonl('{"model_id": "m"}\n')


def test_generated_measure_is_deterministic():
    a = ob.measure("col-order", DATA / "corpus", model="ref-ctx", budget=20, threads=1)
    b = ob.measure("col-order", DATA / "corpus", model="ref-ctx", budget=20, threads=4)
    assert a == b
    assert a["property"] == "col-order" and a["per_item"]
