"""Table-embedding characterization: measure kernels, reference embedders and
the embedding interchange format."""

import json

from ._observatory import (
    EmbeddingRecord,
    Manifest,
    MeasureError,
    ParseError,
    Table,
    ValidationError,
    containment,
    cosine,
    discover_unary_fds,
    embed_column,
    jaccard,
    mcv_az,
    measure_embeddings,
    measure_generated,
    multiset_jaccard,
    parse_table,
    spearman,
    validate_jsonl,
)


def measure(property, corpus, **kwargs):
    """Runs a property with an in-memory reference embedder; returns a dict."""
    return json.loads(measure_generated(property, str(corpus), **kwargs))


def write_embeddings(out_dir, records, manifest):
    """Writes records and manifest in the layout `observatory measure` reads."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = "".join(r.to_json_line() + "\n" for r in records)
    validate_jsonl(text)
    (out / "embeddings.jsonl").write_text(text)
    (out / "manifest.json").write_text(manifest.to_json())


__all__ = [name for name in dir() if not name.startswith("_")]
