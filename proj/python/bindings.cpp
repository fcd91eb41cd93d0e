#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "observatory/error.hpp"
#include "observatory/fd.hpp"
#include "observatory/measures.hpp"
#include "observatory/pipeline.hpp"
#include "observatory/refembed.hpp"

namespace py = pybind11;
using namespace observatory;

namespace {

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::kCsvWithHeader;
  if (name == "csv-headerless") return TableFormat::kCsvHeaderless;
  if (name == "jsonl") return TableFormat::kJsonlRows;
  throw ValidationError("unknown table format '" + name + "'");
}

// Validates JSONL embedding text; returns (record count, dim).
std::pair<std::size_t, std::size_t> validate_jsonl(const std::string& text) {
  std::istringstream in(text);
  const EmbeddingSet set = read_records(in);
  return {set.size(), set.dim()};
}

MeasureOptions measure_options(const std::string& property, std::size_t k, std::uint64_t seed,
                               const std::string& norm, const std::string& overlap,
                               std::size_t threads) {
  MeasureOptions m;
  m.property = parse_property(property);
  m.k = k;
  m.seed = seed;
  m.norm = parse_norm(norm);
  m.overlap = parse_overlap_kind(overlap);
  m.threads = threads;
  return m;
}

}  // namespace

PYBIND11_MODULE(_observatory, m) {
  m.doc() = "Table-embedding characterization kernels and pipeline";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError",
                                                            PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<MeasureError>(m, "MeasureError", PyExc_ArithmeticError);

  py::class_<Table>(m, "Table")
      .def(py::init<std::string, std::optional<Table::Row>, std::vector<Table::Row>>(),
           py::arg("id"), py::arg("headers"), py::arg("rows"))
      .def_property_readonly("id", &Table::id)
      .def_property_readonly("headers", &Table::headers)
      .def_property_readonly("rows", &Table::rows)
      .def_property_readonly("ncols", &Table::ncols)
      .def_property_readonly("nrows", &Table::nrows)
      .def("cell", &Table::cell);
  m.def("parse_table",
        [](const std::string& text, const std::string& format, std::string id) {
          return parse_table(text, parse_format(format), std::move(id));
        },
        py::arg("text"), py::arg("format") = "csv", py::arg("id") = "table");

  py::class_<EmbeddingRecord>(m, "EmbeddingRecord")
      .def(py::init<>())
      .def_readwrite("model_id", &EmbeddingRecord::model_id)
      .def_readwrite("table_id", &EmbeddingRecord::table_id)
      .def_readwrite("variant_id", &EmbeddingRecord::variant_id)
      .def_property(
          "level", [](const EmbeddingRecord& r) { return std::string(to_string(r.level)); },
          [](EmbeddingRecord& r, const std::string& s) { r.level = parse_level(s); })
      .def_readwrite("target", &EmbeddingRecord::target)
      .def_readwrite("vector", &EmbeddingRecord::vector)
      .def_readwrite("meta", &EmbeddingRecord::meta)
      .def("to_json_line", &record_to_json_line)
      .def_static("from_json_line", [](const std::string& line) {
        return record_from_json_line(line, 1);
      });
  m.def("validate_jsonl", &validate_jsonl, py::arg("text"),
        "Validate embedding JSONL text; returns (records, dim).");

  py::class_<Manifest>(m, "Manifest")
      .def(py::init<>())
      .def_readwrite("property", &Manifest::property)
      .def_readwrite("models", &Manifest::models)
      .def_readwrite("dim", &Manifest::dim)
      .def_readwrite("corpus", &Manifest::corpus)
      .def_readwrite("corpus_dir", &Manifest::corpus_dir)
      .def_readwrite("corpus_hash", &Manifest::corpus_hash)
      .def_readwrite("seed", &Manifest::seed)
      .def_readwrite("generator", &Manifest::generator)
      .def_readwrite("params", &Manifest::params)
      .def("to_json", &Manifest::to_json)
      .def_static("from_json", [](const std::string& s) { return Manifest::from_json(s); });

  m.def("cosine", [](const Vector& u, const Vector& v) { return cosine(u, v); });
  m.def("mcv_az", [](const std::vector<Vector>& xs) { return mcv_az(xs); });
  m.def("spearman",
        [](const std::vector<std::pair<double, double>>& p) { return spearman(p); });
  using Strings = std::vector<std::string>;
  m.def("containment", [](const Strings& q, const Strings& c) { return containment(q, c); });
  m.def("jaccard", [](const Strings& q, const Strings& c) { return jaccard(q, c); });
  m.def("multiset_jaccard",
        [](const Strings& q, const Strings& c) { return multiset_jaccard(q, c); });
  m.def("discover_unary_fds", [](const Table& t) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& fd : discover_unary_fds(t)) out.emplace_back(fd.x_col, fd.y_col);
    return out;
  });

  m.def("embed_column",
        [](const Strings& values, std::optional<std::string> header, std::size_t dim,
           std::uint64_t seed) {
          EmbedderConfig cfg;
          cfg.dim = dim;
          cfg.seed = seed;
          cfg.validate();
          std::optional<std::string_view> h;
          if (header) h = *header;
          return embed_column_cf(values, h, cfg);
        },
        py::arg("values"), py::arg("header") = py::none(), py::arg("dim") = 64,
        py::arg("seed") = 42);

  m.def("measure_generated",
        [](const std::string& property, const fs::path& corpus_dir, const std::string& model,
           std::size_t dim, double alpha, std::size_t budget, std::size_t k,
           std::uint64_t seed, const std::string& norm, const std::string& overlap,
           std::size_t threads) {
          const Corpus corpus = load_corpus(corpus_dir);
          EmbedOptions e;
          e.model = model;
          e.cfg.dim = dim;
          e.cfg.alpha = alpha;
          e.permutation_budget = budget;
          e.seed = seed;
          e.threads = threads;
          const MeasureOptions mo = measure_options(property, k, seed, norm, overlap, threads);
          py::gil_scoped_release release;
          return run_property(corpus, e, mo).to_json();
        },
        py::arg("property"), py::arg("corpus"), py::arg("model") = "ref-cf",
        py::arg("dim") = 64, py::arg("alpha") = 0.5, py::arg("budget") = 1000,
        py::arg("k") = 10, py::arg("seed") = 42, py::arg("norm") = "l2",
        py::arg("overlap") = "containment", py::arg("threads") = 1,
        "Embed the corpus with a reference model and return the report JSON.");

  m.def("measure_embeddings",
        [](const std::string& property, const fs::path& emb,
           std::optional<fs::path> emb2, std::optional<fs::path> corpus_dir, std::size_t k,
           std::uint64_t seed, const std::string& norm, const std::string& overlap,
           std::size_t threads) {
          const LoadedEmbeddings first = load_embeddings(emb);
          std::optional<LoadedEmbeddings> second;
          if (emb2) second = load_embeddings(*emb2);
          MeasureOptions mo = measure_options(property, k, seed, norm, overlap, threads);
          mo.corpus_dir = corpus_dir;
          py::gil_scoped_release release;
          return run_property(first, second ? &*second : nullptr, mo).to_json();
        },
        py::arg("property"), py::arg("emb"), py::arg("emb2") = py::none(),
        py::arg("corpus") = py::none(), py::arg("k") = 10, py::arg("seed") = 42,
        py::arg("norm") = "l2", py::arg("overlap") = "containment", py::arg("threads") = 1,
        "Measure an embedding directory and return the report JSON.");
}
