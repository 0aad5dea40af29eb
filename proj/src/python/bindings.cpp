#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "starsketch/divergence.hpp"
#include "starsketch/generators.hpp"
#include "starsketch/harness.hpp"
#include "starsketch/hashing.hpp"
#include "starsketch/histogram.hpp"
#include "starsketch/ingest.hpp"
#include "starsketch/sketch.hpp"
#include "starsketch/star_metric.hpp"

namespace py = pybind11;
using namespace starsketch;

namespace {

ProbabilityVector to_pv(const std::vector<double>& v) { return ProbabilityVector(v); }

std::vector<ItemId> to_items(const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& a) {
    const auto view = a.unchecked<1>();
    std::vector<ItemId> out(static_cast<std::size_t>(view.shape(0)));
    for (py::ssize_t i = 0; i < view.shape(0); ++i) out[static_cast<std::size_t>(i)] = view(i);
    return out;
}

py::array_t<std::uint64_t> to_array(const std::vector<ItemId>& items) {
    py::array_t<std::uint64_t> out(static_cast<py::ssize_t>(items.size()));
    std::copy(items.begin(), items.end(), out.mutable_data());
    return out;
}

py::dict result_dict(const StarMetricResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["mode"] = to_string(r.mode);
    d["k"] = r.k;
    d["evaluated_partitions"] = r.evaluated_partitions;
    if (r.mode == StarMode::exact) {
        d["argmax"] = r.argmax_partition().cells();
    } else {
        d["argmax"] = r.argmax_row();
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Paired counter-matrix sketches and divergences between streams";
    m.attr("__version__") = kVersion;

    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");
    py::register_exception<FamilyMismatch>(m, "FamilyMismatch");
    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SandwichViolation>(m, "SandwichViolation");

    // hashing
    m.attr("MERSENNE_61") = kMersenne61;
    py::class_<HashFamily>(m, "HashFamily")
        .def_static("create", &HashFamily::create, py::arg("t"), py::arg("k"), py::arg("seed"),
                    py::arg("prime") = kMersenne61)
        .def_static("parse", &HashFamily::parse)
        .def_property_readonly("rows", &HashFamily::size)
        .def_property_readonly("columns", &HashFamily::range)
        .def_property_readonly("prime", &HashFamily::prime)
        .def_property_readonly("seed", &HashFamily::seed)
        .def("serialize", &HashFamily::serialize)
        .def("fingerprint", &HashFamily::fingerprint)
        .def("hash", [](const HashFamily& f, std::size_t row, ItemId x) { return f[row](x); })
        .def("parameters", [](const HashFamily& f) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
            for (const auto& h : f.functions()) out.emplace_back(h.a(), h.b());
            return out;
        })
        .def(py::self == py::self);
    m.def("new_family", &new_family, py::arg("t"), py::arg("k"), py::arg("universe_bound"), py::arg("seed"),
          py::arg("prime") = kMersenne61);
    m.def("dimensions_for", [](double eps, double delta) {
        const auto d = dimensions_for(eps, delta);
        return py::make_tuple(d.k, d.t);
    });

    // histogram / partitions
    m.def("stirling", &stirling);
    m.def("enumerate_partitions", [](std::size_t n, std::size_t k, std::uint64_t budget) {
        std::vector<std::vector<std::size_t>> out;
        PartitionEnumerator e(n, k, budget);
        do {
            out.emplace_back(e.labels().begin(), e.labels().end());
        } while (e.next());
        return out;
    }, py::arg("n"), py::arg("k"), py::arg("budget") = kDefaultPartitionBudget,
       "Restricted growth strings of every k-cell partition of range(n).");
    m.def("aggregate", [](const std::vector<double>& p, const std::vector<std::size_t>& labels) {
        const auto agg = aggregate(to_pv(p), Partition::from_labels(labels));
        return std::vector<double>(agg.begin(), agg.end());
    });

    // divergences
    m.def("divergence_names", &divergence_names);
    m.def("divergence", [](const std::string& name, const std::vector<double>& p, const std::vector<double>& q) {
        return divergence_by_name(name)(to_pv(p), to_pv(q));
    }, py::arg("name"), py::arg("p"), py::arg("q"));
    m.def("flags", [](const std::string& name) {
        const auto& f = divergence_by_name(name).flags;
        py::dict d;
        d["nonneg"] = f.nonneg;
        d["identity"] = f.identity;
        d["symmetric"] = f.symmetric;
        d["triangle"] = f.triangle;
        d["f_div"] = f.f_div;
        d["bregman"] = f.bregman;
        d["monotone"] = f.monotone;
        return d;
    });

    // sketch
    py::class_<SketchMatrix>(m, "Sketch")
        .def(py::init<HashFamily>())
        .def_property_readonly("family", &SketchMatrix::family)
        .def_property_readonly("rows", &SketchMatrix::rows)
        .def_property_readonly("columns", &SketchMatrix::columns)
        .def_property_readonly("total", &SketchMatrix::total)
        .def("update", [](SketchMatrix& s, ItemId x) { s.update(x); })
        .def("update_many", [](SketchMatrix& s, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& a) {
            const auto items = to_items(a);
            py::gil_scoped_release release;
            s.update(items);
        })
        .def("merge", &SketchMatrix::merge)
        .def("row", [](const SketchMatrix& s, std::size_t i) {
            if (i >= s.rows()) throw py::index_error("row out of range");
            const auto r = s.row(i);
            return std::vector<std::uint64_t>(r.begin(), r.end());
        })
        .def("counters", [](const SketchMatrix& s) {
            py::array_t<std::uint64_t> out({static_cast<py::ssize_t>(s.rows()), static_cast<py::ssize_t>(s.columns())});
            std::copy(s.counters().begin(), s.counters().end(), out.mutable_data());
            return out;
        })
        .def("save", py::overload_cast<const std::filesystem::path&>(&SketchMatrix::save, py::const_))
        .def_static("load", py::overload_cast<const std::filesystem::path&>(&SketchMatrix::load))
        .def(py::self == py::self);

    // star metric
    m.def("exact_star_metric", [](const std::string& phi, const std::vector<double>& p, const std::vector<double>& q,
                                  std::size_t k, std::uint64_t budget, unsigned threads) {
        StarMetricResult r;
        {
            const auto pp = to_pv(p), qq = to_pv(q);
            const auto& spec = divergence_by_name(phi);
            py::gil_scoped_release release;
            r = exact_star_metric(spec, pp, qq, k, {budget, threads});
        }
        return result_dict(r);
    }, py::arg("phi"), py::arg("p"), py::arg("q"), py::arg("k"), py::arg("budget") = kDefaultPartitionBudget,
       py::arg("threads") = 1);
    m.def("sketch_star_metric", [](const std::string& phi, const SketchMatrix& a, const SketchMatrix& b, double alpha) {
        return result_dict(sketch_star_metric(divergence_by_name(phi), a, b, alpha));
    }, py::arg("phi"), py::arg("a"), py::arg("b"), py::arg("alpha_smoothing") = 0.0);
    m.def("reference_distance", [](const std::string& phi, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& a,
                                   const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& b, double alpha) {
        const auto ia = to_items(a), ib = to_items(b);
        return reference_distance(divergence_by_name(phi), from_stream(ia), from_stream(ib), alpha);
    }, py::arg("phi"), py::arg("a"), py::arg("b"), py::arg("alpha_smoothing") = 0.0);
    m.def("preservation_suite", [](const std::string& phi, std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed) {
        const auto report = preservation_suite(divergence_by_name(phi), n, k, trials, seed);
        py::dict out;
        for (const auto& c : report.checks) {
            py::dict d;
            d["status"] = to_string(c.status);
            d["cases"] = c.cases;
            d["violations"] = c.violations;
            d["witness"] = c.witness;
            out[py::str(c.name)] = d;
        }
        return out;
    }, py::arg("phi"), py::arg("n"), py::arg("k"), py::arg("trials"), py::arg("seed") = 1);

    // generators
    m.def("pmf", [](const std::string& family, std::uint64_t n) {
        const auto p = pmf(DistributionFamily::parse(family, n));
        return std::vector<double>(p.begin(), p.end());
    }, py::arg("family"), py::arg("n") = 0);
    m.def("sample_stream", [](const std::string& family, std::uint64_t n, std::uint64_t length, std::uint64_t seed) {
        return to_array(sample_stream(DistributionFamily::parse(family, n), length, seed));
    }, py::arg("family"), py::arg("n"), py::arg("m"), py::arg("seed"));
    m.def("describe_family", [](const std::string& family, std::uint64_t n) {
        return DistributionFamily::parse(family, n).describe();
    }, py::arg("family"), py::arg("n") = 0);

    // ingest
    m.def("parse_clf_line", [](const std::string& line) -> py::object {
        const auto r = parse_clf_line(line);
        if (!r.valid) return py::none();
        return py::str(r.request_target);
    });
    m.def("target_to_item", [](const std::string& t) { return target_to_item(t); });
    m.def("ingest_clf_file", [](const std::filesystem::path& path) {
        const auto r = ingest_clf_file(path);
        py::dict stats;
        stats["items"] = r.stats.items;
        stats["distinct"] = r.stats.distinct;
        stats["max_frequency"] = r.stats.max_frequency;
        stats["malformed"] = r.stats.malformed;
        return py::make_tuple(to_array(r.items), stats);
    });

    // harness
    m.def("run_plan", [](const std::string& plan_text) {
        std::istringstream in(plan_text);
        const auto plan = ExperimentPlan::parse(in);
        std::vector<ResultRow> rows;
        {
            py::gil_scoped_release release;
            rows = run_plan(plan);
        }
        std::ostringstream out;
        write_results_csv(out, rows);
        return out.str();
    }, "Runs a plan given as text and returns results.csv content.");
    m.def("summarize", [](const std::string& results_csv) {
        std::istringstream in(results_csv);
        std::ostringstream out;
        write_summary_csv(out, sweep_summary(read_results_csv(in)));
        return out.str();
    });
}
