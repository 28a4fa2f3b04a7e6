#include "netautocorr/error.hpp"
#include "netautocorr/experiments.hpp"
#include "netautocorr/inference.hpp"
#include "netautocorr/io.hpp"
#include "netautocorr/simgen.hpp"
#include "netautocorr/stats.hpp"
#include "netautocorr/weights.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

namespace py = pybind11;
using namespace netautocorr;
using nlohmann::json;

namespace {

py::object to_python(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_python(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

CoordinateSet coordinates(const std::vector<std::vector<double>>& points) {
    return CoordinateSet::from_points(points);
}

PermutationPlan make_plan(std::size_t perms, std::uint64_t seed, const std::string& tail, std::size_t threads) {
    PermutationPlan p;
    p.replicates = perms;
    p.seed = seed;
    p.tail = parse_tail(tail);
    p.threads = threads;
    return p;
}

CategoricalSample sample(std::vector<std::size_t> labels, std::optional<std::vector<double>> proportions) {
    if (proportions) return CategoricalSample(std::move(labels), std::move(*proportions));
    return CategoricalSample(std::move(labels));
}

GraphModel graph_model(const std::string& model, std::size_t k, double beta, double p) {
    if (model == "watts_strogatz") return WattsStrogatz{k, beta};
    if (model == "erdos_renyi") return ErdosRenyi{p};
    throw InvalidInput("unknown network model '" + model + "'");
}

json default_config(const std::string& name) {
    if (name == "fig1") return to_json(SarCurveConfig{});
    if (name == "fig2") return to_json(CorrErrConfig{});
    if (name == "fig3") return to_json(ContinuousCoverageConfig{});
    if (name == "table1") return to_json(CategoricalCoverageConfig{});
    throw InvalidInput("unknown experiment '" + name + "'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Network autocorrelation statistics and simulation studies";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
    py::register_exception<DegenerateData>(m, "DegenerateData", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def_static(
            "from_edges",
            [](const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::size_t n) {
                return adjacency_from_edges(edges, n);
            },
            py::arg("edges"), py::arg("n"))
        .def_static(
            "from_dense",
            [](const std::vector<std::vector<double>>& rows) {
                std::vector<double> flat;
                for (const auto& r : rows) {
                    if (r.size() != rows.size()) throw InvalidInput("weight matrix must be square");
                    flat.insert(flat.end(), r.begin(), r.end());
                }
                return WeightMatrix::from_dense(rows.size(), flat);
            },
            py::arg("rows"))
        .def_static(
            "knn",
            [](const std::vector<std::vector<double>>& points, std::size_t k) {
                return knn_weights(coordinates(points), k);
            },
            py::arg("points"), py::arg("k"))
        .def_static(
            "inverse_distance",
            [](const std::vector<std::vector<double>>& points, double cap) {
                return inverse_distance_weights(coordinates(points), cap);
            },
            py::arg("points"), py::arg("cap") = 10.0)
        .def_static(
            "exp_decay",
            [](const std::vector<std::vector<double>>& points, double q) {
                return exp_decay_weights(coordinates(points), q);
            },
            py::arg("points"), py::arg("q"))
        .def_property_readonly("n", &WeightMatrix::size)
        .def_property_readonly("nnz", &WeightMatrix::nnz)
        .def_property_readonly("symmetric", &WeightMatrix::is_symmetric)
        .def("at", &WeightMatrix::at)
        .def("to_dense",
             [](const WeightMatrix& w) {
                 const auto flat = w.to_dense();
                 std::vector<std::vector<double>> rows(w.size());
                 for (std::size_t i = 0; i < w.size(); ++i)
                     rows[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * w.size()),
                                    flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * w.size()));
                 return rows;
             })
        .def("row_normalized", [](const WeightMatrix& w) { return row_normalize(w); })
        .def("symmetrized", &WeightMatrix::symmetrized)
        .def("summary", [](const WeightMatrix& w) { return to_python(to_json(weight_summary(w))); })
        .def(
            "diagnostics",
            [](const WeightMatrix& w, double threshold) {
                return to_python(to_json(normality_diagnostics(w, threshold)));
            },
            py::arg("threshold") = 0.1)
        .def("__eq__", [](const WeightMatrix& a, const WeightMatrix& b) { return a == b; })
        .def("__repr__", [](const WeightMatrix& w) {
            return "<WeightMatrix n=" + std::to_string(w.size()) + " nnz=" + std::to_string(w.nnz()) + ">";
        });

    m.def("morans_i", [](const std::vector<double>& y, const WeightMatrix& w) { return morans_i(y, w); },
          py::arg("y"), py::arg("w"));
    m.def(
        "moran_moments",
        [](const std::vector<double>& y, const WeightMatrix& w, const std::string& null) {
            const auto mm = moran_moments(weight_summary(w), y,
                                          null == "normality" ? MoranNull::normality : MoranNull::randomization);
            return py::dict(py::arg("mean") = mm.mean, py::arg("variance") = mm.variance);
        },
        py::arg("y"), py::arg("w"), py::arg("null") = "randomization");
    m.def(
        "phi",
        [](std::vector<std::size_t> labels, const WeightMatrix& w, std::optional<std::vector<double>> proportions) {
            return phi(sample(std::move(labels), std::move(proportions)), w);
        },
        py::arg("labels"), py::arg("w"), py::arg("proportions") = py::none());
    m.def(
        "phi_moments",
        [](std::vector<std::size_t> labels, const WeightMatrix& w) {
            const auto pm = phi_moments(CategoricalSample(std::move(labels)), weight_summary(w));
            return py::dict(py::arg("mean") = pm.mean, py::arg("variance") = pm.variance);
        },
        py::arg("labels"), py::arg("w"));
    m.def(
        "join_counts",
        [](std::vector<std::size_t> labels, const WeightMatrix& w) {
            return join_counts(CategoricalSample(std::move(labels)), w);
        },
        py::arg("labels"), py::arg("w"));
    m.def(
        "binary_equivalence",
        [](std::vector<std::size_t> labels, const WeightMatrix& w) {
            const auto b = binary_equivalence_check(CategoricalSample(std::move(labels)), w);
            return py::dict(py::arg("z_moran") = b.z_moran, py::arg("z_phi") = b.z_phi);
        },
        py::arg("labels"), py::arg("w"));

    m.def(
        "moran_test",
        [](const std::vector<double>& y, const WeightMatrix& w, std::size_t perms, std::uint64_t seed,
           const std::string& tail, std::size_t threads, bool keep_null) {
            TestConfig cfg;
            cfg.keep_null = keep_null;
            const auto r = [&] {
                py::gil_scoped_release release;
                return run_moran_test(y, w, make_plan(perms, seed, tail, threads), cfg);
            }();
            return to_python(to_json(r));
        },
        py::arg("y"), py::arg("w"), py::arg("perms") = 500, py::arg("seed") = 1, py::arg("tail") = "upper",
        py::arg("threads") = 1, py::arg("keep_null") = false);
    m.def(
        "phi_test",
        [](std::vector<std::size_t> labels, const WeightMatrix& w, std::optional<std::vector<double>> proportions,
           std::size_t perms, std::uint64_t seed, const std::string& tail, std::size_t threads, bool keep_null) {
            TestConfig cfg;
            cfg.keep_null = keep_null;
            const auto s = sample(std::move(labels), std::move(proportions));
            const auto r = [&] {
                py::gil_scoped_release release;
                return run_phi_test(s, w, make_plan(perms, seed, tail, threads), cfg);
            }();
            return to_python(to_json(r));
        },
        py::arg("labels"), py::arg("w"), py::arg("proportions") = py::none(), py::arg("perms") = 500,
        py::arg("seed") = 1, py::arg("tail") = "upper", py::arg("threads") = 1, py::arg("keep_null") = false);
    m.def(
        "joincount_tests",
        [](std::vector<std::size_t> labels, const WeightMatrix& w, std::size_t perms, std::uint64_t seed,
           const std::string& tail, std::size_t threads) {
            const CategoricalSample s(std::move(labels));
            const auto rs = [&] {
                py::gil_scoped_release release;
                return run_joincount_tests(s, w, make_plan(perms, seed, tail, threads));
            }();
            py::list out;
            for (const auto& r : rs) out.append(to_python(to_json(r)));
            return out;
        },
        py::arg("labels"), py::arg("w"), py::arg("perms") = 500, py::arg("seed") = 1, py::arg("tail") = "upper",
        py::arg("threads") = 1);

    m.def("neighbor_matrix", &gen_neighbor_matrix, py::arg("n"), py::arg("d"), py::arg("seed"));
    m.def("sar", &gen_sar, py::arg("w"), py::arg("rho"), py::arg("seed"));
    m.def("correlated_error", &gen_correlated_error, py::arg("pi"), py::arg("seed"));
    m.def(
        "categorize",
        [](const std::vector<double>& y, const std::vector<double>& cutoffs) {
            const auto s = categorize_by_quantiles(y, cutoffs);
            return std::vector<std::size_t>(s.labels().begin(), s.labels().end());
        },
        py::arg("y"), py::arg("cutoffs"));
    m.def(
        "network",
        [](std::size_t n, const std::string& model, std::uint64_t seed, std::size_t k, double beta, double p) {
            return gen_network(n, graph_model(model, k, beta, p), seed);
        },
        py::arg("n"), py::arg("model") = "watts_strogatz", py::arg("seed") = 1, py::arg("k") = 4,
        py::arg("beta") = 0.1, py::arg("p") = 0.05);
    m.def(
        "transmit_continuous",
        [](const std::vector<double>& y0, const WeightMatrix& a, std::size_t t, double mixing) {
            return transmit_continuous(y0, a, t, mixing);
        },
        py::arg("y0"), py::arg("a"), py::arg("t"), py::arg("mixing"));
    m.def(
        "transmit_categorical",
        [](const std::vector<std::size_t>& labels0, const WeightMatrix& a, std::size_t t, double p_adopt,
           std::uint64_t seed) { return transmit_categorical(labels0, a, t, p_adopt, seed); },
        py::arg("labels0"), py::arg("a"), py::arg("t"), py::arg("p_adopt"), py::arg("seed"));

    m.def(
        "default_config", [](const std::string& name) { return to_python(default_config(name)); },
        py::arg("experiment"));
    m.def(
        "run_experiment",
        [](const py::object& config) {
            const auto j = from_python(config);
            const auto r = [&] {
                py::gil_scoped_release release;
                return replay_experiment(j);
            }();
            return py::make_tuple(to_python(to_json(r)), to_csv(r));
        },
        py::arg("config"));
}
