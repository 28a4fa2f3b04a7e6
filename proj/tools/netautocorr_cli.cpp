// netautocorr: permutation and normal-theory tests for network and spatial
// autocorrelation, simulation generators, and the replication studies.

#include "netautocorr/error.hpp"
#include "netautocorr/experiments.hpp"
#include "netautocorr/inference.hpp"
#include "netautocorr/io.hpp"
#include "netautocorr/parallel.hpp"
#include "netautocorr/simgen.hpp"
#include "netautocorr/stats.hpp"
#include "netautocorr/weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netautocorr;

namespace {

constexpr const char* seed_env = "NETAUTOCORR_SEED";
constexpr const char* schema_version = "1";

std::uint64_t default_seed() {
    const char* v = std::getenv(seed_env);
    if (v == nullptr || *v == '\0') return 1;
    try {
        std::size_t used = 0;
        const auto seed = std::stoull(v, &used);
        if (used != std::string(v).size()) throw std::invalid_argument(v);
        return seed;
    } catch (const std::exception&) {
        throw InvalidInput(std::string(seed_env) + "='" + v + "' is not an unsigned integer");
    }
}

struct WeightOptions {
    std::string edges;
    std::string coords;
    std::size_t knn = 0;
    double idw = 0.0;
    double expdecay = 0.0;
    bool symmetrize = false;
    std::size_t n = 0;

    void attach(CLI::App& app) {
        app.add_option("--edges", edges, "Edge list file (two 0-based ids per line)");
        app.add_option("--coords", coords, "Coordinate CSV with header id,x,y");
        app.add_option("--knn", knn, "k-nearest-neighbour weights from --coords");
        app.add_option("--idw", idw, "Capped inverse-distance weights from --coords with this cap");
        app.add_option("--expdecay", expdecay, "exp(-q d/D) weights from --coords with this q");
        app.add_flag("--symmetrize", symmetrize, "Use (W + W^T)/2 instead of W");
    }

    json describe() const {
        json j;
        if (!edges.empty()) {
            j = {{"construction", "edges"}, {"edges", edges}};
        } else {
            j = {{"coords", coords}};
            if (knn > 0) {
                j["construction"] = "knn";
                j["k"] = knn;
            } else if (idw > 0.0) {
                j["construction"] = "inverse_distance";
                j["cap"] = idw;
            } else {
                j["construction"] = "exp_decay";
                j["q"] = expdecay;
            }
        }
        j["symmetrize"] = symmetrize;
        return j;
    }

    /// `nodes` is the node count implied by the attribute table, 0 if unknown.
    WeightMatrix build(std::size_t nodes, WarningLog& warnings) const {
        const int chosen = (knn > 0) + (idw > 0.0) + (expdecay > 0.0);
        if (!edges.empty()) {
            if (chosen > 0 || !coords.empty())
                throw InvalidInput("--edges cannot be combined with coordinate-based weights");
            const auto list = read_edge_list(edges);
            std::size_t n = nodes;
            if (n == 0) {
                for (const auto& [a, b] : list) n = std::max({n, a + 1, b + 1});
            }
            const auto w = adjacency_from_edges(list, n);
            return symmetrize ? w.symmetrized() : w;
        }
        if (coords.empty()) throw InvalidInput("give either --edges or --coords with --knn, --idw or --expdecay");
        if (chosen != 1) throw InvalidInput("--coords needs exactly one of --knn, --idw, --expdecay");
        const auto cs = read_coordinates(coords);
        if (nodes != 0 && cs.size() != nodes)
            throw InvalidInput("coordinate file has " + std::to_string(cs.size()) + " points but the attribute file has " +
                               std::to_string(nodes) + " rows");
        WeightMatrix w = knn > 0 ? knn_weights(cs, knn, &warnings)
                         : idw > 0.0 ? inverse_distance_weights(cs, idw)
                                     : exp_decay_weights(cs, expdecay);
        return symmetrize ? w.symmetrized() : w;
    }
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const auto path = (dir / name).string();
    emit(path, text);
    return path;
}

std::string csv_number(const std::optional<double>& v) {
    if (!v) return {};
    std::ostringstream os;
    os << std::setprecision(17) << *v;
    return os.str();
}

// ---------------------------------------------------------------- test

struct TestOptions {
    WeightOptions weights;
    std::string attr;
    std::string col;
    std::string stat;
    std::string type;
    std::string null_model = "randomization";
    std::size_t perms = 500;
    std::uint64_t seed = 1;
    std::string tail = "upper";
    std::size_t threads = 0;
    double alpha = 0.05;
    std::string out;
    std::string format = "json";
};

int run_test(const TestOptions& o) {
    const auto table = AttributeTable::read(o.attr);
    const auto cells = table.column(o.col);

    std::string type = o.type;
    if (type.empty()) {
        if (o.stat == "moran") type = "continuous";
        else if (o.stat == "phi" || o.stat == "joincount") type = "categorical";
        else if (!looks_integer(cells)) type = "continuous";
        else
            throw InvalidInput("column '" + o.col + "' is integer-valued; pass --type continuous or --type categorical");
    }
    std::string stat = o.stat;
    if (stat.empty()) stat = type == "continuous" ? "moran" : "phi";
    if ((stat == "moran") != (type == "continuous"))
        throw InvalidInput("--stat " + stat + " does not apply to " + type + " data");

    WarningLog warnings;
    const auto w = o.weights.build(table.rows(), warnings);

    PermutationPlan plan;
    plan.replicates = o.perms;
    plan.seed = o.seed;
    plan.tail = parse_tail(o.tail);
    plan.threads = o.threads;
    TestConfig config;
    if (o.null_model == "normality") config.moran_null = MoranNull::normality;
    else if (o.null_model != "randomization")
        throw InvalidInput("unknown --null '" + o.null_model + "' (expected randomization or normality)");

    std::vector<TestResult> results;
    std::vector<std::string> names;
    if (stat == "moran") {
        results.push_back(run_moran_test(table.numeric(o.col), w, plan, config));
    } else {
        auto coding = encode_labels(cells);
        names = coding.names;
        const CategoricalSample s(std::move(coding.codes), names.size());
        if (stat == "phi") results.push_back(run_phi_test(s, w, plan, config));
        else results = run_joincount_tests(s, w, plan, config);
    }

    const json resolved = {{"attr", o.attr},         {"col", o.col},     {"type", type},
                           {"stat", stat},           {"null", o.null_model}, {"perms", o.perms},
                           {"seed", o.seed},         {"tail", to_string(plan.tail)},
                           {"alpha", o.alpha},       {"weights", o.weights.describe()}};

    if (o.format == "csv") {
        std::ostringstream os;
        os << "statistic_name,category,statistic,z,p_permutation,p_normal,reject\n";
        for (const auto& r : results) {
            os << r.statistic_name << ',' << (r.category ? names[*r.category] : "") << ','
               << csv_number(r.statistic) << ',' << csv_number(r.z) << ',' << csv_number(r.p_permutation) << ','
               << csv_number(r.p_normal) << ',';
            if (r.p_permutation) os << (*r.p_permutation <= o.alpha ? 1 : 0);
            os << '\n';
        }
        emit(o.out, os.str());
    } else {
        json out = {{"command", "test"}, {"schema_version", schema_version}, {"config", resolved}};
        out["weights"] = {{"n", w.size()},
                          {"nnz", w.nnz()},
                          {"symmetric", w.is_symmetric()},
                          {"summary", to_json(weight_summary(w))}};
        out["warnings"] = warnings;
        json rs = json::array();
        for (const auto& r : results) {
            json jr = to_json(r);
            if (r.category) jr["label"] = names[*r.category];
            if (r.p_permutation) jr["reject"] = *r.p_permutation <= o.alpha;
            rs.push_back(std::move(jr));
        }
        out["results"] = std::move(rs);
        if (!names.empty()) out["categories"] = names;
        emit(o.out, out.dump(2) + "\n");
    }
    for (const auto& msg : warnings) std::cerr << "warning: " << msg << '\n';
    return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseOptions {
    WeightOptions weights;
    double threshold = 0.1;
    std::string out;
};

int run_diagnose(const DiagnoseOptions& o) {
    WarningLog warnings;
    const auto w = o.weights.build(o.weights.n, warnings);
    const auto d = normality_diagnostics(w, o.threshold);
    json out = {{"command", "diagnose"},
                {"schema_version", schema_version},
                {"config", {{"threshold", o.threshold}, {"weights", o.weights.describe()}}},
                {"n", w.size()},
                {"summary", to_json(weight_summary(w))},
                {"diagnostics", to_json(d)},
                {"warnings", warnings}};
    emit(o.out, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string generator;
    std::size_t n = 100;
    std::size_t d = 3;
    double rho = 0.4;
    double q = 50.0;
    double width = 2.4;
    double height = 1.0;
    std::size_t t = 3;
    double mixing = 0.1;
    double p_adopt = 0.1;
    std::size_t k = 4;
    double beta = 0.1;
    std::vector<double> cutoffs;
    std::vector<double> marginals{0.1, 0.2, 0.3, 0.25, 0.15};
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string prefix;
};

std::string table_text(const std::vector<std::string>& names, const std::vector<std::vector<std::string>>& columns) {
    std::ostringstream os;
    os << "id";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        os << i;
        for (const auto& c : columns) os << ',' << c[i];
        os << '\n';
    }
    return os.str();
}

std::vector<std::string> as_cells(const std::vector<double>& v) {
    std::vector<std::string> out;
    for (double x : v) out.push_back(csv_number(x));
    return out;
}

std::vector<std::string> label_cells(std::span<const std::size_t> v) {
    std::vector<std::string> out;
    for (auto x : v) out.push_back(std::to_string(x));
    return out;
}

int run_simulate(const SimulateOptions& o) {
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string prefix = o.prefix.empty() ? o.generator : o.prefix;
    json config = {{"generator", o.generator}, {"n", o.n}, {"seed", o.seed}};
    json files = json::object();

    if (o.generator == "sar") {
        const auto cutoffs = o.cutoffs.empty() ? std::vector<double>{0.25, 0.5, 0.75} : o.cutoffs;
        const auto w = gen_neighbor_matrix(o.n, o.d, stream_seed(o.seed, 0));
        const auto y = gen_sar(w, o.rho, stream_seed(o.seed, 1));
        WarningLog warnings;
        const auto s = categorize_by_quantiles(y, cutoffs, &warnings);
        config.update({{"d", o.d}, {"rho", o.rho}, {"cutoffs", cutoffs}});
        std::ostringstream edges;
        write_edge_list(edges, w);
        files["edges"] = write_file(dir, prefix + ".edges", edges.str());
        files["attributes"] = write_file(dir, prefix + ".csv", table_text({"y", "group"}, {as_cells(y), label_cells(s.labels())}));
        for (const auto& msg : warnings) std::cerr << "warning: " << msg << '\n';
    } else if (o.generator == "correrr") {
        const auto cutoffs = o.cutoffs.empty() ? std::vector<double>{0.1, 0.3, 0.6, 0.85} : o.cutoffs;
        std::mt19937_64 rng(stream_seed(o.seed, 0));
        std::uniform_real_distribution<double> ux(0.0, o.width);
        std::uniform_real_distribution<double> uy(0.0, o.height);
        std::vector<double> flat;
        for (std::size_t i = 0; i < o.n; ++i) {
            flat.push_back(ux(rng));
            flat.push_back(uy(rng));
        }
        const CoordinateSet coords(2, std::move(flat));
        const auto y = gen_correlated_error(exp_decay_weights(coords, o.q), stream_seed(o.seed, 1));
        WarningLog warnings;
        const auto s = categorize_by_quantiles(y, cutoffs, &warnings);
        config.update({{"q", o.q}, {"width", o.width}, {"height", o.height}, {"cutoffs", cutoffs}});
        std::ostringstream xy;
        write_coordinates(xy, coords);
        files["coordinates"] = write_file(dir, prefix + "_coords.csv", xy.str());
        files["attributes"] = write_file(dir, prefix + ".csv", table_text({"y", "group"}, {as_cells(y), label_cells(s.labels())}));
        for (const auto& msg : warnings) std::cerr << "warning: " << msg << '\n';
    } else if (o.generator == "transmit-cont" || o.generator == "transmit-cat") {
        const auto a = gen_network(o.n, WattsStrogatz{o.k, o.beta}, stream_seed(o.seed, 0));
        config.update({{"t", o.t}, {"graph", {{"model", "watts_strogatz"}, {"k", o.k}, {"beta", o.beta}}}});
        std::ostringstream edges;
        write_edge_list(edges, a);
        files["edges"] = write_file(dir, prefix + ".edges", edges.str());
        if (o.generator == "transmit-cont") {
            const auto y = transmit_continuous(standard_normal(o.n, stream_seed(o.seed, 1)), a, o.t, o.mixing);
            config["mixing"] = o.mixing;
            files["attributes"] = write_file(dir, prefix + ".csv", table_text({"y"}, {as_cells(y)}));
        } else {
            const auto labels0 = draw_categorical(o.n, o.marginals, stream_seed(o.seed, 1));
            const auto labels = transmit_categorical(labels0, a, o.t, o.p_adopt, stream_seed(o.seed, 3));
            config.update({{"p_adopt", o.p_adopt}, {"marginals", o.marginals}});
            files["attributes"] = write_file(dir, prefix + ".csv", table_text({"group"}, {label_cells(labels)}));
        }
    } else {
        throw InvalidInput("unknown generator '" + o.generator + "'");
    }

    const json echo = {{"command", "simulate"}, {"schema_version", schema_version}, {"config", config}, {"files", files}};
    write_file(dir, prefix + ".json", echo.dump(2) + "\n");
    std::cout << echo.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------- experiment

struct ExperimentOptions {
    std::string which;
    bool quick = false;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> perms;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::size_t threads = 0;
    std::string mode = "true_pi";
    std::string coords;
    std::optional<std::size_t> n;
    std::optional<double> width;
    std::optional<double> height;
    std::optional<double> mixing;
    std::optional<double> p_adopt;
    std::string interval = "wilson";
    std::string replay;
    std::string out_dir = ".";
    std::string prefix;
};

void print_summary(const ExperimentReport& r) {
    std::cout << r.experiment << ": " << r.settings.size() << " settings, " << std::fixed << std::setprecision(1)
              << r.wall_clock_seconds << " s\n";
    std::cout << std::left << std::setw(18) << "setting" << std::right << std::setw(10) << "reject" << std::setw(10)
              << "z-reject" << std::setw(10) << "coverage" << '\n';
    std::cout << std::setprecision(3);
    for (const auto& s : r.settings) {
        std::cout << std::left << std::setw(18) << s.id << std::right << std::setw(10) << s.rejection_rate;
        if (s.z_rejection_rate) std::cout << std::setw(10) << *s.z_rejection_rate;
        else std::cout << std::setw(10) << "-";
        if (s.coverage_rate) std::cout << std::setw(10) << *s.coverage_rate;
        else std::cout << std::setw(10) << "-";
        std::cout << '\n';
    }
}

int run_experiment(const ExperimentOptions& o) {
    ExperimentReport report;
    if (!o.replay.empty()) {
        std::ifstream in(o.replay);
        if (!in) throw IoError("cannot open '" + o.replay + "'");
        json prior;
        try {
            prior = json::parse(in);
        } catch (const json::exception& e) {
            throw IoError(o.replay + ": " + e.what());
        }
        json config = prior.at("config");
        config["threads"] = o.threads;
        report = replay_experiment(config);
    } else {
        StudyOptions study;
        study.seed = o.seed;
        study.alpha = o.alpha;
        study.threads = o.threads;
        if (o.quick) {
            study.reps = 100;
            study.perms = 199;
        }
        if (o.reps) study.reps = *o.reps;
        if (o.perms) study.perms = *o.perms;

        if (o.which == "fig1") {
            SarCurveConfig c;
            c.study = study;
            if (o.n) c.n = *o.n;
            report = rejection_curve_sar(c);
        } else if (o.which == "fig2") {
            CorrErrConfig c;
            c.study = study;
            c.mode = parse_weight_mode(o.mode);
            if (o.n) c.n = *o.n;
            if (o.width) c.width = *o.width;
            if (o.height) c.height = *o.height;
            if (!o.coords.empty()) {
                const auto cs = read_coordinates(o.coords);
                std::vector<std::vector<double>> pts;
                for (std::size_t i = 0; i < cs.size(); ++i) pts.emplace_back(cs.point(i).begin(), cs.point(i).end());
                c.n = cs.size();
                c.coordinates = std::move(pts);
            }
            report = rejection_curve_correrr(c);
        } else if (o.which == "fig3") {
            ContinuousCoverageConfig c;
            c.study = study;
            if (o.n) c.n = *o.n;
            if (o.mixing) c.mixing = *o.mixing;
            report = coverage_experiment_continuous(c);
        } else if (o.which == "table1") {
            CategoricalCoverageConfig c;
            c.study = study;
            if (o.n) c.n = *o.n;
            if (o.p_adopt) c.p_adopt = *o.p_adopt;
            c.interval = parse_interval_method(o.interval);
            report = coverage_experiment_categorical(c);
        } else {
            throw InvalidInput("unknown experiment '" + o.which + "' (expected fig1, fig2, fig3 or table1)");
        }
    }

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string prefix = o.prefix.empty() ? report.experiment : o.prefix;
    json out = to_json(report);
    out["command"] = "experiment";
    out["schema_version"] = schema_version;
    write_file(dir, prefix + ".json", out.dump(2) + "\n");
    write_file(dir, prefix + ".csv", to_csv(report));
    print_summary(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tests and simulation studies for network and spatial autocorrelation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "netautocorr 0.1.0");

    std::uint64_t seed = 1;
    try {
        seed = default_seed();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    TestOptions test;
    test.seed = seed;
    auto* test_cmd = app.add_subcommand("test", "Permutation and z tests for Moran's I, Phi or join counts");
    test.weights.attach(*test_cmd);
    test_cmd->add_option("--attr", test.attr, "Attribute CSV with an id column")->required();
    test_cmd->add_option("--col", test.col, "Attribute column to test")->required();
    test_cmd->add_option("--stat", test.stat, "moran, phi or joincount")
        ->check(CLI::IsMember({"moran", "phi", "joincount"}));
    test_cmd->add_option("--type", test.type, "continuous or categorical")
        ->check(CLI::IsMember({"continuous", "categorical"}));
    test_cmd->add_option("--null", test.null_model, "Moran null moments: randomization or normality");
    test_cmd->add_option("--perms", test.perms, "Permutation replicates")->check(CLI::PositiveNumber);
    test_cmd->add_option("--seed", test.seed, std::string("Seed (default from ") + seed_env + ", else 1)");
    test_cmd->add_option("--tail", test.tail, "upper, lower or two_sided");
    test_cmd->add_option("--threads", test.threads, "Worker threads, 0 = all cores");
    test_cmd->add_option("--alpha", test.alpha, "Level for the reject flag")->check(CLI::Range(0.0, 1.0));
    test_cmd->add_option("--out", test.out, "Output file (default stdout)");
    test_cmd->add_option("--format", test.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    SimulateOptions sim;
    sim.seed = seed;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a dataset in the formats `test` reads");
    sim_cmd->add_option("generator", sim.generator, "sar, correrr, transmit-cont or transmit-cat")
        ->required()
        ->check(CLI::IsMember({"sar", "correrr", "transmit-cont", "transmit-cat"}));
    sim_cmd->add_option("--n", sim.n, "Nodes");
    sim_cmd->add_option("--d", sim.d, "sar: mean-degree parameter");
    sim_cmd->add_option("--rho", sim.rho, "sar: autoregression strength, |rho| < 1");
    sim_cmd->add_option("--q", sim.q, "correrr: decay rate");
    sim_cmd->add_option("--width", sim.width, "correrr: rectangle width");
    sim_cmd->add_option("--height", sim.height, "correrr: rectangle height");
    sim_cmd->add_option("--cutoffs", sim.cutoffs, "Quantile cutoffs for the group column");
    sim_cmd->add_option("--t", sim.t, "transmit-*: rounds");
    sim_cmd->add_option("--mixing", sim.mixing, "transmit-cont: weight on the neighbour mean");
    sim_cmd->add_option("--p-adopt", sim.p_adopt, "transmit-cat: copy probability per round");
    sim_cmd->add_option("--marginals", sim.marginals, "transmit-cat: initial category probabilities");
    sim_cmd->add_option("--k", sim.k, "transmit-*: ring neighbours (even)");
    sim_cmd->add_option("--beta", sim.beta, "transmit-*: rewiring probability");
    sim_cmd->add_option("--seed", sim.seed, "Seed");
    sim_cmd->add_option("--out-dir", sim.out_dir, "Directory for the generated files");
    sim_cmd->add_option("--prefix", sim.prefix, "File name prefix (default: generator name)");

    ExperimentOptions exp;
    exp.seed = seed;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a replication study and write JSON + CSV reports");
    exp_cmd->add_option("which", exp.which, "fig1, fig2, fig3 or table1")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "table1"}));
    exp_cmd->add_flag("--quick", exp.quick, "reps=100, perms=199");
    exp_cmd->add_option("--reps", exp.reps, "Replicates per setting")->check(CLI::PositiveNumber);
    exp_cmd->add_option("--perms", exp.perms, "Permutations per test")->check(CLI::PositiveNumber);
    exp_cmd->add_option("--seed", exp.seed, "Seed");
    exp_cmd->add_option("--alpha", exp.alpha, "Test level");
    exp_cmd->add_option("--threads", exp.threads, "Worker threads, 0 = all cores");
    exp_cmd->add_option("--mode", exp.mode, "fig2: true_pi or estimated_w")
        ->check(CLI::IsMember({"true_pi", "estimated_w"}));
    exp_cmd->add_option("--n", exp.n, "Nodes per replicate");
    exp_cmd->add_option("--width", exp.width, "fig2: coordinate rectangle width");
    exp_cmd->add_option("--height", exp.height, "fig2: coordinate rectangle height");
    exp_cmd->add_option("--coords", exp.coords, "fig2: coordinate CSV instead of uniform draws");
    exp_cmd->add_option("--mixing", exp.mixing, "fig3: transmission mixing weight");
    exp_cmd->add_option("--p-adopt", exp.p_adopt, "table1: copy probability per round");
    exp_cmd->add_option("--interval", exp.interval, "table1: wilson or wald inside the Bonferroni adjustment")
        ->check(CLI::IsMember({"wilson", "wald"}));
    exp_cmd->add_option("--replay", exp.replay, "Re-run the config echoed in a previous JSON report");
    exp_cmd->add_option("--out-dir", exp.out_dir, "Directory for the reports");
    exp_cmd->add_option("--prefix", exp.prefix, "File name prefix (default: experiment name)");

    DiagnoseOptions diag;
    auto* diag_cmd = app.add_subcommand("diagnose", "Asymptotic-normality diagnostics for a weight matrix");
    diag.weights.attach(*diag_cmd);
    diag_cmd->add_option("--n", diag.weights.n, "Node count for --edges (default: largest id + 1)");
    diag_cmd->add_option("--threshold", diag.threshold, "Ratio above which the verdict is suspect");
    diag_cmd->add_option("--out", diag.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (test_cmd->parsed()) return run_test(test);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (exp_cmd->parsed()) {
            if (exp.which.empty() && exp.replay.empty()) throw InvalidInput("name an experiment or pass --replay");
            return run_experiment(exp);
        }
        if (diag_cmd->parsed()) return run_diagnose(diag);
    } catch (const DegenerateData& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
