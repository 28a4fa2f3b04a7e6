#include "netautocorr/experiments.hpp"

#include "netautocorr/error.hpp"
#include "netautocorr/inference.hpp"
#include "netautocorr/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace netautocorr {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double binomial_se(std::size_t hits, std::size_t reps) {
    const double r = static_cast<double>(hits) / static_cast<double>(reps);
    return std::sqrt(r * (1.0 - r) / static_cast<double>(reps));
}

void check_study(const StudyOptions& s) {
    if (s.reps == 0) throw InvalidInput("experiment needs at least one replicate");
    if (s.perms == 0) throw InvalidInput("experiment needs at least one permutation");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
}

PermutationPlan replicate_plan(const StudyOptions& s, std::uint64_t rep_seed) {
    PermutationPlan plan;
    plan.replicates = s.perms;
    plan.seed = stream_seed(rep_seed, 2);
    plan.tail = Tail::upper;
    plan.threads = 1;
    return plan;
}

ReplicateRecord record_from(const std::string& id, std::size_t r, const TestResult& t) {
    ReplicateRecord rec;
    rec.setting = id;
    rec.replicate = r;
    rec.statistic = t.statistic;
    rec.z = t.z;
    rec.p_permutation = t.p_permutation.value_or(1.0);
    rec.p_normal = t.p_normal;
    return rec;
}

SettingSummary summarize(const std::string& id, std::map<std::string, double> parameters,
                         std::span<const ReplicateRecord> records, double alpha, std::size_t degenerate) {
    SettingSummary s;
    s.id = id;
    s.parameters = std::move(parameters);
    s.reps = records.size();
    s.degenerate = degenerate;

    std::size_t z_hits = 0;
    std::size_t z_seen = 0;
    std::size_t covered = 0;
    std::size_t cover_seen = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t estimates = 0;
    for (const auto& rec : records) {
        if (rec.p_permutation <= alpha) ++s.rejections;
        if (rec.p_normal) {
            ++z_seen;
            if (*rec.p_normal <= alpha) ++z_hits;
        }
        if (rec.covered) {
            ++cover_seen;
            if (*rec.covered) ++covered;
        }
        if (rec.estimate) {
            ++estimates;
            sum += *rec.estimate;
            sum_sq += *rec.estimate * *rec.estimate;
        }
    }
    s.rejection_rate = static_cast<double>(s.rejections) / static_cast<double>(s.reps);
    s.rejection_se = binomial_se(s.rejections, s.reps);
    if (z_seen > 0) {
        s.z_rejections = z_hits;
        s.z_rejection_rate = static_cast<double>(z_hits) / static_cast<double>(s.reps);
        s.z_rejection_se = binomial_se(z_hits, s.reps);
    }
    if (cover_seen > 0) {
        s.covered = covered;
        s.coverage_rate = static_cast<double>(covered) / static_cast<double>(s.reps);
        s.coverage_se = binomial_se(covered, s.reps);
    }
    if (estimates > 0) {
        const double m = sum / static_cast<double>(estimates);
        s.mean_estimate = m;
        const double var = estimates > 1 ? (sum_sq - static_cast<double>(estimates) * m * m) /
                                               static_cast<double>(estimates - 1)
                                         : 0.0;
        s.mean_estimate_se = std::sqrt(std::max(var, 0.0) / static_cast<double>(estimates));
    }
    return s;
}

/// Runs `body(r)` for every replicate, keeping records in replicate order. A draw that raises DegenerateData
/// keeps a placeholder record flagged `degenerate`.
template <typename Body>
std::vector<ReplicateRecord> run_replicates(const StudyOptions& study, const std::string& id, std::size_t& degenerate,
                                            Body&& body) {
    std::vector<ReplicateRecord> records(study.reps);
    std::vector<char> failed(study.reps, 0);
    parallel_for(study.reps, study.threads, [&](std::size_t r) {
        try {
            records[r] = body(r);
        } catch (const DegenerateData&) {
            records[r] = ReplicateRecord{};
            records[r].setting = id;
            records[r].replicate = r;
            records[r].degenerate = true;
            failed[r] = 1;
        }
    });
    degenerate = 0;
    for (char f : failed) degenerate += static_cast<std::size_t>(f);
    return records;
}

json study_json(const StudyOptions& s) {
    return {{"reps", s.reps}, {"perms", s.perms}, {"seed", s.seed}, {"alpha", s.alpha}};
}

StudyOptions study_from_json(const json& j) {
    StudyOptions s;
    s.reps = j.at("reps").get<std::size_t>();
    s.perms = j.at("perms").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.alpha = j.at("alpha").get<double>();
    if (j.contains("threads")) s.threads = j.at("threads").get<std::size_t>();
    return s;
}

json graph_json(const WattsStrogatz& g) {
    return {{"model", "watts_strogatz"}, {"k", g.k}, {"beta", g.beta}};
}

WattsStrogatz graph_from_json(const json& j) {
    return {j.at("k").get<std::size_t>(), j.at("beta").get<double>()};
}

std::string tag(const std::string& name, double v) {
    std::ostringstream os;
    os << name << '=' << v;
    return os.str();
}

std::pair<double, double> proportion_interval(double p_hat, double n, double z, IntervalMethod method) {
    if (method == IntervalMethod::wald) {
        const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n);
        return {p_hat - half, p_hat + half};
    }
    const double z2 = z * z;
    const double centre = (p_hat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
    return {centre - half, centre + half};
}

template <typename Fn>
ExperimentReport timed(Fn&& fn) {
    const auto start = Clock::now();
    ExperimentReport r = fn();
    r.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

} // namespace

const char* to_string(WeightMode m) {
    return m == WeightMode::true_pi ? "true_pi" : "estimated_w";
}

WeightMode parse_weight_mode(const std::string& text) {
    if (text == "true_pi") return WeightMode::true_pi;
    if (text == "estimated_w") return WeightMode::estimated_w;
    throw InvalidInput("unknown weight mode '" + text + "' (expected true_pi or estimated_w)");
}

const char* to_string(IntervalMethod m) {
    return m == IntervalMethod::wilson ? "wilson" : "wald";
}

IntervalMethod parse_interval_method(const std::string& text) {
    if (text == "wilson") return IntervalMethod::wilson;
    if (text == "wald") return IntervalMethod::wald;
    throw InvalidInput("unknown interval method '" + text + "' (expected wilson or wald)");
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

const SettingSummary& ExperimentReport::setting(const std::string& id) const {
    for (const auto& s : settings) {
        if (s.id == id) return s;
    }
    throw InvalidInput("report has no setting '" + id + "'");
}

ExperimentReport rejection_curve_sar(const SarCurveConfig& config) {
    check_study(config.study);
    return timed([&] {
        ExperimentReport report;
        report.experiment = "fig1";
        report.config = to_json(config);
        for (std::size_t di = 0; di < config.d_values.size(); ++di) {
            const std::size_t d = config.d_values[di];
            const std::uint64_t group_seed = stream_seed(config.study.seed, di);
            for (double rho : config.rho_values) {
                const std::string id = tag("d", static_cast<double>(d)) + "/" + tag("rho", rho);
                std::size_t degenerate = 0;
                auto records = run_replicates(config.study, id, degenerate, [&](std::size_t r) {
                    const std::uint64_t rep_seed = stream_seed(group_seed, r);
                    const auto w = gen_neighbor_matrix(config.n, d, stream_seed(rep_seed, 0));
                    const auto y = gen_sar(w, rho, stream_seed(rep_seed, 1));
                    const auto s = categorize_by_quantiles(y, config.cutoffs);
                    return record_from(id, r, run_phi_test(s, w, replicate_plan(config.study, rep_seed)));
                });
                report.settings.push_back(summarize(id, {{"d", static_cast<double>(d)}, {"rho", rho}}, records,
                                                    config.study.alpha, degenerate));
                report.records.insert(report.records.end(), records.begin(), records.end());
            }
        }
        return report;
    });
}

ExperimentReport rejection_curve_correrr(const CorrErrConfig& config) {
    check_study(config.study);
    if (config.q_values.empty()) throw InvalidInput("correlated-error study needs at least one q value");
    return timed([&] {
        ExperimentReport report;
        report.experiment = "fig2";
        report.config = to_json(config);

        std::vector<double> flat;
        std::size_t dim = 2;
        if (config.coordinates) {
            const auto cs = CoordinateSet::from_points(*config.coordinates);
            dim = cs.dim();
            for (std::size_t i = 0; i < cs.size(); ++i) flat.insert(flat.end(), cs.point(i).begin(), cs.point(i).end());
        } else {
            std::mt19937_64 rng(stream_seed(config.study.seed, 0xC0)); // coordinate stream
            std::uniform_real_distribution<double> ux(0.0, config.width);
            std::uniform_real_distribution<double> uy(0.0, config.height);
            for (std::size_t i = 0; i < config.n; ++i) {
                flat.push_back(ux(rng));
                flat.push_back(uy(rng));
            }
        }
        const CoordinateSet coords(dim, std::move(flat));

        std::optional<WeightMatrix> estimated;
        double capped = 0.0;
        if (config.mode == WeightMode::estimated_w) {
            estimated = inverse_distance_weights(coords, config.cap);
            capped = capped_fraction(*estimated, config.cap);
        }

        struct Setting {
            std::string id;
            std::optional<double> q;
        };
        std::vector<Setting> settings;
        if (config.include_null) settings.push_back({"none", std::nullopt});
        for (double q : config.q_values) settings.push_back({tag("q", q), q});

        const std::uint64_t group_seed = stream_seed(config.study.seed, 1);
        for (const auto& setting : settings) {
            std::optional<CorrelatedErrorSampler> sampler;
            std::optional<WeightMatrix> pi;
            if (setting.q) {
                pi = exp_decay_weights(coords, *setting.q);
                sampler = CorrelatedErrorSampler::from_weights(*pi);
            }
            const WeightMatrix* test_w = nullptr;
            std::optional<WeightMatrix> reference;
            if (config.mode == WeightMode::estimated_w) {
                test_w = &*estimated;
            } else if (pi) {
                test_w = &*pi;
            } else {
                reference = exp_decay_weights(coords, config.q_values.front());
                test_w = &*reference;
            }

            std::size_t degenerate = 0;
            auto records = run_replicates(config.study, setting.id, degenerate, [&](std::size_t r) {
                const std::uint64_t rep_seed = stream_seed(group_seed, r);
                const auto y = sampler ? sampler->draw(stream_seed(rep_seed, 1))
                                       : standard_normal(coords.size(), stream_seed(rep_seed, 1));
                const auto s = categorize_by_quantiles(y, config.cutoffs);
                return record_from(setting.id, r, run_phi_test(s, *test_w, replicate_plan(config.study, rep_seed)));
            });
            std::map<std::string, double> params;
            if (setting.q) params["q"] = *setting.q;
            if (estimated) params["capped_fraction"] = capped;
            if (sampler) params["factor_repaired"] = sampler->repaired() ? 1.0 : 0.0;
            report.settings.push_back(
                summarize(setting.id, std::move(params), records, config.study.alpha, degenerate));
            report.records.insert(report.records.end(), records.begin(), records.end());
        }
        return report;
    });
}

ExperimentReport coverage_experiment_continuous(const ContinuousCoverageConfig& config) {
    check_study(config.study);
    return timed([&] {
        ExperimentReport report;
        report.experiment = "fig3";
        report.config = to_json(config);
        const std::uint64_t group_seed = stream_seed(config.study.seed, 0);
        const double n = static_cast<double>(config.n);
        for (std::size_t t : config.t_values) {
            const std::string id = tag("t", static_cast<double>(t));
            std::size_t degenerate = 0;
            auto records = run_replicates(config.study, id, degenerate, [&](std::size_t r) {
                const std::uint64_t rep_seed = stream_seed(group_seed, r);
                const auto a = gen_network(config.n, config.graph, stream_seed(rep_seed, 0));
                const auto y0 = standard_normal(config.n, stream_seed(rep_seed, 1));
                const auto y = transmit_continuous(y0, a, t, config.mixing);

                double mean = 0.0;
                for (double v : y) mean += v;
                mean /= n;
                double ss = 0.0;
                for (double v : y) ss += (v - mean) * (v - mean);
                const double se = std::sqrt(ss / (n - 1.0) / n);

                auto rec = record_from(id, r, run_moran_test(y, a, replicate_plan(config.study, rep_seed)));
                rec.estimate = mean;
                rec.covered = std::abs(mean) <= config.ci_z * se;
                return rec;
            });
            report.settings.push_back(summarize(id, {{"t", static_cast<double>(t)}, {"mixing", config.mixing}},
                                                records, config.study.alpha, degenerate));
            report.records.insert(report.records.end(), records.begin(), records.end());
        }
        return report;
    });
}

ExperimentReport coverage_experiment_categorical(const CategoricalCoverageConfig& config) {
    check_study(config.study);
    if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) throw InvalidInput("ci_level must lie in (0, 1)");
    return timed([&] {
        ExperimentReport report;
        report.experiment = "table1";
        report.config = to_json(config);
        const std::size_t k = config.marginals.size();
        const double n = static_cast<double>(config.n);
        const double z = normal_quantile(1.0 - (1.0 - config.ci_level) / (2.0 * static_cast<double>(k)));
        const std::uint64_t group_seed = stream_seed(config.study.seed, 0);
        for (std::size_t t : config.t_values) {
            const std::string id = tag("t", static_cast<double>(t));
            std::size_t degenerate = 0;
            auto records = run_replicates(config.study, id, degenerate, [&](std::size_t r) {
                const std::uint64_t rep_seed = stream_seed(group_seed, r);
                const auto a = gen_network(config.n, config.graph, stream_seed(rep_seed, 0));
                const auto labels0 = draw_categorical(config.n, config.marginals, stream_seed(rep_seed, 1));
                auto labels = transmit_categorical(labels0, a, t, config.p_adopt, stream_seed(rep_seed, 3));

                const CategoricalSample s(std::move(labels), k);
                bool covered = true;
                for (std::size_t c = 0; c < k; ++c) {
                    const auto [lo, hi] = proportion_interval(s.proportions()[c], n, z, config.interval);
                    if (config.marginals[c] < lo || config.marginals[c] > hi) covered = false;
                }
                auto rec = record_from(id, r, run_phi_test(s, a, replicate_plan(config.study, rep_seed)));
                rec.covered = covered;
                return rec;
            });
            report.settings.push_back(summarize(id, {{"t", static_cast<double>(t)}, {"p_adopt", config.p_adopt}},
                                                records, config.study.alpha, degenerate));
            report.records.insert(report.records.end(), records.begin(), records.end());
        }
        return report;
    });
}

ExperimentReport replay_experiment(const json& config) {
    const auto name = config.at("experiment").get<std::string>();
    if (name == "fig1") return rejection_curve_sar(sar_config_from_json(config));
    if (name == "fig2") return rejection_curve_correrr(correrr_config_from_json(config));
    if (name == "fig3") return coverage_experiment_continuous(continuous_config_from_json(config));
    if (name == "table1") return coverage_experiment_categorical(categorical_config_from_json(config));
    throw InvalidInput("unknown experiment '" + name + "'");
}

json to_json(const SarCurveConfig& c) {
    json j = study_json(c.study);
    j["experiment"] = "fig1";
    j["d_values"] = c.d_values;
    j["rho_values"] = c.rho_values;
    j["n"] = c.n;
    j["cutoffs"] = c.cutoffs;
    return j;
}

json to_json(const CorrErrConfig& c) {
    json j = study_json(c.study);
    j["experiment"] = "fig2";
    j["q_values"] = c.q_values;
    j["include_null"] = c.include_null;
    j["n"] = c.n;
    j["width"] = c.width;
    j["height"] = c.height;
    j["cap"] = c.cap;
    j["weight_mode"] = to_string(c.mode);
    j["cutoffs"] = c.cutoffs;
    if (c.coordinates) j["coordinates"] = *c.coordinates;
    return j;
}

json to_json(const ContinuousCoverageConfig& c) {
    json j = study_json(c.study);
    j["experiment"] = "fig3";
    j["t_values"] = c.t_values;
    j["n"] = c.n;
    j["mixing"] = c.mixing;
    j["graph"] = graph_json(c.graph);
    j["ci_z"] = c.ci_z;
    return j;
}

json to_json(const CategoricalCoverageConfig& c) {
    json j = study_json(c.study);
    j["experiment"] = "table1";
    j["t_values"] = c.t_values;
    j["n"] = c.n;
    j["p_adopt"] = c.p_adopt;
    j["marginals"] = c.marginals;
    j["graph"] = graph_json(c.graph);
    j["ci_level"] = c.ci_level;
    j["interval"] = to_string(c.interval);
    return j;
}

SarCurveConfig sar_config_from_json(const json& j) {
    SarCurveConfig c;
    c.study = study_from_json(j);
    c.d_values = j.at("d_values").get<std::vector<std::size_t>>();
    c.rho_values = j.at("rho_values").get<std::vector<double>>();
    c.n = j.at("n").get<std::size_t>();
    c.cutoffs = j.at("cutoffs").get<std::vector<double>>();
    return c;
}

CorrErrConfig correrr_config_from_json(const json& j) {
    CorrErrConfig c;
    c.study = study_from_json(j);
    c.q_values = j.at("q_values").get<std::vector<double>>();
    c.include_null = j.at("include_null").get<bool>();
    c.n = j.at("n").get<std::size_t>();
    c.width = j.at("width").get<double>();
    c.height = j.at("height").get<double>();
    c.cap = j.at("cap").get<double>();
    c.mode = parse_weight_mode(j.at("weight_mode").get<std::string>());
    c.cutoffs = j.at("cutoffs").get<std::vector<double>>();
    if (j.contains("coordinates")) c.coordinates = j.at("coordinates").get<std::vector<std::vector<double>>>();
    return c;
}

ContinuousCoverageConfig continuous_config_from_json(const json& j) {
    ContinuousCoverageConfig c;
    c.study = study_from_json(j);
    c.t_values = j.at("t_values").get<std::vector<std::size_t>>();
    c.n = j.at("n").get<std::size_t>();
    c.mixing = j.at("mixing").get<double>();
    c.graph = graph_from_json(j.at("graph"));
    c.ci_z = j.at("ci_z").get<double>();
    return c;
}

CategoricalCoverageConfig categorical_config_from_json(const json& j) {
    CategoricalCoverageConfig c;
    c.study = study_from_json(j);
    c.t_values = j.at("t_values").get<std::vector<std::size_t>>();
    c.n = j.at("n").get<std::size_t>();
    c.p_adopt = j.at("p_adopt").get<double>();
    c.marginals = j.at("marginals").get<std::vector<double>>();
    c.graph = graph_from_json(j.at("graph"));
    c.ci_level = j.at("ci_level").get<double>();
    c.interval = parse_interval_method(j.at("interval").get<std::string>());
    return c;
}

json to_json(const ExperimentReport& r) {
    json settings = json::array();
    for (const auto& s : r.settings) {
        json js = {{"id", s.id},
                   {"parameters", s.parameters},
                   {"reps", s.reps},
                   {"rejections", s.rejections},
                   {"rejection_rate", s.rejection_rate},
                   {"rejection_se", s.rejection_se},
                   {"degenerate", s.degenerate}};
        if (s.z_rejections) {
            js["z_rejections"] = *s.z_rejections;
            js["z_rejection_rate"] = *s.z_rejection_rate;
            js["z_rejection_se"] = *s.z_rejection_se;
        }
        if (s.covered) {
            js["covered"] = *s.covered;
            js["coverage_rate"] = *s.coverage_rate;
            js["coverage_se"] = *s.coverage_se;
        }
        if (s.mean_estimate) {
            js["mean_estimate"] = *s.mean_estimate;
            js["mean_estimate_se"] = *s.mean_estimate_se;
        }
        settings.push_back(std::move(js));
    }
    return {{"experiment", r.experiment},
            {"config", r.config},
            {"settings", settings},
            {"timing", {{"wall_clock_seconds", r.wall_clock_seconds}}}};
}

std::string to_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "setting,replicate,statistic,z,p_permutation,p_normal,covered,estimate\n";
    for (const auto& rec : r.records) {
        os << rec.setting << ',' << rec.replicate << ',';
        if (!rec.degenerate) os << format_number(rec.statistic);
        os << ',';
        if (rec.z) os << format_number(*rec.z);
        os << ',';
        if (!rec.degenerate) os << format_number(rec.p_permutation);
        os << ',';
        if (rec.p_normal) os << format_number(*rec.p_normal);
        os << ',';
        if (rec.covered) os << (*rec.covered ? 1 : 0);
        os << ',';
        if (rec.estimate) os << format_number(*rec.estimate);
        os << '\n';
    }
    return os.str();
}

} // namespace netautocorr
