#pragma once

#include "netautocorr/simgen.hpp"
#include "netautocorr/weights.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netautocorr {

/// Settings shared by every simulation study.
struct StudyOptions {
    std::size_t reps = 500;
    std::size_t perms = 500;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    /// Replicates of one setting run on this many workers (0 = all cores).
    std::size_t threads = 0;
};

/// Phi permutation test power on SAR data over a (d, rho) grid.
struct SarCurveConfig {
    StudyOptions study;
    std::vector<std::size_t> d_values{3, 5, 7, 10};
    std::vector<double> rho_values{0.0, 0.2, 0.4, 0.6};
    std::size_t n = 100;
    std::vector<double> cutoffs{0.25, 0.5, 0.75};
};

enum class WeightMode { true_pi, estimated_w };

const char* to_string(WeightMode m);
WeightMode parse_weight_mode(const std::string& text);

/// Phi permutation test power on spatially correlated errors.
///
/// Coordinates are drawn once, uniformly on [0, width] x [0, height], unless
/// supplied. When include_null is set a first setting with i.i.d. errors is
/// added; it is tested with Pi(q_values.front()) in true_pi mode.
struct CorrErrConfig {
    StudyOptions study;
    std::vector<double> q_values{25.0, 50.0, 100.0};
    bool include_null = true;
    std::size_t n = 473;
    double width = 2.4;
    double height = 1.0;
    double cap = 10.0;
    WeightMode mode = WeightMode::true_pi;
    std::vector<double> cutoffs{0.1, 0.3, 0.6, 0.85};
    std::optional<std::vector<std::vector<double>>> coordinates;
};

/// Coverage of the i.i.d. 95% CI for the mean, and Moran power, under
/// neighbour-averaging transmission on a connected random network.
struct ContinuousCoverageConfig {
    StudyOptions study;
    std::vector<std::size_t> t_values{0, 1, 2, 3};
    std::size_t n = 200;
    double mixing = 0.1;
    WattsStrogatz graph{4, 0.1};
    double ci_z = 1.96;
};

/// Per-category interval inside the Bonferroni adjustment. Wald undercovers
/// for small proportions (about 0.929 simultaneous coverage at n = 200 with
/// the default marginals), so the score interval is the default.
enum class IntervalMethod { wilson, wald };

const char* to_string(IntervalMethod m);
IntervalMethod parse_interval_method(const std::string& text);

/// Simultaneous coverage of Bonferroni-adjusted intervals for the category
/// proportions, and Phi z-test and permutation power, under label-copying
/// transmission.
struct CategoricalCoverageConfig {
    StudyOptions study;
    std::vector<std::size_t> t_values{0, 1, 2, 3};
    std::size_t n = 200;
    double p_adopt = 0.1;
    std::vector<double> marginals{0.1, 0.2, 0.3, 0.25, 0.15};
    WattsStrogatz graph{4, 0.1};
    double ci_level = 0.95;
    IntervalMethod interval = IntervalMethod::wilson;
};

struct SettingSummary {
    std::string id;
    std::map<std::string, double> parameters;
    std::size_t reps = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double rejection_se = 0.0;
    std::optional<std::size_t> z_rejections;
    std::optional<double> z_rejection_rate;
    std::optional<double> z_rejection_se;
    std::optional<std::size_t> covered;
    std::optional<double> coverage_rate;
    std::optional<double> coverage_se;
    std::optional<double> mean_estimate;
    std::optional<double> mean_estimate_se;
    std::size_t degenerate = 0;
};

struct ReplicateRecord {
    std::string setting;
    std::size_t replicate = 0;
    double statistic = 0.0;
    std::optional<double> z;
    double p_permutation = 1.0;
    std::optional<double> p_normal;
    std::optional<bool> covered;
    std::optional<double> estimate;
    /// No test was possible on this draw; counted as a non-rejection.
    bool degenerate = false;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json config;
    std::vector<SettingSummary> settings;
    std::vector<ReplicateRecord> records;
    double wall_clock_seconds = 0.0;

    const SettingSummary& setting(const std::string& id) const;
};

ExperimentReport rejection_curve_sar(const SarCurveConfig& config);
ExperimentReport rejection_curve_correrr(const CorrErrConfig& config);
ExperimentReport coverage_experiment_continuous(const ContinuousCoverageConfig& config);
ExperimentReport coverage_experiment_categorical(const CategoricalCoverageConfig& config);

/// Re-runs the experiment described by a report's echoed config.
ExperimentReport replay_experiment(const nlohmann::json& config);

/// Lower-tail standard normal quantile.
double normal_quantile(double p);

nlohmann::json to_json(const SarCurveConfig& c);
nlohmann::json to_json(const CorrErrConfig& c);
nlohmann::json to_json(const ContinuousCoverageConfig& c);
nlohmann::json to_json(const CategoricalCoverageConfig& c);

SarCurveConfig sar_config_from_json(const nlohmann::json& j);
CorrErrConfig correrr_config_from_json(const nlohmann::json& j);
ContinuousCoverageConfig continuous_config_from_json(const nlohmann::json& j);
CategoricalCoverageConfig categorical_config_from_json(const nlohmann::json& j);

/// Report as JSON. Wall-clock time is kept under "timing" so the rest of the
/// document is reproducible byte for byte.
nlohmann::json to_json(const ExperimentReport& r);

/// Tidy per-replicate table: setting,replicate,statistic,z,p_permutation,p_normal,covered,estimate.
std::string to_csv(const ExperimentReport& r);

} // namespace netautocorr
