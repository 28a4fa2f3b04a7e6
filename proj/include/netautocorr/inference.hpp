#pragma once

#include "netautocorr/stats.hpp"
#include "netautocorr/weights.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace netautocorr {

enum class Tail { upper, lower, two_sided };

const char* to_string(Tail t);
Tail parse_tail(const std::string& text);

struct PermutationPlan {
    std::size_t replicates = 500;
    std::uint64_t seed = 0;
    Tail tail = Tail::upper;
    /// Worker count for replicate evaluation; 0 means all cores. Results do
    /// not depend on this value.
    std::size_t threads = 1;
};

struct TestConfig {
    MoranNull moran_null = MoranNull::randomization;
    double diagnostics_threshold = 0.1;
    /// Copy the null draws into TestResult::null_draws.
    bool keep_null = false;
};

using NullMoments = std::variant<std::monostate, MoranMoments, PhiMoments>;

struct TestResult {
    std::string statistic_name;
    double statistic = 0.0;
    std::optional<double> z;
    std::optional<double> p_permutation;
    std::optional<double> p_normal;
    NullMoments moments;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    Tail tail = Tail::upper;
    NormalityDiagnostics diagnostics;
    std::size_t n = 0;
    double s0 = 0.0;
    /// Join-count tests only.
    std::optional<std::size_t> category;
    std::optional<std::size_t> category_count;
    bool skipped = false;
    std::vector<double> null_draws;
};

/// Moran's I for uniformly random relabellings of y. Replicate r uses the
/// random stream stream_seed(plan.seed, r), so the returned vector does not
/// depend on plan.threads.
std::vector<double> permutation_null_moran(std::span<const double> y, const WeightMatrix& w,
                                           const PermutationPlan& plan);

/// Phi for uniformly random relabellings, with the proportions of `s` held fixed.
std::vector<double> permutation_null_phi(const CategoricalSample& s, const WeightMatrix& w,
                                         const PermutationPlan& plan);

/// Join counts for uniformly random relabellings; result[k][r] is J_k under
/// replicate r. All categories share the same permutations.
std::vector<std::vector<double>> permutation_null_joincounts(const CategoricalSample& s, const WeightMatrix& w,
                                                             const PermutationPlan& plan);

/// (1 + #{draws at least as extreme}) / (M + 1). Two-sided doubles the smaller
/// one-sided value, capped at 1. Draws within 1e-12 (relative) of the observed
/// value count as ties.
double p_value_permutation(double observed, std::span<const double> draws, Tail tail);

/// Standard normal tail probability of z.
double p_value_normal(double z, Tail tail);

TestResult run_moran_test(std::span<const double> y, const WeightMatrix& w, const PermutationPlan& plan,
                          const TestConfig& config = {});

/// The z-test is omitted when `s` carries externally supplied proportions.
TestResult run_phi_test(const CategoricalSample& s, const WeightMatrix& w, const PermutationPlan& plan,
                        const TestConfig& config = {});

/// One permutation test per category (permutation p-value only). Categories
/// that do not occur are returned with skipped = true.
std::vector<TestResult> run_joincount_tests(const CategoricalSample& s, const WeightMatrix& w,
                                            const PermutationPlan& plan, const TestConfig& config = {});

} // namespace netautocorr
