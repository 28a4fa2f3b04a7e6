#include "netautocorr/inference.hpp"

#include "netautocorr/error.hpp"
#include "netautocorr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace netautocorr {

namespace {

constexpr double tie_tolerance = 1e-12;

void check_plan(const PermutationPlan& plan) {
    if (plan.replicates == 0) throw InvalidInput("permutation plan needs at least one replicate");
}

/// Fills slot r of the output with stat(permutation_r) for r in [0, M).
template <typename Stat>
std::vector<double> draw_null(std::size_t n, const PermutationPlan& plan, const Stat& stat) {
    check_plan(plan);
    std::vector<double> draws(plan.replicates);
    parallel_for(plan.replicates, plan.threads, [&](std::size_t r) {
        std::mt19937_64 rng(stream_seed(plan.seed, r));
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        draws[r] = stat(perm);
    });
    return draws;
}

/// Moran's I with the centered outcome relabelled by a permutation.
class MoranKernel {
public:
    MoranKernel(std::span<const double> y, const WeightMatrix& w) : w_(w), z_(y.size()) {
        if (y.size() != w.size())
            throw InvalidInput("outcome has " + std::to_string(y.size()) + " values but the weight matrix has " +
                               std::to_string(w.size()) + " nodes");
        const double n = static_cast<double>(y.size());
        const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
        for (std::size_t i = 0; i < y.size(); ++i) {
            z_[i] = y[i] - mean;
            m2_ += z_[i] * z_[i];
        }
        if (!(m2_ > 0.0)) throw DegenerateData("Moran's I is undefined for a constant outcome");
        for (double v : w.values()) s0_ += v;
        scale_ = n / (s0_ * m2_);
    }

    double operator()(std::span<const std::size_t> perm) const {
        std::vector<double> zp(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) zp[i] = z_[perm[i]];
        double cross = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) {
            const auto cols = w_.row_cols(i);
            const auto vals = w_.row_values(i);
            double row = 0.0;
            for (std::size_t k = 0; k < cols.size(); ++k) row += vals[k] * zp[cols[k]];
            cross += zp[i] * row;
        }
        return cross * scale_;
    }

    double s0() const { return s0_; }

private:
    const WeightMatrix& w_;
    std::vector<double> z_;
    double m2_ = 0.0;
    double s0_ = 0.0;
    double scale_ = 0.0;
};

/// Phi with labels relabelled by a permutation; pair scores come from a
/// K x K table of (2 * [a == b] - 1) / (p_a p_b).
class PhiKernel {
public:
    PhiKernel(const CategoricalSample& s, const WeightMatrix& w)
        : w_(w), labels_(s.labels().begin(), s.labels().end()), k_(s.categories()), table_(k_ * k_, 0.0),
          symmetric_(w.is_symmetric()) {
        if (s.size() != w.size())
            throw InvalidInput("sample has " + std::to_string(s.size()) + " labels but the weight matrix has " +
                               std::to_string(w.size()) + " nodes");
        if (s.present_categories() < 2) throw DegenerateData("Phi needs at least two observed categories");
        const auto p = s.proportions();
        for (std::size_t a = 0; a < k_; ++a) {
            for (std::size_t b = 0; b < k_; ++b) {
                if (p[a] > 0.0 && p[b] > 0.0) table_[a * k_ + b] = (a == b ? 1.0 : -1.0) / (p[a] * p[b]);
            }
        }
        for (double v : w.values()) s0_ += v;
        if (symmetric_) {
            upper_start_.resize(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) {
                const auto cols = w.row_cols(i);
                upper_start_[i] = static_cast<std::size_t>(std::upper_bound(cols.begin(), cols.end(), i) - cols.begin());
            }
        }
    }

    double operator()(std::span<const std::size_t> perm) const {
        std::vector<std::size_t> lp(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) lp[i] = labels_[perm[i]];
        double total = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) {
            const auto cols = w_.row_cols(i);
            const auto vals = w_.row_values(i);
            const double* score = table_.data() + lp[i] * k_;
            // The score table is symmetric, so a symmetric W needs only j > i.
            std::size_t k = symmetric_ ? upper_start_[i] : 0;
            double row = 0.0;
            for (; k < cols.size(); ++k) row += vals[k] * score[lp[cols[k]]];
            total += row;
        }
        return (symmetric_ ? 2.0 * total : total) / s0_;
    }

    double s0() const { return s0_; }

private:
    const WeightMatrix& w_;
    std::vector<std::size_t> labels_;
    std::size_t k_;
    std::vector<double> table_;
    bool symmetric_;
    std::vector<std::size_t> upper_start_;
    double s0_ = 0.0;
};

std::vector<double> joins_for(const WeightMatrix& w, std::span<const std::size_t> labels, std::size_t k) {
    std::vector<double> joins(k, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto cols = w.row_cols(i);
        const auto vals = w.row_values(i);
        for (std::size_t m = 0; m < cols.size(); ++m) {
            if (labels[cols[m]] == labels[i]) joins[labels[i]] += 0.5 * vals[m];
        }
    }
    return joins;
}

std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
}

TestResult base_result(const std::string& name, const WeightMatrix& w, const PermutationPlan& plan,
                       const TestConfig& config) {
    TestResult r;
    r.statistic_name = name;
    r.replicates = plan.replicates;
    r.seed = plan.seed;
    r.tail = plan.tail;
    r.n = w.size();
    r.diagnostics = normality_diagnostics(w, config.diagnostics_threshold);
    return r;
}

} // namespace

const char* to_string(Tail t) {
    switch (t) {
    case Tail::upper: return "upper";
    case Tail::lower: return "lower";
    case Tail::two_sided: return "two_sided";
    }
    return "upper";
}

Tail parse_tail(const std::string& text) {
    if (text == "upper") return Tail::upper;
    if (text == "lower") return Tail::lower;
    if (text == "two_sided" || text == "two-sided" || text == "two") return Tail::two_sided;
    throw InvalidInput("unknown tail '" + text + "' (expected upper, lower or two_sided)");
}

std::vector<double> permutation_null_moran(std::span<const double> y, const WeightMatrix& w,
                                           const PermutationPlan& plan) {
    const MoranKernel kernel(y, w);
    return draw_null(y.size(), plan, kernel);
}

std::vector<double> permutation_null_phi(const CategoricalSample& s, const WeightMatrix& w,
                                         const PermutationPlan& plan) {
    const PhiKernel kernel(s, w);
    return draw_null(s.size(), plan, kernel);
}

std::vector<std::vector<double>> permutation_null_joincounts(const CategoricalSample& s, const WeightMatrix& w,
                                                             const PermutationPlan& plan) {
    if (s.size() != w.size()) throw InvalidInput("sample size does not match the weight matrix");
    check_plan(plan);
    const std::size_t k = s.categories();
    const auto labels = s.labels();
    std::vector<std::vector<double>> out(k, std::vector<double>(plan.replicates));
    parallel_for(plan.replicates, plan.threads, [&](std::size_t r) {
        std::mt19937_64 rng(stream_seed(plan.seed, r));
        std::vector<std::size_t> perm = identity(s.size());
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> lp(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) lp[i] = labels[perm[i]];
        const auto joins = joins_for(w, lp, k);
        for (std::size_t c = 0; c < k; ++c) out[c][r] = joins[c];
    });
    return out;
}

double p_value_permutation(double observed, std::span<const double> draws, Tail tail) {
    if (draws.empty()) throw InvalidInput("permutation p-value needs at least one null draw");
    const double slack = tie_tolerance * std::max(1.0, std::abs(observed));
    std::size_t at_least = 0;
    std::size_t at_most = 0;
    for (double d : draws) {
        if (d >= observed - slack) ++at_least;
        if (d <= observed + slack) ++at_most;
    }
    const double denom = static_cast<double>(draws.size()) + 1.0;
    const double upper = (1.0 + static_cast<double>(at_least)) / denom;
    const double lower = (1.0 + static_cast<double>(at_most)) / denom;
    switch (tail) {
    case Tail::upper: return upper;
    case Tail::lower: return lower;
    case Tail::two_sided: return std::min(1.0, 2.0 * std::min(upper, lower));
    }
    return upper;
}

double p_value_normal(double z, Tail tail) {
    if (std::isnan(z)) throw InvalidInput("z is NaN");
    switch (tail) {
    case Tail::upper: return 0.5 * std::erfc(z / std::sqrt(2.0));
    case Tail::lower: return 0.5 * std::erfc(-z / std::sqrt(2.0));
    case Tail::two_sided: return std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TestResult run_moran_test(std::span<const double> y, const WeightMatrix& w, const PermutationPlan& plan,
                          const TestConfig& config) {
    check_plan(plan);
    const MoranKernel kernel(y, w);
    TestResult r = base_result("moran", w, plan, config);
    r.statistic = kernel(identity(y.size()));
    r.s0 = kernel.s0();

    const auto moments = moran_moments(weight_summary(w), y, config.moran_null);
    r.moments = moments;
    if (moments.variance > 0.0) {
        r.z = standardize(r.statistic, moments.mean, moments.variance);
        r.p_normal = p_value_normal(*r.z, plan.tail);
    }

    auto draws = draw_null(y.size(), plan, kernel);
    r.p_permutation = p_value_permutation(r.statistic, draws, plan.tail);
    if (config.keep_null) r.null_draws = std::move(draws);
    return r;
}

TestResult run_phi_test(const CategoricalSample& s, const WeightMatrix& w, const PermutationPlan& plan,
                        const TestConfig& config) {
    check_plan(plan);
    const PhiKernel kernel(s, w);
    TestResult r = base_result("phi", w, plan, config);
    r.statistic = kernel(identity(s.size()));
    r.s0 = kernel.s0();

    if (!s.proportions_supplied()) {
        const auto moments = phi_moments(s, weight_summary(w));
        r.moments = moments;
        if (moments.variance > 0.0) {
            r.z = standardize(r.statistic, moments.mean, moments.variance);
            r.p_normal = p_value_normal(*r.z, plan.tail);
        }
    }

    auto draws = draw_null(s.size(), plan, kernel);
    r.p_permutation = p_value_permutation(r.statistic, draws, plan.tail);
    if (config.keep_null) r.null_draws = std::move(draws);
    return r;
}

std::vector<TestResult> run_joincount_tests(const CategoricalSample& s, const WeightMatrix& w,
                                            const PermutationPlan& plan, const TestConfig& config) {
    const auto observed = join_counts(s, w);
    auto nulls = permutation_null_joincounts(s, w, plan);
    const auto diagnostics = normality_diagnostics(w, config.diagnostics_threshold);
    double s0 = 0.0;
    for (double v : w.values()) s0 += v;

    std::vector<TestResult> out;
    out.reserve(s.categories());
    for (std::size_t k = 0; k < s.categories(); ++k) {
        TestResult r;
        r.statistic_name = "joincount";
        r.statistic = observed[k];
        r.replicates = plan.replicates;
        r.seed = plan.seed;
        r.tail = plan.tail;
        r.diagnostics = diagnostics;
        r.n = w.size();
        r.s0 = s0;
        r.category = k;
        r.category_count = s.counts()[k];
        if (s.counts()[k] == 0) {
            r.skipped = true;
        } else {
            r.p_permutation = p_value_permutation(observed[k], nulls[k], plan.tail);
            if (config.keep_null) r.null_draws = std::move(nulls[k]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace netautocorr
