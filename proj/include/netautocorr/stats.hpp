#pragma once

#include "netautocorr/weights.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace netautocorr {

/// Categorical outcome: one category id in [0, K) per node plus the category
/// probabilities used by the statistic.
///
/// By default the probabilities are the sample proportions n_k / n. Categories
/// that never occur get proportion zero and are ignored by every statistic.
/// Externally supplied probabilities must be strictly positive and sum to one;
/// permutation tests remain valid with them but the closed-form null moments
/// do not apply.
class CategoricalSample {
public:
    /// K defaults to max(label) + 1.
    explicit CategoricalSample(std::vector<std::size_t> labels, std::size_t categories = 0);
    CategoricalSample(std::vector<std::size_t> labels, std::vector<double> proportions);

    std::size_t size() const { return labels_.size(); }
    std::size_t categories() const { return proportions_.size(); }
    /// Number of categories that occur at least once.
    std::size_t present_categories() const;
    bool proportions_supplied() const { return supplied_; }

    std::span<const std::size_t> labels() const { return labels_; }
    std::span<const double> proportions() const { return proportions_; }
    std::span<const std::size_t> counts() const { return counts_; }

    /// Same proportions, labels permuted.
    CategoricalSample with_labels(std::vector<std::size_t> labels) const;

private:
    std::vector<std::size_t> labels_;
    std::vector<double> proportions_;
    std::vector<std::size_t> counts_;
    bool supplied_ = false;
};

struct MoranMoments {
    double mean = 0.0;
    double variance = 0.0;
};

struct PhiMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double q22 = 0.0;
};

/// Null hypothesis behind the Moran variance.
enum class MoranNull {
    randomization, ///< values fixed, assignment to nodes uniformly permuted
    normality      ///< values i.i.d. Gaussian
};

/// Moran's I. Throws InvalidInput on a length mismatch and DegenerateData when
/// y is constant.
double morans_i(std::span<const double> y, const WeightMatrix& w);

/// Exact null mean and variance of Moran's I. The randomization variant uses
/// the sample kurtosis of y. Needs n >= 2; index patterns that cannot occur
/// for small n contribute nothing.
MoranMoments moran_moments(const WeightSummary& summary, std::span<const double> y,
                           MoranNull null = MoranNull::randomization);

/// (stat - mean) / sqrt(variance). Throws DegenerateData when variance <= 0.
double standardize(double stat, double mean, double variance);

/// Categorical analogue of Moran's I: concordant pairs add w_ij / (p_a p_b),
/// discordant pairs subtract it, normalized by S0.
double phi(const CategoricalSample& s, const WeightMatrix& w);

/// Mean and second moment of Phi under random relabelling of the nodes with
/// the observed label multiset held fixed. Proportions are the sample
/// proportions of `s`, regardless of what `s` carries.
PhiMoments phi_moments(const CategoricalSample& s, const WeightSummary& summary);

/// J_k = sum over unordered pairs of (w_ij + w_ji)/2 for pairs where both
/// nodes are in category k.
std::vector<double> join_counts(const CategoricalSample& s, const WeightMatrix& w);

struct BinaryEquivalence {
    double z_moran = 0.0;
    double z_phi = 0.0;
};

/// Standardized Moran's I (randomization null) and standardized Phi for a
/// two-category outcome. The two coincide up to rounding.
BinaryEquivalence binary_equivalence_check(const CategoricalSample& s, const WeightMatrix& w);

} // namespace netautocorr
