#include "netautocorr/stats.hpp"

#include "netautocorr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace netautocorr {

namespace {

void require_same_size(std::size_t data, const WeightMatrix& w) {
    if (data != w.size())
        throw InvalidInput("outcome has " + std::to_string(data) + " values but the weight matrix has " +
                           std::to_string(w.size()) + " nodes");
}

// Variances that are zero in exact arithmetic come out as +-1 ulp-scale noise.
double clean_variance(double second_moment, double mean) {
    const double var = second_moment - mean * mean;
    const double scale = std::max(std::abs(second_moment), mean * mean);
    return std::abs(var) <= 1e-12 * scale ? 0.0 : var;
}

} // namespace

CategoricalSample::CategoricalSample(std::vector<std::size_t> labels, std::size_t categories)
    : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidInput("categorical sample is empty");
    const std::size_t k = std::max(categories, *std::max_element(labels_.begin(), labels_.end()) + 1);
    counts_.assign(k, 0);
    for (auto l : labels_) ++counts_[l];
    proportions_.resize(k);
    const double n = static_cast<double>(labels_.size());
    for (std::size_t c = 0; c < k; ++c) proportions_[c] = static_cast<double>(counts_[c]) / n;
}

CategoricalSample::CategoricalSample(std::vector<std::size_t> labels, std::vector<double> proportions)
    : labels_(std::move(labels)), proportions_(std::move(proportions)), supplied_(true) {
    if (labels_.empty()) throw InvalidInput("categorical sample is empty");
    const std::size_t k = proportions_.size();
    double total = 0.0;
    for (double p : proportions_) {
        if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("supplied category proportions must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("supplied category proportions must sum to 1");
    counts_.assign(k, 0);
    for (auto l : labels_) {
        if (l >= k) throw InvalidInput("label " + std::to_string(l) + " has no supplied proportion");
        ++counts_[l];
    }
}

std::size_t CategoricalSample::present_categories() const {
    return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
}

CategoricalSample CategoricalSample::with_labels(std::vector<std::size_t> labels) const {
    CategoricalSample out = *this;
    if (labels.size() != labels_.size()) throw InvalidInput("relabelled sample changes the node count");
    out.labels_ = std::move(labels);
    return out;
}

double morans_i(std::span<const double> y, const WeightMatrix& w) {
    require_same_size(y.size(), w);
    const double n = static_cast<double>(y.size());
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    std::vector<double> z(y.size());
    double m2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = y[i] - mean;
        m2 += z[i] * z[i];
    }
    if (!(m2 > 0.0)) throw DegenerateData("Moran's I is undefined for a constant outcome");

    double cross = 0.0;
    double s0 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto cols = w.row_cols(i);
        const auto vals = w.row_values(i);
        double row = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            row += vals[k] * z[cols[k]];
            s0 += vals[k];
        }
        cross += z[i] * row;
    }
    return cross / (s0 * m2 / n);
}

MoranMoments moran_moments(const WeightSummary& summary, std::span<const double> y, MoranNull null) {
    const std::size_t count = y.size();
    if (count < 2) throw InvalidInput("Moran moments need at least two observations");
    if (count != summary.n) throw InvalidInput("outcome length does not match the weight summary");
    const double n = static_cast<double>(count);
    const double s0 = summary.s0;
    const double s1 = summary.s1;
    const double s2 = summary.s2;

    MoranMoments m;
    m.mean = -1.0 / (n - 1.0);

    if (null == MoranNull::normality) {
        const double second = (n * n * s1 - n * s2 + 3.0 * s0 * s0) / ((n * n - 1.0) * s0 * s0);
        m.variance = clean_variance(second, m.mean);
        return m;
    }

    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : y) {
        const double d = (v - mean_y) * (v - mean_y);
        m2 += d;
        m4 += d * d;
    }
    if (!(m2 > 0.0)) throw DegenerateData("Moran moments are undefined for a constant outcome");

    // E[Gamma^2] for Gamma = sum_{i != j} w_ij z_pi(i) z_pi(j), split by how
    // many node indices the two pairs share. Terms whose index pattern cannot
    // occur for small n have a weight factor that is exactly zero.
    const double same_pair = m2 * m2 - m4;
    const double one_shared = 2.0 * m4 - m2 * m2;
    const double disjoint = 3.0 * m2 * m2 - 6.0 * m4;
    double gamma2 = s1 * same_pair / (n * (n - 1.0));
    if (count > 2) gamma2 += (s2 - 2.0 * s1) * one_shared / (n * (n - 1.0) * (n - 2.0));
    if (count > 3) gamma2 += (s0 * s0 - s2 + s1) * disjoint / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));

    const double second = n * n * gamma2 / (s0 * s0 * m2 * m2);
    m.variance = clean_variance(second, m.mean);
    return m;
}

double standardize(double stat, double mean, double variance) {
    if (!(variance > 0.0)) throw DegenerateData("null variance is zero; the statistic cannot be standardized");
    return (stat - mean) / std::sqrt(variance);
}

double phi(const CategoricalSample& s, const WeightMatrix& w) {
    require_same_size(s.size(), w);
    if (s.present_categories() < 2) throw DegenerateData("Phi needs at least two observed categories");

    const auto labels = s.labels();
    const auto p = s.proportions();
    std::vector<double> inv(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) inv[i] = 1.0 / p[labels[i]];

    double total = 0.0;
    double s0 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto cols = w.row_cols(i);
        const auto vals = w.row_values(i);
        double row = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::size_t j = cols[k];
            const double sign = labels[i] == labels[j] ? 1.0 : -1.0;
            row += vals[k] * sign * inv[j];
            s0 += vals[k];
        }
        total += inv[i] * row;
    }
    return total / s0;
}

PhiMoments phi_moments(const CategoricalSample& s, const WeightSummary& summary) {
    const std::size_t count = s.size();
    if (count != summary.n) throw InvalidInput("sample size does not match the weight summary");
    if (count < 2) throw InvalidInput("Phi moments need at least two observations");
    if (s.present_categories() < 2) throw DegenerateData("Phi needs at least two observed categories");

    const double n = static_cast<double>(count);
    std::vector<double> p;
    for (auto c : s.counts()) {
        if (c > 0) p.push_back(static_cast<double>(c) / n);
    }
    const double k = static_cast<double>(p.size());

    PhiMoments m;
    for (double pl : p) {
        m.q1 += 1.0 / pl;
        m.q2 += 1.0 / (pl * pl);
        m.q3 += 1.0 / (pl * pl * pl);
        for (double pu : p) m.q22 += 1.0 / (pl * pu);
    }
    const double q1 = m.q1;
    const double q2 = m.q2;
    const double q3 = m.q3;
    const double q22 = m.q22;
    const double s0 = summary.s0;
    const double s1 = summary.s1;
    const double s2 = summary.s2;

    m.mean = (n * n * k * (2.0 - k) - n * q1) / (n * (n - 1.0));

    double bracket = s1 / (n * (n - 1.0)) * (n * n * q22 - n * q3);
    if (count > 2) {
        bracket += (s2 - 2.0 * s1) / (n * (n - 1.0) * (n - 2.0)) *
                   (((k - 4.0) * k + 4.0) * n * n * n * q1 + n * (n * ((2.0 * k - 4.0) * q2 - q22) + 2.0 * q3));
    }
    if (count > 3) {
        const double n2 = n * n;
        const double n3 = n2 * n;
        const double lead = n * (-4.0 * q3 + 2.0 * n * q22 - 6.0 * k * n * q2 + 12.0 * n * q2 -
                                 3.0 * k * k * n2 * q1 + 14.0 * k * n2 * q1 - 16.0 * n2 * q1 +
                                 k * k * k * k * n3 - 4.0 * k * k * k * n3 + 4.0 * k * k * n3);
        const double tail =
            (2.0 * k - 4.0) * n2 * q2 + n2 * (k * n * (2.0 * q1 - k * q1) - q22) + 2.0 * n * q3;
        bracket += (s0 * s0 - s2 + s1) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0)) * (lead - tail);
    }
    m.second_moment = bracket / (s0 * s0);
    m.variance = clean_variance(m.second_moment, m.mean);
    return m;
}

std::vector<double> join_counts(const CategoricalSample& s, const WeightMatrix& w) {
    require_same_size(s.size(), w);
    const auto labels = s.labels();
    std::vector<double> joins(s.categories(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto cols = w.row_cols(i);
        const auto vals = w.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (labels[cols[k]] == labels[i]) joins[labels[i]] += 0.5 * vals[k];
        }
    }
    return joins;
}

BinaryEquivalence binary_equivalence_check(const CategoricalSample& s, const WeightMatrix& w) {
    require_same_size(s.size(), w);
    const std::size_t present = s.present_categories();
    if (present < 2) throw DegenerateData("binary check needs two observed categories");
    if (present > 2) throw InvalidInput("binary check needs exactly two observed categories, got " +
                                        std::to_string(present));

    const auto counts = s.counts();
    const std::size_t high = static_cast<std::size_t>(
        std::find_if(counts.rbegin(), counts.rend(), [](auto c) { return c > 0; }).base() - counts.begin() - 1);
    std::vector<double> y(s.size());
    std::vector<std::size_t> labels(s.labels().begin(), s.labels().end());
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = labels[i] == high ? 1.0 : 0.0;
    const CategoricalSample estimated(std::move(labels), s.categories());

    const auto summary = weight_summary(w);
    const auto im = moran_moments(summary, y, MoranNull::randomization);
    const auto pm = phi_moments(estimated, summary);

    BinaryEquivalence out;
    out.z_moran = standardize(morans_i(y, w), im.mean, im.variance);
    out.z_phi = standardize(phi(estimated, w), pm.mean, pm.variance);
    return out;
}

} // namespace netautocorr
