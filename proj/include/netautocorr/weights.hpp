#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netautocorr {

using WarningLog = std::vector<std::string>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Sparse nonnegative n x n closeness weights with an empty diagonal.
///
/// Stored in compressed-row form with strictly increasing column indices per
/// row. Explicit zeros are never stored. Every constructed matrix has at least
/// one strictly positive weight, so S0 > 0. Instances are immutable.
class WeightMatrix {
public:
    /// Builds a matrix from (row, col, value) entries. Zero values are dropped.
    /// Throws InvalidInput for out-of-range ids, diagonal entries, negative or
    /// non-finite values and duplicate (row, col) pairs; DegenerateData when no
    /// positive weight remains.
    static WeightMatrix from_triplets(std::size_t n, std::vector<Triplet> entries);

    /// Builds a matrix from a row-major dense n x n array. The diagonal must be zero.
    static WeightMatrix from_dense(std::size_t n, std::span<const double> values);

    std::size_t size() const { return n_; }
    std::size_t nnz() const { return cols_.size(); }
    bool is_symmetric() const { return symmetric_; }

    std::span<const std::size_t> row_offsets() const { return offsets_; }
    std::span<const std::size_t> col_indices() const { return cols_; }
    std::span<const double> values() const { return values_; }

    std::span<const std::size_t> row_cols(std::size_t i) const {
        return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const double> row_values(std::size_t i) const {
        return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    /// w_ij, zero when not stored. O(log row length).
    double at(std::size_t i, std::size_t j) const;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;

    WeightMatrix transposed() const;
    /// (W + W^T) / 2.
    WeightMatrix symmetrized() const;
    std::vector<Triplet> triplets() const;
    /// Row-major dense copy.
    std::vector<double> to_dense() const;

    bool operator==(const WeightMatrix&) const = default;

private:
    WeightMatrix() = default;

    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

/// Points in R^dim, stored row-major.
class CoordinateSet {
public:
    /// Throws InvalidInput for fewer than 2 points, dim == 0, ragged input or
    /// non-finite coordinates.
    CoordinateSet(std::size_t dim, std::vector<double> coords);
    static CoordinateSet from_points(const std::vector<std::vector<double>>& points);

    std::size_t size() const { return coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    double distance(std::size_t i, std::size_t j) const;
    /// Largest pairwise Euclidean distance.
    double max_distance() const;

private:
    std::size_t dim_;
    std::vector<double> coords_;
};

struct WeightSummary {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    std::size_t n = 0;
};

enum class Verdict { plausible, suspect };

struct NormalityDiagnostics {
    double ratio_sum = 0.0;
    double ratio_max = 0.0;
    double threshold = 0.1;
    Verdict verdict = Verdict::suspect;
};

const char* to_string(Verdict v);

/// Binary symmetric adjacency. Duplicate and reversed edges collapse to weight 1.
WeightMatrix adjacency_from_edges(std::span<const std::pair<std::size_t, std::size_t>> edges,
                                  std::size_t n);

/// w_ij = 1 iff j is among the k nearest points of i (Euclidean). Equal
/// distances are broken by the lower node index. Coincident points and
/// distance ties at the k-th neighbour are reported to `warnings`.
WeightMatrix knn_weights(const CoordinateSet& coords, std::size_t k, WarningLog* warnings = nullptr);

/// w_ij = min(D / d_ij, cap) with D the largest pairwise distance.
WeightMatrix inverse_distance_weights(const CoordinateSet& coords, double cap);

/// Fraction of off-diagonal entries equal to `cap`.
double capped_fraction(const WeightMatrix& w, double cap);

/// w_ij = exp(-q d_ij / D) off the diagonal.
WeightMatrix exp_decay_weights(const CoordinateSet& coords, double q);

WeightMatrix row_normalize(const WeightMatrix& w);

WeightSummary weight_summary(const WeightMatrix& w);

NormalityDiagnostics normality_diagnostics(const WeightMatrix& w, double threshold = 0.1);

} // namespace netautocorr
