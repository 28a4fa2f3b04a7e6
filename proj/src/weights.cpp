#include "netautocorr/weights.hpp"

#include "netautocorr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace netautocorr {

namespace {

std::string pair_text(std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << '(' << i << ", " << j << ')';
    return os.str();
}

} // namespace

WeightMatrix WeightMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries) {
    if (n == 0) throw InvalidInput("weight matrix needs at least one node");
    for (const auto& e : entries) {
        if (e.row >= n || e.col >= n)
            throw InvalidInput("weight entry " + pair_text(e.row, e.col) + " out of range for n = " +
                               std::to_string(n));
        if (e.row == e.col)
            throw InvalidInput("diagonal weight at node " + std::to_string(e.row) + " is not allowed");
        if (!std::isfinite(e.value) || e.value < 0.0)
            throw InvalidInput("weight " + pair_text(e.row, e.col) + " must be finite and nonnegative");
    }
    std::erase_if(entries, [](const Triplet& e) { return e.value == 0.0; });
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col)
            throw InvalidInput("duplicate weight entry " + pair_text(entries[k].row, entries[k].col));
    }
    if (entries.empty()) throw DegenerateData("weight matrix has no positive off-diagonal weight (S0 = 0)");

    WeightMatrix w;
    w.n_ = n;
    w.offsets_.assign(n + 1, 0);
    w.cols_.reserve(entries.size());
    w.values_.reserve(entries.size());
    for (const auto& e : entries) {
        ++w.offsets_[e.row + 1];
        w.cols_.push_back(e.col);
        w.values_.push_back(e.value);
    }
    std::partial_sum(w.offsets_.begin(), w.offsets_.end(), w.offsets_.begin());

    w.symmetric_ = std::all_of(entries.begin(), entries.end(),
                               [&](const Triplet& e) { return w.at(e.col, e.row) == e.value; });
    return w;
}

WeightMatrix WeightMatrix::from_dense(std::size_t n, std::span<const double> values) {
    if (values.size() != n * n)
        throw InvalidInput("dense weight array has " + std::to_string(values.size()) + " entries, expected " +
                           std::to_string(n * n));
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = values[i * n + j];
            if (i == j) {
                if (v != 0.0) throw InvalidInput("dense weight array has a nonzero diagonal");
                continue;
            }
            if (v != 0.0) entries.push_back({i, j, v});
        }
    }
    return from_triplets(n, std::move(entries));
}

double WeightMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw InvalidInput("index " + pair_text(i, j) + " out of range");
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> WeightMatrix::row_sums() const {
    std::vector<double> sums(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (double v : row_values(i)) sums[i] += v;
    }
    return sums;
}

std::vector<double> WeightMatrix::col_sums() const {
    std::vector<double> sums(n_, 0.0);
    for (std::size_t k = 0; k < cols_.size(); ++k) sums[cols_[k]] += values_[k];
    return sums;
}

std::vector<Triplet> WeightMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) out.push_back({i, cols_[k], values_[k]});
    }
    return out;
}

WeightMatrix WeightMatrix::transposed() const {
    if (symmetric_) return *this;
    auto entries = triplets();
    for (auto& e : entries) std::swap(e.row, e.col);
    return from_triplets(n_, std::move(entries));
}

WeightMatrix WeightMatrix::symmetrized() const {
    if (symmetric_) return *this;
    std::vector<Triplet> entries;
    entries.reserve(2 * nnz());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            const std::size_t j = cols_[k];
            const double wji = at(j, i);
            entries.push_back({i, j, 0.5 * (values_[k] + wji)});
            // Pairs stored only as (j, i) never show up when scanning row i.
            if (wji == 0.0) entries.push_back({j, i, 0.5 * values_[k]});
        }
    }
    return from_triplets(n_, std::move(entries));
}

std::vector<double> WeightMatrix::to_dense() const {
    std::vector<double> dense(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) dense[i * n_ + cols_[k]] = values_[k];
    }
    return dense;
}

CoordinateSet::CoordinateSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw InvalidInput("coordinates need at least one dimension");
    if (coords_.size() % dim_ != 0) throw InvalidInput("coordinate array length is not a multiple of the dimension");
    if (coords_.size() / dim_ < 2) throw InvalidInput("at least two points are required");
    for (double c : coords_) {
        if (!std::isfinite(c)) throw InvalidInput("coordinates must be finite");
    }
}

CoordinateSet CoordinateSet::from_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw InvalidInput("at least two points are required");
    const std::size_t dim = points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim) throw InvalidInput("all points must have the same dimension");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return CoordinateSet(dim, std::move(flat));
}

double CoordinateSet::distance(std::size_t i, std::size_t j) const {
    const auto a = point(i);
    const auto b = point(j);
    double ss = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) ss += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(ss);
}

double CoordinateSet::max_distance() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) best = std::max(best, distance(i, j));
    }
    return best;
}

const char* to_string(Verdict v) {
    return v == Verdict::plausible ? "plausible" : "suspect";
}

WeightMatrix adjacency_from_edges(std::span<const std::pair<std::size_t, std::size_t>> edges, std::size_t n) {
    if (edges.empty()) throw DegenerateData("edge list is empty (S0 = 0)");
    std::vector<std::pair<std::size_t, std::size_t>> undirected;
    undirected.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a >= n || b >= n)
            throw InvalidInput("edge " + pair_text(a, b) + " references a node outside [0, " + std::to_string(n) + ")");
        if (a == b) throw InvalidInput("self-loop at node " + std::to_string(a));
        undirected.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(undirected.begin(), undirected.end());
    undirected.erase(std::unique(undirected.begin(), undirected.end()), undirected.end());

    std::vector<Triplet> entries;
    entries.reserve(2 * undirected.size());
    for (auto [a, b] : undirected) {
        entries.push_back({a, b, 1.0});
        entries.push_back({b, a, 1.0});
    }
    return WeightMatrix::from_triplets(n, std::move(entries));
}

WeightMatrix knn_weights(const CoordinateSet& coords, std::size_t k, WarningLog* warnings) {
    const std::size_t n = coords.size();
    if (k == 0) throw InvalidInput("k must be positive");
    if (k >= n) throw InvalidInput("k = " + std::to_string(k) + " must be smaller than n = " + std::to_string(n));

    std::size_t coincident = 0;
    std::size_t boundary_ties = 0;
    std::vector<Triplet> entries;
    entries.reserve(n * k);
    std::vector<std::pair<double, std::size_t>> ranked(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = coords.distance(i, j);
            if (d == 0.0 && j > i) ++coincident;
            ranked[r++] = {d, j};
        }
        // Pair ordering is (distance, index): ties go to the lower index.
        const auto kth = ranked.begin() + static_cast<std::ptrdiff_t>(k);
        std::partial_sort(ranked.begin(), kth, ranked.end());
        if (k < n - 1) {
            const double cutoff = ranked[k - 1].first;
            const bool tie = std::any_of(kth, ranked.end(), [&](const auto& p) { return p.first == cutoff; });
            if (tie) ++boundary_ties;
        }
        for (std::size_t m = 0; m < k; ++m) entries.push_back({i, ranked[m].second, 1.0});
    }
    if (warnings != nullptr) {
        if (coincident > 0)
            warnings->push_back(std::to_string(coincident) + " pair(s) of coincident points; neighbour ranking is ambiguous");
        if (boundary_ties > 0)
            warnings->push_back(std::to_string(boundary_ties) +
                                " node(s) have a distance tie at the k-th neighbour; broken by lower node index");
    }
    return WeightMatrix::from_triplets(n, std::move(entries));
}

WeightMatrix inverse_distance_weights(const CoordinateSet& coords, double cap) {
    if (!(cap > 1.0)) throw InvalidInput("inverse-distance cap must exceed 1");
    const std::size_t n = coords.size();
    const double dmax = coords.max_distance();
    std::vector<Triplet> entries;
    entries.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = coords.distance(i, j);
            if (d == 0.0) throw InvalidInput("points " + pair_text(i, j) + " coincide");
            entries.push_back({i, j, std::min(dmax / d, cap)});
        }
    }
    return WeightMatrix::from_triplets(n, std::move(entries));
}

double capped_fraction(const WeightMatrix& w, double cap) {
    const std::size_t n = w.size();
    const auto capped = std::count(w.values().begin(), w.values().end(), cap);
    return static_cast<double>(capped) / static_cast<double>(n * (n - 1));
}

WeightMatrix exp_decay_weights(const CoordinateSet& coords, double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidInput("decay parameter q must be finite and nonnegative");
    const std::size_t n = coords.size();
    const double dmax = coords.max_distance();
    if (dmax == 0.0) throw InvalidInput("all points coincide");
    std::vector<Triplet> entries;
    entries.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) entries.push_back({i, j, std::exp(-q * coords.distance(i, j) / dmax)});
        }
    }
    return WeightMatrix::from_triplets(n, std::move(entries));
}

WeightMatrix row_normalize(const WeightMatrix& w) {
    const auto sums = w.row_sums();
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (sums[i] == 0.0) throw InvalidInput("node " + std::to_string(i) + " is isolated (zero row sum)");
    }
    std::vector<Triplet> entries = w.triplets();
    for (auto& e : entries) {
        if (sums[e.row] != 1.0) e.value /= sums[e.row];
    }
    return WeightMatrix::from_triplets(w.size(), std::move(entries));
}

WeightSummary weight_summary(const WeightMatrix& w) {
    WeightSummary s;
    s.n = w.size();
    const auto rows = w.row_sums();
    const auto cols = w.col_sums();

    // S1 runs over ordered pairs of W + W^T. Each stored w_ij contributes the
    // pair (i, j); a pair stored only as w_ji is picked up from the other side.
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto c = w.row_cols(i);
        const auto v = w.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double wji = w.is_symmetric() ? v[k] : w.at(c[k], i);
            const double t = v[k] + wji;
            s.s0 += v[k];
            s.s1 += wji == 0.0 ? t * t : 0.5 * t * t;
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) s.s2 += (rows[i] + cols[i]) * (rows[i] + cols[i]);
    return s;
}

NormalityDiagnostics normality_diagnostics(const WeightMatrix& w, double threshold) {
    const auto d = w.symmetrized();
    const auto rows = d.row_sums();
    double total = 0.0;
    double largest = 0.0;
    for (double r : rows) {
        total += r * r;
        largest = std::max(largest, r * r);
    }
    double pair_sq = 0.0;
    for (double v : d.values()) pair_sq += v * v;

    NormalityDiagnostics out;
    out.ratio_sum = pair_sq / total;
    out.ratio_max = largest / total;
    out.threshold = threshold;
    out.verdict = out.ratio_max > threshold ? Verdict::suspect : Verdict::plausible;
    return out;
}

} // namespace netautocorr
