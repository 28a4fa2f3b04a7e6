#include "netautocorr/simgen.hpp"

#include "netautocorr/error.hpp"
#include "netautocorr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

namespace netautocorr {

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

Edge ordered(std::size_t a, std::size_t b) {
    return {std::min(a, b), std::max(a, b)};
}

WeightMatrix from_edge_set(const std::set<Edge>& edges, std::size_t n) {
    const std::vector<Edge> list(edges.begin(), edges.end());
    return adjacency_from_edges(list, n);
}

// Havel-Hakimi over a shuffled node order: the node with the largest remaining
// degree is joined to the next largest ones. Unrealizable remainders are
// dropped, so the result may fall short of the targets.
std::set<Edge> havel_hakimi(std::vector<std::size_t> remaining, std::mt19937_64& rng) {
    const std::size_t n = remaining.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::set<Edge> edges;
    for (;;) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remaining[a] > remaining[b]; });
        const std::size_t u = order.front();
        if (remaining[u] == 0) break;
        std::size_t need = remaining[u];
        remaining[u] = 0;
        for (std::size_t m = 1; m < n && need > 0; ++m) {
            const std::size_t v = order[m];
            if (remaining[v] == 0) break;
            edges.insert(ordered(u, v));
            --remaining[v];
            --need;
        }
    }
    return edges;
}

void shuffle_edges(std::set<Edge>& edges, std::size_t swaps, std::mt19937_64& rng) {
    if (edges.size() < 2) return;
    std::vector<Edge> list(edges.begin(), edges.end());
    std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < swaps; ++s) {
        const std::size_t x = pick(rng);
        const std::size_t y = pick(rng);
        if (x == y) continue;
        auto [a, b] = list[x];
        auto [c, d] = list[y];
        if (coin(rng)) std::swap(c, d);
        // (a, b), (c, d) -> (a, d), (c, b)
        if (a == d || c == b) continue;
        const Edge e1 = ordered(a, d);
        const Edge e2 = ordered(c, b);
        if (e1 == e2 || edges.count(e1) || edges.count(e2)) continue;
        edges.erase(list[x]);
        edges.erase(list[y]);
        edges.insert(e1);
        edges.insert(e2);
        list[x] = e1;
        list[y] = e2;
    }
}

std::vector<std::vector<std::size_t>> neighbour_lists(const WeightMatrix& a) {
    std::vector<std::vector<std::size_t>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto cols = a.row_cols(i);
        out[i].assign(cols.begin(), cols.end());
    }
    return out;
}

WeightMatrix watts_strogatz(std::size_t n, const WattsStrogatz& model, std::mt19937_64& rng) {
    if (model.k == 0 || model.k % 2 != 0) throw InvalidInput("Watts-Strogatz k must be a positive even number");
    if (model.k >= n) throw InvalidInput("Watts-Strogatz k must be smaller than n");
    if (!(model.beta >= 0.0 && model.beta <= 1.0)) throw InvalidInput("Watts-Strogatz beta must lie in [0, 1]");

    std::set<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j <= model.k / 2; ++j) edges.insert(ordered(i, (i + j) % n));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    for (std::size_t j = 1; j <= model.k / 2; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (unit(rng) >= model.beta) continue;
            const Edge old = ordered(i, (i + j) % n);
            if (!edges.count(old)) continue;
            std::size_t target = node(rng);
            std::size_t tries = 0;
            while ((target == i || edges.count(ordered(i, target))) && tries++ < 4 * n) target = node(rng);
            if (target == i || edges.count(ordered(i, target))) continue;
            edges.erase(old);
            edges.insert(ordered(i, target));
        }
    }
    return from_edge_set(edges, n);
}

WeightMatrix erdos_renyi(std::size_t n, const ErdosRenyi& model, std::mt19937_64& rng) {
    if (!(model.p > 0.0 && model.p <= 1.0)) throw InvalidInput("Erdos-Renyi p must lie in (0, 1]");
    std::bernoulli_distribution edge(model.p);
    std::set<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (edge(rng)) edges.insert({i, j});
        }
    }
    if (edges.empty()) throw InvalidInput("Erdos-Renyi draw produced no edges");
    return from_edge_set(edges, n);
}

} // namespace

std::vector<std::size_t> draw_target_degrees(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d == 0) throw InvalidInput("mean-degree parameter d must be at least 1");
    if (n <= 2 * (d - 1) + 1)
        throw InvalidInput("n = " + std::to_string(n) + " is too small for maximum degree " +
                           std::to_string(2 * (d - 1) + 1));
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::size_t> extra(2 * (d - 1), 0.5);
    std::vector<std::size_t> degrees(n);
    for (auto& deg : degrees) deg = 1 + (d > 1 ? extra(rng) : 0);
    if (std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}) % 2 != 0) {
        // Prefer nodes below the support maximum so degrees stay within
        // 1 + [0, 2(d - 1)]; only all-maximal sequences (d = 1, n odd) exceed it.
        const std::size_t top = 2 * (d - 1) + 1;
        std::vector<std::size_t> room;
        for (std::size_t i = 0; i < n; ++i)
            if (degrees[i] < top) room.push_back(i);
        if (room.empty()) {
            room.resize(n);
            std::iota(room.begin(), room.end(), std::size_t{0});
        }
        ++degrees[room[std::uniform_int_distribution<std::size_t>(0, room.size() - 1)(rng)]];
    }
    return degrees;
}

WeightMatrix gen_neighbor_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    const auto degrees = draw_target_degrees(n, d, seed);
    std::mt19937_64 rng(stream_seed(seed, 1));
    auto edges = havel_hakimi(degrees, rng);
    if (edges.empty()) throw InvalidInput("degree sequence could not be realized");
    shuffle_edges(edges, 10 * edges.size(), rng);
    return from_edge_set(edges, n);
}

std::vector<double> standard_normal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = normal(rng);
    return out;
}

std::vector<double> gen_sar(const WeightMatrix& w, double rho, std::uint64_t seed) {
    if (!(std::abs(rho) < 1.0))
        throw InvalidInput("SAR requires |rho| < 1 for the row-normalized operator to be invertible");
    const auto r = row_normalize(w);
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd op = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto cols = r.row_cols(i);
        const auto vals = r.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) -= rho * vals[k];
    }
    auto eps = standard_normal(w.size(), seed);
    const Eigen::Map<const Eigen::VectorXd> rhs(eps.data(), n);
    const Eigen::VectorXd y = op.partialPivLu().solve(rhs);
    return {y.data(), y.data() + n};
}

CorrelatedErrorSampler::CorrelatedErrorSampler(Eigen::MatrixXd covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
        throw InvalidInput("covariance must be a non-empty square matrix");
    if (!covariance.allFinite()) throw InvalidInput("covariance has non-finite entries");
    const double scale = covariance.cwiseAbs().maxCoeff();
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidInput("covariance is not symmetric");

    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        return;
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
    if (eig.info() != Eigen::Success) throw InvalidInput("covariance factorization failed");
    Eigen::VectorXd values = eig.eigenvalues();
    const double floor = 1e-10 * values.maxCoeff();
    if (!(values.maxCoeff() > 0.0)) throw InvalidInput("covariance has no positive eigenvalue");
    for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = values(i) < floor ? 0.0 : std::sqrt(values(i));
    factor_ = eig.eigenvectors() * values.asDiagonal();
    repaired_ = true;
}

CorrelatedErrorSampler CorrelatedErrorSampler::from_weights(const WeightMatrix& pi) {
    const auto n = static_cast<Eigen::Index>(pi.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const auto cols = pi.row_cols(i);
        const auto vals = pi.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) = vals[k];
    }
    return CorrelatedErrorSampler(std::move(cov));
}

std::vector<double> CorrelatedErrorSampler::draw(std::uint64_t seed) const {
    const auto xi = standard_normal(size(), seed);
    const Eigen::Map<const Eigen::VectorXd> v(xi.data(), factor_.rows());
    Eigen::VectorXd y;
    if (repaired_) {
        y = factor_ * v;
    } else {
        y = factor_.triangularView<Eigen::Lower>() * v;
    }
    return {y.data(), y.data() + y.size()};
}

std::vector<double> gen_correlated_error(const WeightMatrix& pi, std::uint64_t seed) {
    return CorrelatedErrorSampler::from_weights(pi).draw(seed);
}

CategoricalSample categorize_by_quantiles(std::span<const double> y, std::span<const double> cutoffs,
                                          WarningLog* warnings) {
    if (cutoffs.empty()) throw InvalidInput("at least one quantile cutoff is required");
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        if (!(cutoffs[c] > 0.0 && cutoffs[c] < 1.0)) throw InvalidInput("quantile cutoffs must lie in (0, 1)");
        if (c > 0 && !(cutoffs[c] > cutoffs[c - 1])) throw InvalidInput("quantile cutoffs must be strictly increasing");
    }
    const std::size_t k = cutoffs.size() + 1;
    if (y.size() < k)
        throw InvalidInput("need at least " + std::to_string(k) + " observations for " + std::to_string(k) +
                           " categories");

    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> thresholds;
    for (double p : cutoffs) {
        const double h = static_cast<double>(sorted.size() - 1) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const double frac = h - static_cast<double>(lo);
        const double hi_value = lo + 1 < sorted.size() ? sorted[lo + 1] : sorted[lo];
        thresholds.push_back(sorted[lo] + frac * (hi_value - sorted[lo]));
    }

    std::vector<std::size_t> labels(y.size());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        labels[i] = static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), y[i]) -
                                             thresholds.begin());
        ++counts[labels[i]];
    }

    std::vector<std::size_t> remap(k, 0);
    std::size_t realized = 0;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) remap[c] = realized++;
    }
    if (realized < 2) throw DegenerateData("quantile cutoffs produced a single category");
    if (realized < k) {
        for (auto& l : labels) l = remap[l];
        if (warnings != nullptr)
            warnings->push_back("tied values collapsed quantile categories: " + std::to_string(realized) + " of " +
                                std::to_string(k) + " categories realized");
    }
    return CategoricalSample(std::move(labels), realized);
}

bool is_connected(const WeightMatrix& w) {
    const std::size_t n = w.size();
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    const auto sym = w.symmetrized();
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (auto v : sym.row_cols(u)) {
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n;
}

WeightMatrix gen_network(std::size_t n, const GraphModel& model, std::uint64_t seed, std::size_t max_attempts) {
    if (n < 2) throw InvalidInput("a network needs at least two nodes");
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::mt19937_64 rng(stream_seed(seed, attempt));
        try {
            auto w = std::visit(
                [&](const auto& m) {
                    using M = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<M, WattsStrogatz>) {
                        return watts_strogatz(n, m, rng);
                    } else {
                        return erdos_renyi(n, m, rng);
                    }
                },
                model);
            if (is_connected(w)) return w;
        } catch (const DegenerateData&) {
            // empty draw, try again
        }
    }
    throw InvalidInput("no connected graph after " + std::to_string(max_attempts) + " attempts");
}

std::vector<double> transmit_continuous(std::span<const double> y0, const WeightMatrix& a, std::size_t t,
                                        double alpha) {
    if (y0.size() != a.size()) throw InvalidInput("outcome length does not match the network");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("mixing alpha must lie in (0, 1]");
    std::vector<double> current(y0.begin(), y0.end());
    if (t == 0) return current;

    const auto r = row_normalize(a);
    std::vector<double> next(current.size());
    for (std::size_t step = 0; step < t; ++step) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const auto cols = r.row_cols(i);
            const auto vals = r.row_values(i);
            double mean = 0.0;
            for (std::size_t k = 0; k < cols.size(); ++k) mean += vals[k] * current[cols[k]];
            next[i] = (1.0 - alpha) * current[i] + alpha * mean;
        }
        current.swap(next);
    }
    return current;
}

std::vector<std::size_t> draw_categorical(std::size_t n, std::span<const double> marginals, std::uint64_t seed) {
    if (marginals.empty()) throw InvalidInput("marginals must not be empty");
    double total = 0.0;
    for (double p : marginals) {
        if (!(p > 0.0)) throw InvalidInput("marginal probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("marginal probabilities must sum to 1");
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> dist(marginals.begin(), marginals.end());
    std::vector<std::size_t> out(n);
    for (auto& l : out) l = dist(rng);
    return out;
}

std::vector<std::size_t> transmit_categorical(std::span<const std::size_t> labels0, const WeightMatrix& a,
                                              std::size_t t, double p_adopt, std::uint64_t seed) {
    if (labels0.size() != a.size()) throw InvalidInput("label vector length does not match the network");
    if (!(p_adopt >= 0.0 && p_adopt <= 1.0)) throw InvalidInput("adoption probability must lie in [0, 1]");
    std::vector<std::size_t> current(labels0.begin(), labels0.end());
    if (t == 0 || p_adopt == 0.0) return current;

    const auto neighbours = neighbour_lists(a);
    for (std::size_t i = 0; i < neighbours.size(); ++i) {
        if (neighbours[i].empty()) throw InvalidInput("node " + std::to_string(i) + " is isolated");
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution adopt(p_adopt);
    std::vector<std::size_t> next(current.size());
    for (std::size_t step = 0; step < t; ++step) {
        for (std::size_t i = 0; i < current.size(); ++i) {
            next[i] = current[i];
            if (!adopt(rng)) continue;
            std::uniform_int_distribution<std::size_t> pick(0, neighbours[i].size() - 1);
            next[i] = current[neighbours[i][pick(rng)]];
        }
        current.swap(next);
    }
    return current;
}

} // namespace netautocorr
