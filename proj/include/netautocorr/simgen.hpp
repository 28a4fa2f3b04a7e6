#pragma once

#include "netautocorr/stats.hpp"
#include "netautocorr/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace netautocorr {

/// Ring lattice with k nearest neighbours (k even), each edge rewired with
/// probability beta.
struct WattsStrogatz {
    std::size_t k = 4;
    double beta = 0.1;
};

/// G(n, p).
struct ErdosRenyi {
    double p = 0.05;
};

using GraphModel = std::variant<WattsStrogatz, ErdosRenyi>;

/// Random simple graph whose degrees follow d_i = 1 + Binomial(2(d - 1), 1/2).
///
/// Target degrees are wired largest-first (Havel-Hakimi) over a randomly
/// shuffled node order, then mixed with degree-preserving double-edge swaps.
/// An odd degree total is repaired by incrementing one random target degree,
/// chosen among those below the support maximum when possible.
WeightMatrix gen_neighbor_matrix(std::size_t n, std::size_t d, std::uint64_t seed);

/// Target degree sequence used by gen_neighbor_matrix (after parity repair).
std::vector<std::size_t> draw_target_degrees(std::size_t n, std::size_t d, std::uint64_t seed);

/// n i.i.d. standard normal draws from the stream `seed`.
std::vector<double> standard_normal(std::size_t n, std::uint64_t seed);

/// y = (I - rho * R)^{-1} eps with R the row-normalized W and eps i.i.d.
/// N(0, 1) from standard_normal(n, seed). Requires |rho| < 1.
std::vector<double> gen_sar(const WeightMatrix& w, double rho, std::uint64_t seed);

/// Draws y = B^T xi with Pi = B^T B, xi i.i.d. N(0, 1).
///
/// The factor is computed once. Cholesky is tried first; if Pi is singular or
/// slightly indefinite the eigen-decomposition is used with eigenvalues below
/// 1e-10 * max eigenvalue clipped to zero.
class CorrelatedErrorSampler {
public:
    /// `covariance` is a dense symmetric n x n matrix.
    explicit CorrelatedErrorSampler(Eigen::MatrixXd covariance);
    /// Covariance with the off-diagonal taken from `pi` and a unit diagonal.
    static CorrelatedErrorSampler from_weights(const WeightMatrix& pi);

    std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }
    /// F with F F^T = Pi (after repair); lower triangular unless repaired.
    const Eigen::MatrixXd& factor() const { return factor_; }
    bool repaired() const { return repaired_; }

    std::vector<double> draw(std::uint64_t seed) const;

private:
    Eigen::MatrixXd factor_;
    bool repaired_ = false;
};

std::vector<double> gen_correlated_error(const WeightMatrix& pi, std::uint64_t seed);

/// Category of y_i = number of empirical quantiles (R type 7) at or below y_i.
/// Categories that end up empty because of ties are dropped and the remaining
/// ones renumbered; a warning is logged. Throws DegenerateData when fewer than
/// two categories remain and InvalidInput when n < K or the cutoffs are not
/// strictly increasing inside (0, 1).
CategoricalSample categorize_by_quantiles(std::span<const double> y, std::span<const double> cutoffs,
                                          WarningLog* warnings = nullptr);

/// Connected simple undirected graph. Draws are repeated (with fresh streams)
/// until the graph is connected; throws InvalidInput after max_attempts.
WeightMatrix gen_network(std::size_t n, const GraphModel& model, std::uint64_t seed, std::size_t max_attempts = 100);

bool is_connected(const WeightMatrix& w);

/// Generated outcome together with the topology and generator settings that
/// produced it.
struct SimDataset {
    WeightMatrix weights;
    std::variant<std::vector<double>, CategoricalSample> outcome;
    std::string generator;
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;
};

/// t rounds of y_i <- (1 - alpha) y_i + alpha * (weighted neighbour mean),
/// all nodes updated from the previous round.
std::vector<double> transmit_continuous(std::span<const double> y0, const WeightMatrix& a, std::size_t t,
                                        double alpha);

/// n i.i.d. labels with the given category probabilities.
std::vector<std::size_t> draw_categorical(std::size_t n, std::span<const double> marginals, std::uint64_t seed);

/// t synchronous rounds in which each node, with probability p_adopt, copies
/// the label of a uniformly chosen neighbour.
std::vector<std::size_t> transmit_categorical(std::span<const std::size_t> labels0, const WeightMatrix& a,
                                              std::size_t t, double p_adopt, std::uint64_t seed);

} // namespace netautocorr
