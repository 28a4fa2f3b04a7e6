#include "netautocorr/error.hpp"
#include "netautocorr/parallel.hpp"
#include "netautocorr/simgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace netautocorr;

namespace {

std::vector<std::size_t> degrees(const WeightMatrix& w) {
    std::vector<std::size_t> d(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) d[i] = w.row_cols(i).size();
    return d;
}

double sample_variance(const std::vector<double>& y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(y.size() - 1);
}

WeightMatrix complete(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return adjacency_from_edges(e, n);
}

} // namespace

TEST_CASE("stream seeds") {
    CHECK(stream_seed(1, 0) != stream_seed(1, 1));
    CHECK(stream_seed(1, 0) != stream_seed(2, 0));
    CHECK(stream_seed(5, 9) == stream_seed(5, 9));
}

TEST_CASE("neighbour matrix degrees") {
    const auto one = gen_neighbor_matrix(50, 1, 3);
    for (auto d : degrees(one)) CHECK(d == 1);

    const auto w = gen_neighbor_matrix(100, 3, 7);
    CHECK(w.is_symmetric());
    const auto deg = degrees(w);
    CHECK(*std::max_element(deg.begin(), deg.end()) <= 5);
    CHECK(*std::min_element(deg.begin(), deg.end()) >= 1);
    CHECK(gen_neighbor_matrix(100, 3, 7) == w);
    CHECK_FALSE(gen_neighbor_matrix(100, 3, 8) == w);

    // Realized degrees equal the targets, whose mean is 1 + (d - 1) = d.
    for (std::size_t d : {3u, 5u, 7u}) {
        double sum = 0.0;
        double sum_sq = 0.0;
        const std::size_t draws = 500;
        for (std::size_t r = 0; r < draws; ++r) {
            const auto g = gen_neighbor_matrix(20, d, stream_seed(100 + d, r));
            const auto target = draw_target_degrees(20, d, stream_seed(100 + d, r));
            CHECK(degrees(g) == target);
            for (auto k : degrees(g)) {
                sum += static_cast<double>(k);
                sum_sq += static_cast<double>(k * k);
            }
        }
        const double count = 20.0 * draws;
        const double mean = sum / count;
        const double se = std::sqrt((sum_sq / count - mean * mean) / count);
        // Parity repair adds at most 1 / 20 to the mean of a draw.
        CHECK(std::abs(mean - static_cast<double>(d)) <= 3.0 * se + 0.5 / 20.0);
    }
}

TEST_CASE("sar generator") {
    const auto w = gen_neighbor_matrix(60, 3, 1);
    const auto eps = standard_normal(60, 9);
    const auto y0 = gen_sar(w, 0.0, 9);
    CHECK(y0 == eps);
    CHECK(gen_sar(w, 0.5, 9) == gen_sar(w, 0.5, 9));
    CHECK_THROWS_AS(gen_sar(w, 1.0, 9), InvalidInput);
    CHECK_THROWS_AS(gen_sar(w, -1.2, 9), InvalidInput);

    // (I - rho R) y = eps holds.
    const auto y = gen_sar(w, 0.6, 9);
    const auto r = row_normalize(w);
    for (std::size_t i = 0; i < 60; ++i) {
        double lag = 0.0;
        for (std::size_t k = 0; k < r.row_cols(i).size(); ++k) lag += r.row_values(i)[k] * y[r.row_cols(i)[k]];
        CHECK(y[i] - 0.6 * lag == doctest::Approx(eps[i]).epsilon(1e-10));
    }
}

TEST_CASE("correlated errors") {
    const CorrelatedErrorSampler identity(Eigen::MatrixXd::Identity(30, 30));
    CHECK(identity.draw(4) == standard_normal(30, 4));
    CHECK_FALSE(identity.repaired());

    const auto perfect = WeightMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto y = gen_correlated_error(perfect, 5);
    CHECK(y[0] == doctest::Approx(y[1]).epsilon(1e-7));

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(CorrelatedErrorSampler{bad}, InvalidInput);

    const auto cs = CoordinateSet::from_points({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {2.0, 2.0}, {0.5, 0.5}});
    const auto sampler = CorrelatedErrorSampler::from_weights(exp_decay_weights(cs, 3.0));
    const Eigen::MatrixXd& f = sampler.factor();
    const Eigen::MatrixXd rebuilt = f * f.transpose();
    CHECK(rebuilt(0, 0) == doctest::Approx(1.0));
    CHECK(rebuilt(0, 1) == doctest::Approx(std::exp(-3.0 / std::sqrt(8.0))));
}

TEST_CASE("quantile categorization") {
    std::vector<double> y(100);
    std::iota(y.begin(), y.end(), 0.0);
    std::shuffle(y.begin(), y.end(), std::mt19937_64(3));
    const std::vector<double> quartiles{0.25, 0.5, 0.75};
    const auto s = categorize_by_quantiles(y, quartiles);
    REQUIRE(s.categories() == 4);
    for (auto c : s.counts()) CHECK(c == 25);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[i] <= y[j]) CHECK(s.labels()[i] <= s.labels()[j]);

    const std::vector<double> half{0.5};
    const auto two = categorize_by_quantiles(std::vector<double>{1.0, 2.0}, half);
    CHECK(two.labels()[0] == 0);
    CHECK(two.labels()[1] == 1);

    CHECK_THROWS_AS(categorize_by_quantiles(std::vector<double>(10, 1.0), quartiles), DegenerateData);

    WarningLog log;
    const auto tied = categorize_by_quantiles(std::vector<double>{0, 0, 0, 0, 0, 0, 1, 2}, quartiles, &log);
    CHECK(tied.categories() < 4);
    CHECK(tied.present_categories() == tied.categories());
    CHECK_FALSE(log.empty());

    CHECK_THROWS_AS(categorize_by_quantiles(y, std::vector<double>{0.5, 0.25}), InvalidInput);
    CHECK_THROWS_AS(categorize_by_quantiles(y, std::vector<double>{0.0, 0.5}), InvalidInput);
}

TEST_CASE("network models") {
    const auto ws = gen_network(200, WattsStrogatz{4, 0.1}, 11);
    CHECK(is_connected(ws));
    CHECK(ws.is_symmetric());
    CHECK(static_cast<double>(ws.nnz()) / 200.0 == doctest::Approx(4.0));
    CHECK(gen_network(200, WattsStrogatz{4, 0.1}, 11) == ws);

    const auto er = gen_network(60, ErdosRenyi{0.2}, 3);
    CHECK(is_connected(er));

    CHECK_THROWS_AS(gen_network(500, ErdosRenyi{0.001}, 1, 5), InvalidInput);
    CHECK_THROWS_AS(gen_network(10, WattsStrogatz{3, 0.1}, 1), InvalidInput);
    CHECK_FALSE(is_connected(WeightMatrix::from_triplets(4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}})));
}

TEST_CASE("continuous transmission") {
    const auto a = gen_network(80, WattsStrogatz{4, 0.2}, 2);
    const auto y0 = standard_normal(80, 5);
    CHECK(transmit_continuous(y0, a, 0, 0.3) == y0);

    const auto lo = *std::min_element(y0.begin(), y0.end());
    const auto hi = *std::max_element(y0.begin(), y0.end());
    for (std::size_t t : {1u, 2u, 5u}) {
        for (double alpha : {0.1, 0.5, 1.0}) {
            const auto y = transmit_continuous(y0, a, t, alpha);
            CHECK(*std::min_element(y.begin(), y.end()) >= lo);
            CHECK(*std::max_element(y.begin(), y.end()) <= hi);
        }
    }

    const auto k = complete(10);
    auto prev = standard_normal(10, 8);
    for (int step = 0; step < 4; ++step) {
        const auto next = transmit_continuous(prev, k, 1, 1.0);
        CHECK(sample_variance(next) < sample_variance(prev));
        prev = next;
    }
    CHECK(sample_variance(prev) < 1e-6);
    CHECK_THROWS_AS(transmit_continuous(y0, a, 1, 0.0), InvalidInput);
}

TEST_CASE("categorical transmission") {
    const std::vector<double> marginals{0.1, 0.2, 0.3, 0.25, 0.15};
    const auto labels = draw_categorical(20000, marginals, 4);
    std::vector<double> freq(5, 0.0);
    for (auto l : labels) freq[l] += 1.0 / 20000.0;
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(freq[k] - marginals[k]) < 0.015);

    const auto a = gen_network(200, WattsStrogatz{4, 0.1}, 6);
    const auto l0 = draw_categorical(200, marginals, 7);
    CHECK(transmit_categorical(l0, a, 0, 0.5, 1) == l0);
    CHECK(transmit_categorical(l0, a, 5, 0.0, 1) == l0);
    CHECK(transmit_categorical(l0, a, 3, 0.2, 1) == transmit_categorical(l0, a, 3, 0.2, 1));
    CHECK_FALSE(transmit_categorical(l0, a, 3, 0.2, 1) == l0);
    CHECK_THROWS_AS(transmit_categorical(l0, a, 1, 1.5, 1), InvalidInput);
    CHECK_THROWS_AS(draw_categorical(10, std::vector<double>{0.5, 0.6}, 1), InvalidInput);
}
