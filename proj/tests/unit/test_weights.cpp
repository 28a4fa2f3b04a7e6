#include "netautocorr/error.hpp"
#include "netautocorr/weights.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netautocorr;

namespace {

WeightMatrix path(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return adjacency_from_edges(e, n);
}

WeightMatrix ring(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return adjacency_from_edges(e, n);
}

WeightMatrix star(std::size_t spokes) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 1; i <= spokes; ++i) e.emplace_back(0, i);
    return adjacency_from_edges(e, spokes + 1);
}

CoordinateSet line(std::vector<double> xs) {
    return CoordinateSet(1, std::move(xs));
}

} // namespace

TEST_CASE("adjacency from edges") {
    const std::vector<std::pair<std::size_t, std::size_t>> one{{0, 1}};
    const auto w = adjacency_from_edges(one, 2);
    CHECK(w.at(0, 1) == 1.0);
    CHECK(w.at(1, 0) == 1.0);
    CHECK(w.at(0, 0) == 0.0);
    CHECK(w.is_symmetric());

    const std::vector<std::pair<std::size_t, std::size_t>> dup{{0, 1}, {1, 0}, {0, 1}};
    CHECK(adjacency_from_edges(dup, 2) == w);

    const std::vector<std::pair<std::size_t, std::size_t>> loop{{1, 1}};
    CHECK_THROWS_AS(adjacency_from_edges(loop, 2), InvalidInput);
    const std::vector<std::pair<std::size_t, std::size_t>> far{{0, 5}};
    CHECK_THROWS_AS(adjacency_from_edges(far, 3), InvalidInput);
    CHECK_THROWS_AS(adjacency_from_edges({}, 3), DegenerateData);
}

TEST_CASE("weight matrix construction rejects bad entries") {
    CHECK_THROWS_AS(WeightMatrix::from_triplets(2, {{0, 0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(WeightMatrix::from_triplets(2, {{0, 1, -1.0}}), InvalidInput);
    CHECK_THROWS_AS(WeightMatrix::from_triplets(2, {{0, 1, NAN}}), InvalidInput);
    CHECK_THROWS_AS(WeightMatrix::from_triplets(2, {{0, 1, 1.0}, {0, 1, 2.0}}), InvalidInput);
    CHECK_THROWS_AS(WeightMatrix::from_triplets(2, {{0, 1, 0.0}}), DegenerateData);
    CHECK_THROWS_AS(WeightMatrix::from_dense(2, std::vector<double>{0, 0, 0, 0}), DegenerateData);
    CHECK_THROWS_AS(WeightMatrix::from_dense(2, std::vector<double>{1, 1, 1, 0}), InvalidInput);

    const auto w = WeightMatrix::from_dense(3, std::vector<double>{0, 2, 0, 1, 0, 0, 0, 3, 0});
    CHECK(w.nnz() == 3);
    CHECK_FALSE(w.is_symmetric());
    CHECK(w.transposed().at(1, 0) == 2.0);
    CHECK(w.symmetrized().at(0, 1) == doctest::Approx(1.5));
    CHECK(w.symmetrized().at(2, 1) == doctest::Approx(1.5));
    CHECK(WeightMatrix::from_triplets(3, w.triplets()) == w);
}

TEST_CASE("weight summary examples") {
    const std::vector<std::pair<std::size_t, std::size_t>> one{{0, 1}};
    const auto single = weight_summary(adjacency_from_edges(one, 2));
    CHECK(single.s0 == 2.0);
    // Direct evaluation: (w01 + w10)^2 / 2 summed over both ordered pairs is 4.
    CHECK(single.s1 == 4.0);
    CHECK(single.s2 == 8.0);

    const auto p4 = weight_summary(path(4));
    CHECK(p4.s0 == 6.0);
    CHECK(p4.s1 == 12.0);
    CHECK(p4.s2 == 40.0);
}

TEST_CASE("weight summary matches dense definitions and is transpose invariant") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep % 7;
        const auto w = oracle::random_weights(n, rng);
        const auto d = w.to_dense();
        double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0, col = 0;
            for (std::size_t j = 0; j < n; ++j) {
                s0 += d[i * n + j];
                if (i != j) s1 += 0.5 * std::pow(d[i * n + j] + d[j * n + i], 2);
                row += d[i * n + j];
                col += d[j * n + i];
            }
            s2 += (row + col) * (row + col);
        }
        const auto s = weight_summary(w);
        CHECK(s.s0 == doctest::Approx(s0).epsilon(1e-12));
        CHECK(s.s1 == doctest::Approx(s1).epsilon(1e-12));
        CHECK(s.s2 == doctest::Approx(s2).epsilon(1e-12));
        const auto t = weight_summary(w.transposed());
        CHECK(t.s1 == doctest::Approx(s.s1).epsilon(1e-12));
        CHECK(t.s2 == doctest::Approx(s.s2).epsilon(1e-12));
    }
}

TEST_CASE("binary graphs have s0 = 2E and s1 = 4E") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        const auto w = oracle::random_graph(3 + rep % 20, 0.3, rng);
        const double edges = static_cast<double>(w.nnz()) / 2.0;
        const auto s = weight_summary(w);
        CHECK(s.s0 == 2.0 * edges);
        CHECK(s.s1 == 4.0 * edges);
    }
}

TEST_CASE("knn weights") {
    const auto w = knn_weights(line({0.0, 1.0, 3.0}), 1);
    CHECK(w.at(0, 1) == 1.0);
    CHECK(w.at(1, 0) == 1.0);
    CHECK(w.at(2, 1) == 1.0);
    CHECK(w.at(1, 2) == 0.0);
    CHECK(w.nnz() == 3);

    const auto full = knn_weights(line({0.0, 1.0, 3.0, 7.0}), 3);
    CHECK(full.nnz() == 12);

    const auto two = knn_weights(line({0.0, 2.0}), 1);
    CHECK(two.at(0, 1) == 1.0);
    CHECK(two.at(1, 0) == 1.0);

    CHECK_THROWS_AS(knn_weights(line({0.0, 1.0}), 2), InvalidInput);
    CHECK_THROWS_AS(knn_weights(line({0.0, 1.0}), 0), InvalidInput);
}

TEST_CASE("knn rows have exactly k neighbours and ties are reported") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xy(2 * 60);
    for (double& v : xy) v = u(rng);
    const CoordinateSet cs(2, xy);
    WarningLog log;
    const auto w = knn_weights(cs, 15, &log);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.row_cols(i).size() == 15);
    CHECK(log.empty());

    WarningLog tied;
    knn_weights(line({0.0, 1.0, 2.0}), 1, &tied);
    CHECK_FALSE(tied.empty());
}

TEST_CASE("inverse distance weights") {
    const auto two = inverse_distance_weights(line({0.0, 4.0}), 10.0);
    CHECK(two.at(0, 1) == 1.0);

    const auto w = inverse_distance_weights(line({0.0, 1.0, 10.0}), 10.0);
    CHECK(w.at(0, 1) == 10.0);
    CHECK(w.at(1, 2) == doctest::Approx(10.0 / 9.0));
    CHECK(w.at(0, 2) == 1.0);
    CHECK(capped_fraction(w, 10.0) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(inverse_distance_weights(line({0.0, 0.0, 1.0}), 10.0), InvalidInput);
    CHECK_THROWS_AS(inverse_distance_weights(line({0.0, 1.0}), 1.0), InvalidInput);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xy(2 * 50);
    for (double& v : xy) v = u(rng);
    const auto r = inverse_distance_weights(CoordinateSet(2, xy), 10.0);
    double lowest = 1e300;
    for (double v : r.values()) {
        CHECK(v >= 1.0);
        CHECK(v <= 10.0);
        lowest = std::min(lowest, v);
    }
    CHECK(lowest == 1.0);
}

TEST_CASE("exp decay weights") {
    const auto cs = line({0.0, 0.5, 2.0});
    const auto ones = exp_decay_weights(cs, 0.0);
    for (double v : ones.values()) CHECK(v == 1.0);
    CHECK(ones.nnz() == 6);

    const auto half = exp_decay_weights(cs, std::log(2.0));
    CHECK(half.at(0, 2) == doctest::Approx(0.5).epsilon(1e-14));

    const auto weak = exp_decay_weights(cs, 1.0);
    const auto strong = exp_decay_weights(cs, 2.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) CHECK(strong.at(i, j) < weak.at(i, j));
        }
    }
    CHECK(strong.is_symmetric());
}

TEST_CASE("row normalization") {
    const auto p3 = row_normalize(path(3));
    CHECK(p3.at(1, 0) == 0.5);
    CHECK(p3.at(1, 2) == 0.5);
    CHECK(row_normalize(p3) == p3);

    const auto s = row_normalize(star(4));
    for (std::size_t j = 1; j <= 4; ++j) CHECK(s.at(0, j) == 0.25);
    CHECK(s.nnz() == star(4).nnz());

    const auto isolated = WeightMatrix::from_triplets(3, {{0, 1, 1.0}, {1, 0, 1.0}});
    CHECK_THROWS_AS(row_normalize(isolated), InvalidInput);
}

TEST_CASE("normality diagnostics") {
    const auto st = normality_diagnostics(star(4));
    CHECK(st.ratio_max == doctest::Approx(0.8));
    CHECK(st.verdict == Verdict::suspect);

    const auto r = normality_diagnostics(ring(200));
    CHECK(r.ratio_max == doctest::Approx(1.0 / 200.0));
    CHECK(r.verdict == Verdict::plausible);

    const std::vector<std::pair<std::size_t, std::size_t>> one{{0, 1}};
    CHECK(normality_diagnostics(adjacency_from_edges(one, 2)).ratio_max == doctest::Approx(0.5));
    CHECK(normality_diagnostics(ring(200), 0.001).verdict == Verdict::suspect);
}

TEST_CASE("coordinate validation") {
    CHECK_THROWS_AS(CoordinateSet(2, {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(CoordinateSet(2, {1.0, 2.0, 3.0}), InvalidInput);
    CHECK_THROWS_AS(CoordinateSet(1, {1.0, INFINITY}), InvalidInput);
    const auto cs = CoordinateSet::from_points({{0.0, 0.0}, {3.0, 4.0}});
    CHECK(cs.distance(0, 1) == 5.0);
    CHECK(cs.max_distance() == 5.0);
}
