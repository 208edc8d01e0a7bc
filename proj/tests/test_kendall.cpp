#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "mixcop/errors.hpp"
#include "mixcop/kendall.hpp"
#include "oracles/oracles.hpp"

using namespace mixcop;

namespace {

using Vec = std::vector<double>;

double oracle_tau_a(const Vec& x, const Vec& y) {
    const auto c = oracle::kendall_counts(x, y);
    return static_cast<double>(c.concordant - c.discordant) / static_cast<double>(c.n_pairs);
}

// Random column that is continuous, coarse integer or binary.
Vec random_column(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> type(0, 2);
    std::normal_distribution<double> normal;
    Vec v(n);
    switch (type(gen)) {
        case 0:
            for (auto& x : v) x = normal(gen);
            break;
        case 1: {
            std::uniform_int_distribution<int> lv(0, 5);
            for (auto& x : v) x = lv(gen);
            break;
        }
        default: {
            std::bernoulli_distribution b(0.3);
            for (auto& x : v) x = b(gen) ? 1.0 : 0.0;
        }
    }
    return v;
}

}  // namespace

TEST_CASE("tau_a examples") {
    CHECK(tau_a(Vec{1, 2, 3}, Vec{10, 20, 30}) == 1.0);
    CHECK(tau_a(Vec{1, 2, 3}, Vec{3, 2, 1}) == -1.0);
    CHECK(tau_a(Vec{0, 0, 1}, Vec{1, 2, 3}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(tau_a(Vec{1, 2}, Vec{1, 2, 3}), DomainError);
    CHECK_THROWS_AS(tau_a(Vec{1}, Vec{1}), DomainError);
}

TEST_CASE("tau_b examples") {
    const auto s = tau_b(Vec{0, 0, 1}, Vec{1, 2, 3});
    CHECK(s.tau_b == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(s.concordant == 2);
    CHECK(s.discordant == 0);
    CHECK(s.ties_j == 1);
    CHECK(s.ties_k == 0);
    CHECK(s.n_pairs == 3);
    CHECK(tau_b(Vec{1, 2}, Vec{2, 1}).tau_b == -1.0);
    CHECK_THROWS_AS(tau_b(Vec{5, 5, 5}, Vec{1, 2, 3}), DegenerateColumnError);
    try {
        tau_b(Vec{1, 2, 3}, Vec{4, 4, 4});
        FAIL("expected DegenerateColumnError");
    } catch (const DegenerateColumnError& e) {
        CHECK(e.column() == 1);
    }
}

TEST_CASE("merge-sort counts equal brute-force enumeration") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<std::size_t> len(2, 500);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = len(gen);
        const Vec x = random_column(gen, n);
        const Vec y = random_column(gen, n);
        const auto fast = count_pairs(x, y);
        const auto slow = oracle::kendall_counts(x, y);
        CHECK(fast.concordant == slow.concordant);
        CHECK(fast.discordant == slow.discordant);
        CHECK(fast.ties_j == slow.ties_x);
        CHECK(fast.ties_k == slow.ties_y);
        CHECK(fast.n_pairs == slow.n_pairs);
        CHECK(tau_a(x, y) == oracle_tau_a(x, y));
    }
}

TEST_CASE("antisymmetry and monotone invariance") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        Vec x(200), y(200);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = normal(gen);
            y[i] = 0.5 * x[i] + normal(gen);
        }
        Vec neg(y.size()), fx(x.size()), gy(y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            neg[i] = -y[i];
            fx[i] = std::exp(x[i]);
            gy[i] = y[i] * y[i] * y[i] + 2.0 * y[i];
        }
        CHECK(tau_a(x, neg) == -tau_a(x, y));
        CHECK(tau_a(fx, gy) == tau_a(x, y));
        CHECK(tau_b(fx, gy).tau_b == tau_b(x, y).tau_b);
    }
}

TEST_CASE("tau_b dominates tau_a under ties") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Vec x = random_column(gen, 100);
        const Vec y = random_column(gen, 100);
        const auto s = tau_b(x, y);
        CHECK(s.concordant + s.discordant <= s.n_pairs);
        CHECK(std::abs(s.tau_b) >= std::abs(s.tau_a));
    }
}

TEST_CASE("pairwise_tau") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> normal;
    const int n = 300;
    Eigen::MatrixXd data(n, 4);
    for (int i = 0; i < n; ++i) {
        data(i, 0) = normal(gen);
        data(i, 1) = data(i, 0) + normal(gen);
        data(i, 2) = std::floor(normal(gen));
        data(i, 3) = normal(gen) > 0.4 ? 1.0 : 0.0;
    }

    SUBCASE("entrywise consistency") {
        const auto ta = pairwise_tau(data, TauVariant::A);
        const auto tb = pairwise_tau(data, TauVariant::B);
        for (int j = 0; j < 4; ++j) {
            CHECK(ta(j, j) == 1.0);
            CHECK(tb(j, j) == 1.0);
            for (int k = 0; k < 4; ++k) {
                if (j == k) continue;
                Vec x(data.col(j).data(), data.col(j).data() + n);
                Vec y(data.col(k).data(), data.col(k).data() + n);
                CHECK(ta(j, k) == tau_a(x, y));
                CHECK(tb(j, k) == tau_b(x, y).tau_b);
                CHECK(ta(j, k) == ta(k, j));
            }
        }
    }

    SUBCASE("threads give identical bits") {
        const auto one = pairwise_tau(data, TauVariant::B, 1);
        const auto four = pairwise_tau(data, TauVariant::B, 4);
        CHECK((one.array() == four.array()).all());
    }

    SUBCASE("missing values use pairwise deletion") {
        Eigen::MatrixXd holes = data;
        holes(3, 0) = std::numeric_limits<double>::quiet_NaN();
        holes(10, 1) = std::numeric_limits<double>::quiet_NaN();
        const auto t = pairwise_tau(holes, TauVariant::A);
        Vec x, y;
        for (int i = 0; i < n; ++i) {
            if (i == 3 || i == 10) continue;
            x.push_back(data(i, 0));
            y.push_back(data(i, 1));
        }
        CHECK(t(0, 1) == tau_a(x, y));
        Vec x2, z;
        for (int i = 0; i < n; ++i) {
            if (i == 3) continue;
            x2.push_back(data(i, 0));
            z.push_back(data(i, 2));
        }
        CHECK(t(0, 2) == tau_a(x2, z));
    }

    SUBCASE("constant column reports indices") {
        Eigen::MatrixXd flat = data;
        flat.col(2).setConstant(1.0);
        try {
            pairwise_tau(flat, TauVariant::B);
            FAIL("expected DegenerateColumnError");
        } catch (const DegenerateColumnError& e) {
            CHECK(e.column() == 2);
        }
    }
}

TEST_CASE("single column against itself") {
    Eigen::MatrixXd one(5, 1);
    one << 1, 2, 3, 4, 5;
    const auto t = pairwise_tau(one, TauVariant::A);
    CHECK(t(0, 0) == 1.0);
    const Vec x{1, 2, 3, 4, 5};
    CHECK(tau_a(x, x) == 1.0);
}

TEST_CASE("independent uniform columns stay near zero") {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> u;
    const int n = 10000;
    Eigen::MatrixXd data(n, 2);
    for (int i = 0; i < n; ++i) {
        data(i, 0) = u(gen);
        data(i, 1) = u(gen);
    }
    const double bound = 2.0 * std::sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)));
    const auto t = pairwise_tau(data, TauVariant::A);
    CHECK(std::abs(t(0, 1)) < 0.03);
    CHECK(std::abs(t(0, 1)) < 2.0 * bound);
}
