#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixcop/errors.hpp"
#include "mixcop/estimator.hpp"
#include "mixcop/kendall.hpp"
#include "mixcop/normal_dist.hpp"
#include "mixcop/rng.hpp"
#include "mixcop/simulate.hpp"

using namespace mixcop;

namespace {

Eigen::MatrixXd pair_sigma(double r) {
    Eigen::MatrixXd s(2, 2);
    s << 1, r, r, 1;
    return s;
}

std::vector<double> column(const Eigen::MatrixXd& x, Eigen::Index j) {
    return {x.col(j).data(), x.col(j).data() + x.rows()};
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer blocks") {
    using B = Philox4x32::Block;
    const B zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const B ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones == B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const B pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(pi == B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("generator streams") {
    Philox4x32 a(7, 0), b(7, 0), c(7, 1), d(8, 0);
    bool differ_stream = false, differ_seed = false;
    for (int i = 0; i < 16; ++i) {
        const auto va = a();
        CHECK(va == b());
        differ_stream |= va != c();
        differ_seed |= va != d();
    }
    CHECK(differ_stream);
    CHECK(differ_seed);
    CHECK(stream_id(1, 2) == ((1ull << 32) | 2ull));
}

TEST_CASE("independent sample has near-zero correlation") {
    const int n = 100000;
    const Eigen::MatrixXd x = sample_copula(CopulaSpec::gaussian(Eigen::MatrixXd::Identity(3, 3)), n, 1);
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / (n - 1);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(cov(j, j) - 1.0) < 0.02);
        for (int k = j + 1; k < 3; ++k) CHECK(std::abs(cov(j, k) / std::sqrt(cov(j, j) * cov(k, k))) < 0.01);
    }
}

TEST_CASE("nearly perfect correlation is comonotone") {
    const Eigen::MatrixXd x = sample_copula(CopulaSpec::gaussian(pair_sigma(1.0 - 1e-9)), 200, 2);
    CHECK(tau_a(column(x, 0), column(x, 1)) == 1.0);
}

TEST_CASE("equal-mass discretization frequencies") {
    CopulaSpec spec = CopulaSpec::gaussian(pair_sigma(0.3));
    spec.discretize = {CutoffVector::equal_mass(3), std::nullopt};
    const int n = 100000;
    const Eigen::MatrixXd x = sample_copula(spec, n, 3);
    std::vector<int> counts(3, 0);
    for (int i = 0; i < n; ++i) {
        const double v = x(i, 0);
        REQUIRE((v == 0.0 || v == 1.0 || v == 2.0));
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 3.0) <= 0.005);
}

TEST_CASE("transforms") {
    CHECK(apply_transform(Transform::Identity, 0.3) == 0.3);
    CHECK(apply_transform(Transform::Exp, 0.0) == 1.0);
    CHECK(apply_transform(Transform::Cube, -2.0) == -8.0);
    CHECK(apply_transform(Transform::Logistic, 0.0) == 0.5);

    CopulaSpec spec = CopulaSpec::gaussian(pair_sigma(0.4));
    const Eigen::MatrixXd plain = sample_copula(spec, 500, 4);
    spec.transforms = {Transform::Exp, Transform::Cube};
    const Eigen::MatrixXd bent = sample_copula(spec, 500, 4);
    for (int i = 0; i < 500; ++i) {
        CHECK(bent(i, 0) == std::exp(plain(i, 0)));
        CHECK(bent(i, 1) == doctest::Approx(std::pow(plain(i, 1), 3)).epsilon(1e-14));
    }
}

TEST_CASE("seeded determinism") {
    CopulaSpec spec = CopulaSpec::gaussian(pair_sigma(-0.2));
    spec.discretize = {CutoffVector::equal_mass(4), std::nullopt};
    const Eigen::MatrixXd a = sample_copula(spec, 300, 9, 5);
    const Eigen::MatrixXd b = sample_copula(spec, 300, 9, 5);
    const Eigen::MatrixXd c = sample_copula(spec, 300, 9, 6);
    CHECK((a.array() == b.array()).all());
    CHECK_FALSE((a.array() == c.array()).all());
}

TEST_CASE("invalid specifications") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 1.2, 1.2, 1;
    CHECK_THROWS_AS(sample_copula(CopulaSpec::gaussian(bad), 10, 1), DomainError);
    Eigen::MatrixXd scaled(2, 2);
    scaled << 2, 0.1, 0.1, 1;
    CHECK_THROWS_AS(sample_copula(CopulaSpec::gaussian(scaled), 10, 1), DomainError);
    CopulaSpec wrong = CopulaSpec::gaussian(pair_sigma(0.1));
    wrong.transforms = {Transform::Exp};
    CHECK_THROWS_AS(sample_copula(wrong, 10, 1), DomainError);
}

TEST_CASE("discretization recovers population cutoffs") {
    for (int p : {2, 3, 5, 8}) {
        CopulaSpec spec = CopulaSpec::gaussian(pair_sigma(0.5));
        const auto population = CutoffVector::equal_mass(p);
        spec.discretize = {population, std::nullopt};
        const int n = 5000;
        const Eigen::MatrixXd x = sample_copula(spec, n, 11, static_cast<std::uint64_t>(p));
        std::vector<int> codes(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) codes[static_cast<std::size_t>(i)] = static_cast<int>(x(i, 0));
        const auto est = estimate_cutoffs(codes, p);
        for (std::size_t l = 0; l < population.size(); ++l)
            CHECK(std::abs(est[l] - population[l]) <= 3.0 * std::sqrt(static_cast<double>(p) / n));
    }
    const CutoffVector c({-0.5, 0.7});
    CHECK(discretize_value(-1.0, c) == 0);
    CHECK(discretize_value(-0.5, c) == 0);
    CHECK(discretize_value(0.0, c) == 1);
    CHECK(discretize_value(0.7, c) == 1);
    CHECK(discretize_value(0.71, c) == 2);
}

TEST_CASE("scenario runs") {
    ScenarioConfig cfg;
    cfg.p_values = {2, 5, 16};
    cfg.reps = 4;
    cfg.grid_points = 20;
    cfg.threads = 2;
    const auto s1 = scenario1(cfg);
    REQUIRE(s1.curves.size() == 3);
    for (const auto& c : s1.curves) {
        CHECK(c.bin_mse.size() == static_cast<std::size_t>(kBins));
        CHECK(c.reps == 4);
        CHECK(c.mean_mse() > 0.0);
    }
    CHECK(s1.baseline.p == 0);

    SUBCASE("uncollapsed scenario 2 equals scenario 1") {
        const auto s2 = scenario2(cfg);
        CHECK(s2.curves[2].p == 16);
        CHECK(s2.curves[2].bin_mse == s1.curves[2].bin_mse);
        CHECK(s2.baseline.bin_mse == s1.baseline.bin_mse);
    }
    SUBCASE("thread count does not matter") {
        ScenarioConfig serial = cfg;
        serial.threads = 1;
        const auto again = scenario1(serial);
        for (std::size_t i = 0; i < 3; ++i) CHECK(again.curves[i].bin_mse == s1.curves[i].bin_mse);
    }
    SUBCASE("table format") {
        std::ostringstream os;
        write_curves_tsv(os, s1.curves);
        std::istringstream is(os.str());
        std::string line;
        std::getline(is, line);
        CHECK(line == "p\tbin_low\tbin_high\tmse\treps");
        int rows = 0;
        while (std::getline(is, line)) ++rows;
        CHECK(rows == 3 * kBins);
        std::ostringstream bs;
        write_baseline_tsv(bs, s1.baseline);
        CHECK(bs.str().rfind("bin_low\tbin_high\tmse\treps\n", 0) == 0);
    }
}

TEST_CASE("concentration harness") {
    ConcentrationConfig cfg;
    cfg.d = 2;
    cfg.p = 3;
    cfg.n_grid = {200, 800};
    cfg.seeds = 3;
    const auto res = concentration_check(cfg);
    REQUIRE(res.mean_sup_error.size() == 2);

    // With two columns the sup-error is the single pair's error.
    CopulaSpec spec = CopulaSpec::gaussian(pair_sigma(cfg.rho));
    spec.discretize = {CutoffVector::equal_mass(3), std::nullopt};
    const std::vector<ColumnSpec> specs{ColumnSpec::ordinal("x0", 3), ColumnSpec::continuous("x1")};
    for (std::size_t ni = 0; ni < 2; ++ni) {
        double sum = 0.0;
        for (int s = 0; s < cfg.seeds; ++s) {
            const Eigen::MatrixXd x = sample_copula(spec, cfg.n_grid[ni], cfg.seed,
                                                    stream_id(static_cast<std::uint32_t>(ni), static_cast<std::uint32_t>(s)));
            sum += std::abs(estimate_latent_correlation(x, specs).values(0, 1) - cfg.rho);
        }
        CHECK(res.mean_sup_error[ni] == doctest::Approx(sum / cfg.seeds).epsilon(1e-14));
    }
    const double slope = (std::log(res.mean_sup_error[1]) - std::log(res.mean_sup_error[0])) / std::log(4.0);
    CHECK(res.slope == doctest::Approx(slope).epsilon(1e-12));

    std::ostringstream os;
    write_concentration_tsv(os, res);
    CHECK(os.str().rfind("n\tmean_sup_error\n200\t", 0) == 0);
    CHECK(os.str().find("# slope\t") != std::string::npos);
}

TEST_CASE("Monte Carlo oracles") {
    const auto cc = mc_population_tau_a(0.5, std::nullopt, std::nullopt, 200000, 1);
    CHECK(std::abs(cc.mean - 1.0 / 3.0) <= 4 * cc.se);
    const auto tb = mc_tau_b_mean(0.0, 0.0, 50, 2000, 2, 2);
    CHECK(std::abs(tb.mean) <= 4 * tb.se);
    CHECK(tb.se > 0.0);
    const auto tb1 = mc_tau_b_mean(0.0, 0.0, 50, 2000, 2, 1);
    CHECK(tb1.mean == tb.mean);
}
