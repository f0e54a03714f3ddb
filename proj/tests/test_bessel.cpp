#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "oracle/bessel_oracle.hpp"
#include "zeldovich/bessel.hpp"

using zeldovich::bessel_j;
using zeldovich::bessel_ratio;
using cd = std::complex<double>;

namespace {

double rel_err(cd got, cd want) { return std::abs(got - want) / std::abs(want); }

cd random_in_disk(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double th = 2.0 * M_PI * u(rng);
    return std::polar(r, th);
}

}  // namespace

TEST_CASE("bessel_j trivial values", "[bessel]") {
    CHECK(bessel_j(0, cd(0, 0)) == cd(1, 0));
    CHECK(bessel_j(2, cd(0, 0)) == cd(0, 0));
    const cd j1 = bessel_j(1, cd(1, 0));
    CHECK(j1.real() == Catch::Approx(0.44005058574493352).epsilon(1e-14));
    CHECK(std::abs(j1.imag()) < 1e-16);
}

TEST_CASE("bessel_j matches 50-digit series oracle", "[bessel][oracle]") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> order_dist(0, 20);
    double worst_small = 0.0;
    double worst_large = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int n = order_dist(rng);
        const cd z_small = random_in_disk(rng, 5.0);
        const cd z_large = random_in_disk(rng, 50.0);
        worst_small = std::max(worst_small, rel_err(bessel_j(n, z_small), oracle::bessel_j(n, z_small)));
        worst_large = std::max(worst_large, rel_err(bessel_j(n, z_large), oracle::bessel_j(n, z_large)));
    }
    INFO("worst |z|<=5: " << worst_small << "  worst |z|<=50: " << worst_large);
    CHECK(worst_small < 1e-10);
    CHECK(worst_large < 1e-8);
}

TEST_CASE("bessel_j on the experiment's argument ray", "[bessel][oracle]") {
    const cd sqrt_i = std::sqrt(cd(0, 1));
    for (double x : {0.5, 3.0, 7.9, 8.1, 11.86, 20.0, 35.0, 50.0}) {
        for (int n : {1, 2, 3}) {
            const cd z = sqrt_i * x;
            CHECK(rel_err(bessel_j(n, z), oracle::bessel_j(n, z)) < 1e-10);
        }
    }
}

TEST_CASE("bessel_j conjugation symmetry", "[bessel][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const cd z = random_in_disk(rng, 60.0);
        const int n = static_cast<int>(i % 21);
        CHECK(bessel_j(n, std::conj(z)) == std::conj(bessel_j(n, z)));
    }
}

TEST_CASE("bessel_j three-term recurrence residual", "[bessel][property]") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> order_dist(1, 19);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const cd z = random_in_disk(rng, 50.0);
        const int m = order_dist(rng);
        const cd jm = bessel_j(m, z);
        const cd residual = bessel_j(m - 1, z) + bessel_j(m + 1, z) - (2.0 * m / z) * jm;
        worst = std::max(worst, std::abs(residual) / std::abs(jm));
    }
    INFO("worst residual " << worst);
    CHECK(worst < 1e-8);
}

TEST_CASE("bessel_j domain errors", "[bessel][errors]") {
    CHECK_THROWS_AS(bessel_j(0, cd(1001, 0)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_j(0, cd(std::nan(""), 0)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_j(0, cd(0, INFINITY)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_j(21, cd(1, 0)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_j(-1, cd(1, 0)), zeldovich::DomainError);
    const cd far = bessel_j(20, cd(700, 700));
    CHECK(std::isfinite(far.real()));
    CHECK(std::isfinite(far.imag()));
    CHECK_THROWS_AS(bessel_j(0, cd(0, 800)), zeldovich::NumericError);
}

TEST_CASE("bessel_ratio small-argument leading term", "[bessel]") {
    const cd r = bessel_ratio(2, cd(0.2, 0));
    // 50-digit value of J_1(0.2)/J_2(0.2).
    CHECK(r.real() == Catch::Approx(19.966638851797757).epsilon(1e-14));
    CHECK(std::abs(r.real() - 19.9666) < 1e-3);
    CHECK(std::abs(r.imag()) < 1e-14);
    // 2m/z leading behaviour.
    const cd tiny(1e-6, 2e-6);
    CHECK(std::abs(bessel_ratio(3, tiny) * tiny / 6.0 - 1.0) < 1e-10);
}

TEST_CASE("bessel_ratio times J_1 reproduces J_0", "[bessel][property]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const cd z = random_in_disk(rng, 5.0);
        if (std::abs(z) < 1e-3) continue;
        const cd lhs = bessel_ratio(1, z) * bessel_j(1, z);
        CHECK(std::abs(lhs - bessel_j(0, z)) < 1e-10);
    }
}

TEST_CASE("bessel_ratio at the experiment's typical skin argument", "[bessel][oracle]") {
    const cd z = std::sqrt(cd(0, 1)) * 11.86;
    const cd r = bessel_ratio(2, z);
    const cd frozen(0.10356374400226060, -1.0885873979285587);
    CHECK(std::abs(r - frozen) < 1e-8);
    CHECK(rel_err(r, oracle::bessel_ratio(2, z)) < 1e-8);
}

TEST_CASE("bessel_ratio agrees with quotient of bessel_j", "[bessel][property]") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> order_dist(1, 20);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const cd z = random_in_disk(rng, 50.0);
        const int m = order_dist(rng);
        const cd jm = bessel_j(m, z);
        const cd jm1 = bessel_j(m - 1, z);
        if (std::abs(jm) < 1e-6 * std::max(std::abs(jm1), 1.0)) continue;
        CHECK(rel_err(bessel_ratio(m, z), jm1 / jm) < 1e-8);
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("bessel_ratio pole and domain errors", "[bessel][errors]") {
    const double j21 = 5.1356223018406826;  // first zero of J_2
    CHECK_THROWS_AS(bessel_ratio(2, cd(j21, 0)), zeldovich::PoleError);
    CHECK_NOTHROW(bessel_ratio(2, cd(5.1356, 0)));
    CHECK_THROWS_AS(bessel_ratio(0, cd(1, 0)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_ratio(2, cd(0, 0)), zeldovich::DomainError);
    CHECK_THROWS_AS(bessel_ratio(2, cd(0, 1200)), zeldovich::DomainError);
}

TEST_CASE("bessel kernel is scalar-generic", "[bessel]") {
    const std::complex<long double> z(3.0L, 1.5L);
    const auto jl = bessel_j(2, z);
    const auto jd = bessel_j(2, cd(3.0, 1.5));
    CHECK(std::abs(cd(static_cast<double>(jl.real()), static_cast<double>(jl.imag())) - jd) < 1e-14);
}
