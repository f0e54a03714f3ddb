#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "zeldovich/circuit.hpp"

using namespace zeldovich;
using constants::two_pi;
using cd = std::complex<double>;

TEST_CASE("Profile interpolation and domain", "[circuit]") {
    Profile p({600, 1000, 2600}, {1, 5, 21});
    CHECK(p(600) == 1);
    CHECK(p(800) == Catch::Approx(3));
    CHECK(p(1800) == Catch::Approx(13));
    CHECK(p(2600) == 21);
    CHECK_THROWS_AS(p(599.9), DomainError);
    CHECK_THROWS_AS(p(2600.1), DomainError);
    CHECK(p.shifted(2.0)(800) == Catch::Approx(5));

    Profile c(0.131);
    CHECK(c.is_constant());
    CHECK(c(1e-3) == 0.131);
    CHECK(c(1e6) == 0.131);

    CHECK_THROWS_AS(Profile({1, 1}, {2, 3}), DomainError);
    CHECK_THROWS_AS(Profile({1, 2}, {2}), DomainError);
}

TEST_CASE("coil_cylinder_impedance", "[circuit]") {
    auto circuits = fixtures::table1(false);
    const auto& p1 = circuits[0];
    const Impedance z = coil_cylinder_impedance(p1, 1181.0);
    CHECK(z.imag() == Catch::Approx(two_pi * 1181 * 0.131).epsilon(1e-14));
    CHECK(std::abs(z.imag() - 971.9) < 0.2);
    CHECK(z.real() == Catch::Approx(71.6 + 32.46));

    CylinderParams nonmag;
    nonmag.mu_r = 1.0;
    const Impedance at_threshold = coil_cylinder_impedance(p1, nonmag, 1181.0, 590.5);
    CHECK(std::abs(at_threshold - z) < 1e-12);

    const CylinderParams cyl;
    CHECK(coil_cylinder_impedance(p1, cyl, 1181.0, 700.0).real() < z.real());
    CHECK_THROWS_AS(coil_cylinder_impedance(p1, 0.0), DomainError);
    CHECK_THROWS_AS(coil_cylinder_impedance(p1, 3000.0), DomainError);
}

TEST_CASE("transfer examples", "[circuit]") {
    auto p1 = fixtures::table1(false)[0];
    const double f_res = resonant_frequency(0.131, p1.C);
    const double peak = std::abs(transfer(p1, nullptr, f_res, 0.0));
    // On resonance the reactances cancel: |V_o| = |Z_cc| V_i / R_total.
    const cd zcc_res = coil_cylinder_impedance(p1, f_res);
    const double R_total = zcc_res.real() + p1.R_i + p1.R_var;
    CHECK(peak == Catch::Approx(std::abs(zcc_res) / R_total * p1.V_i).epsilon(1e-12));
    CHECK(std::abs(peak - 0.0916) < 0.0916 * 0.05);

    // Pure divider when the capacitor is a short.
    auto big = p1;
    big.C = 1e12;
    big.R_M = 0.0;
    const double f = 1e-3;
    const cd zcc = coil_cylinder_impedance(big, f);
    const cd expected = zcc / (big.R_i + big.R_var + zcc) * big.drive();
    CHECK(std::abs(transfer(big, nullptr, f, 0.0) - expected) < 1e-10 * std::abs(expected));

    auto zero_drive = p1;
    zero_drive.V_i = 0;
    CHECK_THROWS_AS(transfer(zero_drive, nullptr, 1181.0, 0.0), DomainError);
}

TEST_CASE("transfer signals a vanishing series impedance", "[circuit][errors]") {
    // Tune R0 so that the series resistance cancels the cylinder's negative
    // resistance exactly at the resonance.
    CylinderParams cyl;
    auto c = fixtures::table1(true)[0];
    c.R_M = 0.0;
    c.R_i = 0.0;
    c.R_var = 0.0;
    const double F = 680.0;
    const double f = self_consistent_resonance(c, &cyl, F);
    const double rc = cylinder_impedance(cyl, 0.131, two_pi * f, two_pi * F).resistance;
    REQUIRE(rc < 0);
    c.R0 = -rc;
    CHECK_THROWS_AS(transfer(c, &cyl, f, F), SingularityError);
}

TEST_CASE("extract_impedance inverts transfer", "[circuit][property]") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const CylinderParams cyl;
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        PhaseCircuit c;
        c.C = 50e-9 + 200e-9 * u(rng);
        c.R0 = 100 * u(rng);
        c.R_M = 50 * u(rng);
        c.R_i = 10 * u(rng);
        c.R_var = 30 * u(rng);
        c.L0 = 0.05 + 0.2 * u(rng);
        c.V_i = 1e-3 + 0.1 * u(rng);
        c.phase = two_pi * u(rng) - constants::pi;
        const double f = 600 + 2000 * u(rng);
        const double F = 900 * u(rng);
        const cd Vo = transfer(c, &cyl, f, F);
        const Impedance z = extract_impedance(c.drive(), Vo, f, c);
        const Impedance truth = coil_cylinder_impedance(c, cyl, f, F);
        worst = std::max(worst, std::abs(z - truth) / std::abs(truth));
    }
    CHECK(worst < 1e-10);

    const auto p1 = fixtures::table1(false)[0];
    CHECK(extract_impedance(p1.drive(), 0.0, 1181.0, p1) == Impedance(0.0));
    CHECK_THROWS_AS(extract_impedance(p1.drive(), p1.drive(), 1181.0, p1), DegenerateInputError);
}

TEST_CASE("total_RL", "[circuit]") {
    const auto p1 = fixtures::table1(false)[0];
    const auto rl = total_RL(coil_cylinder_impedance(p1, 1181.0), p1, 1181.0);
    CHECK(rl.R == Catch::Approx(131.0).epsilon(1e-12));
    CHECK(rl.L == Catch::Approx(0.131).epsilon(1e-14));

    const auto reactive = total_RL(Impedance(0.0, 500.0), p1, 1181.0);
    CHECK(reactive.R == Catch::Approx(p1.R_i + p1.R_var));
}

TEST_CASE("resonant_frequency", "[circuit]") {
    CHECK(resonant_frequency(0.131, 149.9e-9) == Catch::Approx(1135.7524109278698).epsilon(1e-12));
    CHECK(resonant_frequency(4 * 0.131, 149.9e-9) == Catch::Approx(resonant_frequency(0.131, 149.9e-9) / 2));
    CHECK(resonant_frequency(1.0, 1.0) == Catch::Approx(1.0 / two_pi).epsilon(1e-15));
    CHECK_THROWS_AS(resonant_frequency(0.0, 1.0), DomainError);
}

TEST_CASE("self_consistent_resonance", "[circuit]") {
    const auto p1 = fixtures::table1(false)[0];
    const CylinderParams cyl;
    const double f0 = self_consistent_resonance(p1, nullptr, 0.0);
    CHECK(f0 == Catch::Approx(resonant_frequency(0.131, p1.C)).epsilon(1e-10));

    // Re-substitution leaves L_cc unchanged.
    for (double F : {0.0, 300.0, 560.0, 590.0, 643.0, 700.0, 900.0}) {
        const double f = self_consistent_resonance(p1, &cyl, F);
        const double L_cc = coil_cylinder_impedance(p1, cyl, f, F).imag() / (two_pi * f);
        const double L_res = 1.0 / (std::pow(two_pi * f, 2) * p1.C);
        CHECK(std::abs(L_cc - L_res) < 1e-9);
        CHECK(std::abs(f - resonant_frequency(L_cc, p1.C)) < 1e-3);
    }

    // Minimum of f*(F) sits where F = f*/2.
    double best_F = 0, best_f = 1e9;
    for (double F = 500; F <= 700; F += 0.5) {
        const double f = self_consistent_resonance(p1, &cyl, F);
        if (f < best_f) {
            best_f = f;
            best_F = F;
        }
    }
    CHECK(std::abs(best_F - best_f / 2) < 1.0);

    // Deep skin (large |omega_minus|) reduces L and lifts the resonance.
    CHECK(self_consistent_resonance(p1, &cyl, 3000.0) > f0);

    CHECK_THROWS_AS(self_consistent_resonance(p1, nullptr, 0.0, {1500.0, 2600.0}), ConvergenceError);
}

TEST_CASE("mode_resonance averages the phases", "[circuit]") {
    const auto circuits = fixtures::table1(true);
    const CylinderParams cyl;
    const double C = (149.9e-9 + 149.7e-9 + 149.7e-9) / 3;
    CHECK(mode_resonance(circuits, nullptr, 0.0) == Catch::Approx(resonant_frequency(0.131, C)).epsilon(1e-10));
    const double f = mode_resonance(circuits, &cyl, 643.0);
    const double L = 0.131 + cylinder_impedance(cyl, 0.131, two_pi * f, two_pi * 643.0).inductance;
    CHECK(f == Catch::Approx(resonant_frequency(L, C)).epsilon(1e-9));
}

TEST_CASE("energy sign of the cylinder contribution", "[circuit][property]") {
    const auto p1 = fixtures::table1(false)[0];
    const CylinderParams cyl;
    int wrong = 0;
    for (double f = 600; f <= 2600; f += 40) {
        const double base = total_RL(coil_cylinder_impedance(p1, f), p1, f).R;
        for (double F = 3; F <= 1300; F += 26) {
            const double R = total_RL(coil_cylinder_impedance(p1, cyl, f, F), p1, f).R;
            if (F < f / 2 && !(R > base)) ++wrong;
            if (F > f / 2 && !(R < base)) ++wrong;
        }
    }
    CHECK(wrong == 0);
}

TEST_CASE("temperature_adjusted_resistance", "[circuit]") {
    CHECK(temperature_adjusted_resistance(71.4, 40, 20, 0.004) == Catch::Approx(77.112));
    CHECK(std::abs(temperature_adjusted_resistance(71.4, 40, 20, 0.004) - 77.1) < 0.05);
    CHECK(temperature_adjusted_resistance(55.0, 20, 20, 0.004) == 55.0);
    CHECK(temperature_adjusted_resistance(100, 25, 20, 0.004) == Catch::Approx(102.0));
    CHECK_THROWS_AS(temperature_adjusted_resistance(-1, 25, 20, 0.004), DomainError);
}

TEST_CASE("validation", "[circuit][errors]") {
    auto circuits = fixtures::table1(false);
    CHECK(three_phase_violations(circuits).empty());
    circuits[2].phase = 0.5;
    CHECK(three_phase_violations(circuits).size() == 2);

    PhaseCircuit c;
    c.C = -1;
    c.R_var = -2;
    const auto v = c.violations();
    REQUIRE(v.size() == 2);
    CHECK(v[0].find("circuit.C") != std::string::npos);
    CHECK(v[1].find("circuit.R_var") != std::string::npos);
    CHECK_THROWS_AS(c.validate(), DomainError);
}
