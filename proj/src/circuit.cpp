#include "zeldovich/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zeldovich/errors.hpp"

namespace zeldovich {

namespace {

constexpr double kSingularityTolerance = 1e-12;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

double wrap_angle(double x) {
    return std::remainder(x, constants::two_pi);
}

}  // namespace

Profile::Profile(double constant_value) : freqs_{0.0}, values_{constant_value} {}

Profile::Profile(std::vector<double> freqs, std::vector<double> values)
    : freqs_(std::move(freqs)), values_(std::move(values)) {
    if (freqs_.size() != values_.size()) {
        throw DomainError("profile: frequency and value lists differ in length");
    }
    if (freqs_.empty()) {
        throw DomainError("profile: empty");
    }
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
        if (!std::isfinite(freqs_[i]) || !std::isfinite(values_[i])) {
            throw DomainError("profile: non-finite entry");
        }
        if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
            throw DomainError("profile: frequencies must be strictly increasing");
        }
    }
    if (freqs_.size() == 1) {
        freqs_[0] = 0.0;
    }
}

double Profile::min_frequency() const {
    return is_constant() ? 0.0 : freqs_.front();
}

double Profile::max_frequency() const {
    return is_constant() ? std::numeric_limits<double>::infinity() : freqs_.back();
}

double Profile::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double Profile::operator()(double f) const {
    if (is_constant()) {
        return values_[0];
    }
    if (!(f >= freqs_.front() && f <= freqs_.back())) {
        throw DomainError("profile: f = " + fmt(f) + " Hz outside tabulated range [" + fmt(freqs_.front()) + ", " +
                          fmt(freqs_.back()) + "]");
    }
    auto it = std::upper_bound(freqs_.begin(), freqs_.end(), f);
    if (it == freqs_.end()) {
        return values_.back();
    }
    const auto j = static_cast<std::size_t>(it - freqs_.begin());
    const double t = (f - freqs_[j - 1]) / (freqs_[j] - freqs_[j - 1]);
    return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

Profile Profile::shifted(double delta) const {
    Profile out = *this;
    for (auto& v : out.values_) v += delta;
    return out;
}

std::vector<std::string> PhaseCircuit::violations(const std::string& prefix) const {
    std::vector<std::string> out;
    auto bad = [&](const char* field, const std::string& why) { out.push_back(prefix + "." + field + " " + why); };
    if (!(C > 0) || !std::isfinite(C)) bad("C", "must be > 0");
    if (!(R0 >= 0) || !std::isfinite(R0)) bad("R0", "must be >= 0");
    if (!(R_i >= 0) || !std::isfinite(R_i)) bad("R_i", "must be >= 0");
    if (!(R_var >= 0) || !std::isfinite(R_var)) bad("R_var", "must be >= 0");
    if (!(L0.min_value() > 0)) bad("L0", "must be > 0 over its domain");
    if (!(V_i >= 0) || !std::isfinite(V_i)) bad("V_i", "must be >= 0");
    if (!std::isfinite(phase)) bad("phase", "must be finite");
    return out;
}

void PhaseCircuit::validate() const {
    const auto v = violations();
    if (!v.empty()) {
        std::string msg = "invalid circuit " + label + ":";
        for (const auto& item : v) msg += "\n  " + item;
        throw DomainError(msg);
    }
}

double PhaseCircuit::min_frequency() const {
    return std::max(R_M.min_frequency(), L0.min_frequency());
}

double PhaseCircuit::max_frequency() const {
    return std::min(R_M.max_frequency(), L0.max_frequency());
}

std::vector<std::string> three_phase_violations(std::span<const PhaseCircuit> circuits) {
    std::vector<std::string> out;
    if (circuits.size() != 3) {
        out.push_back("circuits: expected 3 phases, got " + std::to_string(circuits.size()));
        return out;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = circuits[i];
        const auto& b = circuits[(i + 1) % 3];
        const double diff = std::abs(wrap_angle(b.phase - a.phase));
        if (std::abs(diff - constants::two_pi / 3) > 0.05) {
            out.push_back("circuits: phases of " + a.label + " and " + b.label + " differ by " + fmt(diff) +
                          " rad, expected 2pi/3 +/- 0.05");
        }
    }
    return out;
}

Impedance coil_cylinder_impedance(const PhaseCircuit& c, const CylinderParams* cyl, double f, double F) {
    if (!(f > 0)) {
        throw DomainError("coil_cylinder_impedance: f must be > 0");
    }
    const double L0 = c.L0(f);
    double R = c.R0 + c.R_M(f);
    double L = L0;
    if (cyl) {
        const auto zc = cylinder_impedance(*cyl, L0, constants::two_pi * f, constants::two_pi * F);
        R += zc.resistance;
        L += zc.inductance;
    }
    return {R, constants::two_pi * f * L};
}

Impedance capacitor_impedance(double C, double f) {
    return 1.0 / Impedance(0.0, constants::two_pi * f * C);
}

std::complex<double> transfer(const PhaseCircuit& c, const CylinderParams* cyl, double f, double F) {
    if (!(c.V_i > 0)) {
        throw DomainError("transfer: V_i must be > 0");
    }
    const Impedance Z_cc = coil_cylinder_impedance(c, cyl, f, F);
    const Impedance denom = c.R_i + c.R_var + capacitor_impedance(c.C, f) + Z_cc;
    if (std::abs(denom) < kSingularityTolerance) {
        throw SingularityError("transfer: total series impedance vanishes at f = " + fmt(f) + " Hz, F = " + fmt(F) +
                               " Hz");
    }
    return Z_cc / denom * c.drive();
}

Impedance extract_impedance(std::complex<double> V_i, std::complex<double> V_o, double f, const PhaseCircuit& c) {
    const auto diff = V_i - V_o;
    if (std::abs(diff) <= kSingularityTolerance) {
        throw DegenerateInputError("extract_impedance: V_o equals V_i");
    }
    if (!(f > 0)) {
        throw DomainError("extract_impedance: f must be > 0");
    }
    return (capacitor_impedance(c.C, f) + c.R_i + c.R_var) * V_o / diff;
}

TotalRL total_RL(Impedance Z_cc, const PhaseCircuit& c, double f) {
    return {Z_cc.real() + c.R_i + c.R_var, Z_cc.imag() / (constants::two_pi * f)};
}

double resonant_frequency(double L, double C) {
    if (!(L > 0) || !(C > 0)) {
        throw DomainError("resonant_frequency: L and C must be > 0");
    }
    return 1.0 / (constants::two_pi * std::sqrt(L * C));
}

double solve_resonance(const std::function<double(double)>& L_of_f, double C, ResonanceBracket bracket) {
    if (!(bracket.lo > 0) || !(bracket.hi > bracket.lo)) {
        throw DomainError("solve_resonance: invalid bracket");
    }
    auto g = [&](double f) { return resonant_frequency(L_of_f(f), C); };
    auto inside = [&](double f) { return f >= bracket.lo && f <= bracket.hi; };

    // Damped fixed-point iteration from the middle of the bracket.
    double f = 0.5 * (bracket.lo + bracket.hi);
    {
        const double damping = 0.7;
        for (int it = 0; it < 200; ++it) {
            const double next = f + damping * (g(f) - f);
            if (!std::isfinite(next) || !inside(next)) {
                break;
            }
            if (std::abs(next - f) <= 1e-12 * f) {
                return next;
            }
            f = next;
        }
    }

    // Bisection on h(f) = f - g(f).
    double lo = bracket.lo;
    double hi = bracket.hi;
    double h_lo = lo - g(lo);
    const double h_hi = hi - g(hi);
    if (h_lo == 0) return lo;
    if (h_hi == 0) return hi;
    if ((h_lo > 0) == (h_hi > 0)) {
        throw ConvergenceError("solve_resonance: no fixed point in [" + fmt(bracket.lo) + ", " + fmt(bracket.hi) +
                               "] Hz");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double h_mid = mid - g(mid);
        if (h_mid == 0) return mid;
        if ((h_mid > 0) == (h_lo > 0)) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    if (hi - lo > 1e-6) {
        throw ConvergenceError("solve_resonance: bisection budget exhausted");
    }
    return 0.5 * (lo + hi);
}

namespace {

ResonanceBracket clip(ResonanceBracket b, double lo, double hi) {
    b.lo = std::max(b.lo, lo);
    b.hi = std::min(b.hi, hi);
    if (!(b.hi > b.lo)) {
        throw DomainError("resonance: bracket does not overlap the tabulated frequency range");
    }
    return b;
}

}  // namespace

double self_consistent_resonance(const PhaseCircuit& c, const CylinderParams* cyl, double F,
                                 ResonanceBracket bracket) {
    bracket = clip(bracket, c.min_frequency(), c.max_frequency());
    auto L_cc = [&](double f) { return coil_cylinder_impedance(c, cyl, f, F).imag() / (constants::two_pi * f); };
    return solve_resonance(L_cc, c.C, bracket);
}

double mode_resonance(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl, double F,
                      ResonanceBracket bracket) {
    if (circuits.empty()) {
        throw DomainError("mode_resonance: no circuits");
    }
    double C = 0;
    for (const auto& c : circuits) {
        C += c.C;
        bracket = clip(bracket, c.min_frequency(), c.max_frequency());
    }
    C /= static_cast<double>(circuits.size());
    auto L_mean = [&](double f) {
        double L0 = 0;
        for (const auto& c : circuits) L0 += c.L0(f);
        L0 /= static_cast<double>(circuits.size());
        double L = L0;
        if (cyl) L += cylinder_impedance(*cyl, L0, constants::two_pi * f, constants::two_pi * F).inductance;
        return L;
    };
    return solve_resonance(L_mean, C, bracket);
}

double temperature_adjusted_resistance(double R_ref, double T, double T_ref, double alpha_T) {
    if (!(R_ref >= 0)) {
        throw DomainError("temperature_adjusted_resistance: R_ref must be >= 0");
    }
    return R_ref * (1.0 + alpha_T * (T - T_ref));
}

}  // namespace zeldovich
