#pragma once

// Per-phase series RLC stator circuit, optionally loaded by the rotating cylinder.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zeldovich/cylinder.hpp"

namespace zeldovich {

using Impedance = std::complex<double>;

/// Tabulated function of frequency with linear interpolation. A profile built
/// from a single value is constant over all frequencies.
class Profile {
public:
    Profile() : Profile(0.0) {}
    Profile(double constant_value);  // NOLINT: implicit on purpose, configs allow plain numbers
    Profile(std::vector<double> freqs, std::vector<double> values);

    double operator()(double f) const;

    bool is_constant() const { return freqs_.size() == 1; }
    double min_frequency() const;
    double max_frequency() const;
    bool contains(double f) const { return f >= min_frequency() && f <= max_frequency(); }
    double min_value() const;

    /// Same knots, every value offset by delta.
    Profile shifted(double delta) const;

    const std::vector<double>& freqs() const { return freqs_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> freqs_;
    std::vector<double> values_;
};

struct PhaseCircuit {
    std::string label{"P1"};
    double C{149.9e-9};     ///< F
    double R0{71.6};        ///< coil resistance at the reference temperature, ohm
    Profile R_M{0.0};       ///< other effective series resistance, ohm
    double R_i{4.54};       ///< source-side resistance, ohm
    double R_var{22.4};     ///< variable resistor, ohm
    Profile L0{0.131};      ///< coil inductance without the cylinder, H
    double V_i{12.69e-3};   ///< drive amplitude, V rms
    double phase{0.0};      ///< drive phase, rad

    std::vector<std::string> violations(const std::string& prefix = "circuit") const;
    void validate() const;

    /// Drive phasor V_i * exp(i phase).
    std::complex<double> drive() const { return std::polar(V_i, phase); }
    double min_frequency() const;
    double max_frequency() const;
};

/// Violations of the three-phase ordering: phases pairwise 2pi/3 apart within 0.05 rad.
std::vector<std::string> three_phase_violations(std::span<const PhaseCircuit> circuits);

/// Z_cc = R0 + R_M(f) + Rcyl + i 2 pi f (L0(f) + Lcyl). cyl == nullptr means no cylinder.
Impedance coil_cylinder_impedance(const PhaseCircuit& c, const CylinderParams* cyl, double f, double F);
inline Impedance coil_cylinder_impedance(const PhaseCircuit& c, double f) {
    return coil_cylinder_impedance(c, nullptr, f, 0.0);
}
inline Impedance coil_cylinder_impedance(const PhaseCircuit& c, const CylinderParams& cyl, double f, double F) {
    return coil_cylinder_impedance(c, &cyl, f, F);
}

/// Capacitor impedance 1/(i 2 pi f C).
Impedance capacitor_impedance(double C, double f);

/// Output voltage across the coil for drive phasor V_i exp(i phase).
std::complex<double> transfer(const PhaseCircuit& c, const CylinderParams* cyl, double f, double F);

/// Inverse of transfer: Z_cc = (Z_C + R_i + R_var) V_o / (V_i - V_o).
Impedance extract_impedance(std::complex<double> V_i, std::complex<double> V_o, double f, const PhaseCircuit& c);

struct TotalRL {
    double R;  ///< ohm
    double L;  ///< H
};

/// R = Re Z_cc + R_i + R_var, L = Im Z_cc / (2 pi f).
TotalRL total_RL(Impedance Z_cc, const PhaseCircuit& c, double f);

double resonant_frequency(double L, double C);

struct ResonanceBracket {
    double lo{600.0};
    double hi{2600.0};
};

/// Fixed point f = 1/(2 pi sqrt(L(f) C)) by damped iteration, falling back to
/// bisection on the bracket. Converged to far below 1e-3 Hz.
double solve_resonance(const std::function<double(double)>& L_of_f, double C, ResonanceBracket bracket = {});

/// Resonance of one phase including the cylinder inductance at rotor frequency F.
double self_consistent_resonance(const PhaseCircuit& c, const CylinderParams* cyl, double F,
                                 ResonanceBracket bracket = {});

/// Resonance of the symmetric rotating mode: phase-mean L_cc with phase-mean C.
double mode_resonance(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl, double F,
                      ResonanceBracket bracket = {});

double temperature_adjusted_resistance(double R_ref, double T, double T_ref, double alpha_T);

}  // namespace zeldovich
