#pragma once

// Rotating conductive cylinder inside an m-lobed rotating field: rotational
// Doppler shift, skin depth in the rotating frame, the reflected/applied radial
// field ratio S at the coil radius, and the resistance/inductance the cylinder
// reflects into a stator circuit.

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "zeldovich/bessel.hpp"
#include "zeldovich/constants.hpp"
#include "zeldovich/errors.hpp"

namespace zeldovich {

template <typename Scalar>
struct BasicCylinderParams {
    Scalar a{0.020};          ///< cylinder radius, m
    Scalar r_coil{0.021};     ///< coil radius, m
    Scalar sigma{3.77e7};     ///< conductivity, S/m
    Scalar mu_r{1.000022};    ///< relative permeability
    int mode_m{2};            ///< azimuthal order of the rotating mode
    Scalar coupling_A{0.397}; ///< dimensionless coupling constant
    Scalar inertia_J{4.07e-5};///< rotor moment of inertia, kg m^2

    Scalar mu() const { return Scalar(constants::mu0) * mu_r; }

    /// Field-ratio prefactor (a/r)^{2m}: the magnitude of S for a perfect reflector.
    Scalar radius_factor() const { return std::pow(a / r_coil, Scalar(2 * mode_m)); }

    /// Every violated invariant, one message per field; empty when valid.
    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(a > 0)) out.emplace_back("cylinder.a must be > 0");
        if (!(r_coil >= a)) out.emplace_back("cylinder.r_coil must be >= cylinder.a");
        if (!(sigma > 0)) out.emplace_back("cylinder.sigma must be > 0");
        if (!(mu_r >= 1)) out.emplace_back("cylinder.mu_r must be >= 1");
        if (mode_m < 1 || mode_m > kMaxBesselOrder) out.emplace_back("cylinder.mode_m must be in [1, 20]");
        if (!(coupling_A > 0)) out.emplace_back("cylinder.coupling_A must be > 0");
        if (!(inertia_J > 0)) out.emplace_back("cylinder.inertia_J must be > 0");
        return out;
    }

    void validate() const {
        const auto v = violations();
        if (!v.empty()) {
            std::string msg = "invalid cylinder parameters:";
            for (const auto& item : v) msg += "\n  " + item;
            throw DomainError(msg);
        }
    }
};

using CylinderParams = BasicCylinderParams<double>;

/// Moment of inertia of a solid cylinder, kg m^2.
inline double solid_cylinder_inertia(double radius, double length, double density) {
    const double mass = density * constants::pi * radius * radius * length;
    return 0.5 * mass * radius * radius;
}

/// Field frequency seen in the frame co-rotating with the cylinder: omega - m*Omega.
template <typename Scalar>
constexpr Scalar doppler_shift(Scalar omega, int mode_m, Scalar Omega) {
    return omega - Scalar(mode_m) * Omega;
}

/// Skin depth 1/sqrt(sigma*mu*|omega_minus|); +infinity when omega_minus == 0.
template <typename Scalar>
Scalar penetration_depth(Scalar sigma, Scalar mu, Scalar omega_minus) {
    if (!(sigma > 0) || !(mu > 0)) {
        throw DomainError("penetration_depth: sigma and mu must be > 0");
    }
    if (omega_minus == Scalar(0)) {
        return std::numeric_limits<Scalar>::infinity();
    }
    return Scalar(1) / std::sqrt(sigma * mu * std::abs(omega_minus));
}

namespace detail {

// S for omega_minus >= 0 given x = a/delta.
template <typename Scalar>
std::complex<Scalar> reflection_from_skin_ratio(const BasicCylinderParams<Scalar>& p, Scalar x) {
    using C = std::complex<Scalar>;
    const Scalar k = p.radius_factor();
    const int m = p.mode_m;
    const C z = std::sqrt(C(0, 1)) * x;
    if (std::abs(z) < Scalar(1e-3)) {
        // (z/m) J_{m-1}/J_m = 2 - z^2/(2m(m+1)) + O(z^4).
        const C q = z * z / Scalar(2 * m * (m + 1));
        return k * (p.mu_r - Scalar(1) + q) / (p.mu_r + Scalar(1) - q);
    }
    const C w = (z / Scalar(m)) * bessel_ratio(m, z);
    const C S = k * ((p.mu_r + Scalar(1)) - w) / ((p.mu_r - Scalar(1)) + w);
    if (!std::isfinite(S.real()) || !std::isfinite(S.imag())) {
        throw NumericError("reflection_S: non-finite result");
    }
    return S;
}

}  // namespace detail

/// Reflected/applied radial field ratio at the coil radius.
///
/// For omega_minus < 0 the response is the complex conjugate of the response at
/// |omega_minus| (real fields), which flips the sign of the absorptive part.
template <typename Scalar>
std::complex<Scalar> reflection_S(const BasicCylinderParams<Scalar>& p, Scalar omega, Scalar Omega) {
    const Scalar wm = doppler_shift(omega, p.mode_m, Omega);
    if (wm == Scalar(0)) {
        return std::complex<Scalar>(p.radius_factor() * (p.mu_r - Scalar(1)) / (p.mu_r + Scalar(1)), Scalar(0));
    }
    const Scalar x = p.a / penetration_depth(p.sigma, p.mu(), wm);
    const auto S = detail::reflection_from_skin_ratio(p, x);
    return wm > Scalar(0) ? S : std::conj(S);
}

template <typename Scalar>
struct BasicCylinderImpedance {
    Scalar resistance;  ///< ohm; negative above the co-rotation threshold
    Scalar inductance;  ///< henry
};

using CylinderImpedance = BasicCylinderImpedance<double>;

/// Resistance A*omega*L*Im S and inductance A*L*Re S reflected into a coil of inductance L_coil.
template <typename Scalar>
BasicCylinderImpedance<Scalar> cylinder_impedance(const BasicCylinderParams<Scalar>& p, Scalar L_coil,
                                                  Scalar omega, Scalar Omega) {
    if (!(L_coil > 0)) {
        throw DomainError("cylinder_impedance: L_coil must be > 0");
    }
    const auto S = reflection_S(p, omega, Omega);
    return {p.coupling_A * omega * L_coil * S.imag(), p.coupling_A * L_coil * S.real()};
}

}  // namespace zeldovich
