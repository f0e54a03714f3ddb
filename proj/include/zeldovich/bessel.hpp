#pragma once

// Bessel functions of the first kind, integer order, complex argument.
//
// Small arguments use the ascending power series. Larger arguments use Miller's
// backward recurrence normalised against exp(-iz) = J_0 + 2 sum (-i)^k J_k, which
// has the same magnitude as the J_k themselves when Im z >= 0, so the
// normalisation sum does not cancel. Arguments with Im z < 0 are reflected
// through J_n(conj z) = conj J_n(z).

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "zeldovich/errors.hpp"

namespace zeldovich {

inline constexpr int kMaxBesselOrder = 20;
inline constexpr double kMaxBesselArgument = 1000.0;
inline constexpr double kSeriesRadius = 8.0;
inline constexpr double kPoleTolerance = 1e-12;

namespace detail {

template <typename Scalar>
void check_bessel_argument(int order, const std::complex<Scalar>& z, int min_order) {
    if (order < min_order || order > kMaxBesselOrder) {
        std::ostringstream os;
        os << "bessel: order " << order << " outside [" << min_order << ", " << kMaxBesselOrder << "]";
        throw DomainError(os.str());
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("bessel: non-finite argument");
    }
    if (std::abs(z) > Scalar(kMaxBesselArgument)) {
        std::ostringstream os;
        os << "bessel: |z| = " << std::abs(z) << " exceeds supported range " << kMaxBesselArgument;
        throw DomainError(os.str());
    }
}

template <typename Scalar>
std::complex<Scalar> bessel_series(int order, const std::complex<Scalar>& z) {
    using C = std::complex<Scalar>;
    const C half = z / Scalar(2);
    C term(1);
    for (int k = 1; k <= order; ++k) {
        term *= half / Scalar(k);
    }
    const C q = -half * half;
    C sum = term;
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (int k = 1; k < 500; ++k) {
        term *= q / (Scalar(k) * Scalar(order + k));
        sum += term;
        if (std::abs(term) <= eps * std::abs(sum) * Scalar(0.5)) {
            break;
        }
    }
    return sum;
}

// Miller backward recurrence; requires Im z >= 0.
template <typename Scalar>
std::complex<Scalar> bessel_miller(int order, const std::complex<Scalar>& z) {
    using C = std::complex<Scalar>;
    const Scalar az = std::abs(z);
    const int start = 2 * ((std::max(order, static_cast<int>(std::ceil(az))) + 30 +
                            static_cast<int>(std::ceil(10.0 * std::cbrt(static_cast<double>(az))))) /
                           2);
    const C inv_z = Scalar(1) / z;
    const Scalar big = Scalar(1e250);
    // (-i)^k cycles with period 4.
    const C rot[4] = {C(1, 0), C(0, -1), C(-1, 0), C(0, 1)};

    C next(0);   // J_{k+1}
    C cur(1e-300);  // J_k, arbitrary seed
    C wanted(0);
    C norm(0);
    for (int k = start; k >= 1; --k) {
        if (k == order) {
            wanted = cur;
        }
        norm += Scalar(2) * rot[k % 4] * cur;
        const C prev = Scalar(2 * k) * inv_z * cur - next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > big) {
            const Scalar s = Scalar(1) / big;
            cur *= s;
            next *= s;
            wanted *= s;
            norm *= s;
        }
    }
    if (order == 0) {
        wanted = cur;
    }
    norm += cur;
    const C target = std::exp(C(0, -1) * z);
    const C result = (wanted / norm) * target;
    if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
        throw NumericError("bessel: result overflows (|Im z| too large)");
    }
    return result;
}

}  // namespace detail

/// J_order(z) for 0 <= order <= 20 and |z| <= 1000.
template <typename Scalar>
std::complex<Scalar> bessel_j(int order, const std::complex<Scalar>& z) {
    detail::check_bessel_argument(order, z, 0);
    if (z == std::complex<Scalar>(0)) {
        return order == 0 ? std::complex<Scalar>(1) : std::complex<Scalar>(0);
    }
    if (z.imag() < Scalar(0)) {
        return std::conj(bessel_j(order, std::conj(z)));
    }
    if (std::abs(z) <= Scalar(kSeriesRadius)) {
        return detail::bessel_series(order, z);
    }
    return detail::bessel_miller(order, z);
}

/// J_{order-1}(z) / J_order(z) by the modified Lentz continued fraction
///   J_{m-1}/J_m = 2m/z - 1/(2(m+1)/z - 1/(2(m+2)/z - ...)).
/// Throws PoleError when z lies within 1e-12 of a zero of J_order.
template <typename Scalar>
std::complex<Scalar> bessel_ratio(int order, const std::complex<Scalar>& z) {
    using C = std::complex<Scalar>;
    detail::check_bessel_argument(order, z, 1);
    if (z == C(0)) {
        throw DomainError("bessel_ratio: z = 0");
    }
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar tiny = Scalar(1e-300);
    const C inv_z = Scalar(1) / z;

    C f = Scalar(2 * order) * inv_z;
    if (f == C(0)) {
        f = tiny;
    }
    C c = f;
    C d(0);
    const int max_terms = 20000 + 4 * static_cast<int>(std::abs(z));
    bool converged = false;
    for (int j = 1; j < max_terms; ++j) {
        const C b = Scalar(2 * (order + j)) * inv_z;
        d = b - d;
        if (d == C(0)) {
            d = tiny;
        }
        c = b - Scalar(1) / c;
        if (c == C(0)) {
            c = tiny;
        }
        d = Scalar(1) / d;
        const C delta = c * d;
        f *= delta;
        if (std::abs(delta - Scalar(1)) < eps) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericError("bessel_ratio: continued fraction did not converge");
    }
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
        throw PoleError("bessel_ratio: z is at a zero of J_order");
    }
    // J_m'/J_m = ratio - m/z; its inverse estimates the distance to the nearest zero.
    const C log_derivative = f - Scalar(order) * inv_z;
    if (std::abs(log_derivative) * Scalar(kPoleTolerance) > Scalar(1)) {
        std::ostringstream os;
        os << "bessel_ratio: z = " << z << " within " << kPoleTolerance << " of a zero of J_" << order;
        throw PoleError(os.str());
    }
    return f;
}

}  // namespace zeldovich
