#pragma once

// Test-only reference: the ascending series for J_n(z) summed in 50-digit
// arithmetic. Independent of the library's series/recurrence/continued-fraction
// code paths; intended for |z| <= 50 where at most ~22 digits cancel.

#include <complex>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace oracle {

using Real50 = boost::multiprecision::cpp_bin_float_50;
using Complex50 = boost::multiprecision::cpp_complex_50;

inline Complex50 bessel_j_series(int order, const Complex50& z) {
    const Complex50 half = z / 2;
    Complex50 term = 1;
    for (int k = 1; k <= order; ++k) {
        term *= half / k;
    }
    const Complex50 q = -half * half;
    Complex50 sum = term;
    Real50 peak = abs(term);
    const Real50 cutoff("1e-60");
    for (int k = 1; k < 2000; ++k) {
        term *= q / (Real50(k) * Real50(order + k));
        sum += term;
        const Real50 size = abs(term);
        if (size > peak) {
            peak = size;
        }
        if (size < cutoff * peak && Real50(k) > abs(half)) {
            break;
        }
    }
    return sum;
}

inline std::complex<double> to_double(const Complex50& value) {
    return {static_cast<double>(value.real()), static_cast<double>(value.imag())};
}

inline std::complex<double> bessel_j(int order, std::complex<double> z) {
    return to_double(bessel_j_series(order, Complex50(z.real(), z.imag())));
}

inline std::complex<double> bessel_ratio(int order, std::complex<double> z) {
    const Complex50 zz(z.real(), z.imag());
    return to_double(bessel_j_series(order - 1, zz) / bessel_j_series(order, zz));
}

}  // namespace oracle
