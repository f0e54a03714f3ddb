#pragma once

// Measurement pipeline for three-phase voltage records: band-pass filtering,
// analytic envelope, instantaneous frequency, growth-rate to resistance
// conversion, spectrogram, rotation direction and probe attenuation.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zeldovich/waveform.hpp"

namespace zeldovich {

/// Second-order section, a[0] == 1.
struct SosSection {
    std::array<double, 3> b;
    std::array<double, 3> a;
};

/// Digital Butterworth band-pass from an order-`order` low-pass prototype
/// (2*order poles), prewarped bilinear transform.
std::vector<SosSection> butterworth_bandpass(int order, double f_lo, double f_hi, double sample_rate);

/// Complex frequency response of a cascade at f (Hz).
std::complex<double> sos_response(const std::vector<SosSection>& sos, double f, double sample_rate);

/// Single forward pass with zero initial state.
Eigen::VectorXd sosfilt(const std::vector<SosSection>& sos, const Eigen::VectorXd& x);

/// Forward-backward (zero-phase) filtering with odd extension and steady-state initial conditions.
Eigen::VectorXd sosfiltfilt(const std::vector<SosSection>& sos, const Eigen::VectorXd& x, Eigen::Index padlen = -1);

Waveform bandpass(const Waveform& w, double f_lo, double f_hi, int order = 4);

/// Analytic signal x + i H[x] via the one-sided spectrum.
Eigen::VectorXcd analytic_signal(const Eigen::VectorXd& x);

struct EnvelopeTrace {
    Eigen::VectorXd t;          ///< s
    Eigen::VectorXd amplitude;  ///< peak volts
    Eigen::VectorXd phase;      ///< unwrapped, rad
    Eigen::VectorXd f_inst;     ///< Hz

    Eigen::Index size() const { return t.size(); }
};

struct EnvelopeOptions {
    double output_rate{62.5};  ///< Hz after block averaging; 0 keeps every sample
    int guard{5};              ///< output samples dropped at each end
};

EnvelopeTrace analytic_envelope(const Eigen::VectorXd& x, double sample_rate, double t0 = 0.0,
                                const EnvelopeOptions& options = {});
std::vector<EnvelopeTrace> analytic_envelope(const Waveform& w, const EnvelopeOptions& options = {});

Eigen::VectorXd unwrap_phase(const Eigen::VectorXd& phase);

/// R(t) = -2 L d(ln amplitude)/dt, then a centered moving average over `smoothing` seconds.
Eigen::VectorXd extract_net_resistance(const EnvelopeTrace& env, double L, double smoothing = 0.2);
Eigen::VectorXd extract_net_resistance(const EnvelopeTrace& env, const Eigen::VectorXd& L, double smoothing = 0.2);

/// Centered moving average with the window shrinking symmetrically at the ends.
Eigen::VectorXd moving_average(const Eigen::VectorXd& x, Eigen::Index window);

struct Spectrogram {
    Eigen::VectorXd t;   ///< window centers, s
    Eigen::VectorXd f;   ///< bin frequencies, Hz
    Eigen::MatrixXd db;  ///< rows time, columns frequency; dB re the grid maximum
};

Spectrogram spectrogram(const Eigen::VectorXd& x, double sample_rate, Eigen::Index window_len, Eigen::Index hop,
                        double t0 = 0.0);

/// Frequency of the strongest bin in each time slice.
Eigen::VectorXd spectrogram_ridge(const Spectrogram& s);

enum class RotationDirection { co_rotating, counter_rotating, indeterminate };

std::string to_string(RotationDirection d);

/// Classifies the cyclic phase progression P1 -> P2 -> P3 -> P1: steps of -2pi/3 are co-rotating,
/// +2pi/3 counter-rotating, within 0.3 rad.
RotationDirection rotation_direction(const std::array<double, 3>& phases);

/// Amplitude-weighted circular mean of each channel's phase relative to the first.
std::array<double, 3> relative_phases(const std::vector<EnvelopeTrace>& envelopes);

struct ProbeCoefficients {
    double v1{10}, v2{0}, v3{1};
    double p1{0}, p2{0}, p3{0};
};

struct ProbeReading {
    double volt;
    double deg;
};

/// |V| = (v1 + v2 f) V10X^v3, phi = phi10X + p1 + p2 f + p3 f^2 (degrees).
ProbeReading probe_correction(double V10X, double phi10X_deg, double f, const ProbeCoefficients& c);

}  // namespace zeldovich
