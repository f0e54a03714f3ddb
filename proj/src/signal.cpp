#include "zeldovich/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "zeldovich/constants.hpp"
#include "zeldovich/errors.hpp"

namespace zeldovich {

using cd = std::complex<double>;

void Waveform::validate() const {
    if (!(sample_rate > 0)) throw DomainError("waveform: sample_rate must be > 0");
    if (channels.empty() || channels.size() > 3) throw DomainError("waveform: need one to three channels");
    if (names.size() != channels.size()) throw DomainError("waveform: channel names and data differ in count");
    for (const auto& c : channels)
        if (c.size() != channels.front().size()) throw DomainError("waveform: channel lengths differ");
}

// ---------------------------------------------------------------------------
// Filter design

std::vector<SosSection> butterworth_bandpass(int order, double f_lo, double f_hi, double sample_rate) {
    if (order < 1 || order > 20) {
        throw DomainError("butterworth_bandpass: order must be in [1, 20]");
    }
    if (!(f_lo > 0) || !(f_hi > f_lo) || !(f_hi < sample_rate / 2)) {
        throw DomainError("butterworth_bandpass: need 0 < f_lo < f_hi < sample_rate/2");
    }
    const double fs2 = 2.0 * sample_rate;
    const double w_lo = fs2 * std::tan(constants::pi * f_lo / sample_rate);
    const double w_hi = fs2 * std::tan(constants::pi * f_hi / sample_rate);
    const double bw = w_hi - w_lo;
    const double w0 = std::sqrt(w_lo * w_hi);

    // Analog prototype poles, then low-pass to band-pass (each pole splits in two).
    std::vector<cd> poles;
    for (int k = 0; k < order; ++k) {
        const cd p = std::polar(1.0, constants::pi * (2.0 * k + order + 1) / (2.0 * order));
        const cd half = p * bw / 2.0;
        const cd root = std::sqrt(half * half - w0 * w0);
        poles.push_back(half + root);
        poles.push_back(half - root);
    }
    // Bilinear transform. Band-pass zeros: `order` at s = 0 (z = 1) and `order` at infinity (z = -1).
    double gain = std::pow(bw, order);
    cd ratio = std::pow(cd(fs2), order);
    std::vector<cd> zpoles;
    for (const auto& p : poles) {
        ratio /= (fs2 - p);
        zpoles.push_back((fs2 + p) / (fs2 - p));
    }
    gain *= ratio.real();

    // Pair each upper-half-plane pole with its conjugate; real poles pair among themselves.
    std::vector<cd> upper, real;
    for (const auto& z : zpoles) {
        if (std::abs(z.imag()) <= 1e-12 * std::abs(z)) {
            real.push_back(z.real());
        } else if (z.imag() > 0) {
            upper.push_back(z);
        }
    }
    std::sort(upper.begin(), upper.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); });
    std::vector<SosSection> sos;
    for (const auto& z : upper) {
        sos.push_back({{1.0, 0.0, -1.0}, {1.0, -2.0 * z.real(), std::norm(z)}});
    }
    for (std::size_t i = 0; i + 1 < real.size(); i += 2) {
        const double r1 = real[i].real(), r2 = real[i + 1].real();
        sos.push_back({{1.0, 0.0, -1.0}, {1.0, -(r1 + r2), r1 * r2}});
    }
    if (sos.size() != static_cast<std::size_t>(order)) {
        throw NumericError("butterworth_bandpass: unexpected pole layout");
    }
    for (auto& v : sos.front().b) v *= gain;
    return sos;
}

cd sos_response(const std::vector<SosSection>& sos, double f, double sample_rate) {
    const cd z1 = std::polar(1.0, -constants::two_pi * f / sample_rate);
    const cd z2 = z1 * z1;
    cd h(1.0);
    for (const auto& s : sos) {
        h *= (s.b[0] + s.b[1] * z1 + s.b[2] * z2) / (s.a[0] + s.a[1] * z1 + s.a[2] * z2);
    }
    return h;
}

namespace {

using Zi = std::vector<std::array<double, 2>>;

// Transposed direct form II, in place.
void run_sos(const std::vector<SosSection>& sos, Eigen::VectorXd& x, Zi zi) {
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        double v = x(n);
        for (std::size_t s = 0; s < sos.size(); ++s) {
            const auto& b = sos[s].b;
            const auto& a = sos[s].a;
            auto& z = zi[s];
            const double y = b[0] * v + z[0];
            z[0] = b[1] * v - a[1] * y + z[1];
            z[1] = b[2] * v - a[2] * y;
            v = y;
        }
        x(n) = v;
    }
}

// State of each section after a unit step has settled.
Zi steady_state_zi(const std::vector<SosSection>& sos) {
    Zi zi(sos.size());
    double scale = 1.0;
    for (std::size_t s = 0; s < sos.size(); ++s) {
        const auto& b = sos[s].b;
        const auto& a = sos[s].a;
        const double dc = (b[0] + b[1] + b[2]) / (a[0] + a[1] + a[2]);
        zi[s][1] = scale * (b[2] - a[2] * dc);
        zi[s][0] = scale * (b[1] - a[1] * dc) + zi[s][1];
        scale *= dc;
    }
    return zi;
}

Zi scaled(const Zi& zi, double k) {
    Zi out = zi;
    for (auto& z : out) {
        z[0] *= k;
        z[1] *= k;
    }
    return out;
}

}  // namespace

Eigen::VectorXd sosfilt(const std::vector<SosSection>& sos, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    run_sos(sos, y, Zi(sos.size(), {0.0, 0.0}));
    return y;
}

Eigen::VectorXd sosfiltfilt(const std::vector<SosSection>& sos, const Eigen::VectorXd& x, Eigen::Index padlen) {
    const Eigen::Index n = x.size();
    if (padlen < 0) {
        padlen = 3 * (2 * static_cast<Eigen::Index>(sos.size()) + 1);
    }
    padlen = std::min(padlen, n - 1);
    if (n < 2) {
        throw DomainError("sosfiltfilt: need at least two samples");
    }
    Eigen::VectorXd ext(n + 2 * padlen);
    for (Eigen::Index i = 0; i < padlen; ++i) {
        ext(i) = 2 * x(0) - x(padlen - i);
        ext(n + padlen + i) = 2 * x(n - 1) - x(n - 2 - i);
    }
    ext.segment(padlen, n) = x;

    const Zi zi = steady_state_zi(sos);
    run_sos(sos, ext, scaled(zi, ext(0)));
    ext.reverseInPlace();
    run_sos(sos, ext, scaled(zi, ext(0)));
    ext.reverseInPlace();
    return ext.segment(padlen, n);
}

Waveform bandpass(const Waveform& w, double f_lo, double f_hi, int order) {
    w.validate();
    const auto sos = butterworth_bandpass(order, f_lo, f_hi, w.sample_rate);
    // Pad by a few time constants of the narrowest band so the edge transient settles.
    const auto padlen = static_cast<Eigen::Index>(std::ceil(3.0 * w.sample_rate / (f_hi - f_lo)));
    Waveform out = w;
    for (auto& c : out.channels) {
        c = sosfiltfilt(sos, c, std::max<Eigen::Index>(padlen, 3 * (2 * order + 1)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Envelope

namespace {

std::size_t smooth_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

}  // namespace

Eigen::VectorXcd analytic_signal(const Eigen::VectorXd& x) {
    const auto n = static_cast<std::size_t>(x.size());
    if (n == 0) {
        return {};
    }
    const std::size_t N = smooth_size(n);
    std::vector<cd> in(N, cd(0.0)), spec;
    for (std::size_t i = 0; i < n; ++i) in[i] = x(static_cast<Eigen::Index>(i));
    Eigen::FFT<double> fft;
    fft.fwd(spec, in);
    // One-sided spectrum: keep DC and Nyquist, double positive frequencies.
    for (std::size_t k = 1; k < N; ++k) {
        if (2 * k < N) {
            spec[k] *= 2.0;
        } else if (2 * k > N) {
            spec[k] = 0.0;
        }
    }
    std::vector<cd> out;
    fft.inv(out, spec);
    Eigen::VectorXcd z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = out[i];
    return z;
}

Eigen::VectorXd unwrap_phase(const Eigen::VectorXd& phase) {
    Eigen::VectorXd out = phase;
    double offset = 0;
    for (Eigen::Index i = 1; i < phase.size(); ++i) {
        const double d = phase(i) - phase(i - 1);
        offset -= constants::two_pi * std::round(d / constants::two_pi);
        out(i) = phase(i) + offset;
    }
    return out;
}

EnvelopeTrace analytic_envelope(const Eigen::VectorXd& x, double sample_rate, double t0,
                                const EnvelopeOptions& options) {
    if (x.size() < 64) {
        throw DomainError("analytic_envelope: need at least 64 samples");
    }
    if (!(sample_rate > 0)) {
        throw DomainError("analytic_envelope: sample_rate must be > 0");
    }
    const Eigen::VectorXcd z = analytic_signal(x);
    const Eigen::Index n = x.size();
    const Eigen::VectorXd amp = z.cwiseAbs();
    Eigen::VectorXd raw_phase(n);
    for (Eigen::Index i = 0; i < n; ++i) raw_phase(i) = std::arg(z(i));
    const Eigen::VectorXd phase = unwrap_phase(raw_phase);
    Eigen::VectorXd finst(n);
    const double dt = 1.0 / sample_rate;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index a = std::max<Eigen::Index>(i - 1, 0);
        const Eigen::Index b = std::min<Eigen::Index>(i + 1, n - 1);
        finst(i) = (phase(b) - phase(a)) / (static_cast<double>(b - a) * dt) / constants::two_pi;
    }

    Eigen::Index block = 1;
    if (options.output_rate > 0) {
        block = std::max<Eigen::Index>(1, std::llround(sample_rate / options.output_rate));
    }
    const Eigen::Index m = n / block;
    const Eigen::Index guard = std::max(options.guard, 0);
    if (m <= 2 * guard) {
        throw DomainError("analytic_envelope: input too short for the guard");
    }
    EnvelopeTrace env;
    const Eigen::Index keep = m - 2 * guard;
    env.t.resize(keep);
    env.amplitude.resize(keep);
    env.phase.resize(keep);
    env.f_inst.resize(keep);
    for (Eigen::Index j = 0; j < keep; ++j) {
        const Eigen::Index start = (j + guard) * block;
        env.t(j) = t0 + (static_cast<double>(start) + 0.5 * static_cast<double>(block - 1)) * dt;
        env.amplitude(j) = amp.segment(start, block).mean();
        env.phase(j) = phase.segment(start, block).mean();
        env.f_inst(j) = finst.segment(start, block).mean();
    }
    return env;
}

std::vector<EnvelopeTrace> analytic_envelope(const Waveform& w, const EnvelopeOptions& options) {
    w.validate();
    std::vector<EnvelopeTrace> out;
    for (const auto& c : w.channels) out.push_back(analytic_envelope(c, w.sample_rate, w.t0, options));
    return out;
}

Eigen::VectorXd moving_average(const Eigen::VectorXd& x, Eigen::Index window) {
    const Eigen::Index n = x.size();
    const Eigen::Index half = std::max<Eigen::Index>(window, 1) / 2;
    Eigen::VectorXd prefix(n + 1);
    prefix(0) = 0;
    for (Eigen::Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + x(i);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index h = std::min({half, i, n - 1 - i});
        out(i) = (prefix(i + h + 1) - prefix(i - h)) / static_cast<double>(2 * h + 1);
    }
    return out;
}

Eigen::VectorXd extract_net_resistance(const EnvelopeTrace& env, const Eigen::VectorXd& L, double smoothing) {
    const Eigen::Index n = env.size();
    if (n < 2) {
        throw DomainError("extract_net_resistance: need at least two envelope samples");
    }
    if (L.size() != n) {
        throw DomainError("extract_net_resistance: inductance series length differs from the envelope");
    }
    if ((env.amplitude.array() <= 0).any()) {
        throw DomainError("extract_net_resistance: nonpositive amplitude");
    }
    const Eigen::VectorXd lnA = env.amplitude.array().log().matrix();
    Eigen::VectorXd R(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index a = std::max<Eigen::Index>(i - 1, 0);
        const Eigen::Index b = std::min<Eigen::Index>(i + 1, n - 1);
        R(i) = -2.0 * L(i) * (lnA(b) - lnA(a)) / (env.t(b) - env.t(a));
    }
    if (smoothing > 0) {
        const double rate = static_cast<double>(n - 1) / (env.t(n - 1) - env.t(0));
        R = moving_average(R, std::llround(smoothing * rate) | 1);
    }
    return R;
}

Eigen::VectorXd extract_net_resistance(const EnvelopeTrace& env, double L, double smoothing) {
    if (!(L > 0)) {
        throw DomainError("extract_net_resistance: L must be > 0");
    }
    return extract_net_resistance(env, Eigen::VectorXd::Constant(env.size(), L), smoothing);
}

// ---------------------------------------------------------------------------
// Spectrogram

Spectrogram spectrogram(const Eigen::VectorXd& x, double sample_rate, Eigen::Index window_len, Eigen::Index hop,
                        double t0) {
    if (window_len < 2 || (window_len & (window_len - 1)) != 0) {
        throw DomainError("spectrogram: window length must be a power of two");
    }
    if (hop < 1 || hop > window_len) {
        throw DomainError("spectrogram: hop must be in [1, window length]");
    }
    if (x.size() < window_len) {
        throw DomainError("spectrogram: input shorter than one window");
    }
    const Eigen::Index frames = 1 + (x.size() - window_len) / hop;
    const Eigen::Index bins = window_len / 2 + 1;
    Eigen::VectorXd hann(window_len);
    for (Eigen::Index i = 0; i < window_len; ++i) {
        hann(i) = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(window_len));
    }
    Spectrogram s;
    s.t.resize(frames);
    s.f.resize(bins);
    for (Eigen::Index k = 0; k < bins; ++k) s.f(k) = static_cast<double>(k) * sample_rate / static_cast<double>(window_len);
    Eigen::MatrixXd mag(frames, bins);
    Eigen::FFT<double> fft;
    std::vector<double> frame(static_cast<std::size_t>(window_len));
    std::vector<cd> spec;
    for (Eigen::Index j = 0; j < frames; ++j) {
        const Eigen::Index start = j * hop;
        for (Eigen::Index i = 0; i < window_len; ++i) frame[static_cast<std::size_t>(i)] = x(start + i) * hann(i);
        fft.fwd(spec, frame);
        for (Eigen::Index k = 0; k < bins; ++k) mag(j, k) = std::abs(spec[static_cast<std::size_t>(k)]);
        s.t(j) = t0 + (static_cast<double>(start) + 0.5 * static_cast<double>(window_len)) / sample_rate;
    }
    const double peak = mag.maxCoeff();
    const double floor_db = -300.0;
    s.db = mag.unaryExpr([&](double v) {
        return (peak > 0 && v > 0) ? std::max(20.0 * std::log10(v / peak), floor_db) : floor_db;
    });
    return s;
}

Eigen::VectorXd spectrogram_ridge(const Spectrogram& s) {
    Eigen::VectorXd ridge(s.db.rows());
    for (Eigen::Index j = 0; j < s.db.rows(); ++j) {
        Eigen::Index k = 0;
        s.db.row(j).maxCoeff(&k);
        ridge(j) = s.f(k);
    }
    return ridge;
}

// ---------------------------------------------------------------------------
// Phase relationships and probes

std::string to_string(RotationDirection d) {
    switch (d) {
        case RotationDirection::co_rotating: return "co_rotating";
        case RotationDirection::counter_rotating: return "counter_rotating";
        case RotationDirection::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

RotationDirection rotation_direction(const std::array<double, 3>& phases) {
    for (double p : phases)
        if (!std::isfinite(p)) return RotationDirection::indeterminate;
    const double step = constants::two_pi / 3;
    const double tol = 0.3;
    bool co = true, counter = true;
    for (int k = 0; k < 3; ++k) {
        const double d = std::remainder(phases[(k + 1) % 3] - phases[k], constants::two_pi);
        co = co && std::abs(d + step) <= tol;
        counter = counter && std::abs(d - step) <= tol;
    }
    if (co) return RotationDirection::co_rotating;
    if (counter) return RotationDirection::counter_rotating;
    return RotationDirection::indeterminate;
}

std::array<double, 3> relative_phases(const std::vector<EnvelopeTrace>& envelopes) {
    if (envelopes.size() != 3) {
        throw DomainError("relative_phases: need three channels");
    }
    const auto& ref = envelopes[0];
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (std::size_t k = 1; k < 3; ++k) {
        const auto& e = envelopes[k];
        if (e.size() != ref.size()) {
            throw DomainError("relative_phases: channel lengths differ");
        }
        cd acc(0.0);
        for (Eigen::Index i = 0; i < ref.size(); ++i) {
            acc += std::polar(ref.amplitude(i) * e.amplitude(i), e.phase(i) - ref.phase(i));
        }
        out[k] = std::abs(acc) > 0 ? std::arg(acc) : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

ProbeReading probe_correction(double V10X, double phi10X_deg, double f, const ProbeCoefficients& c) {
    if (!(V10X >= 0)) {
        throw DomainError("probe_correction: V10X must be >= 0");
    }
    return {(c.v1 + c.v2 * f) * std::pow(V10X, c.v3), phi10X_deg + c.p1 + c.p2 * f + c.p3 * f * f};
}

}  // namespace zeldovich
