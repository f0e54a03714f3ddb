#include "zeldovich/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "zeldovich/errors.hpp"

namespace zeldovich {

namespace {

constexpr double kNodeGuard = 1e-6;  // rad/s; nodes this close to omega_minus = 0 are nudged

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

std::string to_string(ControllerMode mode) {
    return mode == ControllerMode::closed_loop ? "closed_loop" : "open_loop";
}

ControllerMode controller_mode_from_string(const std::string& s) {
    if (s == "closed_loop") return ControllerMode::closed_loop;
    if (s == "open_loop") return ControllerMode::open_loop;
    throw DomainError("unknown controller mode '" + s + "' (expected closed_loop or open_loop)");
}

std::string to_string(EventAction action) {
    switch (action) {
        case EventAction::set_R_var: return "set_R_var";
        case EventAction::set_demand_speed: return "set_demand_speed";
        case EventAction::set_controller_mode: return "set_controller_mode";
    }
    return "unknown";
}

EventAction event_action_from_string(const std::string& s) {
    if (s == "set_R_var") return EventAction::set_R_var;
    if (s == "set_demand_speed") return EventAction::set_demand_speed;
    if (s == "set_controller_mode") return EventAction::set_controller_mode;
    throw DomainError("unknown event action '" + s + "'");
}

double motor_torque(const Controller& controller, double Omega, double required_tau) {
    if (controller.mode == ControllerMode::closed_loop) {
        return required_tau;
    }
    const double tau = controller.gain * (constants::two_pi * controller.demand_speed - Omega);
    return std::clamp(tau, -controller.torque_cap, controller.torque_cap);
}

double thermal_noise_current(double T, double L) {
    if (!(T >= 0) || !(L > 0)) {
        throw DomainError("thermal_noise_current: need T >= 0 and L > 0");
    }
    return std::sqrt(constants::k_boltzmann * T / L);
}

// ---------------------------------------------------------------------------
// Scenario

std::vector<std::string> Scenario::violations() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < circuits.size(); ++k) {
        auto v = circuits[k].violations("circuits[" + std::to_string(k) + "]");
        out.insert(out.end(), v.begin(), v.end());
    }
    for (const auto& v : three_phase_violations(circuits)) out.push_back(v);
    for (const auto& v : cylinder.violations()) out.push_back(v);
    if (!(controller.demand_speed >= 0) || !std::isfinite(controller.demand_speed))
        out.emplace_back("controller.demand_speed must be finite and >= 0");
    if (!(controller.gain >= 0)) out.emplace_back("controller.gain must be >= 0");
    if (!(controller.torque_cap >= 0)) out.emplace_back("controller.torque_cap must be >= 0");
    if (!(noise_temperature >= 0)) out.emplace_back("noise_temperature must be >= 0");
    if (!(duration > 0) || !std::isfinite(duration)) out.emplace_back("duration must be > 0");
    if (!(dt > 0) || !(dt <= duration)) out.emplace_back("dt must be > 0 and <= duration");
    if (!(trace_interval > 0)) out.emplace_back("trace_interval must be > 0");
    if (!(measurement_resistance > 0)) out.emplace_back("measurement_resistance must be > 0");
    if (!(initial_amplitude >= 0)) out.emplace_back("initial_amplitude must be >= 0");
    if (!std::isfinite(initial_speed)) out.emplace_back("initial_speed must be finite");
    if (!(local_error_tolerance > 0)) out.emplace_back("local_error_tolerance must be > 0");
    if (max_step_halvings < 0 || max_step_halvings > 40) out.emplace_back("max_step_halvings must be in [0, 40]");
    if (!(failure.max_resistor_power > 0)) out.emplace_back("failure.max_resistor_power must be > 0");
    if (!(failure.max_current > 0)) out.emplace_back("failure.max_current must be > 0");
    if (waveform_output.enabled && !(waveform_output.sample_rate >= 4 * bracket.hi)) {
        out.push_back("waveform_output.sample_rate must be >= 4x the highest carrier frequency (" +
                      fmt(4 * bracket.hi) + " Hz)");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        const std::string where = "events[" + std::to_string(i) + "]";
        if (!(e.time >= 0) || !std::isfinite(e.time)) out.push_back(where + ".time must be finite and >= 0");
        if (i > 0 && e.time < events[i - 1].time) out.push_back(where + ".time: events must be sorted by time");
        switch (e.action) {
            case EventAction::set_R_var:
                if (const auto* d = std::get_if<double>(&e.value)) {
                    if (!(*d >= 0)) out.push_back(where + ".value: R_var must be >= 0");
                } else if (const auto* a = std::get_if<std::array<double, 3>>(&e.value)) {
                    for (double r : *a)
                        if (!(r >= 0)) out.push_back(where + ".value: R_var must be >= 0");
                } else {
                    out.push_back(where + ".value: set_R_var needs a number or three numbers");
                }
                break;
            case EventAction::set_demand_speed:
                if (const auto* d = std::get_if<double>(&e.value)) {
                    if (!(*d >= 0) || !std::isfinite(*d)) out.push_back(where + ".value: demand speed must be >= 0");
                } else {
                    out.push_back(where + ".value: set_demand_speed needs a number");
                }
                break;
            case EventAction::set_controller_mode:
                if (!std::holds_alternative<ControllerMode>(e.value))
                    out.push_back(where + ".value: set_controller_mode needs closed_loop or open_loop");
                break;
        }
    }
    return out;
}

void Scenario::validate() const {
    const auto v = violations();
    if (!v.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& item : v) msg += "\n  " + item;
        throw DomainError(msg);
    }
}

// ---------------------------------------------------------------------------
// Mode response table

namespace {

// Table nodes store R_cylinder / omega_minus, which is smooth and positive
// through omega_minus = 0, so interpolated values keep the sign of omega_minus.
struct Node {
    double f_c;
    double L_mode;
    double R_per_omega_minus;
    double R_coil;
};

}  // namespace

ModeResponseTable::ModeResponseTable(std::span<const PhaseCircuit> circuits, const CylinderParams& cyl,
                                     ResonanceBracket bracket, double spacing)
    : circuits_(circuits.begin(), circuits.end()), cyl_(cyl), bracket_(bracket), spacing_(spacing) {
    if (circuits_.empty()) {
        throw DomainError("ModeResponseTable: no circuits");
    }
    if (!(spacing_ > 0)) {
        throw DomainError("ModeResponseTable: spacing must be > 0");
    }
    cyl_.validate();
}

ModeResponse ModeResponseTable::exact(double F) const {
    const double f_c = mode_resonance(circuits_, &cyl_, F, bracket_);
    double L0 = 0, R_coil = 0;
    for (const auto& c : circuits_) {
        L0 += c.L0(f_c);
        R_coil += c.R0 + c.R_M(f_c);
    }
    const double n = static_cast<double>(circuits_.size());
    L0 /= n;
    R_coil /= n;
    const auto zc = cylinder_impedance(cyl_, L0, constants::two_pi * f_c, constants::two_pi * F);
    return {f_c, L0 + zc.inductance, zc.resistance, R_coil};
}

ModeResponse ModeResponseTable::operator()(double F) const {
    const double x = F / spacing_;
    const double base = std::floor(x);
    const double w = x - base;
    const auto i0 = static_cast<long long>(base);
    const int m = cyl_.mode_m;

    auto node = [&](long long i) -> Node {
        auto it = nodes_.find(i);
        if (it != nodes_.end()) {
            const auto& r = it->second;
            return {r.f_c, r.L_mode, r.R_cylinder, r.R_coil};
        }
        double Fi = static_cast<double>(i) * spacing_;
        ModeResponse r = exact(Fi);
        double wm = constants::two_pi * (r.f_c - m * Fi);
        if (std::abs(wm) < kNodeGuard) {
            // Take the ratio from a point slightly off the threshold.
            const double Fn = Fi + 1e-3 * spacing_;
            const ModeResponse rn = exact(Fn);
            wm = constants::two_pi * (rn.f_c - m * Fn);
            r.R_cylinder = rn.R_cylinder;
        }
        ModeResponse stored = r;
        stored.R_cylinder = r.R_cylinder / wm;
        nodes_.emplace(i, stored);
        return {stored.f_c, stored.L_mode, stored.R_cylinder, stored.R_coil};
    };

    const Node a = node(i0);
    const Node b = node(i0 + 1);
    const double f_c = a.f_c + w * (b.f_c - a.f_c);
    const double wm = constants::two_pi * (f_c - m * F);
    return {f_c, a.L_mode + w * (b.L_mode - a.L_mode),
            (a.R_per_omega_minus + w * (b.R_per_omega_minus - a.R_per_omega_minus)) * wm,
            a.R_coil + w * (b.R_coil - a.R_coil)};
}

double ModeResponseTable::instability_threshold(double extra_R, double lo, double hi) const {
    auto g = [&](double F) {
        const auto r = (*this)(F);
        return r.R_coil + r.R_cylinder + extra_R;
    };
    double glo = g(lo);
    const double ghi = g(hi);
    if ((glo > 0) == (ghi > 0)) {
        throw ConvergenceError("instability_threshold: R_net does not change sign on [" + fmt(lo) + ", " + fmt(hi) +
                               "] Hz");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// y = [u_re, u_im, dOmega, theta, dW_motor, dW_loss, dQ] with u = sqrt(L_mode) * amp,
// so that the field energy is 3 |u|^2. The last three entries are per-step increments.
using State = std::array<double, 7>;

State axpy(const State& y, double h, const State& k) {
    State out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
    return out;
}

struct Model {
    const ModeResponseTable& table;
    double J;
    int m;
    double Omega_ref;
    Controller controller;
    double R_external;  // mean R_i + R_var

    struct Eval {
        ModeResponse mode;
        double Omega;
        double R_pos;
        double R_net;
        double amp2;
    };

    Eval evaluate(const State& y) const {
        Eval e;
        e.Omega = Omega_ref + y[2];
        e.mode = table(e.Omega / constants::two_pi);
        e.R_pos = e.mode.R_coil + R_external;
        e.R_net = e.R_pos + e.mode.R_cylinder;
        e.amp2 = (y[0] * y[0] + y[1] * y[1]) / e.mode.L_mode;
        return e;
    }

    State rhs(const State& y) const {
        const Eval e = evaluate(y);
        const double omega_c = constants::two_pi * e.mode.f_c;
        const double P_w = -3.0 * e.mode.R_cylinder * e.amp2;  // power the cylinder feeds into the mode
        const double tau_em = m / omega_c * P_w;              // braking torque on the rotor
        const double tau = motor_torque(controller, e.Omega, tau_em);
        const double decay = -e.R_net / (2.0 * e.mode.L_mode);
        const double omega_minus = omega_c - m * e.Omega;
        State d;
        d[0] = decay * y[0];
        d[1] = decay * y[1];
        d[2] = (tau - tau_em) / J;
        d[3] = omega_c;
        d[4] = tau * e.Omega;
        d[5] = 3.0 * e.R_pos * e.amp2;
        d[6] = -(omega_minus / omega_c) * P_w;
        return d;
    }

    State rk4(const State& y, double h) const {
        const State k1 = rhs(y);
        const State k2 = rhs(axpy(y, h / 2, k1));
        const State k3 = rhs(axpy(y, h / 2, k2));
        const State k4 = rhs(axpy(y, h, k3));
        State out;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        return out;
    }
};

struct Stepper {
    const Model& model;
    double tolerance;
    int max_halvings;
    long long halvings{0};

    double error_of(const State& coarse, const State& fine) const {
        const double du = std::hypot(coarse[0] - fine[0], coarse[1] - fine[1]);
        const double u = std::hypot(fine[0], fine[1]);
        const double Omega = std::max(std::abs(model.Omega_ref + fine[2]), 1.0);
        const double eu = u > 0 ? du / (tolerance * u) : (du > 0 ? 1e300 : 0.0);
        const double eO = std::abs(coarse[2] - fine[2]) / (tolerance * Omega);
        return std::max(eu, eO);
    }

    // Step doubling: accept the two-half-step result when it agrees with the single step.
    State advance(const State& y, double h, int depth) {
        const State coarse = model.rk4(y, h);
        const State fine = model.rk4(model.rk4(y, h / 2), h / 2);
        if (error_of(coarse, fine) <= 1.0) {
            return fine;
        }
        if (depth >= max_halvings) {
            throw IntegratorError("simulate: local error target not met after " + std::to_string(max_halvings) +
                                  " step halvings (h = " + fmt(h) + " s)");
        }
        ++halvings;
        return advance(advance(y, h / 2, depth + 1), h / 2, depth + 1);
    }
};

}  // namespace

bool SimTrace::has_event(const std::string& kind) const {
    return std::any_of(events.begin(), events.end(), [&](const SimEvent& e) { return e.kind == kind; });
}

SimTrace simulate(const Scenario& sc) {
    sc.validate();
    const ModeResponseTable table(sc.circuits, sc.cylinder, sc.bracket);
    Controller controller = sc.controller;
    std::array<double, 3> R_var{};
    for (std::size_t k = 0; k < 3; ++k) R_var[k] = sc.circuits[k].R_var;
    const double R_i_mean = (sc.circuits[0].R_i + sc.circuits[1].R_i + sc.circuits[2].R_i) / 3.0;
    auto external = [&] { return R_i_mean + (R_var[0] + R_var[1] + R_var[2]) / 3.0; };

    const double F0 = sc.initial_speed >= 0 ? sc.initial_speed : controller.demand_speed;
    Model model{table, sc.cylinder.inertia_J, sc.cylinder.mode_m, constants::two_pi * F0, controller, external()};
    Stepper stepper{model, sc.local_error_tolerance, sc.max_step_halvings};

    State y{};
    {
        const double L = table(F0).L_mode;
        y[0] = std::sqrt(L) * sc.initial_amplitude;
    }

    SimTrace tr;
    for (std::size_t k = 0; k < 3; ++k) {
        tr.labels.push_back(sc.circuits[k].label);
        tr.phase_offsets[k] = sc.circuits[k].phase;
    }
    tr.measurement_resistance = sc.measurement_resistance;
    tr.mode_m = sc.cylinder.mode_m;
    tr.min_heat_rate = std::numeric_limits<double>::infinity();

    double W_motor = 0, W_loss = 0, Q = 0, W_noise = 0;
    const double J = sc.cylinder.inertia_J;

    auto record = [&](double t) {
        const auto e = model.evaluate(y);
        const double amp = std::sqrt(e.amp2);
        tr.t.push_back(t);
        tr.amplitude.push_back(amp);
        tr.v_resistor.push_back(std::sqrt(2.0) * sc.measurement_resistance * amp);
        tr.f_inst.push_back(e.mode.f_c);
        tr.F.push_back(e.Omega / constants::two_pi);
        tr.R_net.push_back(e.R_net);
        tr.L_mode.push_back(e.mode.L_mode);
        tr.E_field.push_back(3.0 * (y[0] * y[0] + y[1] * y[1]));
        tr.E_rotor.push_back(0.5 * J * e.Omega * e.Omega);
        tr.heat.push_back(Q);
        tr.W_motor.push_back(W_motor);
        tr.W_loss.push_back(W_loss);
        tr.W_noise.push_back(W_noise);
        tr.carrier_phase.push_back(y[3]);
    };

    std::mt19937_64 rng(sc.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const long long n_steps = std::max(1LL, std::llround(sc.duration / sc.dt));
    const long long stride = std::max(1LL, std::llround(sc.trace_interval / sc.dt));
    std::size_t next_event = 0;

    auto apply_events = [&](double t) {
        bool changed = false;
        while (next_event < sc.events.size() && sc.events[next_event].time <= t + 1e-9 * sc.dt) {
            const auto& ev = sc.events[next_event++];
            switch (ev.action) {
                case EventAction::set_R_var:
                    if (const auto* d = std::get_if<double>(&ev.value)) {
                        R_var.fill(*d);
                    } else {
                        R_var = std::get<std::array<double, 3>>(ev.value);
                    }
                    break;
                case EventAction::set_demand_speed:
                    controller.demand_speed = std::get<double>(ev.value);
                    break;
                case EventAction::set_controller_mode:
                    controller.mode = std::get<ControllerMode>(ev.value);
                    break;
            }
            changed = true;
        }
        if (changed) {
            model.controller = controller;
            model.R_external = external();
        }
    };

    apply_events(0.0);
    double R_prev = model.evaluate(y).R_net;
    bool unstable = R_prev < 0;
    if (unstable) {
        tr.events.push_back({0.0, "instability_on", "R_net = " + fmt(R_prev) + " ohm"});
    }
    record(0.0);
    bool failed = false;

    auto check_sign = [&](double t_before, double t_after, double R_before, double R_after) {
        const bool now = R_after < 0;
        if (now == unstable) return;
        double tc = t_after;
        if (R_before != R_after) {
            tc = t_before + (t_after - t_before) * R_before / (R_before - R_after);
        }
        tr.events.push_back({tc, now ? "instability_on" : "instability_off", "R_net crosses zero"});
        unstable = now;
    };

    for (long long n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * sc.dt;
        const double t_next = static_cast<double>(n + 1) * sc.dt;

        if (n > 0) {
            apply_events(t);
            const double R_now = model.evaluate(y).R_net;
            check_sign(t, t, R_now, R_now);
            R_prev = R_now;
        }

        State y0 = y;
        y0[4] = y0[5] = y0[6] = 0.0;
        tr.min_heat_rate = std::min(tr.min_heat_rate, model.rhs(y0)[6]);
        State y1 = stepper.advance(y0, sc.dt, 0);

        // Energy balance over the step.
        {
            const double dEf = 3.0 * ((y1[0] * y1[0] + y1[1] * y1[1]) - (y0[0] * y0[0] + y0[1] * y0[1]));
            const double Omega_mid = model.Omega_ref + 0.5 * (y0[2] + y1[2]);
            const double dEr = J * Omega_mid * (y1[2] - y0[2]);
            const double largest = std::max({std::abs(dEf), std::abs(dEr), std::abs(y1[4]), std::abs(y1[5]),
                                             std::abs(y1[6])});
            if (largest > 0) {
                const double residual = std::abs(dEf + dEr - (y1[4] - y1[5] - y1[6]));
                tr.max_energy_residual = std::max(tr.max_energy_residual, residual / largest);
            }
        }
        W_motor += y1[4];
        W_loss += y1[5];
        Q += y1[6];
        y = y1;

        // Thermal noise, Euler-Maruyama.
        if (sc.noise_temperature > 0) {
            const auto e = model.evaluate(y);
            const double D = std::max(e.R_pos, 0.0) / e.mode.L_mode * constants::k_boltzmann *
                             sc.noise_temperature / e.mode.L_mode;
            const double sigma = std::sqrt(D * sc.dt / 2.0) * std::sqrt(e.mode.L_mode);
            const double before = y[0] * y[0] + y[1] * y[1];
            y[0] += sigma * gauss(rng);
            y[1] += sigma * gauss(rng);
            W_noise += 3.0 * ((y[0] * y[0] + y[1] * y[1]) - before);
        }
        ++tr.steps;

        const auto e = model.evaluate(y);
        check_sign(t, t_next, R_prev, e.R_net);
        R_prev = e.R_net;

        if (!failed) {
            const double amp = std::sqrt(e.amp2);
            for (std::size_t k = 0; k < 3 && !failed; ++k) {
                const double P = R_var[k] * e.amp2;
                if (P > sc.failure.max_resistor_power || amp > sc.failure.max_current) {
                    failed = true;
                    tr.events.push_back({t_next, "component_failure",
                                         tr.labels[k] + ": R_var power " + fmt(P) + " W, current " + fmt(amp) +
                                             " A"});
                }
            }
            if (failed && sc.failure.halt_on_failure) {
                record(t_next);
                tr.halted = true;
                break;
            }
        }
        if ((n + 1) % stride == 0 || n + 1 == n_steps) {
            record(t_next);
        }
    }
    tr.halvings = stepper.halvings;
    if (!std::isfinite(tr.min_heat_rate)) tr.min_heat_rate = 0;
    return tr;
}

Waveform synthesize_waveform(const SimTrace& trace, double sample_rate) {
    if (trace.size() < 2) {
        throw DomainError("synthesize_waveform: trace has fewer than two samples");
    }
    const double f_max = *std::max_element(trace.f_inst.begin(), trace.f_inst.end());
    if (!(sample_rate >= 2 * f_max)) {
        throw DomainError("synthesize_waveform: sample rate " + fmt(sample_rate) + " Hz undersamples the " +
                          fmt(f_max) + " Hz carrier");
    }
    const double t0 = trace.t.front();
    const double span = trace.t.back() - t0;
    const auto n = static_cast<Eigen::Index>(std::floor(span * sample_rate + 1e-9)) + 1;

    Waveform w;
    w.sample_rate = sample_rate;
    w.t0 = t0;
    for (std::size_t k = 0; k < 3; ++k) {
        w.names.push_back(k < trace.labels.size() ? trace.labels[k] : "P" + std::to_string(k + 1));
        w.channels.emplace_back(n);
    }
    const double scale = std::sqrt(2.0) * trace.measurement_resistance;
    std::size_t seg = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ts = t0 + static_cast<double>(i) / sample_rate;
        while (seg + 2 < trace.size() && trace.t[seg + 1] <= ts) ++seg;
        const double ta = trace.t[seg], tb = trace.t[seg + 1];
        const double h = tb - ta;
        const double s = std::clamp((ts - ta) / h, 0.0, 1.0);

        const double aa = trace.amplitude[seg], ab = trace.amplitude[seg + 1];
        const double amp = (aa > 0 && ab > 0) ? std::exp(std::log(aa) + s * (std::log(ab) - std::log(aa)))
                                              : aa + s * (ab - aa);
        // Cubic Hermite on the carrier phase, slopes 2 pi f_inst.
        const double pa = trace.carrier_phase[seg], pb = trace.carrier_phase[seg + 1];
        const double ma = constants::two_pi * trace.f_inst[seg] * h;
        const double mb = constants::two_pi * trace.f_inst[seg + 1] * h;
        const double s2 = s * s, s3 = s2 * s;
        const double phase = (2 * s3 - 3 * s2 + 1) * pa + (s3 - 2 * s2 + s) * ma + (-2 * s3 + 3 * s2) * pb +
                             (s3 - s2) * mb;
        for (std::size_t k = 0; k < 3; ++k) {
            w.channels[k](i) = scale * amp * std::cos(phase + trace.phase_offsets[k]);
        }
    }
    return w;
}

int count_cycles(const SimTrace& trace, double level, double decades) {
    if (!(level > 0) || !(decades > 0)) {
        throw DomainError("count_cycles: level and decades must be > 0");
    }
    const double drop = std::pow(10.0, -decades);
    int cycles = 0;
    bool armed = false;   // above level, waiting for the decay
    bool counted = false; // decay seen, waiting to fall below level
    double peak = 0;
    for (double a : trace.amplitude) {
        if (!armed && !counted) {
            if (a > level) {
                armed = true;
                peak = a;
            }
        } else if (armed) {
            peak = std::max(peak, a);
            if (a < peak * drop) {
                ++cycles;
                armed = false;
                counted = true;
            }
        }
        if (counted && a < level) {
            counted = false;
        }
    }
    return cycles;
}

}  // namespace zeldovich
