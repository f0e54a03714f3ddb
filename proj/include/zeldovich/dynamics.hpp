#pragma once

// Narrowband time-domain model of the rotating mode: a complex envelope at the
// self-consistent resonance, coupled to the rotor through the torque carried by
// an m-lobed rotating field, with thermal noise seeding and a motor controller.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "zeldovich/circuit.hpp"
#include "zeldovich/waveform.hpp"

namespace zeldovich {

enum class ControllerMode { closed_loop, open_loop };

std::string to_string(ControllerMode mode);
ControllerMode controller_mode_from_string(const std::string& s);

struct Controller {
    ControllerMode mode{ControllerMode::open_loop};
    double demand_speed{643.0};  ///< Hz
    double gain{1e-5};           ///< N m per rad/s
    double torque_cap{2e-3};     ///< N m
};

/// Closed loop returns required_tau unchanged. Open loop returns
/// clamp(gain * (2 pi demand - Omega), -cap, +cap).
double motor_torque(const Controller& controller, double Omega, double required_tau);

/// sqrt(k_B T / L), ampere rms.
double thermal_noise_current(double T, double L);

enum class EventAction { set_R_var, set_demand_speed, set_controller_mode };

std::string to_string(EventAction action);
EventAction event_action_from_string(const std::string& s);

/// One value for every phase, one per phase, or a controller mode.
using EventValue = std::variant<double, std::array<double, 3>, ControllerMode>;

struct ScenarioEvent {
    double time{0};  ///< s
    EventAction action{EventAction::set_R_var};
    EventValue value{0.0};
};

struct FailureLimits {
    double max_resistor_power{5.0};  ///< W, dissipated in R_var
    double max_current{2.0};         ///< A rms
    bool halt_on_failure{true};
};

struct WaveformOutput {
    bool enabled{false};
    double sample_rate{12500.0};  ///< Hz
};

struct Scenario {
    std::array<PhaseCircuit, 3> circuits{};
    CylinderParams cylinder{};
    Controller controller{};
    double noise_temperature{293.0};  ///< K
    std::uint64_t seed{1};
    double duration{10.0};  ///< s
    double dt{5e-5};        ///< s
    std::vector<ScenarioEvent> events;
    FailureLimits failure{};
    WaveformOutput waveform_output{};

    double initial_speed{-1.0};        ///< Hz; negative means start at the demand speed
    double initial_amplitude{0.0};     ///< A rms
    double trace_interval{1e-3};       ///< s; rounded to a whole number of steps
    double measurement_resistance{5.0};///< ohm, resistor the waveform is read across
    double local_error_tolerance{1e-9};
    int max_step_halvings{12};
    ResonanceBracket bracket{};

    std::vector<std::string> violations() const;
    void validate() const;
};

/// Mode-level response at one rotor frequency. Resistances are phase means.
struct ModeResponse {
    double f_c;           ///< self-consistent carrier, Hz
    double L_mode;        ///< H
    double R_cylinder;    ///< ohm
    double R_coil;        ///< R0 + R_M(f_c), ohm
};

/// Lazily filled table of ModeResponse over rotor frequency with linear
/// interpolation between 0.01 Hz nodes. R_i and R_var are not part of the
/// table so resistor switching does not invalidate it.
class ModeResponseTable {
public:
    ModeResponseTable(std::span<const PhaseCircuit> circuits, const CylinderParams& cyl,
                      ResonanceBracket bracket = {}, double spacing = 0.01);

    ModeResponse operator()(double F) const;

    /// Exact (uninterpolated) evaluation.
    ModeResponse exact(double F) const;

    /// Rotor frequency in [lo, hi] where R_coil + R_cylinder + extra_R = 0. Throws ConvergenceError if not bracketed.
    double instability_threshold(double extra_R, double lo, double hi) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    std::vector<PhaseCircuit> circuits_;
    CylinderParams cyl_;
    ResonanceBracket bracket_;
    double spacing_;
    mutable std::map<long long, ModeResponse> nodes_;
};

struct SimEvent {
    double time;
    std::string kind;  ///< instability_on, instability_off, component_failure
    std::string detail;
};

struct SimTrace {
    std::vector<std::string> labels;
    std::array<double, 3> phase_offsets{};
    double measurement_resistance{5.0};
    int mode_m{2};

    std::vector<double> t;          ///< s
    std::vector<double> amplitude;  ///< |amp|, A rms
    std::vector<double> v_resistor; ///< peak voltage over the measurement resistor, V
    std::vector<double> f_inst;     ///< Hz
    std::vector<double> F;          ///< Hz
    std::vector<double> R_net;      ///< ohm
    std::vector<double> L_mode;     ///< H
    std::vector<double> E_field;    ///< J
    std::vector<double> E_rotor;    ///< J
    std::vector<double> heat;       ///< cumulative cylinder heat, J
    std::vector<double> W_motor;    ///< cumulative motor work, J
    std::vector<double> W_loss;     ///< cumulative circuit loss, J
    std::vector<double> W_noise;    ///< cumulative energy injected by the noise source, J
    std::vector<double> carrier_phase;  ///< integral of the carrier angular frequency, rad

    std::vector<SimEvent> events;
    bool halted{false};
    double max_energy_residual{0};  ///< worst per-step relative residual of the energy balance
    double min_heat_rate{0};        ///< W
    long long steps{0};
    long long halvings{0};

    std::size_t size() const { return t.size(); }
    bool has_event(const std::string& kind) const;
};

SimTrace simulate(const Scenario& scenario);

/// Oscilloscope-like three-phase record from a trace. Amplitude is interpolated
/// log-linearly and carrier phase by cubic Hermite between trace samples.
Waveform synthesize_waveform(const SimTrace& trace, double sample_rate);

/// Growth/decay cycles: excursions of |amp| above `level` (A rms) that then
/// decay by at least `decades` from their peak.
int count_cycles(const SimTrace& trace, double level, double decades = 1.0);

}  // namespace zeldovich
