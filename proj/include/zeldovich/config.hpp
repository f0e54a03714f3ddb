#pragma once

// JSON run configuration: circuits, cylinder, and the settings of every CLI
// pipeline. Fields take SI numbers or strings with a unit ("149.9 nF").
// Unknown keys are rejected and every violation is reported at once.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "zeldovich/circuit.hpp"
#include "zeldovich/dynamics.hpp"
#include "zeldovich/signal.hpp"
#include "zeldovich/steady_state.hpp"

namespace zeldovich {

struct TemperatureSettings {
    bool enabled{false};
    double T{20.0};        ///< coil temperature, degC
    double T_ref{20.0};    ///< temperature R0 is quoted at, degC
    double alpha_T{0.004}; ///< 1/degC
};

struct SweepSettings {
    double f_min{600.0};
    double f_max{2600.0};
    int f_points{2001};
    std::vector<double> F{0.0, 600.0, 650.0, 680.0, 700.0};  ///< Hz
};

struct MapSettings {
    double f_min{600.0};
    double f_max{2600.0};
    int f_points{126};
    double F_min{0.0};
    double F_max{900.0};
    int F_points{91};
};

enum class FitTarget { coupling, inductance };

struct FitSettings {
    FitTarget target{FitTarget::coupling};
    double f{1181.0};        ///< Hz, fixed drive frequency of the data
    double L_coil{0.131};    ///< H, coil inductance in the resistance model
    std::vector<FitPoint> data;
};

struct AnalysisSettings {
    double f_lo{1100.0};
    double f_hi{1250.0};
    int order{4};
    EnvelopeOptions envelope{};
    double smoothing{0.2};       ///< s
    double L{0.131};             ///< H, converts growth rate to resistance
    int window_len{1024};
    int hop{256};
    bool attenuated_probes{false};  ///< apply the probe correction to each channel
};

struct RunConfig {
    std::string description;
    std::array<PhaseCircuit, 3> circuits{};
    CylinderParams cylinder{};
    TemperatureSettings temperature{};
    SweepSettings sweep{};
    MapSettings map{};
    FitSettings fit{};
    Scenario simulation{};  ///< circuits and cylinder mirror the top-level records
    AnalysisSettings analysis{};
    std::map<std::string, ProbeCoefficients> probes;  ///< by circuit label
};

/// Apply `key=value` overrides to a JSON text. Keys are dotted paths; array
/// elements are addressed by index ("circuits.0.R_var"). Values are parsed as
/// JSON when possible and taken as strings otherwise.
std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& overrides);

/// Parse and validate. Throws ConfigError listing every offending field.
RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Value of a quantity string such as "149.9 nF" in SI units of `unit`.
/// Throws ConfigError on a malformed number or a unit of a different kind.
double parse_quantity(const std::string& text, const std::string& unit);

std::string to_string(FitTarget t);

}  // namespace zeldovich
