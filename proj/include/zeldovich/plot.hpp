#pragma once

// Deterministic SVG plots: no timestamps, fixed element order, fixed-precision
// coordinates, so identical inputs give byte-identical files.

#include <string>

#include "zeldovich/dynamics.hpp"
#include "zeldovich/steady_state.hpp"

namespace zeldovich {

/// |V_o| against f for phase `phase`, one curve per rotor frequency, plus an
/// optional no-cylinder baseline drawn dashed.
std::string plot_sweep(const SweepResult& sweep, const SweepResult* baseline, std::size_t phase = 0);

/// Largest per-phase resistance over the (f, F) grid, unstable cells shaded,
/// and the f = m F threshold line for mode m.
std::string plot_stability_map(const StabilityMap& map, int mode_m = 2);

/// Stacked panels against time: log10 resistor voltage, carrier frequency,
/// rotor frequency, net resistance. Events are marked with vertical lines.
std::string plot_trace(const SimTrace& trace);

}  // namespace zeldovich
