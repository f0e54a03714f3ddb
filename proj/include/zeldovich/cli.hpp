#pragma once

// The zeldovich command line: sweep, map, fit, simulate and analyze pipelines.
// Exit status 0 on success, 1 on a domain error, 2 on a usage or config error.

#include <iosfwd>
#include <vector>

#include "zeldovich/config.hpp"
#include "zeldovich/io.hpp"

namespace zeldovich {

// Pipelines produce their artifacts in memory; nothing touches the disk until commit.
ArtifactSet sweep_artifacts(const RunConfig& cfg, bool no_cylinder);
ArtifactSet map_artifacts(const RunConfig& cfg);
ArtifactSet fit_artifacts(const RunConfig& cfg, const std::vector<FitPoint>& data);
ArtifactSet simulate_artifacts(const RunConfig& cfg);
ArtifactSet analyze_artifacts(const RunConfig& cfg, const Waveform& w);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zeldovich
