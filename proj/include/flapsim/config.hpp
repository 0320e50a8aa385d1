#pragma once

#include <string>

#include "flapsim/simulator.hpp"

namespace flapsim {

// Everything an invocation needs, bundled for file round-tripping. Angles
// live in degrees inside files and radians here; sim.flap_frequency is the
// single flapping-rate source and also drives the prescribed gait.
struct RunConfig {
    SimConfig sim;
    double wake_plane_offset = -1.0;   // m downstream of the TE; <0 = one mean chord
    double loadcell_lowpass_hz = 0.0;  // zero-phase low-pass cutoff; 0 = off
};

// Strict parse: unknown keys and type mismatches raise ConfigError naming
// the offending field; absent keys take the built-in defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

// Full effective configuration, every field explicit, deterministic byte
// output. parse_config_text(echo_config(c)) reproduces c exactly.
std::string echo_config(const RunConfig& cfg);

}  // namespace flapsim
