#pragma once

#include <string>
#include <vector>

#include "echowall/experiments.hpp"

namespace echowall {

// Writes the CSV plus SVG line charts mirroring the experiment figures:
//   exp1: detected image-source distance and normal MSE vs floor distance,
//   exp2: wall hitrate vs angle (one line per SNR) per method,
//   exp3: wall and window hitrate vs angle per method.
// All output is generated in memory first and written through temp files so
// a failure leaves no partial outputs. Returns the list of files written.
// Throws std::invalid_argument on an empty table.
std::vector<std::string> emit_plots(const ResultsTable& table,
                                    const std::string& out_dir);

}  // namespace echowall
