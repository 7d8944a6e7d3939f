#pragma once

#include <string>
#include <vector>

#include "mflab/harness.hpp"
#include "mflab/margins.hpp"

namespace mflab {

// Self-contained SVG renderings; no external plotting dependency.

/// Three stacked panels: control signal; setpoint, reference and output;
/// exact F and its estimate.
void write_time_plot(const RunResult& result, const std::string& path);

/// Nyquist locus (with the critical point marked) plus the Bode
/// magnitude/phase pair.
void write_frequency_plot(const std::vector<NyquistRow>& rows,
                          const std::string& path);

}  // namespace mflab
