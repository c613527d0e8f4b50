#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gts/conditions.hpp"
#include "gts/simulate.hpp"

namespace gts {

// Shortest round-trip decimal representation; identical input bits always
// produce identical text, so output files compare byte for byte.
std::string format_double(double value);

// Trace CSV: a `# config: {...}` comment line followed by the columns
// t,context,arm,reward,regret_inc,cum_regret,avg_shifted_loss. When the trace
// carries weight snapshots, columns w0..w{N-1} follow, filled on snapshot
// rows and empty elsewhere.
std::string trace_csv(const RunTrace& trace, std::string_view config_json);

// F-sweep CSV with columns g,M1,M2,F,limit_flag.
std::string f_sweep_csv(const FSweep& sweep, std::string_view config_json);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gts
