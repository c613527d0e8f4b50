#include "gts/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace gts {

std::string format_double(double value) {
  char buffer[32];
  const std::to_chars_result result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string trace_csv(const RunTrace& trace, std::string_view config_json) {
  std::string out;
  out.reserve(trace.steps.size() * 48 + config_json.size() + 64);
  out += "# config: ";
  out += config_json;
  out += '\n';
  out += "t,context,arm,reward,regret_inc,cum_regret,avg_shifted_loss";
  const bool with_weights = !trace.weight_snapshots.empty();
  const std::size_t num_experts = with_weights ? trace.weight_snapshots.front().size() : 0;
  if (with_weights) {
    for (std::size_t i = 0; i < num_experts; ++i) {
      out += ",w";
      out += std::to_string(i);
    }
  }
  out += '\n';

  double cumulative = 0.0;
  std::size_t next_snapshot = 0;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const StepRecord& step = trace.steps[t];
    cumulative += step.regret_increment;
    out += std::to_string(t);
    out += ',';
    out += std::to_string(step.context);
    out += ',';
    out += std::to_string(step.arm);
    out += ',';
    out += std::to_string(step.reward);
    out += ',';
    out += format_double(step.regret_increment);
    out += ',';
    out += format_double(cumulative);
    out += ',';
    out += format_double(step.avg_shifted_loss);
    if (with_weights) {
      const bool snapshot_row =
          next_snapshot < trace.snapshot_steps.size() &&
          trace.snapshot_steps[next_snapshot] == static_cast<std::int64_t>(t);
      for (std::size_t i = 0; i < num_experts; ++i) {
        out += ',';
        if (snapshot_row) out += format_double(trace.weight_snapshots[next_snapshot][i]);
      }
      if (snapshot_row) ++next_snapshot;
    }
    out += '\n';
  }
  return out;
}

std::string f_sweep_csv(const FSweep& sweep, std::string_view config_json) {
  std::string out;
  out.reserve(sweep.points.size() * 48 + config_json.size() + 64);
  out += "# config: ";
  out += config_json;
  out += '\n';
  out += "g,M1,M2,F,limit_flag\n";
  for (const AppendixPoint& point : sweep.points) {
    out += format_double(point.g);
    out += ',';
    out += format_double(point.m1);
    out += ',';
    out += format_double(point.m2);
    out += ',';
    out += format_double(point.ratio);
    out += ',';
    out += point.limit ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) throw std::runtime_error("cannot open " + path.string() + " for writing");
  stream.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!stream) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace gts
