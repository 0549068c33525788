#pragma once

// CSV serialization of sweep results and of the diagnostics sidecar.
//
// Result schema, one row per (parameter value, rule):
//   sweep_id,parameter,value,rule,n_trials,mean_relative_utility,std_error,
//   accuracy,fallback_count,seed
// Diagnostics schema, one row per counter:
//   sweep_id,parameter,value,rule,diagnostic,key,count

#include "corrvote/experiments.hpp"

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace corrvote {

inline constexpr std::string_view kResultHeader =
    "sweep_id,parameter,value,rule,n_trials,mean_relative_utility,std_error,accuracy,"
    "fallback_count,seed";
inline constexpr std::string_view kDiagnosticsHeader =
    "sweep_id,parameter,value,rule,diagnostic,key,count";

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

/// A block of sweep points sharing a sweep id.
struct SweepBlock {
  std::string sweep_id;
  std::vector<SweepResult> points;
};

inline void write_result_rows(std::ostream& out, const SweepBlock& block) {
  for (const SweepResult& point : block.points) {
    for (const RuleSummary& r : point.result.rules) {
      out << block.sweep_id << ',' << point.parameter << ',' << format_double(point.value) << ','
          << rule_name(r.rule) << ',' << point.result.n_trials << ','
          << format_double(r.mean_relative_utility) << ',' << format_double(r.std_error) << ','
          << format_double(r.accuracy) << ',' << r.fallback_count << ',' << point.result.seed
          << '\n';
    }
  }
}

inline void write_results_csv(std::ostream& out, const std::vector<SweepBlock>& blocks) {
  out << kResultHeader << '\n';
  for (const auto& block : blocks) write_result_rows(out, block);
}

/// k_hat histograms for spectral rules; fallback and negative-weight counts
/// for the likelihood rules.
inline void write_diagnostics_csv(std::ostream& out, const std::vector<SweepBlock>& blocks) {
  out << kDiagnosticsHeader << '\n';
  for (const auto& block : blocks) {
    for (const SweepResult& point : block.points) {
      const std::string prefix =
          block.sweep_id + ',' + point.parameter + ',' + format_double(point.value) + ',';
      for (const RuleSummary& r : point.result.rules) {
        const std::string rule(rule_name(r.rule));
        for (const auto& [k, count] : r.k_hat_histogram) {
          out << prefix << rule << ",k_hat," << k << ',' << count << '\n';
        }
        out << prefix << rule << ",fallback,all," << r.fallback_count << '\n';
        if (r.rule == Rule::kGA || r.rule == Rule::kML || r.rule == Rule::kMLPlus) {
          out << prefix << rule << ",negative_weights,all," << r.negative_weight_count << '\n';
        }
      }
    }
  }
}

}  // namespace corrvote
