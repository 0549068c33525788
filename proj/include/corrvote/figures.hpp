#pragma once

// Catalog of the reproducible experiments. Each figure is a list of sweep
// plans over the reference scenario; grids follow the published x-axes.

#include "corrvote/experiments.hpp"
#include "corrvote/report.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrvote {

inline constexpr std::array<std::string_view, 7> kFigureIds = {"fig1", "fig2", "fig3", "fig4",
                                                               "fig5", "fig6a", "fig6b"};

/// One sweep of a figure. An empty parameter means a single scenario.
struct SweepPlan {
  std::string sweep_id;
  ScenarioConfig base;
  std::optional<SweepParameter> parameter;
  std::vector<double> values;
};

namespace detail {
inline std::vector<double> int_range(int first, int last, int step) {
  std::vector<double> v;
  for (int x = first; x <= last; x += step) v.push_back(x);
  return v;
}
inline std::vector<double> tenths() {
  std::vector<double> v;
  for (int x = 0; x <= 10; ++x) v.push_back(x / 10.0);
  return v;
}
inline std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}
}  // namespace detail

/// Rules shown in the sweep figures (RW is only shown in the bar chart).
inline std::vector<Rule> sweep_rules() {
  return {Rule::kGA, Rule::kMLPlus, Rule::kEVPlus, Rule::kEV, Rule::kAV,
          Rule::kNP, Rule::kRV,     Rule::kSA,     Rule::kML};
}

inline bool is_figure_id(std::string_view id) {
  for (auto f : kFigureIds) {
    if (f == id) return true;
  }
  return false;
}

/// Sweep plans for a figure id; throws UsageError on an unknown id.
inline std::vector<SweepPlan> figure_plans(std::string_view id, const ScenarioConfig& reference) {
  ScenarioConfig base = reference;
  if (id == "fig1") {
    return {SweepPlan{"fig1", base, std::nullopt, {}}};
  }
  base.rules = sweep_rules();
  if (id == "fig2") {
    return {SweepPlan{"fig2", base, SweepParameter::kGroupSize,
                      detail::concat({1}, detail::int_range(2, 30, 2))}};
  }
  if (id == "fig3") {
    return {SweepPlan{"fig3", base, SweepParameter::kNIndependent,
                      detail::concat({0, 1}, detail::int_range(2, 20, 2))}};
  }
  if (id == "fig4") {
    return {SweepPlan{"fig4", base, SweepParameter::kM,
                      detail::concat({2, 3, 4}, detail::int_range(5, 50, 5))}};
  }
  if (id == "fig5") {
    std::vector<SweepPlan> plans;
    for (double sf : {0.1, 1.0, 10.0}) {
      ScenarioConfig b = base;
      b.noise.sigma_f = sf;
      plans.push_back(SweepPlan{"fig5/sigma_f=" + format_double(sf), b, SweepParameter::kSigmaD,
                                {0.1, 1.0, 10.0}});
    }
    return plans;
  }
  if (id == "fig6a") {
    return {SweepPlan{"fig6a", base, SweepParameter::kAlpha, detail::tenths()}};
  }
  if (id == "fig6b") {
    return {SweepPlan{"fig6b", base, SweepParameter::kBeta, detail::tenths()}};
  }
  throw UsageError("unknown figure id '" + std::string(id) +
                   "' (expected fig1, fig2, fig3, fig4, fig5, fig6a or fig6b)");
}

inline SweepBlock run_plan(const SweepPlan& plan, unsigned workers = 1) {
  SweepBlock block{plan.sweep_id, {}};
  if (!plan.parameter) {
    block.points.push_back(single_point(plan.base, workers));
  } else {
    block.points = sweep(plan.base, *plan.parameter, plan.values, workers);
  }
  return block;
}

}  // namespace corrvote
