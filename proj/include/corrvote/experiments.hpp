#pragma once

// Monte Carlo harness. A scenario fixes the embedding, the noise
// intensities and the problem size; every trial draws one choice problem
// from its own substream and evaluates all requested rules on it. Aggregates
// are reduced in trial order, so results do not depend on the worker count.

#include "corrvote/core.hpp"
#include "corrvote/noise_model.hpp"
#include "corrvote/random.hpp"
#include "corrvote/rules.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace corrvote {

enum class EmbeddingKind { kReference, kCohesion, kAbsorption, kExplicit };

inline constexpr std::string_view embedding_kind_name(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kReference: return "reference";
    case EmbeddingKind::kCohesion: return "cohesion";
    case EmbeddingKind::kAbsorption: return "absorption";
    case EmbeddingKind::kExplicit: return "explicit";
  }
  return "?";
}

inline std::optional<EmbeddingKind> parse_embedding_kind(std::string_view name) {
  for (auto k : {EmbeddingKind::kReference, EmbeddingKind::kCohesion, EmbeddingKind::kAbsorption,
                 EmbeddingKind::kExplicit}) {
    if (embedding_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Defaults are the reference scenario: a correlated group of 20 agents plus
/// 4 independent ones, sigma_f = 1, sigma_d = 0.1, 20 candidates, 1000
/// training candidates, 10000 trials.
struct ScenarioConfig {
  EmbeddingKind embedding = EmbeddingKind::kReference;
  Index group_size = 20;
  Index n_independent = 4;
  double alpha = 1.0;
  double beta = 0.0;
  Matrix explicit_rows;
  NoiseParams noise{};
  Index m = 20;
  Index m_train = 1000;
  std::vector<Rule> rules{kAllRules.begin(), kAllRules.end()};
  Index n_trials = 10000;
  std::uint64_t master_seed = kDefaultSeed;
  /// Draw one training set for the whole scenario instead of one per trial.
  bool share_training = false;
  Index single_agent_index = 0;

  [[nodiscard]] EmbeddingMatrix build_embedding() const {
    switch (embedding) {
      case EmbeddingKind::kReference: return build_reference_embedding(group_size, n_independent);
      case EmbeddingKind::kCohesion:
        return build_cohesion_embedding(alpha, group_size, n_independent);
      case EmbeddingKind::kAbsorption:
        return build_absorption_embedding(beta, group_size, n_independent);
      case EmbeddingKind::kExplicit: return EmbeddingMatrix(explicit_rows);
    }
    throw UsageError("ScenarioConfig: unknown embedding kind");
  }

  [[nodiscard]] bool needs_training() const {
    return m_train > 0 && std::any_of(rules.begin(), rules.end(), is_trained);
  }

  void validate() const {
    if (n_trials < 1) throw UsageError("ScenarioConfig: n_trials must be at least 1");
    if (m < 2) throw UsageError("ScenarioConfig: m must be at least 2");
    if (m_train < 0) throw UsageError("ScenarioConfig: m_train must be non-negative");
    if (rules.empty()) throw UsageError("ScenarioConfig: no rules requested");
    noise.validate();
    const EmbeddingMatrix e = build_embedding();
    if (single_agent_index < 0 || single_agent_index >= e.agents()) {
      throw UsageError("ScenarioConfig: single-agent index out of range");
    }
    if (m_train == 0 && std::any_of(rules.begin(), rules.end(), is_trained)) {
      throw UsageError("ScenarioConfig: ev+ and ml+ need m_train >= 1");
    }
  }
};

/// What one rule produced on one trial.
struct RuleTrialResult {
  double relative_utility = 0.0;
  bool picked_best = false;
  bool fallback = false;
  bool negative_weights = false;
  std::optional<Index> k_hat;
};

/// Prepared scenario: the embedding and GA weights are built once.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(ScenarioConfig config)
      : config_(std::move(config)), embedding_(config_.build_embedding()) {
    config_.validate();
    if (std::find(config_.rules.begin(), config_.rules.end(), Rule::kGA) != config_.rules.end()) {
      model_weights_ = weights_from_covariance(model_covariance(embedding_, config_.noise));
    }
    if (config_.share_training && config_.needs_training()) {
      Engine rng = substream(config_.master_seed, ~std::uint64_t{0}, Stream::kTraining);
      shared_training_ = ScoreMatrix(
          sample_scores(embedding_, config_.noise, config_.m_train, rng).scores);
    }
  }

  [[nodiscard]] const ScenarioConfig& config() const noexcept { return config_; }
  [[nodiscard]] const EmbeddingMatrix& embedding() const noexcept { return embedding_; }

  /// The problem of a trial depends only on (seed, trial index). Training
  /// columns are drawn from their own substream, and only when requested.
  [[nodiscard]] ChoiceProblem sample(std::uint64_t trial_index) const {
    Engine rng = substream(config_.master_seed, trial_index, Stream::kProblem);
    SampledScores current = sample_scores(embedding_, config_.noise, config_.m, rng);
    std::optional<ScoreMatrix> training;
    if (config_.needs_training()) {
      if (shared_training_) {
        training = *shared_training_;
      } else {
        Engine trng = substream(config_.master_seed, trial_index, Stream::kTraining);
        training =
            ScoreMatrix(sample_scores(embedding_, config_.noise, config_.m_train, trng).scores);
      }
    }
    return ChoiceProblem(std::move(current.utilities), ScoreMatrix(std::move(current.scores)),
                         std::move(training));
  }

  /// One entry per requested rule, in request order.
  [[nodiscard]] std::vector<RuleTrialResult> trial(std::uint64_t trial_index) const {
    const ChoiceProblem problem = sample(trial_index);
    Engine rw_rng = substream(config_.master_seed, trial_index, Stream::kRandomWinner);
    RuleContext context{model_weights_, config_.single_agent_index, &rw_rng};

    std::vector<RuleTrialResult> out;
    out.reserve(config_.rules.size());
    for (Rule rule : config_.rules) {
      RuleTrialResult r;
      Index winner = 0;
      try {
        const RuleEvaluation ev = evaluate_rule(rule, problem, context);
        winner = ev.outcome.winner;
        r.fallback = ev.fallback;
        r.negative_weights = ev.negative_weights;
        r.k_hat = ev.k_hat;
      } catch (const std::exception&) {
        // a degenerate draw must not abort the sweep: count it, pick index 0
        r.fallback = true;
      }
      r.relative_utility = relative_utility(problem.utilities, winner);
      r.picked_best = picked_best(problem.utilities, winner);
      out.push_back(r);
    }
    return out;
  }

 private:
  ScenarioConfig config_;
  EmbeddingMatrix embedding_;
  std::optional<WeightVector> model_weights_;
  std::optional<ScoreMatrix> shared_training_;
};

inline std::vector<RuleTrialResult> run_trial(const ScenarioConfig& config,
                                              std::uint64_t trial_index) {
  return ScenarioRunner(config).trial(trial_index);
}

struct RuleSummary {
  Rule rule = Rule::kRV;
  double mean_relative_utility = 0.0;
  double std_error = 0.0;
  double accuracy = 0.0;
  std::int64_t fallback_count = 0;
  std::int64_t negative_weight_count = 0;
  std::map<Index, std::int64_t> k_hat_histogram;
};

struct ScenarioResult {
  std::int64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::vector<RuleSummary> rules;

  [[nodiscard]] const RuleSummary& at(Rule rule) const {
    for (const auto& r : rules) {
      if (r.rule == rule) return r;
    }
    throw UsageError("ScenarioResult: rule " + std::string(rule_name(rule)) + " was not run");
  }
  [[nodiscard]] double mean(Rule rule) const { return at(rule).mean_relative_utility; }
};

/// Runs every trial, possibly on several threads; the reduction walks trials
/// in index order so the output is bit-identical for any worker count.
inline ScenarioResult run_scenario(const ScenarioConfig& config, unsigned workers = 1) {
  const ScenarioRunner runner(config);
  const auto n = static_cast<std::size_t>(config.n_trials);
  const std::size_t n_rules = config.rules.size();
  std::vector<std::vector<RuleTrialResult>> results(n);

  workers = std::max(1u, workers);
  if (workers == 1 || n == 1) {
    for (std::size_t t = 0; t < n; ++t) results[t] = runner.trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t t = next++; t < n; t = next++) results[t] = runner.trial(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ScenarioResult out;
  out.n_trials = static_cast<std::int64_t>(n);
  out.seed = config.master_seed;
  for (std::size_t r = 0; r < n_rules; ++r) {
    RuleSummary s;
    s.rule = config.rules[r];
    double sum = 0.0;
    double hits = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const RuleTrialResult& x = results[t][r];
      sum += x.relative_utility;
      hits += x.picked_best ? 1.0 : 0.0;
      s.fallback_count += x.fallback ? 1 : 0;
      s.negative_weight_count += x.negative_weights ? 1 : 0;
      if (x.k_hat) ++s.k_hat_histogram[*x.k_hat];
    }
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double d = results[t][r].relative_utility - mean;
      sq += d * d;
    }
    s.mean_relative_utility = mean;
    s.std_error = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) / std::sqrt(double(n)) : 0.0;
    s.accuracy = hits / static_cast<double>(n);
    out.rules.push_back(std::move(s));
  }
  return out;
}

enum class SweepParameter { kGroupSize, kNIndependent, kM, kSigmaD, kSigmaF, kAlpha, kBeta };

inline constexpr std::string_view sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kGroupSize: return "group_size";
    case SweepParameter::kNIndependent: return "n_independent";
    case SweepParameter::kM: return "m";
    case SweepParameter::kSigmaD: return "sigma_d";
    case SweepParameter::kSigmaF: return "sigma_f";
    case SweepParameter::kAlpha: return "alpha";
    case SweepParameter::kBeta: return "beta";
  }
  return "?";
}

inline SweepParameter parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::kGroupSize, SweepParameter::kNIndependent, SweepParameter::kM,
                 SweepParameter::kSigmaD, SweepParameter::kSigmaF, SweepParameter::kAlpha,
                 SweepParameter::kBeta}) {
    if (sweep_parameter_name(p) == name) return p;
  }
  throw UsageError("unknown sweep parameter '" + std::string(name) +
                   "' (expected group_size, n_independent, m, sigma_d, sigma_f, alpha or beta)");
}

namespace detail {
inline Index as_count(double value, std::string_view what) {
  if (value < 0.0 || value != std::floor(value)) {
    throw UsageError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<Index>(value);
}
}  // namespace detail

/// `base` with one parameter replaced. alpha and beta switch the embedding
/// to the cohesion and absorption families respectively.
inline ScenarioConfig with_parameter(ScenarioConfig base, SweepParameter parameter, double value) {
  auto require_family = [&](std::string_view what) {
    if (base.embedding == EmbeddingKind::kExplicit) {
      throw UsageError("cannot sweep " + std::string(what) + " with an explicit embedding");
    }
  };
  switch (parameter) {
    case SweepParameter::kGroupSize:
      require_family("group_size");
      base.group_size = detail::as_count(value, "group_size");
      break;
    case SweepParameter::kNIndependent:
      require_family("n_independent");
      base.n_independent = detail::as_count(value, "n_independent");
      break;
    case SweepParameter::kM: base.m = detail::as_count(value, "m"); break;
    case SweepParameter::kSigmaD: base.noise.sigma_d = value; break;
    case SweepParameter::kSigmaF: base.noise.sigma_f = value; break;
    case SweepParameter::kAlpha:
      require_family("alpha");
      base.embedding = EmbeddingKind::kCohesion;
      base.alpha = value;
      break;
    case SweepParameter::kBeta:
      require_family("beta");
      base.embedding = EmbeddingKind::kAbsorption;
      base.beta = value;
      break;
  }
  return base;
}

struct SweepResult {
  std::string parameter;
  double value = 0.0;
  ScenarioResult result;
};

inline std::vector<SweepResult> sweep(const ScenarioConfig& base, SweepParameter parameter,
                                      const std::vector<double>& values, unsigned workers = 1) {
  std::vector<SweepResult> out;
  out.reserve(values.size());
  for (double v : values) {
    const ScenarioConfig cfg = with_parameter(base, parameter, v);
    out.push_back(SweepResult{std::string(sweep_parameter_name(parameter)), v,
                              run_scenario(cfg, workers)});
  }
  return out;
}

inline std::vector<SweepResult> sweep(const ScenarioConfig& base, std::string_view parameter,
                                      const std::vector<double>& values, unsigned workers = 1) {
  return sweep(base, parse_sweep_parameter(parameter), values, workers);
}

/// A single scenario reported in sweep form.
inline SweepResult single_point(const ScenarioConfig& config, unsigned workers = 1) {
  return SweepResult{"none", 0.0, run_scenario(config, workers)};
}

}  // namespace corrvote
