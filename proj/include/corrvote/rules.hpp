#pragma once

// Rule registry: canonical names and a uniform evaluation entry point.

#include "corrvote/core.hpp"
#include "corrvote/likelihood.hpp"
#include "corrvote/random.hpp"
#include "corrvote/rules_baseline.hpp"
#include "corrvote/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrvote {

/// Declaration order is the reporting order.
enum class Rule { kGA, kMLPlus, kEVPlus, kEV, kAV, kNP, kRV, kSA, kML, kRW };

inline constexpr std::array<Rule, 10> kAllRules = {Rule::kGA, Rule::kMLPlus, Rule::kEVPlus,
                                                   Rule::kEV, Rule::kAV,     Rule::kNP,
                                                   Rule::kRV, Rule::kSA,     Rule::kML,
                                                   Rule::kRW};

inline constexpr std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::kGA: return "ga";
    case Rule::kMLPlus: return "ml+";
    case Rule::kEVPlus: return "ev+";
    case Rule::kEV: return "ev";
    case Rule::kAV: return "av";
    case Rule::kNP: return "np";
    case Rule::kRV: return "rv";
    case Rule::kSA: return "sa";
    case Rule::kML: return "ml";
    case Rule::kRW: return "rw";
  }
  return "?";
}

inline constexpr std::string_view rule_description(Rule rule) {
  switch (rule) {
    case Rule::kGA: return "maximum likelihood with the true noise covariance (model-aware)";
    case Rule::kMLPlus: return "maximum likelihood with covariance estimated on a training history";
    case Rule::kEVPlus: return "embedded voting with embeddings built on a training history";
    case Rule::kEV: return "embedded voting on the current candidates only";
    case Rule::kAV: return "approval voting above each agent's mean, product tie-break";
    case Rule::kNP: return "Nash product of scores shifted to mean 2, floored at 0.1";
    case Rule::kRV: return "range voting: sum of standardized scores";
    case Rule::kSA: return "single agent's standardized scores";
    case Rule::kML: return "maximum likelihood with covariance estimated on current candidates";
    case Rule::kRW: return "uniformly random winner";
  }
  return "";
}

inline std::optional<Rule> parse_rule(std::string_view name) {
  for (Rule r : kAllRules) {
    if (rule_name(r) == name) return r;
  }
  return std::nullopt;
}

inline constexpr bool is_trained(Rule rule) {
  return rule == Rule::kMLPlus || rule == Rule::kEVPlus;
}

/// Inputs a rule may need besides the problem itself.
struct RuleContext {
  /// Model weights for GA; GA is unavailable without them.
  std::optional<WeightVector> model_weights;
  Index single_agent_index = 0;
  /// Source for RW.
  Engine* rng = nullptr;
};

struct RuleEvaluation {
  AggregationOutcome outcome;
  bool fallback = false;
  bool negative_weights = false;
  std::optional<Index> k_hat;
};

/// Trained rules read problem.training_scores; untrained rules never do.
inline RuleEvaluation evaluate_rule(Rule rule, const ChoiceProblem& problem,
                                    const RuleContext& context) {
  const ScoreMatrix& s = problem.scores;
  auto from_likelihood = [](LikelihoodResult r) {
    return RuleEvaluation{std::move(r.outcome), r.fallback, r.negative_weights, std::nullopt};
  };
  auto from_spectral = [](EmbeddedVotingResult r) {
    return RuleEvaluation{std::move(r.outcome), false, false, r.diagnostics.k_hat};
  };
  auto plain = [](AggregationOutcome o) {
    return RuleEvaluation{std::move(o), false, false, std::nullopt};
  };
  switch (rule) {
    case Rule::kGA:
      if (!context.model_weights) throw UsageError("evaluate_rule: GA needs model weights");
      return from_likelihood(ga_rule(s, *context.model_weights));
    case Rule::kMLPlus:
      if (!problem.training_scores) throw UsageError("evaluate_rule: ml+ needs training scores");
      return from_likelihood(ml_rule(s, problem.training_scores));
    case Rule::kML:
      return from_likelihood(ml_rule(s));
    case Rule::kEVPlus:
      if (!problem.training_scores) throw UsageError("evaluate_rule: ev+ needs training scores");
      return from_spectral(embedded_voting(s, problem.training_scores));
    case Rule::kEV:
      return from_spectral(embedded_voting(s));
    case Rule::kAV:
      return plain(approval_voting(s));
    case Rule::kNP:
      return plain(nash_product(s));
    case Rule::kRV:
      return plain(range_voting(s));
    case Rule::kSA:
      return plain(single_agent(s, context.single_agent_index));
    case Rule::kRW:
      if (context.rng == nullptr) throw UsageError("evaluate_rule: rw needs a random source");
      return plain(random_winner(s.candidates(), *context.rng));
  }
  throw UsageError("evaluate_rule: unknown rule");
}

}  // namespace corrvote
