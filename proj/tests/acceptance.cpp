// Acceptance suite: reruns the reference experiments at 10,000 trials and the
// deterministic property checks, printing one PASS/FAIL line per criterion.
// Exit status is non-zero if any criterion fails.
//
//   acceptance [--trials N] [--workers W]
//
// --trials exists for quick local iterations; the criteria are defined at the
// default of 10,000.

#include "corrvote/figures.hpp"
#include "corrvote/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace corrvote;

namespace {

/// Collects sub-checks for one criterion and prints them with the verdict.
class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    details_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
  }

  void near(const std::string& what, double value, double target, double tol) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << what << " = " << value << " (target " << target << " +- " << tol << ")";
    check(std::abs(value - target) <= tol, s.str());
  }

  void at_most(const std::string& what, double value, double bound) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << what << " = " << value << " (<= " << bound << ")";
    check(value <= bound, s.str());
  }

  bool report() const {
    std::cout << (ok_ ? "PASS " : "FAIL ") << name_ << '\n';
    for (const auto& d : details_) std::cout << d << '\n';
    std::cout.flush();
    return ok_;
  }

 private:
  std::string name_;
  bool ok_ = true;
  std::vector<std::string> details_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

struct Settings {
  Index trials = 10000;
  unsigned workers = 1;
};

ScenarioConfig reference(const Settings& s,
                         std::vector<Rule> rules = {kAllRules.begin(), kAllRules.end()}) {
  ScenarioConfig c;
  c.n_trials = s.trials;
  c.rules = std::move(rules);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- experiments

bool figure1(const Settings& s, std::string& csv_out) {
  Criterion c("Figure 1: reference scenario means");
  const SweepBlock block = run_plan(figure_plans("fig1", reference(s))[0], s.workers);
  std::ostringstream csv;
  write_results_csv(csv, {block});
  csv_out = csv.str();
  const ScenarioResult& r = block.points[0].result;
  const std::vector<std::pair<Rule, double>> targets = {
      {Rule::kGA, 0.9532}, {Rule::kMLPlus, 0.9503}, {Rule::kEVPlus, 0.9522},
      {Rule::kEV, 0.9519}, {Rule::kAV, 0.9156},     {Rule::kNP, 0.8867},
      {Rule::kRV, 0.8785}, {Rule::kSA, 0.8484},     {Rule::kML, 0.8006}};
  for (const auto& [rule, target] : targets) {
    c.near(std::string(rule_name(rule)), r.mean(rule), target, 0.01);
  }
  c.near("rw", r.mean(Rule::kRW), 0.5025, 0.02);
  return c.report();
}

bool figure2(const Settings& s) {
  Criterion c("Figure 2: group size endpoints");
  const auto points = sweep(reference(s, {Rule::kGA, Rule::kEV, Rule::kRV}),
                            SweepParameter::kGroupSize,
                            detail::concat({1}, detail::int_range(2, 30, 2)), s.workers);
  for (const SweepResult& p : points) {
    const ScenarioResult& r = p.result;
    const std::string at = "group_size=" + fmt(p.value) + " ";
    if (p.value == 1) {
      c.near(at + "rv", r.mean(Rule::kRV), 0.9527, 0.01);
      c.at_most(at + "|rv - ga|", std::abs(r.mean(Rule::kRV) - r.mean(Rule::kGA)), 0.01);
    }
    if (p.value == 30) {
      c.near(at + "rv", r.mean(Rule::kRV), 0.8697, 0.01);
      c.near(at + "ev", r.mean(Rule::kEV), 0.9519, 0.01);
    }
    if (p.value >= 6) {
      c.at_most(at + "|ev - ga|", std::abs(r.mean(Rule::kEV) - r.mean(Rule::kGA)), 0.01);
    }
  }
  return c.report();
}

bool figure4(const Settings& s) {
  Criterion c("Figure 4: candidate count pathologies");
  {
    ScenarioConfig cfg = reference(s, {Rule::kEV, Rule::kEVPlus});
    cfg.m = 2;
    const ScenarioResult r = run_scenario(cfg, s.workers);
    c.near("m=2 ev", r.mean(Rule::kEV), 0.7495, 0.015);
    c.near("m=2 ev+", r.mean(Rule::kEVPlus), 0.8611, 0.015);
  }
  {
    ScenarioConfig cfg = reference(s, {Rule::kML});
    cfg.m = 25;
    c.near("m=25 ml", run_scenario(cfg, s.workers).mean(Rule::kML), 0.668, 0.02);
  }
  const auto points = sweep(reference(s, {Rule::kGA, Rule::kEV}), SweepParameter::kM,
                            detail::int_range(10, 50, 5), s.workers);
  for (const SweepResult& p : points) {
    c.at_most("m=" + fmt(p.value) + " |ev - ga|",
              std::abs(p.result.mean(Rule::kEV) - p.result.mean(Rule::kGA)), 0.01);
  }
  return c.report();
}

bool figure6(const Settings& s) {
  Criterion c("Figure 6: cohesion and absorption endpoints");
  {
    const ScenarioConfig cfg =
        with_parameter(reference(s, {Rule::kRV, Rule::kGA}), SweepParameter::kAlpha, 0.0);
    const ScenarioResult r = run_scenario(cfg, s.workers);
    c.near("alpha=0 rv", r.mean(Rule::kRV), 0.9878, 0.01);
    c.at_most("alpha=0 |rv - ga|", std::abs(r.mean(Rule::kRV) - r.mean(Rule::kGA)), 0.005);
  }
  {
    const std::vector<Rule> rules = {Rule::kGA, Rule::kMLPlus, Rule::kEVPlus, Rule::kEV,
                                     Rule::kAV, Rule::kNP,     Rule::kRV};
    const ScenarioConfig cfg = with_parameter(reference(s, rules), SweepParameter::kBeta, 1.0);
    const ScenarioResult r = run_scenario(cfg, s.workers);
    double lo = 1.0, hi = 0.0;
    std::string listing;
    for (Rule rule : rules) {
      lo = std::min(lo, r.mean(rule));
      hi = std::max(hi, r.mean(rule));
      listing += " " + std::string(rule_name(rule)) + "=" + fmt(r.mean(rule));
    }
    c.at_most("beta=1 spread of seven rules (" + listing.substr(1) + ")", hi - lo, 0.005);
  }
  return c.report();
}

bool figure5(const Settings& s) {
  Criterion c("Figure 5: noise grid ordering");
  const std::vector<double> grid = {0.1, 1.0, 10.0};
  const std::vector<Rule> rules = sweep_rules();
  std::map<std::pair<int, int>, ScenarioResult> cell;  // (sigma_d index, sigma_f index)
  for (int f = 0; f < 3; ++f) {
    ScenarioConfig base = reference(s, rules);
    base.noise.sigma_f = grid[static_cast<std::size_t>(f)];
    const auto points = sweep(base, SweepParameter::kSigmaD, grid, s.workers);
    for (int d = 0; d < 3; ++d) cell[{d, f}] = points[static_cast<std::size_t>(d)].result;
  }
  auto label = [&](int d, int f) {
    return "(sigma_d=" + fmt(grid[static_cast<std::size_t>(d)]) +
           ", sigma_f=" + fmt(grid[static_cast<std::size_t>(f)]) + ")";
  };

  for (Rule rule : rules) {
    double worst = -1.0;
    std::string where = "none";
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b + 1 < 3; ++b) {
        // rise along sigma_d at fixed sigma_f = a, then along sigma_f at fixed sigma_d = a
        const double rise_d = cell[{b + 1, a}].mean(rule) - cell[{b, a}].mean(rule);
        const double rise_f = cell[{a, b + 1}].mean(rule) - cell[{a, b}].mean(rule);
        if (rise_d > worst) {
          worst = rise_d;
          where = label(b, a) + " -> sigma_d up";
        }
        if (rise_f > worst) {
          worst = rise_f;
          where = label(a, b) + " -> sigma_f up";
        }
      }
    }
    c.at_most(std::string(rule_name(rule)) + " largest increase with noise, at " + where, worst,
              0.01);
  }

  for (const auto& [key, r] : cell) {
    c.at_most(label(key.first, key.second) + " |ml+ - ga|",
              std::abs(r.mean(Rule::kMLPlus) - r.mean(Rule::kGA)), 0.01);
    double best_other = 0.0;
    std::string best_name;
    for (Rule rule : {Rule::kAV, Rule::kNP, Rule::kRV, Rule::kSA, Rule::kML}) {
      if (r.mean(rule) > best_other) {
        best_other = r.mean(rule);
        best_name = std::string(rule_name(rule));
      }
    }
    c.at_most(label(key.first, key.second) + " best untrained (" + best_name + ") - ev",
              best_other - r.mean(Rule::kEV), 0.01);
  }
  return c.report();
}

// ------------------------------------------------------------------ properties

EmbeddingSet indicator(const std::vector<int>& group_of, Index columns) {
  Matrix e = Matrix::Zero(static_cast<Index>(group_of.size()), columns);
  for (std::size_t i = 0; i < group_of.size(); ++i) e(static_cast<Index>(i), group_of[i]) = 1.0;
  return EmbeddingSet{e};
}

Matrix normal_matrix(std::mt19937& rng, Index n, Index m) {
  std::normal_distribution<double> normal;
  Matrix s(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) s(i, j) = normal(rng);
  return s;
}

bool properties(const Settings& s, const std::string& fig1_csv) {
  Criterion c("Property suite");
  std::mt19937 rng(20240601);

  {  // (a) indicator EV winner equals the group-sum product argmax
    std::uniform_real_distribution<double> score(0.05, 3.0);
    int mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 1 + rep % 8;
      const int m = 2 + rep % 5;
      const int k = std::uniform_int_distribution<int>(1, n)(rng);
      std::vector<int> group_of(static_cast<std::size_t>(n));
      std::uniform_int_distribution<int> pick(0, k - 1);
      for (int i = 0; i < n; ++i) group_of[static_cast<std::size_t>(i)] = i < k ? i : pick(rng);
      std::shuffle(group_of.begin(), group_of.end(), rng);
      Matrix sc(n, m);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) sc(i, j) = score(rng);
      int best = 0;
      double best_value = -1.0;
      for (int j = 0; j < m; ++j) {
        std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(group_of[i])] += sc(i, j);
        double product = 1.0;
        for (double x : sums) product *= x;
        if (product > best_value) {
          best_value = product;
          best = j;
        }
      }
      if (select_winner(ev_welfare(sc, indicator(group_of, k), k)) != best) ++mismatches;
    }
    c.check(mismatches == 0, "(a) indicator EV = group product argmax on 200 instances, " +
                                 std::to_string(mismatches) + " mismatches");
  }

  {  // (b) block all-ones covariance gives weight 1 / group size
    double worst = 0.0;
    std::uniform_int_distribution<Index> size(1, 8), count(1, 5);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<Index> sizes(static_cast<std::size_t>(count(rng)));
      Index n = 0;
      for (Index& g : sizes) n += (g = size(rng));
      Matrix sigma = Matrix::Zero(n, n);
      Index at = 0;
      for (Index g : sizes) {
        sigma.block(at, at, g, g).setOnes();
        at += g;
      }
      const WeightVector w = weights_from_covariance(CovarianceMatrix{sigma});
      at = 0;
      for (Index g : sizes) {
        for (Index i = 0; i < g; ++i) {
          worst = std::max(worst, std::abs(w.weights[at + i] - 1.0 / static_cast<double>(g)));
        }
        at += g;
      }
    }
    c.check(worst <= 1e-9, "(b) weights = 1/group size, max error " + fmt(worst));
  }

  {  // (c) identity covariance: GA and RV agree (rows on a common scale)
    int mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const Index n = 1 + rep % 10;
      const ScoreMatrix z = standardize_rows(ScoreMatrix(normal_matrix(rng, n, 3 + rep % 8)));
      const WeightVector w = weights_from_covariance(CovarianceMatrix{Matrix::Identity(n, n)});
      if (ga_rule(z, w).outcome.winner != range_voting(z).winner) ++mismatches;
    }
    c.check(mismatches == 0, "(c) identity covariance GA = RV on 200 instances, " +
                                 std::to_string(mismatches) + " mismatches");
  }

  {  // (d) winners invariant under per-agent positive affine maps; m >= 3
     // since two candidates standardize to +-1 and tie exactly
    std::uniform_real_distribution<double> scale(0.1, 10.0), offset(-20.0, 20.0);
    int mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const Matrix a = normal_matrix(rng, 1 + rep % 8, 3 + rep % 4);
      Matrix b = a;
      for (Index i = 0; i < a.rows(); ++i) b.row(i) = scale(rng) * a.row(i).array() + offset(rng);
      const ScoreMatrix x(a), y(b);
      if (range_voting(x).winner != range_voting(y).winner) ++mismatches;
      if (approval_voting(x).winner != approval_voting(y).winner) ++mismatches;
      if (nash_product(x).winner != nash_product(y).winner) ++mismatches;
      if (embedded_voting(x).outcome.winner != embedded_voting(y).outcome.winner) ++mismatches;
      if (ml_rule(x).outcome.winner != ml_rule(y).outcome.winner) ++mismatches;
    }
    c.check(mismatches == 0, "(d) rv/av/np/ev/ml winners under affine maps on 200 instances, " +
                                 std::to_string(mismatches) + " mismatches");
  }

  {  // (e) k_hat recovers the block count on every partition of n <= 10
    long partitions = 0;
    long wrong = 0;
    for (int n = 1; n <= 10; ++n) {
      std::vector<int> a(static_cast<std::size_t>(n), 0);
      std::function<void(int, int)> rec = [&](int pos, int blocks) {
        if (pos == n) {
          ++partitions;
          if (estimate_k(indicator(a, n)).k_hat != blocks) ++wrong;
          return;
        }
        for (int b = 0; b <= blocks; ++b) {
          a[static_cast<std::size_t>(pos)] = b;
          rec(pos + 1, std::max(blocks, b + 1));
        }
      };
      rec(0, 0);
    }
    c.check(wrong == 0, "(e) k_hat = k on " + std::to_string(partitions) + " partitions, " +
                            std::to_string(wrong) + " wrong");
  }

  {  // (f) cohesion at alpha = 1 induces the reference covariance
    const Matrix a = model_covariance(build_cohesion_embedding(1.0), NoiseParams{}).values;
    const Matrix b = model_covariance(build_reference_embedding(20, 4), NoiseParams{}).values;
    const double diff = (a - b).cwiseAbs().maxCoeff();
    c.check(diff <= 1e-12, "(f) cohesion(1) covariance vs reference, max diff " + fmt(diff));
  }

  {  // (g) a repeated fig1 run is byte-identical
    const SweepBlock block =
        run_plan(figure_plans("fig1", reference(s))[0], std::max(1u, s.workers + 1));
    std::ostringstream csv;
    write_results_csv(csv, {block});
    c.check(csv.str() == fig1_csv,
            "(g) fig1 rerun with the same seed is byte-identical (" +
                std::to_string(fig1_csv.size()) + " bytes, different worker count)");
  }
  return c.report();
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  s.workers = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--trials") {
      s.trials = std::atoll(argv[i + 1]);
    } else if (flag == "--workers") {
      s.workers = static_cast<unsigned>(std::atoi(argv[i + 1]));
    } else {
      std::cerr << "usage: acceptance [--trials N] [--workers W]\n";
      return 2;
    }
  }
  std::cout << "acceptance: " << s.trials << " trials per scenario, " << s.workers
            << " worker(s)\n";

  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string fig1_csv;
  ok &= figure1(s, fig1_csv);
  ok &= figure2(s);
  ok &= figure4(s);
  ok &= figure6(s);
  ok &= figure5(s);
  ok &= properties(s, fig1_csv);
  std::cout << (ok ? "ALL PASS" : "SOME FAILED") << " (" << static_cast<int>(seconds_since(t0))
            << " s)\n";
  return ok ? 0 : 1;
}
