// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "vlmc/counts.hpp"
#include "vlmc/error.hpp"
#include "vlmc/estimators.hpp"
#include "vlmc/harness.hpp"
#include "vlmc/io.hpp"
#include "vlmc/sampler.hpp"
#include "vlmc/stats.hpp"
#include "vlmc/theory.hpp"

using namespace vlmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void note(const std::string& text) {
  std::printf("       note: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Word random_word(std::mt19937_64& g, std::size_t n, std::size_t A) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(A) - 1);
  Word w(n);
  for (auto& s : w) s = static_cast<Symbol>(d(g));
  return w;
}

// ---------------------------------------------------------------------------

void counting_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 g(2024);
  std::size_t mismatches = 0, checked = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    std::uniform_int_distribution<std::size_t> len(1, 200), depth(1, 8), alpha(2, 4);
    const std::size_t n = len(g);
    const std::size_t A = alpha(g);
    const std::size_t d = std::min(n, depth(g));
    const Word x = random_word(g, n, A);
    const CountTrie trie = build_counts(x, A, d);
    // Naive window scan.
    std::map<Word, std::uint64_t> naive;
    for (std::size_t l = 1; l <= d; ++l)
      for (std::size_t t = 0; t + l <= n; ++t) ++naive[Word(x.begin() + t, x.begin() + t + l)];
    std::size_t listed = 0;
    trie.for_each_string([&](const Word& w, CountTrie::NodeId node) {
      ++listed;
      auto it = naive.find(w);
      if (it == naive.end() || it->second != trie.count(node)) ++mismatches;
    });
    if (listed != naive.size()) ++mismatches;
    for (const auto& [w, c] : naive) {
      ++checked;
      if (n_count(trie, w) != c) ++mismatches;
    }
  }
  const double secs = seconds_since(start);
  verdict(1, "counting oracle equivalence", mismatches == 0 && secs < 10.0,
          fmt("1000 instances, %zu strings checked, %zu mismatches, %.2f s (limit 10 s)", checked, mismatches, secs));
}

void null_calibration() {
  const auto start = Clock::now();
  NullCalibrationConfig cfg;
  cfg.tree = iid_tree(2);
  cfg.n = 10000;
  cfg.replicas = 500;
  cfg.node = Word{0};
  cfg.seed = 20240101;
  const auto report = run_null_calibration(cfg);
  const double secs = seconds_since(start);
  const double ks = report.ks.value_or(1.0);
  verdict(2, "chi-square null calibration", ks <= 0.08 && secs < 120.0,
          fmt("KS distance to chi2(1) = %.4f (limit 0.08), mean Lambda = %.3f, %.1f s (limit 120 s)", ks, report.mean,
              secs));
}

void ell_consistency() {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  cfg.tree_source = "builtin:ref";
  cfg.tree = reference_tree();
  cfg.n_grid = {1000, 10000, 100000};
  cfg.replicas = 200;
  cfg.algorithm = Algorithm::kContextFixed;
  cfg.context = ContextConfig{1.0, 1.0, 1.0, DepthMode::kDeterministic};
  cfg.truncate = 2;
  cfg.seed = 3;
  const auto report = run_recovery_experiment(cfg);
  const double secs = seconds_since(start);
  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < report.summary.size(); ++i) {
    const auto& s = report.summary[i];
    curve += fmt("%sn=%zu: %.3f+-%.3f", i ? ", " : "", s.n, s.ell_mismatch, s.ell_mismatch_se);
    if (i > 0) {
      const auto& p = report.summary[i - 1];
      const double se = std::sqrt(p.ell_mismatch_se * p.ell_mismatch_se + s.ell_mismatch_se * s.ell_mismatch_se);
      if (s.ell_mismatch > p.ell_mismatch + 2.0 * se) monotone = false;
    }
    if (s.failed > 0) monotone = false;
  }
  const double last = report.summary.back().ell_mismatch;
  verdict(3, "consistency of the estimated context length", monotone && last <= 0.10 && secs < 600.0,
          fmt("P(ell_hat != ell): %s; non-increasing within 2 SE: %s; final %.3f (limit 0.10); %.1f s", curve.c_str(),
              monotone ? "yes" : "no", last, secs));
}

double delta_frequency(const ProbabilisticContextTree& tree, const std::string& source, double delta,
                       std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.tree_source = source;
  cfg.tree = tree;
  cfg.n_grid = {100000};
  cfg.replicas = 100;
  cfg.algorithm = Algorithm::kDelta;
  cfg.delta = DeltaConfig{delta, 4};
  cfg.truncate = 2;
  cfg.seed = seed;
  return run_recovery_experiment(cfg).summary.front().recovery;
}

void delta_recovery() {
  const auto start = Clock::now();
  const double delta = 0.15;
  const double D4 = d_m(reference_tree(), 4);
  const bool below = delta < D4;
  const double ref = delta_frequency(reference_tree(), "builtin:ref", delta, 4);
  const double null = delta_frequency(iid_tree(2), "builtin:iid", delta, 5);
  const double secs = seconds_since(start);
  const bool pass = below && ref >= 0.95 && null >= 0.95 && secs < 600.0;
  verdict(4, "recovery by the Delta estimator", pass,
          fmt("D_4 = %.6f, delta = %.2f < D_4: %s; REF recovered %d/100 (need 95); i.i.d. empty %d/100 (need 95); %.1f s",
              D4, delta, below ? "yes" : "no", static_cast<int>(std::lround(ref * 100)),
              static_cast<int>(std::lround(null * 100)), secs));
  if (!below) {
    const double ok_delta = 0.06;
    const double alt = delta_frequency(reference_tree(), "builtin:ref", ok_delta, 4);
    note(fmt("with delta = %.2f (< D_4) the same experiment recovers %d/100; delta = 0.15 exceeds D_4, so context 1 "
             "(|p(1|1) - P(1)| = 7/60) cannot pass the threshold",
             ok_delta, static_cast<int>(std::lround(alt * 100))));
  }
}

void deviation_domination() {
  const auto start = Clock::now();
  const auto ref = reference_tree();
  const Word w{1, 0};
  const CylinderModel model(ref);
  const double p_w = model.probability(w);
  const double p_true = model.conditional(w)[1];
  const AlphaStats alpha = alpha_stats(ref, w.size());
  const ChainSampler sampler(ref);
  const std::vector<double> ts{0.02, 0.05, 0.1};
  const std::vector<std::size_t> ns{10000, 100000};
  const std::size_t R = 1000;
  bool pass = true;
  std::size_t informative = 0;
  std::string detail;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::vector<std::size_t> exceed(ts.size(), 0);
    for (std::size_t r = 0; r < R; ++r) {
      Philox rng(55, static_cast<std::uint32_t>(ni), static_cast<std::uint32_t>(r));
      const SymbolSequence s = sampler.sample(ns[ni], rng);
      const CountTrie trie = build_counts(s, w.size() + 1);
      const double dev = std::abs(p_hat(trie, 1, w) - p_true);
      for (std::size_t ti = 0; ti < ts.size(); ++ti) exceed[ti] += dev > ts[ti] ? 1 : 0;
    }
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      const double freq = static_cast<double>(exceed[ti]) / static_cast<double>(R);
      const double bound = deviation_bound({static_cast<double>(ns[ni]), w.size(), ts[ti], p_w, 2, alpha.alpha0, alpha.alpha});
      const double se = binomial_se(freq, R);
      if (bound < 1.0) {
        ++informative;
        if (freq > bound + 3.0 * se) pass = false;
      }
      detail += fmt("%s(n=%zu,t=%.2f: freq %.3f, bound %.3g)", detail.empty() ? "" : " ", ns[ni], ts[ti], freq, bound);
    }
  }
  const double secs = seconds_since(start);
  pass = pass && secs < 900.0;
  verdict(5, "deviation-bound domination", pass,
          fmt("%zu of 6 grid points have bound < 1; %.1f s", informative, secs));
  note(detail);
  if (informative == 0) note("every bound value is >= 1 here, so the domination check is vacuous on this grid");
}

void renewal_example() {
  const auto start = Clock::now();
  const auto pct = renewal_tree(RenewalSpec::constant(0.5), 2);
  const ChainSampler sampler(pct);
  int passed = 0;
  double min_p = 1.0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    Philox rng(seed, 0, 0);
    std::vector<std::size_t> gaps;
    std::size_t n = 25000;
    while (gaps.size() < 10000) {
      gaps = inter_arrival_gaps(sampler.sample(n, rng).symbols, 1);
      n *= 2;
    }
    gaps.resize(10000);
    const GofResult gof = geometric_gof(gaps, 0.5);
    min_p = std::min(min_p, gof.p_value);
    passed += gof.p_value >= 0.01 ? 1 : 0;
  }
  bool rejected = false;
  std::string reason;
  try {
    sample_path(renewal_tree(RenewalSpec::geometric(1.0, 0.5), 2), 1000, 1);
  } catch (const PreconditionError& e) {
    rejected = true;
    reason = e.what();
  }
  const double secs = seconds_since(start);
  verdict(6, "renewal example", passed >= 95 && rejected,
          fmt("Geometric(0.5) GOF passed at level 0.01 for %d/100 seeds (need 95), min p = %.4f; q_k = 2^-k %s (%s); "
              "%.1f s",
              passed, min_p, rejected ? "rejected" : "NOT rejected", reason.c_str(), secs));
}

ProbabilisticContextTree random_tree(std::mt19937_64& g) {
  std::uniform_int_distribution<std::size_t> alpha(2, 3), splits(0, 5);
  const std::size_t A = alpha(g);
  std::vector<Word> leaves;
  for (std::size_t a = 0; a < A; ++a) leaves.push_back(Word{static_cast<Symbol>(a)});
  for (std::size_t s = splits(g); s > 0; --s) {
    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    const std::size_t i = pick(g);
    if (leaves[i].size() >= 4) continue;
    const Word leaf = leaves[i];
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(i));
    for (std::size_t a = 0; a < A; ++a) {
      Word child{static_cast<Symbol>(a)};
      child.insert(child.end(), leaf.begin(), leaf.end());
      leaves.push_back(std::move(child));
    }
  }
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<std::pair<Word, Eigen::VectorXd>> rows;
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < A; ++a) labels.push_back(std::to_string(a));
  for (const auto& leaf : leaves) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(A));
    for (Eigen::Index a = 0; a < r.size(); ++a) r[a] = u(g);
    rows.emplace_back(leaf, r / r.sum());
  }
  return ProbabilisticContextTree(Alphabet(std::move(labels)), std::move(rows));
}

void structural_identities() {
  const auto start = Clock::now();
  std::mt19937_64 g(77);
  std::size_t truncate_bad = 0, canonical_bad = 0, vectors = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto pct = random_tree(g);
    const auto& ctx = pct.tree().contexts();
    for (std::size_t K = 1; K <= 5; ++K) {
      std::set<Word> brute;
      for (const auto& c : ctx) brute.insert(c.size() <= K ? c : Word(c.end() - static_cast<std::ptrdiff_t>(K), c.end()));
      const ContextTree t = truncate_tree(pct.tree(), K);
      if (std::set<Word>(t.contexts().begin(), t.contexts().end()) != brute) ++truncate_bad;
    }
    const std::size_t h = pct.tree().height();
    const auto approx = canonical_approximation(pct, h);
    if (approx.tree().contexts() != ctx) ++canonical_bad;
    for (std::size_t i = 0; i < ctx.size() && i < approx.rows().size(); ++i)
      if (approx.row(i) != pct.row(i)) ++canonical_bad;
    // Every probability vector the theory module produces.
    const CylinderModel model(pct);
    worst = std::max(worst, std::abs(model.law().pi.sum() - 1.0));
    ++vectors;
    std::vector<Word> frontier{Word{}};
    const std::size_t A = pct.alphabet().size();
    for (std::size_t len = 0; len <= h + 1; ++len) {
      std::vector<Word> next;
      double total = 0.0;
      for (const auto& w : frontier) {
        total += model.probability(w);
        if (model.probability(w) > 0.0) {
          worst = std::max(worst, std::abs(model.conditional(w).sum() - 1.0));
          ++vectors;
        }
        for (std::size_t a = 0; a < A; ++a) {
          Word x = w;
          x.push_back(static_cast<Symbol>(a));
          next.push_back(std::move(x));
        }
      }
      worst = std::max(worst, std::abs(total - 1.0));
      ++vectors;
      frontier = std::move(next);
    }
    for (std::size_t k = 1; k <= h; ++k) {
      const auto c = canonical_approximation(pct, k);
      for (const auto& r : c.rows()) {
        worst = std::max(worst, std::abs(r.sum() - 1.0));
        ++vectors;
      }
    }
  }
  const double secs = seconds_since(start);
  verdict(7, "structural identities", truncate_bad == 0 && canonical_bad == 0 && worst <= 1e-12,
          fmt("200 random trees: truncation mismatches %zu, canonical-at-height mismatches %zu, %zu probability "
              "vectors with worst |sum - 1| = %.2e (limit 1e-12); %.1f s",
              truncate_bad, canonical_bad, vectors, worst, secs));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const auto start = Clock::now();
  const auto dir = std::filesystem::temp_directory_path() / "vlmc_acceptance";
  std::filesystem::create_directories(dir);
  const auto config = dir / "experiment.cfg";
  {
    std::ofstream out(config);
    out << "tree = builtin:ref\nn_grid = 1000, 10000\nreplicas = 20\nalgorithm = delta\ntruncate = 2\nseed = 8\n"
           "workers = 2\n[delta]\ndelta = 0.06\nk = 4\n";
  }
  std::vector<std::string> runs;
  for (int run = 0; run < 2; ++run) {
    const auto csv = dir / ("run" + std::to_string(run) + ".csv");
    export_report(run_recovery_experiment(load_experiment_config(config.string())), csv.string());
    runs.push_back(slurp(csv));
  }
  const bool same = runs[0] == runs[1] && !runs[0].empty();
  const auto rows = static_cast<std::size_t>(std::count(runs[0].begin(), runs[0].end(), '\n'));
  verdict(8, "determinism", same,
          fmt("two runs from one config file: %zu bytes, %zu lines, byte-identical: %s; %.1f s", runs[0].size(), rows,
              same ? "yes" : "no", seconds_since(start)));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{counting_oracle,      null_calibration, ell_consistency,
                                                    delta_recovery,       deviation_domination, renewal_example,
                                                    structural_identities, determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      verdict(static_cast<int>(i + 1), "error", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
