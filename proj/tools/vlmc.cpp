// Command-line front end. Exit codes: 0 success, 1 precondition error,
// 2 I/O error.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vlmc/counts.hpp"
#include "vlmc/error.hpp"
#include "vlmc/estimators.hpp"
#include "vlmc/harness.hpp"
#include "vlmc/io.hpp"
#include "vlmc/sampler.hpp"
#include "vlmc/theory.hpp"

using namespace vlmc;

namespace {

std::string num(double v) {
  // shortest string that reads back to the same double
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<Alphabet> alphabet_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<std::string> labels;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) labels.push_back(item);
  return Alphabet(std::move(labels));
}

std::string join_words(const Alphabet& A, const std::vector<Word>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += A.format(w);
  }
  return out.empty() ? "-" : out;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string tree, out;
  std::size_t length = 0;
  std::uint64_t seed = 0;
};

int simulate(const SimulateArgs& a) {
  const auto pct = resolve_tree_source(a.tree);
  save_sample(a.out, sample_path(pct, a.length, a.seed));
  return 0;
}

struct EstimateArgs {
  std::string algo = "context", sample, tree_out, alphabet;
  double c1 = 1.0, c2_count = 1.0, c2_prune = 1.0, delta = 0.1;
  std::size_t k = 1;
};

int estimate(const EstimateArgs& a) {
  const auto algo = parse_algorithm(a.algo);
  if (!algo) throw PreconditionError("unknown algorithm '" + a.algo + "'");
  const SymbolSequence sample = load_sample(a.sample, alphabet_option(a.alphabet));
  EstimatedTree est;
  if (*algo == Algorithm::kDelta) {
    est = estimate_tree_delta(sample, DeltaConfig{a.delta, a.k});
  } else {
    ContextConfig cfg{a.c1, a.c2_count, a.c2_prune,
                      *algo == Algorithm::kContext ? DepthMode::kRandom : DepthMode::kDeterministic};
    est = empirical_tree_rissanen(sample, cfg);
  }
  if (est.contexts.empty()) {
    std::ofstream out(a.tree_out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(a.tree_out, "cannot open for writing");
    out << "# " << est.provenance << "\n# empty tree: no context selected\nalphabet";
    for (const auto& l : sample.alphabet.labels()) out << ' ' << l;
    out << '\n';
    if (!out.flush()) throw IoError(a.tree_out, "write failed");
    return 0;
  }
  std::size_t depth = 0;
  for (const auto& w : est.contexts) depth = std::max(depth, w.size());
  const CountTrie trie = build_counts(sample, std::min(sample.size(), depth + 1));
  std::vector<Eigen::VectorXd> rows;
  for (const auto& w : est.contexts) {
    const auto p = p_hat_row(trie, w);
    rows.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
  }
  const ProbabilisticContextTree pct(sample.alphabet, est.tree(), std::move(rows));
  std::ofstream out(a.tree_out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(a.tree_out, "cannot open for writing");
  out << "# " << est.provenance << '\n';
  write_tree(out, pct);
  if (!out.flush()) throw IoError(a.tree_out, "write failed");
  return 0;
}

struct InspectArgs {
  std::string tree, sample, alphabet;
  std::size_t depth = 0;
};

int inspect(const InspectArgs& a) {
  if (a.tree.empty() == a.sample.empty()) throw PreconditionError("give exactly one of --tree or --sample");
  if (!a.sample.empty()) {
    const auto seq = load_sample(a.sample, alphabet_option(a.alphabet));
    std::vector<std::size_t> freq(seq.alphabet.size(), 0);
    for (Symbol s : seq.symbols) ++freq[s];
    std::cout << "length " << seq.size() << "\nalphabet_size " << seq.alphabet.size() << '\n';
    for (std::size_t s = 0; s < freq.size(); ++s)
      std::cout << "count " << seq.alphabet.label(static_cast<Symbol>(s)) << ' ' << freq[s] << '\n';
    return 0;
  }
  const auto pct = resolve_tree_source(a.tree);
  const Alphabet& A = pct.alphabet();
  std::cout << "alphabet_size " << A.size() << '\n';
  if (pct.family()) {
    std::cout << "family renewal\nrecurrent " << (check_renewal_recurrence(*pct.family()) ? "yes" : "no") << '\n';
  } else {
    std::cout << "contexts " << pct.tree().size() << "\nheight " << pct.tree().height() << '\n';
  }
  std::optional<std::size_t> depth;
  if (a.depth > 0) depth = a.depth;
  const ValidationReport report = validate_tree(pct, depth);
  for (const auto& v : report.suffix)
    std::cout << "suffix_violation " << A.format(v.shorter) << ' ' << A.format(v.longer) << '\n';
  for (const auto& v : report.rows) std::cout << "row_violation " << A.format(v.context) << ' ' << v.reason << '\n';
  std::cout << "valid " << (report.valid() ? "yes" : "no") << '\n';
  if (!report.valid()) return 1;
  if (!pct.family() || check_renewal_recurrence(*pct.family())) {
    const CylinderModel model(pct);
    for (std::size_t s = 0; s < A.size(); ++s) {
      const Word w{static_cast<Symbol>(s)};
      std::cout << "marginal " << A.label(static_cast<Symbol>(s)) << ' ' << num(model.probability(w)) << '\n';
    }
  }
  return 0;
}

struct TheoryArgs {
  std::string tree, quantity, w, out;
  std::size_t m = 1, k = 1, K = 1, n_max = 0;
  double n = 0.0, t = 0.0, delta = 0.0;
  bool all_strings = false;
};

int theory(const TheoryArgs& a) {
  const auto pct = resolve_tree_source(a.tree);
  const std::string& q = a.quantity;
  std::ostringstream rec;
  rec << "quantity=" << q;
  if (q == "dm") {
    rec << " m=" << a.m << " value=" << num(d_m(pct, a.m));
  } else if (q == "eps") {
    const auto range = a.all_strings ? EpsilonRange::kAllStrings : EpsilonRange::kContextsAndStubs;
    rec << " m=" << a.m << " range=" << (a.all_strings ? "all" : "contexts") << " value=" << num(epsilon_m(pct, a.m, range));
  } else if (q == "alpha") {
    const AlphaStats s = alpha_stats(pct, a.n_max);
    rec << " n_max=" << a.n_max << " alpha0=" << num(s.alpha0) << " alpha=" << num(s.alpha)
        << " mixing_bound=" << num(s.mixing_bound());
    for (std::size_t i = 0; i < s.alpha_n.size(); ++i) rec << " alpha_" << i + 1 << '=' << num(s.alpha_n[i]);
  } else if (q == "beta") {
    rec << " k=" << a.k << " value=" << num(beta_k(pct, a.k));
  } else if (q == "canonical") {
    const auto approx = canonical_approximation(pct, a.k);
    if (a.out.empty()) {
      write_tree(std::cout, approx);
    } else {
      save_tree(a.out, approx);
    }
    return 0;
  } else if (q == "deviation-bound") {
    const Word w = pct.alphabet().parse(a.w);
    if (w.empty()) throw PreconditionError("--w must name a non-empty string");
    const AlphaStats s = alpha_stats(pct, w.size());
    DeviationInputs in{a.n, w.size(), a.t, cylinder_probability(pct, w), pct.alphabet().size(), s.alpha0, s.alpha};
    rec << " n=" << num(a.n) << " w=" << a.w << " t=" << num(a.t) << " p_w=" << num(in.p_w)
        << " value=" << num(deviation_bound(in));
  } else if (q == "recovery-bound") {
    const BoundInputs in = make_bound_inputs(pct, a.n, a.k, a.K, a.delta);
    const double value = recovery_bound(in);
    rec << " n=" << num(a.n) << " k=" << a.k << " K=" << a.K << " delta=" << num(a.delta) << " d_k=" << num(in.d_k)
        << " eps_k=" << num(in.eps_k) << " value=" << num(value);
  } else if (q == "min-k") {
    rec << " K=" << a.K << " value=" << min_k_condition(pct, a.K);
  } else {
    throw PreconditionError("unknown quantity '" + q + "'");
  }
  std::cout << rec.str() << '\n';
  return 0;
}

struct ExperimentArgs {
  std::string config, out;
  std::size_t workers = 0;
};

int experiment(const ExperimentArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.workers > 0) cfg.workers = a.workers;
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(a.out, "cannot open for writing");
  const ExperimentReport report = run_recovery_experiment(cfg, &out);
  if (!out.flush()) throw IoError(a.out, "write failed");
  for (const auto& row : report.rows)
    if (row.recovered < 0) std::cerr << "replica n=" << row.n << " r=" << row.replica << " failed: " << row.error << '\n';
  for (const auto& s : report.summary) {
    std::printf("n=%zu completed=%zu failed=%zu recovery=%.4f se=%.4f ell_mismatch=%.4f se=%.4f\n", s.n, s.completed,
                s.failed, s.recovery, s.recovery_se, s.ell_mismatch, s.ell_mismatch_se);
  }
  return 0;
}

struct CompareArgs {
  std::string a, b;
  std::size_t truncate = 0;
};

int compare(const CompareArgs& c) {
  const auto ta = resolve_tree_source(c.a);
  const auto tb = resolve_tree_source(c.b);
  if (!(ta.alphabet() == tb.alphabet())) throw PreconditionError("trees use different alphabets");
  std::optional<std::size_t> K;
  if (c.truncate > 0) K = c.truncate;
  auto materialize = [&](const ProbabilisticContextTree& p) {
    if (!p.family()) return p.tree();
    const std::size_t depth = (K ? *K : 1) + 1;
    return renewal_tree(*p.family(), depth).tree();
  };
  if ((ta.family() || tb.family()) && !K) throw PreconditionError("renewal trees can only be compared with --truncate");
  const TreeDiff diff = compare_trees(materialize(ta), materialize(tb), K);
  std::cout << "equal " << (diff.equal ? "yes" : "no") << '\n';
  std::cout << "missing " << join_words(ta.alphabet(), diff.missing) << '\n';
  std::cout << "extra " << join_words(ta.alphabet(), diff.extra) << '\n';
  return 0;
}

struct IngestArgs {
  std::string input, mode = "chars", out, mapping;
};

int ingest(const IngestArgs& a) {
  const auto mode = parse_ingest_mode(a.mode);
  if (!mode) throw PreconditionError("unknown ingest mode '" + a.mode + "'");
  const SymbolSequence seq = ingest_text(a.input, *mode);
  save_sample(a.out, seq);
  std::ostream* map_out = &std::cout;
  std::ofstream file;
  if (!a.mapping.empty()) {
    file.open(a.mapping, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError(a.mapping, "cannot open for writing");
    map_out = &file;
  }
  for (std::size_t s = 0; s < seq.alphabet.size(); ++s)
    *map_out << s << ' ' << seq.alphabet.label(static_cast<Symbol>(s)) << '\n';
  if (!map_out->flush()) throw IoError(a.mapping, "write failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-length Markov chains: simulate, estimate, evaluate bounds"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sc_sim = app.add_subcommand("simulate", "Sample a stationary path from a tree");
  sc_sim->add_option("--tree", sim.tree)->required();
  sc_sim->add_option("--length", sim.length)->required();
  sc_sim->add_option("--seed", sim.seed)->required();
  sc_sim->add_option("--out", sim.out)->required();

  EstimateArgs est;
  auto* sc_est = app.add_subcommand("estimate", "Estimate a context tree from a sample");
  sc_est->add_option("--algo", est.algo)->check(CLI::IsMember({"context", "context-fixed", "delta"}));
  sc_est->add_option("--sample", est.sample)->required();
  sc_est->add_option("--tree-out", est.tree_out)->required();
  sc_est->add_option("--alphabet", est.alphabet, "comma-separated labels (default: sorted distinct symbols)");
  sc_est->add_option("--c1", est.c1);
  sc_est->add_option("--c2-count", est.c2_count);
  sc_est->add_option("--c2-prune", est.c2_prune);
  sc_est->add_option("--delta", est.delta);
  sc_est->add_option("--k", est.k);

  InspectArgs ins;
  auto* sc_ins = app.add_subcommand("inspect", "Validate and summarize a tree or a sample");
  sc_ins->add_option("--tree", ins.tree);
  sc_ins->add_option("--sample", ins.sample);
  sc_ins->add_option("--alphabet", ins.alphabet);
  sc_ins->add_option("--depth", ins.depth, "materialization depth for renewal trees");

  TheoryArgs th;
  auto* sc_th = app.add_subcommand("theory", "Evaluate a theoretical quantity or bound");
  sc_th->add_option("--tree", th.tree)->required();
  sc_th->add_option("--quantity", th.quantity)
      ->required()
      ->check(CLI::IsMember(
          {"dm", "eps", "alpha", "beta", "canonical", "deviation-bound", "recovery-bound", "min-k"}));
  sc_th->add_option("--m", th.m);
  sc_th->add_option("--k", th.k);
  sc_th->add_option("--K", th.K);
  sc_th->add_option("--n", th.n);
  sc_th->add_option("--n-max", th.n_max);
  sc_th->add_option("--t", th.t);
  sc_th->add_option("--delta", th.delta);
  sc_th->add_option("--w", th.w);
  sc_th->add_option("--out", th.out);
  sc_th->add_flag("--all-strings", th.all_strings);

  ExperimentArgs ex;
  auto* sc_ex = app.add_subcommand("experiment", "Run a Monte Carlo recovery experiment");
  sc_ex->add_option("--config", ex.config)->required();
  sc_ex->add_option("--out", ex.out)->required();
  sc_ex->add_option("--workers", ex.workers);

  CompareArgs cmp;
  auto* sc_cmp = app.add_subcommand("compare", "Compare two context trees");
  sc_cmp->add_option("--tree-a", cmp.a)->required();
  sc_cmp->add_option("--tree-b", cmp.b)->required();
  sc_cmp->add_option("--truncate", cmp.truncate);

  IngestArgs ing;
  auto* sc_ing = app.add_subcommand("ingest", "Convert raw text into a sample file");
  sc_ing->add_option("--input", ing.input)->required();
  sc_ing->add_option("--mode", ing.mode)->check(CLI::IsMember({"bytes", "chars", "token-list"}));
  sc_ing->add_option("--out", ing.out)->required();
  sc_ing->add_option("--mapping", ing.mapping, "where to write 'index label' lines (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*sc_sim) return simulate(sim);
    if (*sc_est) return estimate(est);
    if (*sc_ins) return inspect(ins);
    if (*sc_th) return theory(th);
    if (*sc_ex) return experiment(ex);
    if (*sc_cmp) return compare(cmp);
    if (*sc_ing) return ingest(ing);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
