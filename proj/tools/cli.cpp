#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "freezetree/builders.hpp"
#include "freezetree/continuum.hpp"
#include "freezetree/enumerate.hpp"
#include "freezetree/metrics.hpp"
#include "freezetree/parallel.hpp"
#include "freezetree/sequences.hpp"
#include "freezetree/verify.hpp"

namespace freezetree::cli {

namespace {

// Streams for CLI-level randomness; the verify suites keep their own.
constexpr std::uint64_t kSequenceStream = 100;
constexpr std::uint64_t kSimulateStream = 101;
constexpr std::uint64_t kContinuumStream = 102;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 7;
  unsigned threads = 1;
  std::string output;
  std::string format;
};

struct SimulateArgs {
  std::size_t n = 1000;
  double alpha = 0.5;
  std::string profile = "power:0.5";
  std::string steps;
  std::string sequence_file;
  std::string builder = "forward";
  std::size_t replicates = 1;
  std::size_t k = 0;
  std::string distance = "graph";
  std::optional<double> gamma;
  std::string distance_output;
};

struct VerifyArgs {
  std::string suite = "regime";
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<std::size_t> n{100000};
  std::size_t replicates = 1000;
  std::size_t height_replicates = 0;
  double height_tolerance = 0.05;
  std::size_t k = 2;
  std::string steps;
  std::string sequence_file;
  std::string u = "A1";
  std::string v = "A2";
  int max_active = 2;
  std::size_t max_steps = 6;
  std::size_t pairs = 1000;
  double significance = 0.01;
};

struct ContinuumArgs {
  std::string profile = "power:0.5";
  std::size_t k = 2;
  std::size_t replicates = 1000;
};

std::uint64_t parse_u64(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " must be a nonnegative integer, got '" + text + "'");
  }
}

// Flag > environment > built-in default.
void apply_environment(Common& common) {
  if (const char* s = std::getenv("FREEZETREE_SEED"); s && *s) common.seed = parse_u64(s, "FREEZETREE_SEED");
  if (const char* t = std::getenv("FREEZETREE_THREADS"); t && *t) {
    const auto v = parse_u64(t, "FREEZETREE_THREADS");
    if (v == 0) throw UsageError("FREEZETREE_THREADS must be at least 1");
    common.threads = static_cast<unsigned>(v);
  }
}

VertexLabel parse_label(const std::string& text) {
  if (text.size() < 2 || (text[0] != 'A' && text[0] != 'F')) {
    throw UsageError("vertex label must look like A<j> or F<i>, got '" + text + "'");
  }
  return {text[0] == 'A' ? VertexKind::Active : VertexKind::Frozen, parse_u64(text.substr(1), "vertex label index")};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

FreezeSequence load_sequence(const std::string& path) {
  const auto text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return sequence_from_json(text);
  return sequence_from_text(text);
}

// --steps, then --sequence, then the profile.
FreezeSequence resolve_sequence(const std::string& steps, const std::string& file, std::size_t n,
                                double alpha, const std::string& profile, std::uint64_t seed) {
  if (!steps.empty()) return sequence_from_text(steps);
  if (!file.empty()) return load_sequence(file);
  Rng rng = make_rng(seed, kSequenceStream);
  return make_sequence(n, {alpha, parse_profile_shape(profile)}, rng);
}

nlohmann::json tree_json(const FrozenTree& t) {
  nlohmann::json j;
  j["n"] = t.n;
  j["root"] = t.root;
  j["stalled"] = t.stalled;
  j["steps_applied"] = t.steps_applied;
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < t.size(); ++v) {
    nlohmann::json e;
    e["id"] = v;
    e["parent"] = t.parent[v] == kNoVertex ? nlohmann::json(nullptr) : nlohmann::json(t.parent[v]);
    e["label"] = to_string(t.label[v]);
    e["edge"] = t.parent[v] == kNoVertex ? nlohmann::json(nullptr) : nlohmann::json(t.edge_label[v]);
    e["birth"] = t.birth[v];
    vs.push_back(std::move(e));
  }
  return j;
}

struct Sink {
  std::ofstream file;
  std::ostream* stream;
  explicit Sink(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw UsageError("cannot open '" + path + "' for writing");
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

void require_format(const std::string& format, std::initializer_list<const char*> allowed, const char* command) {
  for (const char* a : allowed) if (format == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw UsageError(std::string(command) + " supports --format " + list + " (got '" + format + "')");
}

struct TreeSummary {
  std::size_t vertices = 0;
  std::int64_t height = 0;
  bool stalled = false;
  std::vector<double> distances;  // upper triangle of the sampled matrix
  std::vector<VertexId> sampled;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.builder != "forward" && a.builder != "coalescent") {
    throw UsageError("--builder must be forward or coalescent");
  }
  const auto mode = parse_distance_mode(a.distance);
  const double gamma = a.gamma.value_or(1.0 - a.alpha);
  const auto seq = resolve_sequence(a.steps, a.sequence_file, a.n, a.alpha, a.profile, c.seed);
  const Walk w = walk(seq);
  const bool coalescent = a.builder == "coalescent";
  if (!coalescent && mode != DistanceMode::Graph && a.k > 0) {
    throw UsageError("--distance " + a.distance + " needs --builder coalescent");
  }

  auto build_one = [&](std::size_t i, bool keep) {
    Rng rng = make_rng(c.seed, kSimulateStream, i);
    CoalescentBuild built;
    if (coalescent) {
      built = build_coalescent(seq, rng);
    } else {
      built.tree = build_forward(seq, rng);
    }
    TreeSummary s;
    s.vertices = built.tree.size();
    s.height = height(built.tree);
    s.stalled = built.tree.stalled;
    if (a.k > 0) {
      const auto sample = sample_distance_matrix(built.tree, coalescent ? &built.genealogy : nullptr, &w, a.k,
                                                 mode, gamma, rng);
      s.sampled = sample.vertex_ids;
      for (std::size_t x = 0; x < a.k; ++x)
        for (std::size_t y = x + 1; y < a.k; ++y) s.distances.push_back(sample.at(x, y));
    }
    return std::make_pair(s, keep ? std::optional<CoalescentBuild>(std::move(built)) : std::nullopt);
  };

  Sink sink(c.output, out);
  auto& os = *sink;
  os << std::setprecision(17);
  const double h_plus = w.survives() ? h_sums(w, seq, 1, seq.size()).h_plus : 0.0;

  if (a.replicates == 1) {
    require_format(c.format, {"csv", "json", "dot", "newick"}, "simulate");
    auto [summary, built] = build_one(0, true);
    const auto& tree = built->tree;
    if (c.format == "csv") write_tree_csv(os, tree);
    if (c.format == "dot") write_dot(os, tree);
    if (c.format == "newick") write_newick(os, tree);
    if (c.format == "json") {
      nlohmann::json j;
      j["sequence"] = nlohmann::json::parse(to_json(seq));
      j["builder"] = a.builder;
      j["seed"] = c.seed;
      j["tree"] = tree_json(tree);
      j["summary"] = {{"vertices", summary.vertices}, {"height", summary.height}, {"S_n", w.values.back()},
                      {"h_plus", h_plus}};
      if (a.k > 0) {
        j["distances"] = nlohmann::json::parse(
            to_json(distance_matrix(tree, coalescent ? &built->genealogy : nullptr, &w, summary.sampled, mode, gamma)));
      }
      os << j.dump() << '\n';
    }
    if (a.k > 0 && !a.distance_output.empty()) {
      Sink dsink(a.distance_output, out);
      write_distance_csv(*dsink, distance_matrix(tree, coalescent ? &built->genealogy : nullptr, &w,
                                                 summary.sampled, mode, gamma));
    }
    err << "vertices=" << summary.vertices << " height=" << summary.height << " S_n=" << w.values.back()
        << " h_plus=" << h_plus << (summary.stalled ? " stalled" : "") << '\n';
    return kOk;
  }

  require_format(c.format, {"csv", "json"}, "simulate with --replicates > 1");
  const auto results = run_indexed(a.replicates, c.threads, [&](std::size_t i) { return build_one(i, false).first; });
  if (c.format == "csv") {
    os << "# freezetree replicates v1 n=" << seq.size() << " builder=" << a.builder << " seed=" << c.seed
       << " distance=" << to_string(mode) << " normalization=" << gamma << "\n";
    os << "replicate,vertices,height,stalled";
    for (std::size_t x = 0; x < a.k; ++x)
      for (std::size_t y = x + 1; y < a.k; ++y) os << ",d_" << x << '_' << y;
    os << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& s = results[i];
      os << i << ',' << s.vertices << ',' << s.height << ',' << (s.stalled ? 1 : 0);
      for (double d : s.distances) os << ',' << d;
      os << '\n';
    }
  } else {
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& s = results[i];
      nlohmann::json j{{"replicate", i}, {"vertices", s.vertices}, {"height", s.height}, {"stalled", s.stalled},
                       {"distances", s.distances}};
      os << j.dump() << '\n';
    }
  }
  double mean_height = 0.0;
  for (const auto& s : results) mean_height += static_cast<double>(s.height);
  mean_height /= static_cast<double>(results.size());
  err << "replicates=" << results.size() << " mean_height=" << mean_height << " h_plus=" << h_plus << '\n';
  return kOk;
}

int cmd_verify(const Common& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  require_format(c.format, {"json", "csv"}, "verify");
  VerifyOptions opts;
  opts.seed = c.seed;
  opts.threads = c.threads;
  opts.significance = a.significance;

  std::vector<TestReport> reports;
  const auto sequence = [&] {
    if (a.steps.empty() && a.sequence_file.empty()) {
      throw UsageError("suite '" + a.suite + "' needs --steps or --sequence");
    }
    return resolve_sequence(a.steps, a.sequence_file, 0, 0.5, "iid", c.seed);
  };
  if (a.suite == "regime") {
    RegimeConfig config;
    config.alpha = a.alpha;
    config.beta = a.beta;
    config.n_list = a.n;
    config.k = a.k;
    config.replicates = a.replicates;
    config.height_replicates = a.height_replicates;
    config.height_tolerance = a.height_tolerance;
    reports = regime_suite(config, opts);
  } else if (a.suite == "birth") {
    reports.push_back(check_birth_law(sequence(), a.replicates, opts));
  } else if (a.suite == "coal") {
    reports.push_back(check_coal_density(sequence(), parse_label(a.u), parse_label(a.v), a.replicates, opts));
  } else if (a.suite == "bounded") {
    for (auto n : a.n) reports.push_back(check_bounded_regime(a.max_active, n, a.replicates, opts));
  } else if (a.suite == "crt") {
    for (auto n : a.n) reports.push_back(check_crt_identity(n, a.replicates, opts));
  } else if (a.suite == "exact") {
    if (a.max_steps > kEnumerationMaxSteps) {
      throw UsageError("--max-steps is limited to " + std::to_string(kEnumerationMaxSteps));
    }
    reports.push_back(check_exact_law_equality(a.max_steps));
  } else if (a.suite == "distance") {
    reports.push_back(check_distance_equivalence(a.beta, a.n, a.replicates, a.pairs, opts));
  } else {
    throw UsageError("unknown suite '" + a.suite + "'");
  }

  Sink sink(c.output, out);
  auto& os = *sink;
  if (c.format == "json") {
    for (const auto& r : reports) os << to_json_line(r) << '\n';
  } else {
    os << "# freezetree reports v1 seed=" << c.seed << "\n";
    os << "name,pass,statistic_name,statistic,threshold,p_value,detail\n";
    os << std::setprecision(17);
    for (const auto& r : reports) {
      os << '"' << r.name << "\"," << (r.pass ? 1 : 0) << ',' << r.statistic_name << ',' << r.statistic << ','
         << r.threshold << ',' << r.p_value << ",\"" << r.detail << "\"\n";
    }
  }
  write_summary_table(err, reports);
  return all_passed(reports) ? kOk : kTestFailure;
}

int cmd_enumerate(const Common& c, const std::string& steps, std::ostream& out, std::ostream& err) {
  require_format(c.format, {"csv", "json"}, "enumerate");
  const auto seq = sequence_from_text(steps);
  if (seq.size() > kEnumerationMaxSteps) {
    throw UsageError("enumeration is limited to " + std::to_string(kEnumerationMaxSteps) + " steps");
  }
  const auto fwd = enumerate_forward(seq);
  const auto coal = enumerate_coalescent(seq);
  const auto tv = total_variation(fwd, coal);

  std::map<std::string, std::pair<Rational, Rational>> rows;
  for (const auto& [key, p] : fwd.probabilities) rows[key].first = p;
  for (const auto& [key, p] : coal.probabilities) rows[key].second = p;

  Sink sink(c.output, out);
  auto& os = *sink;
  if (c.format == "csv") {
    os << "# freezetree enumeration v1 steps=" << to_text(seq) << " tv=" << tv.str() << "\n";
    os << "tree,forward,coalescent\n";
    for (const auto& [key, pq] : rows) os << '"' << key << "\"," << pq.first.str() << ',' << pq.second.str() << '\n';
  } else {
    nlohmann::json j;
    j["steps"] = to_text(seq);
    j["total_variation"] = tv.str();
    auto& arr = j["outcomes"] = nlohmann::json::array();
    for (const auto& [key, pq] : rows) arr.push_back({{"tree", key}, {"forward", pq.first.str()}, {"coalescent", pq.second.str()}});
    os << j.dump() << '\n';
  }
  err << rows.size() << " outcomes, total variation " << tv.str() << '\n';
  return tv == 0 ? kOk : kTestFailure;
}

FunctionTable continuum_table(const std::string& profile) {
  const auto shape = parse_profile_shape(profile);
  if (const auto* p = std::get_if<PowerShape>(&shape)) return FunctionTable::power(p->beta);
  if (const auto* cs = std::get_if<CustomShape>(&shape)) return FunctionTable::from_samples(cs->values);
  throw UsageError("continuum needs a power:<beta> or custom:<values> profile");
}

int cmd_continuum(const Common& c, const ContinuumArgs& a, std::ostream& out, std::ostream& err) {
  require_format(c.format, {"csv", "json"}, "continuum");
  const auto table = continuum_table(a.profile);
  struct Rep {
    CoalescentRealization real;
    std::vector<double> matrix;
  };
  const auto reps = run_indexed(a.replicates, c.threads, [&](std::size_t i) {
    Rng rng = make_rng(c.seed, kContinuumStream, i);
    Rep r;
    r.real = sample_coalescent(table, a.k, rng);
    r.matrix = limit_distance_matrix(r.real, table);
    return r;
  });

  Sink sink(c.output, out);
  auto& os = *sink;
  os << std::setprecision(17);
  if (c.format == "csv") {
    os << "# freezetree continuum v1 f=" << table.name() << " k=" << a.k << " seed=" << c.seed << "\n";
    os << "replicate,surviving_clusters";
    for (std::size_t x = 0; x < a.k; ++x) os << ",birth_" << x;
    for (std::size_t x = 0; x < a.k; ++x)
      for (std::size_t y = x + 1; y < a.k; ++y) os << ",d_" << x << '_' << y;
    os << '\n';
    for (std::size_t i = 0; i < reps.size(); ++i) {
      os << i << ',' << reps[i].real.surviving_clusters;
      for (double b : reps[i].real.births) os << ',' << b;
      for (std::size_t x = 0; x < a.k; ++x)
        for (std::size_t y = x + 1; y < a.k; ++y) os << ',' << reps[i].matrix[x * a.k + y];
      os << '\n';
    }
  } else {
    for (const auto& r : reps) {
      auto j = nlohmann::json::parse(to_json(r.real));
      j["distances"] = r.matrix;
      os << j.dump() << '\n';
    }
  }
  std::vector<CoalescentRealization> batch;
  batch.reserve(reps.size());
  for (const auto& r : reps) batch.push_back(r.real);
  const auto stats = root_degree_stat(batch);
  err << "f=" << table.name() << " clusters at 0: mean " << stats.mean() << ", P(>=2) "
      << stats.fraction_at_least(2) << (table.inv_f2_finite_at_zero() ? "" : " (integral of 1/f^2 diverges at 0)")
      << '\n';
  return kOk;
}

int cmd_export(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  require_format(c.format, {"json", "csv", "dot", "newick"}, "export");
  const auto seq = resolve_sequence(a.steps, a.sequence_file, a.n, a.alpha, a.profile, c.seed);
  Sink sink(c.output, out);
  auto& os = *sink;
  if (c.format == "json") {
    os << to_json(seq) << '\n';
  } else if (c.format == "csv") {
    const Walk w = walk(seq);
    os << "# freezetree sequence v1 n=" << seq.size() << "\n";
    os << "k,step,S\n";
    os << "0,," << w.values[0] << '\n';
    for (std::size_t k = 1; k <= seq.size(); ++k) os << k << ',' << seq.step(k) << ',' << w.values[k] << '\n';
  } else {
    Rng rng = make_rng(c.seed, kSimulateStream, 0);
    const auto tree = a.builder == "coalescent" ? build_coalescent(seq, rng).tree : build_forward(seq, rng);
    if (c.format == "dot") write_dot(os, tree);
    else write_newick(os, tree);
  }
  err << "n=" << seq.size() << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--seed", c.seed, "Base seed (env FREEZETREE_SEED)")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (env FREEZETREE_THREADS)")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  sub->add_option("-o,--output", c.output, "Output file (default: stdout)");
  sub->add_option("--format", c.format, "csv, json, dot or newick")
      ->check(CLI::IsMember({"csv", "json", "dot", "newick"}))
      ->capture_default_str();
}

void add_sequence_options(CLI::App* sub, SimulateArgs& s) {
  sub->add_option("--n", s.n, "Number of steps")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--alpha", s.alpha, "Regime exponent: S ~ n^alpha f(k/n)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--profile", s.profile,
                  "power:<beta>, excursion, iid, all_plus, bounded:<M> or custom:<v0,v1,...|file>")
      ->capture_default_str();
  sub->add_option("--steps", s.steps, "Explicit sequence such as +-++-");
  sub->add_option("--sequence", s.sequence_file, "Sequence file (JSON or +/- text)");
  sub->add_option("--builder", s.builder, "forward or coalescent")
      ->check(CLI::IsMember({"forward", "coalescent"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random trees grown from a freezing +1/-1 sequence", "freezetree"};
  app.require_subcommand(1);

  Common common;
  common.threads = default_threads();
  SimulateArgs sim;
  SimulateArgs exp_args;
  VerifyArgs ver;
  ContinuumArgs con;
  std::string enum_steps;
  Common c_sim, c_ver, c_enum, c_con, c_exp;

  try {
    apply_environment(common);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  for (Common* c : {&c_sim, &c_ver, &c_enum, &c_con, &c_exp}) *c = common;

  auto* simulate = app.add_subcommand("simulate", "Build trees from a profile and report heights and distances");
  add_common(simulate, c_sim, "csv");
  add_sequence_options(simulate, sim);
  simulate->add_option("--replicates", sim.replicates, "Independent trees on the same sequence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--k", sim.k, "Sampled vertices for the distance matrix (0: none)")->capture_default_str();
  simulate->add_option("--distance", sim.distance, "graph, coalescent or delta")
      ->check(CLI::IsMember({"graph", "coalescent", "dc", "delta"}))
      ->capture_default_str();
  simulate->add_option("--gamma", sim.gamma, "Distance normalization exponent (default 1 - alpha)");
  simulate->add_option("--distance-output", sim.distance_output, "Write the sampled distance matrix here (CSV)");

  auto* verify = app.add_subcommand("verify", "Run a statistical verification suite");
  add_common(verify, c_ver, "json");
  verify->add_option("--suite", ver.suite, "regime, birth, coal, bounded, crt, exact or distance")
      ->check(CLI::IsMember({"regime", "birth", "coal", "bounded", "crt", "exact", "distance"}))
      ->capture_default_str();
  verify->add_option("--alpha", ver.alpha, "Regime exponent")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  verify->add_option("--beta", ver.beta, "Power profile exponent")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  verify->add_option("--n", ver.n, "Sizes; repeat the flag or separate with commas")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  verify->add_option("--replicates", ver.replicates, "Replicates (samples for birth/coal)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--height-replicates", ver.height_replicates, "Replicates in the height mean (0: all)");
  verify->add_option("--height-tolerance", ver.height_tolerance, "Relative tolerance of the height mean")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--k", ver.k, "Sampled vertices per tree")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  verify->add_option("--steps", ver.steps, "Sequence for birth/coal suites, e.g. +-++-");
  verify->add_option("--sequence", ver.sequence_file, "Sequence file for birth/coal suites");
  verify->add_option("--u", ver.u, "First vertex for the coal suite (A<j> or F<i>)")->capture_default_str();
  verify->add_option("--v", ver.v, "Second vertex for the coal suite")->capture_default_str();
  verify->add_option("--max-active", ver.max_active, "Bound M for the bounded suite")
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  verify->add_option("--max-steps", ver.max_steps, "Longest sequence for the exact suite")
      ->check(CLI::Range(std::size_t{1}, kEnumerationMaxSteps))
      ->capture_default_str();
  verify->add_option("--pairs", ver.pairs, "Random pairs per tree for the distance suite")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--significance", ver.significance, "Test level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* enumerate = app.add_subcommand("enumerate", "Exact laws of both constructions for a short sequence");
  add_common(enumerate, c_enum, "csv");
  enumerate->add_option("--steps", enum_steps, "Sequence, at most 8 steps, e.g. +-++-")->required();

  auto* continuum = app.add_subcommand("continuum", "Sample the continuum coalescent and its distance matrix");
  add_common(continuum, c_con, "csv");
  continuum->add_option("--profile", con.profile, "power:<beta> or custom:<v0,v1,...|file>")->capture_default_str();
  continuum->add_option("--beta", [&](const std::vector<std::string>& v) {
        con.profile = "power:" + v.front();
        return true;
      }, "Shortcut for --profile power:<beta>");
  continuum->add_option("--k", con.k, "Particles")->check(CLI::PositiveNumber)->capture_default_str();
  continuum->add_option("--replicates", con.replicates, "Realizations")->check(CLI::PositiveNumber)->capture_default_str();

  auto* exporter = app.add_subcommand("export", "Write a sequence (json/csv) or one tree (dot/newick)");
  add_common(exporter, c_exp, "json");
  add_sequence_options(exporter, exp_args);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) err << "run with " << app.get_subcommands().front()->get_name() << " --help for usage\n";
    return kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(c_sim, sim, out, err);
    if (verify->parsed()) return cmd_verify(c_ver, ver, out, err);
    if (enumerate->parsed()) return cmd_enumerate(c_enum, enum_steps, out, err);
    if (continuum->parsed()) return cmd_continuum(c_con, con, out, err);
    if (exporter->parsed()) return cmd_export(c_exp, exp_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace freezetree::cli
