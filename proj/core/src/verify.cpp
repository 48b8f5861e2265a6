#include "freezetree/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "freezetree/continuum.hpp"
#include "freezetree/enumerate.hpp"
#include "freezetree/metrics.hpp"
#include "freezetree/parallel.hpp"
#include "freezetree/stats.hpp"

namespace freezetree {

namespace {

// Stream ids keep the random sources of different checks apart.
enum Stream : std::uint64_t {
  kBirthLaw = 1,
  kCoalDensity = 2,
  kRegimeTrees = 3,
  kRegimeTarget = 4,
  kBounded = 5,
  kCrtTrees = 6,
  kCrtWalks = 7,
  kDistance = 8,
};

double choose2(std::int64_t s) { return 0.5 * static_cast<double>(s) * static_cast<double>(s - 1); }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

TestReport ks_report(std::string name, std::vector<double> sample, std::vector<double> target, double level,
                     std::uint64_t seed) {
  TestReport r;
  r.name = std::move(name);
  r.sample_sizes = {sample.size(), target.size()};
  const auto ks = ks_two_sample(std::move(sample), std::move(target));
  r.statistic_name = "ks_D";
  r.statistic = ks.statistic;
  r.p_value = ks.p_value;
  r.threshold = level;
  r.pass = ks.p_value > level;
  r.seed = seed;
  r.detail = "p=" + fmt(ks.p_value) + " level=" + fmt(level);
  return r;
}

}  // namespace

std::string to_json_line(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["statistic_name"] = r.statistic_name;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["p_value"] = std::isnan(r.p_value) ? nlohmann::json(nullptr) : nlohmann::json(r.p_value);
  j["pass"] = r.pass;
  j["sample_sizes"] = r.sample_sizes;
  j["seed"] = r.seed;
  j["detail"] = r.detail;
  return j.dump();
}

void write_summary_table(std::ostream& out, std::span<const TestReport> reports) {
  std::size_t width = 4;
  for (const auto& r : reports) width = std::max(width, r.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "test" << "  result  "
      << std::setw(12) << "statistic" << "  " << std::setw(12) << "threshold" << "  detail\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.pass ? "PASS  " : "FAIL  ")
        << "  " << std::setw(12) << fmt(r.statistic) << "  " << std::setw(12) << fmt(r.threshold) << "  "
        << r.detail << "\n";
  }
}

bool all_passed(std::span<const TestReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
}

double birth_law_cdf(const Walk& w, std::size_t m) {
  const std::size_t n = w.n();
  if (m < 1 || m > n) throw std::out_of_range("birth law is defined for 1 <= m <= n");
  return static_cast<double>(static_cast<std::int64_t>(m) + 1 - w.values[m]) /
         static_cast<double>(static_cast<std::int64_t>(n) + 1 + w.values[n]);
}

std::vector<double> coal_time_law(const FreezeSequence& seq, std::size_t min_birth) {
  const Walk w = walk(seq);
  if (min_birth < 1 || min_birth > seq.size()) throw std::out_of_range("min_birth must lie in [1, n]");
  std::vector<double> law(min_birth, 0.0);
  // Survival factor prod_{i=c+2}^{min_birth} over plus steps, built from the top.
  double survive = 1.0;
  for (std::size_t c = min_birth; c-- > 0;) {
    if (seq.is_plus(c + 1)) {
      const double merge = 1.0 / choose2(w.values[c + 1]);
      law[c] = merge * survive;
      survive *= 1.0 - merge;
    }
  }
  return law;
}

VertexId coalescent_vertex_id(const FreezeSequence& seq, const VertexLabel& label) {
  const Walk w = walk(seq);
  const auto s_n = static_cast<std::size_t>(w.values[seq.size()]);
  if (label.kind == VertexKind::Active) {
    if (label.index < 1 || label.index > s_n) throw std::out_of_range("active index out of range");
    return static_cast<VertexId>(label.index - 1);
  }
  if (label.index < 1 || label.index > seq.size() || seq.is_plus(label.index)) {
    throw std::out_of_range("frozen label must be a minus step");
  }
  std::size_t later = 0;
  for (std::size_t i = label.index + 1; i <= seq.size(); ++i) later += seq.is_plus(i) ? 0 : 1;
  return static_cast<VertexId>(s_n + later);
}

TestReport check_exact_law_equality(std::size_t max_n) {
  TestReport r;
  r.name = "exact_law_equality";
  r.statistic_name = "max_tv";
  r.threshold = 0.0;
  std::size_t checked = 0;
  Rational worst = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<std::int8_t> steps(n);
      for (std::size_t i = 0; i < n; ++i) steps[i] = (mask >> i) & 1U ? 1 : -1;
      FreezeSequence seq(std::move(steps));
      if (!walk(seq).survives()) continue;
      const auto tv = total_variation(enumerate_forward(seq), enumerate_coalescent(seq));
      worst = std::max(worst, tv);
      ++checked;
    }
  }
  r.statistic = static_cast<double>(worst);
  r.pass = worst == 0;
  r.sample_sizes = {checked};
  r.detail = std::to_string(checked) + " sequences, max TV = " + worst.str();
  return r;
}

TestReport check_birth_law(const FreezeSequence& seq, std::size_t samples, const VerifyOptions& options) {
  const Walk w = walk(seq);
  if (!w.survives()) throw std::domain_error("birth law check needs S_k >= 1 on [1, n]");
  const std::size_t n = seq.size();
  // One coalescent build and one uniform vertex per sample.
  const auto births = run_indexed(samples, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kBirthLaw, i);
    const auto built = build_coalescent(seq, rng);
    const auto v = uniform_index(rng, built.tree.size());
    return built.tree.birth[v];
  });
  std::vector<double> counts(n + 1, 0.0);
  for (auto b : births) counts[b] += 1.0;

  TestReport r;
  r.name = "birth_law";
  r.statistic_name = "max_z";
  r.threshold = 3.0;
  r.seed = options.seed;
  r.sample_sizes = {samples};
  double worst = 0.0;
  bool exact_ok = true;
  double below = 0.0;  // empirical count with b < m
  for (std::size_t m = 1; m <= n; ++m) {
    below += counts[m - 1];
    const double emp = below / static_cast<double>(samples);
    const double p = birth_law_cdf(w, m);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    if (se == 0.0) {
      exact_ok = exact_ok && emp == p;
      continue;
    }
    worst = std::max(worst, std::abs(emp - p) / se);
  }
  // At m = n the formula is the frozen fraction of the vertex count.
  const double frozen = static_cast<double>((static_cast<std::int64_t>(n) + 1 - w.values[n]) / 2);
  const double vertices = static_cast<double>((static_cast<std::int64_t>(n) + 1 + w.values[n]) / 2);
  const bool endpoint_ok = std::abs(birth_law_cdf(w, n) - frozen / vertices) < 1e-12;
  r.statistic = worst;
  r.pass = exact_ok && endpoint_ok && worst <= r.threshold;
  r.detail = "n=" + std::to_string(n) + (exact_ok ? "" : " degenerate-point mismatch") +
             (endpoint_ok ? "" : " endpoint mismatch");
  return r;
}

TestReport check_coal_density(const FreezeSequence& seq, const VertexLabel& u, const VertexLabel& v,
                              std::size_t samples, const VerifyOptions& options) {
  const std::size_t n = seq.size();
  const VertexId iu = coalescent_vertex_id(seq, u);
  const VertexId iv = coalescent_vertex_id(seq, v);
  if (iu == iv) throw std::invalid_argument("coalescence law needs two distinct vertices");
  const std::size_t min_birth = std::min(birth_of(u, n), birth_of(v, n));
  const auto law = coal_time_law(seq, min_birth);

  const auto coal = run_indexed(samples, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kCoalDensity, i);
    const auto built = build_coalescent(seq, rng);
    return coal_time(built.genealogy, iu, iv);
  });
  std::vector<double> counts(min_birth, 0.0);
  bool in_range = true;
  for (auto c : coal) {
    if (c < min_birth) {
      counts[c] += 1.0;
    } else {
      in_range = false;
    }
  }
  const auto chi = chi_square_gof(counts, law);

  TestReport r;
  r.name = "coal_density " + to_text(seq) + " " + to_string(u) + "," + to_string(v);
  r.statistic_name = "chi2";
  r.statistic = chi.statistic;
  r.p_value = chi.p_value;
  r.threshold = options.significance;
  r.pass = in_range && chi.p_value > options.significance;
  r.seed = options.seed;
  r.sample_sizes = {samples};
  double mass = 0.0;
  for (double p : law) mass += p;
  std::ostringstream detail;
  detail << "dof=" << chi.dof << " p=" << fmt(chi.p_value) << " formula_mass=" << fmt(mass) << " law=(";
  for (std::size_t c = 0; c < law.size(); ++c) detail << (c ? "," : "") << fmt(law[c]);
  detail << ")";
  r.detail = detail.str();
  return r;
}

std::vector<TestReport> regime_suite(const RegimeConfig& config, const VerifyOptions& options) {
  if (config.n_list.empty()) throw std::invalid_argument("regime suite needs at least one n");
  if (config.k < 2) throw std::invalid_argument("regime suite needs k >= 2");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double beta = config.beta;
  const double g_scale = 1.0 / (2.0 * (1.0 - beta));
  auto G = [&](double u) { return std::pow(u, 1.0 - beta) * g_scale; };
  const bool critical = std::abs(config.alpha - 0.5) < 1e-12;
  const double level = options.significance / static_cast<double>(config.n_list.size());
  const std::string regime = critical ? "critical" : (config.alpha < 0.5 ? "subcritical" : "supercritical");

  std::optional<FunctionTable> table;
  if (critical) table.emplace(FunctionTable::power(beta));

  std::vector<TestReport> reports;
  for (std::size_t idx = 0; idx < config.n_list.size(); ++idx) {
    const std::size_t n = config.n_list[idx];
    const ProfileSpec spec{config.alpha, PowerShape{beta}};
    const FreezeSequence seq = profile_sequence(n, spec);
    const Walk w = walk(seq);
    const double scale = std::pow(static_cast<double>(n), 1.0 - config.alpha);
    const std::uint64_t tree_stream = kRegimeTrees * 1000 + idx;
    const std::uint64_t target_stream = kRegimeTarget * 1000 + idx;

    struct Rep {
      double height = 0.0;
      double distance = 0.0;
    };
    const auto reps = run_indexed(config.replicates, options.threads, [&](std::size_t i) {
      Rng rng = make_rng(options.seed, tree_stream, i);
      Rep rep;
      if (critical) {
        const auto built = build_coalescent(seq, rng);
        const auto sample = sample_distance_matrix(built.tree, &built.genealogy, &w, config.k,
                                                   DistanceMode::Graph, 1.0 - config.alpha, rng);
        rep.height = static_cast<double>(height(built.tree)) / scale;
        rep.distance = sample.at(0, 1);
      } else {
        const auto tree = build_forward(seq, rng);
        const auto sample =
            sample_distance_matrix(tree, nullptr, nullptr, config.k, DistanceMode::Graph, 1.0 - config.alpha, rng);
        rep.height = static_cast<double>(height(tree)) / scale;
        rep.distance = sample.at(0, 1);
      }
      return rep;
    });

    const std::size_t h_count = config.height_replicates == 0
                                    ? reps.size()
                                    : std::min(config.height_replicates, reps.size());
    std::vector<double> heights;
    for (std::size_t i = 0; i < h_count; ++i) heights.push_back(reps[i].height);
    const double h_mean = mean(heights);
    const double h_limit = G(1.0);
    // Only the segment limit pins the height to G(1); above 1/2 the mean depth
    // is ~n^{1-alpha} G(1) but the height picks up the largest fluctuation.
    if (config.alpha < 0.5) {
      TestReport hr;
      hr.name = "height " + regime + " n=" + std::to_string(n);
      hr.statistic_name = "rel_err_mean_height";
      hr.statistic = std::abs(h_mean / h_limit - 1.0);
      hr.threshold = config.height_tolerance;
      hr.pass = hr.statistic <= hr.threshold;
      hr.seed = options.seed;
      hr.sample_sizes = {h_count};
      hr.detail = "mean=" + fmt(h_mean) + " limit=" + fmt(h_limit) + " staircase_lag=" +
                  std::to_string(staircase_lag(profile_targets(n, spec)));
      reports.push_back(std::move(hr));
    }

    std::vector<double> sample;
    sample.reserve(reps.size());
    for (const auto& rep : reps) sample.push_back(rep.distance);
    const auto target = run_indexed(config.replicates, options.threads, [&](std::size_t i) {
      Rng rng = make_rng(options.seed, target_stream, i);
      if (critical) {
        const auto real = sample_coalescent(*table, 2, rng);
        return limit_distance_matrix(real, *table)[1];
      }
      const double a = G(uniform01(rng));
      const double b = G(uniform01(rng));
      return config.alpha < 0.5 ? std::abs(a - b) : a + b;
    });
    const std::string target_name =
        critical ? "continuum f=t^" + fmt(beta) : (config.alpha < 0.5 ? "|G(U1)-G(U2)|" : "G(U1)+G(U2)");
    auto ks = ks_report("two_point " + regime + " n=" + std::to_string(n), std::move(sample),
                        std::vector<double>(target.begin(), target.end()), level, options.seed);
    ks.detail += " target=" + target_name;
    if (config.alpha >= 0.5) ks.detail += " mean_height=" + fmt(h_mean) + " G(1)=" + fmt(h_limit);
    reports.push_back(std::move(ks));
  }
  return reports;
}

std::int64_t max_side_subtree_height(const FrozenTree& tree) {
  if (tree.size() <= 1) return 0;
  const auto deepest = static_cast<VertexId>(
      std::max_element(tree.depth.begin(), tree.depth.end()) - tree.depth.begin());
  std::vector<std::uint8_t> on_branch(tree.size(), 0);
  for (VertexId v = deepest; v != kNoVertex; v = tree.parent[static_cast<std::size_t>(v)]) {
    on_branch[static_cast<std::size_t>(v)] = 1;
  }
  // Distance to the branch: depth minus the depth of the nearest branch ancestor.
  std::vector<std::int64_t> memo(tree.size(), -1);
  std::int64_t worst = 0;
  for (std::size_t start = 0; start < tree.size(); ++start) {
    std::vector<std::size_t> path;
    std::size_t v = start;
    while (memo[v] < 0 && !on_branch[v]) {
      path.push_back(v);
      v = static_cast<std::size_t>(tree.parent[v]);
    }
    std::int64_t d = on_branch[v] ? 0 : memo[v];
    if (on_branch[v]) memo[v] = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      memo[*it] = ++d;
      worst = std::max(worst, d);
    }
  }
  return worst;
}

TestReport check_bounded_regime(int max_active, std::size_t n, std::size_t replicates,
                                const VerifyOptions& options, double ratio_tolerance, double side_fraction,
                                double side_quantile) {
  const FreezeSequence seq = bounded_sequence(n, max_active);
  const Walk w = walk(seq);
  const double h_plus = h_sums(w, seq, 1, n).h_plus;
  struct Rep {
    double ratio;
    double side;
  };
  const auto reps = run_indexed(replicates, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kBounded, i);
    const auto tree = build_forward(seq, rng);
    return Rep{static_cast<double>(height(tree)) / h_plus,
               static_cast<double>(max_side_subtree_height(tree)) / static_cast<double>(n)};
  });
  std::vector<double> ratios;
  std::size_t small_side = 0;
  double worst_side = 0.0;
  for (const auto& r : reps) {
    ratios.push_back(r.ratio);
    small_side += r.side < side_fraction ? 1 : 0;
    worst_side = std::max(worst_side, r.side);
  }
  const double ratio = mean(ratios);
  const double side_ok = static_cast<double>(small_side) / static_cast<double>(replicates);

  TestReport r;
  r.name = "bounded M=" + std::to_string(max_active) + " n=" + std::to_string(n);
  r.statistic_name = "rel_err_height_over_hplus";
  r.statistic = std::abs(ratio - 1.0);
  r.threshold = ratio_tolerance;
  r.pass = r.statistic <= ratio_tolerance && side_ok >= side_quantile;
  r.seed = options.seed;
  r.sample_sizes = {replicates};
  r.detail = "mean_ratio=" + fmt(ratio) + " side<" + fmt(side_fraction) + "n in " + fmt(side_ok) +
             " of replicates (max " + fmt(worst_side) + ")";
  return r;
}

TestReport check_crt_identity(std::size_t n, std::size_t replicates, const VerifyOptions& options) {
  const double scale = std::sqrt(static_cast<double>(2 * n + 1));
  const auto heights = run_indexed(replicates, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kCrtTrees, i);
    const auto seq = excursion_sequence(n, rng);
    return static_cast<double>(height(build_forward(seq, rng))) / scale;
  });
  const auto maxima = run_indexed(replicates, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kCrtWalks, i);
    return static_cast<double>(walk(excursion_sequence(n, rng)).max_value) / scale;
  });
  auto r = ks_report("crt_identity n=" + std::to_string(n), heights, maxima, options.significance, options.seed);
  // At finite n the height has the law of max S - 1 exactly; report that fit alongside.
  std::vector<double> shifted(maxima.size());
  for (std::size_t i = 0; i < maxima.size(); ++i) shifted[i] = maxima[i] - 1.0 / scale;
  r.detail += " mean_height=" + fmt(mean(heights)) + " mean_max=" + fmt(mean(maxima)) +
              " p_max_minus_1=" + fmt(ks_two_sample(heights, shifted).p_value);
  return r;
}

TestReport check_distance_equivalence(double beta, const std::vector<std::size_t>& n_list,
                                      std::size_t replicates, std::size_t pairs,
                                      const VerifyOptions& options) {
  if (n_list.size() < 2) throw std::invalid_argument("distance equivalence needs at least two values of n");
  std::vector<double> medians;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    const FreezeSequence seq = profile_sequence(n, {0.5, PowerShape{beta}});
    const Walk w = walk(seq);
    const double scale = std::sqrt(static_cast<double>(n));
    const auto worst = run_indexed(replicates, options.threads, [&](std::size_t i) {
      Rng rng = make_rng(options.seed, kDistance * 1000 + idx, i);
      const auto built = build_coalescent(seq, rng);
      double m = 0.0;
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto u = static_cast<VertexId>(uniform_index(rng, built.tree.size()));
        const auto v = static_cast<VertexId>(uniform_index(rng, built.tree.size()));
        const double d = static_cast<double>(graph_distance(built.tree, u, v));
        m = std::max(m, std::abs(d - dc_distance(w, built.genealogy, u, v)) / scale);
      }
      return m;
    });
    medians.push_back(median(std::vector<double>(worst.begin(), worst.end())));
  }
  bool decreasing = true;
  double worst_ratio = 0.0;
  for (std::size_t j = 1; j < medians.size(); ++j) {
    decreasing = decreasing && medians[j] < medians[j - 1];
    worst_ratio = std::max(worst_ratio, medians[j] / medians[j - 1]);
  }
  TestReport r;
  r.name = "distance_equivalence beta=" + fmt(beta);
  r.statistic_name = "max_median_ratio";
  r.statistic = worst_ratio;
  r.threshold = 1.0;
  r.pass = decreasing;
  r.seed = options.seed;
  r.sample_sizes = {replicates, pairs};
  std::ostringstream detail;
  detail << "medians=(";
  for (std::size_t j = 0; j < medians.size(); ++j) detail << (j ? "," : "") << fmt(medians[j]);
  detail << ")";
  r.detail = detail.str();
  return r;
}

}  // namespace freezetree
