#include "freezetree/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

namespace freezetree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceGuard = 1e12;
constexpr double kCellTolerance = 1e-12;
constexpr unsigned kCellDepth = 6;

// Boost's own error estimate does not shrink with the cell width, so near
// t = 0 it never accepts; compare the whole cell against its two halves instead.
template <class F>
double gk(const F& g, double a, double b, unsigned depth = kCellDepth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double whole = GK::integrate(g, a, b, 0, 0.0);
  if (depth == 0) return whole;
  const double m = 0.5 * (a + b);
  const double halves = GK::integrate(g, a, m, 0, 0.0) + GK::integrate(g, m, b, 0, 0.0);
  if (std::abs(halves - whole) <= kCellTolerance * std::abs(halves)) return halves;
  return gk(g, a, m, depth - 1) + gk(g, m, b, depth - 1);
}

void check_range(double a, double b) {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) {
    throw std::invalid_argument("integration range must satisfy 0 <= a <= b <= 1");
  }
}

}  // namespace

FunctionTable::FunctionTable(std::function<double(double)> f, std::string name, Options options,
                             std::optional<double> tail_exponent)
    : f_(std::move(f)), name_(std::move(name)) {
  if (options.octaves < 1 || options.cells_per_octave < 1) {
    throw std::invalid_argument("function table needs at least one octave and one cell");
  }
  const int octaves = options.octaves;
  const int per = options.cells_per_octave;
  const double t0 = std::ldexp(1.0, -octaves);

  nodes_.reserve(static_cast<std::size_t>(octaves) * static_cast<std::size_t>(per) + 1);
  nodes_.push_back(t0);
  for (int o = octaves - 1; o >= 0; --o) {
    const double lo = std::ldexp(1.0, -o - 1);
    for (int c = 1; c <= per; ++c) nodes_.push_back(lo * (1.0 + static_cast<double>(c) / per));
  }
  nodes_.back() = 1.0;

  for (double t : nodes_) {
    const double v = f_(t);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("profile '" + name_ + "' must be positive and finite on (0, 1]");
    }
  }

  tail_p_ = tail_exponent ? *tail_exponent : std::log2(f_(t0) / f_(0.5 * t0));
  if (!(tail_p_ < 1.0)) {
    throw std::domain_error("profile '" + name_ + "': 1/f is not integrable at 0");
  }
  tail_c_ = f_(t0) / std::pow(t0, tail_p_);
  tail_l_infinite_ = 2.0 * tail_p_ >= 1.0 - 1e-9;

  const std::size_t cells = nodes_.size() - 1;
  cum_g_.assign(nodes_.size(), 0.0);
  cum_l_.assign(nodes_.size(), 0.0);
  cum_g_[0] = cum_g(t0);
  for (std::size_t j = 0; j < cells; ++j) {
    cum_g_[j + 1] = cum_g_[j] + cell_half_inv_f(nodes_[j], nodes_[j + 1]);
    cum_l_[j + 1] = cum_l_[j] + cell_inv_f2(nodes_[j], nodes_[j + 1]);
  }
  if (!std::isfinite(cum_g_.back()) || cum_g_.back() > kDivergenceGuard) {
    throw std::domain_error("profile '" + name_ + "': integral of 1/f exceeds the divergence guard");
  }
}

FunctionTable FunctionTable::power(double beta, Options options) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("power exponent must lie in (0, 1)");
  return FunctionTable([beta](double t) { return std::pow(t, beta); },
                       "t^" + std::to_string(beta), options, beta);
}

FunctionTable FunctionTable::from_samples(std::vector<double> values, Options options) {
  if (values.size() < 2) throw std::invalid_argument("sampled profile needs at least two values");
  const double last = static_cast<double>(values.size() - 1);
  auto f = [v = std::move(values), last](double t) {
    const double x = std::clamp(t, 0.0, 1.0) * last;
    const auto j = std::min(static_cast<std::size_t>(x), v.size() - 2);
    const double frac = x - static_cast<double>(j);
    return v[j] + frac * (v[j + 1] - v[j]);
  };
  return FunctionTable(std::move(f), "sampled", options);
}

std::size_t FunctionTable::cell_of(double t) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - nodes_.begin() - 1, 0));
  return std::min(j, nodes_.size() - 2);
}

double FunctionTable::cell_half_inv_f(double a, double b) const {
  return gk([this](double t) { return 0.5 / f_(t); }, a, b);
}

double FunctionTable::cell_inv_f2(double a, double b) const {
  return gk([this](double t) {
    const double v = f_(t);
    return 1.0 / (v * v);
  }, a, b);
}

double FunctionTable::cum_g(double t) const {
  const double t0 = nodes_.front();
  if (t <= t0) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, 1.0 - tail_p_) / (2.0 * tail_c_ * (1.0 - tail_p_));
  }
  const std::size_t j = cell_of(t);
  return cum_g_[j] + (t > nodes_[j] ? cell_half_inv_f(nodes_[j], t) : 0.0);
}

double FunctionTable::cum_l(double t) const {
  const double t0 = nodes_.front();
  if (t <= t0) {
    if (t <= 0.0 && tail_l_infinite_) return -kInf;
    const double q = 1.0 - 2.0 * tail_p_;
    const double c2 = tail_c_ * tail_c_;
    if (std::abs(q) < 1e-12) return -std::log(t0 / t) / c2;
    const double tq = t <= 0.0 ? 0.0 : std::pow(t, q);
    return -(std::pow(t0, q) - tq) / (c2 * q);
  }
  const std::size_t j = cell_of(t);
  return cum_l_[j] + (t > nodes_[j] ? cell_inv_f2(nodes_[j], t) : 0.0);
}

double FunctionTable::half_inv_f(double a, double b) const {
  check_range(a, b);
  if (a == b) return 0.0;
  const double t0 = nodes_.front();
  if (a > t0 && cell_of(a) == cell_of(b)) return cell_half_inv_f(a, b);
  return cum_g(b) - cum_g(a);
}

IntegralValue FunctionTable::inv_f2(double a, double b) const {
  check_range(a, b);
  if (a == b) return {0.0, false};
  if (a == 0.0 && tail_l_infinite_) return {kInf, true};
  const double t0 = nodes_.front();
  if (a > t0 && cell_of(a) == cell_of(b)) return {cell_inv_f2(a, b), false};
  return {cum_l(b) - cum_l(a), false};
}

std::optional<double> FunctionTable::solve_inv_f2(double t_now, double mass) const {
  if (!(mass >= 0.0)) throw std::invalid_argument("mass must be nonnegative");
  if (mass == 0.0) return t_now;
  const double top = cum_l(t_now);
  const double target = top - mass;
  if (!(target > cum_l(0.0))) return std::nullopt;

  const double t0 = nodes_.front();
  if (target <= 0.0) {
    // Inside the power-law tail: invert the closed form.
    const double q = 1.0 - 2.0 * tail_p_;
    const double c2 = tail_c_ * tail_c_;
    const double below = -target;  // integral over [t, t0]
    if (std::abs(q) < 1e-12) return t0 * std::exp(-below * c2);
    const double tq = std::pow(t0, q) - below * c2 * q;
    return tq <= 0.0 ? 0.0 : std::pow(tq, 1.0 / q);
  }

  const auto it = std::upper_bound(cum_l_.begin(), cum_l_.end(), target);
  const std::size_t j = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum_l_.begin() - 1, 0)),
                                 nodes_.size() - 2);
  const double base = nodes_[j];
  double lo = base;
  double hi = std::min(nodes_[j + 1], t_now);
  auto excess = [&](double t) { return cum_l_[j] + (t > base ? cell_inv_f2(base, t) : 0.0) - target; };

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = excess(t);
    if (g > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    if (hi - lo <= 1e-15 * hi || g == 0.0) break;
    const double v = f_(t);
    double next = t - g * v * v;  // Newton step, derivative is 1/f^2
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * t) break;
    t = next;
  }
  return t;
}

double integral_inv_f(const FunctionTable& table, double a, double b) {
  const double v = table.half_inv_f(a, b);
  if (!std::isfinite(v) || v > kDivergenceGuard) {
    throw std::domain_error("integral of 1/(2f) exceeds the divergence guard");
  }
  return v;
}

IntegralValue integral_inv_f2(const FunctionTable& table, double a, double b) {
  const auto v = table.inv_f2(a, b);
  if (!v.infinite && (!std::isfinite(v.value) || v.value > kDivergenceGuard)) {
    throw std::domain_error("integral of 1/f^2 exceeds the divergence guard");
  }
  return v;
}

std::vector<std::int64_t> CoalescentForest::roots() const {
  std::vector<std::int64_t> out;
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] < 0) out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

CoalescentRealization sample_coalescent(const FunctionTable& table, std::size_t k, Rng& rng) {
  if (k == 0) throw std::invalid_argument("coalescent needs at least one particle");
  CoalescentRealization real;
  real.k = k;
  real.births.resize(k);
  for (auto& b : real.births) b = uniform01(rng);

  CoalescentForest& forest = real.forest;
  forest.k = k;
  forest.time = real.births;
  forest.parent.assign(k, -1);
  forest.children.reserve(k - 1);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return real.births[a] > real.births[b]; });

  std::exponential_distribution<double> exp1(1.0);
  std::vector<std::int64_t> clusters{static_cast<std::int64_t>(order[0])};
  double t = real.births[order[0]];
  std::size_t next = 1;
  while (true) {
    const std::size_t m = clusters.size();
    if (m < 2) {
      if (next == k) break;
      t = real.births[order[next]];
      clusters.push_back(static_cast<std::int64_t>(order[next++]));
      continue;
    }
    const double mass = exp1(rng) / (0.5 * static_cast<double>(m) * static_cast<double>(m - 1));
    double merge_at = 0.0;
    if (next < k) {
      const double b = real.births[order[next]];
      if (mass >= table.inv_f2(b, t).value) {
        // No merge before the next birth; the clock restarts there.
        t = b;
        clusters.push_back(static_cast<std::int64_t>(order[next++]));
        continue;
      }
      merge_at = std::max(*table.solve_inv_f2(t, mass), std::nextafter(b, 1.0));
    } else {
      const auto solved = table.solve_inv_f2(t, mass);
      if (!solved) break;  // the remaining clusters survive to time 0
      merge_at = *solved;
    }

    const std::size_t a = uniform_index(rng, m);
    std::size_t c = uniform_index(rng, m - 1);
    if (c >= a) ++c;
    const auto node = static_cast<std::int64_t>(forest.time.size());
    forest.time.push_back(merge_at);
    forest.parent.push_back(-1);
    forest.children.push_back({clusters[a], clusters[c]});
    forest.parent[static_cast<std::size_t>(clusters[a])] = node;
    forest.parent[static_cast<std::size_t>(clusters[c])] = node;
    clusters[a] = node;
    clusters[c] = clusters.back();
    clusters.pop_back();
    t = merge_at;
  }

  real.surviving_clusters = clusters.size();
  real.merge_times.assign(forest.time.begin() + static_cast<std::ptrdiff_t>(k), forest.time.end());
  std::sort(real.merge_times.begin(), real.merge_times.end());
  return real;
}

double coalescence_time(const CoalescentRealization& real, std::size_t j, std::size_t l) {
  if (j >= real.k || l >= real.k) throw std::out_of_range("particle index out of range");
  if (j == l) return real.births[j];
  const auto& parent = real.forest.parent;
  std::vector<std::int64_t> path;
  for (auto x = static_cast<std::int64_t>(j); x >= 0; x = parent[static_cast<std::size_t>(x)]) path.push_back(x);
  for (auto x = static_cast<std::int64_t>(l); x >= 0; x = parent[static_cast<std::size_t>(x)]) {
    if (std::find(path.begin(), path.end(), x) != path.end()) {
      return real.forest.time[static_cast<std::size_t>(x)];
    }
  }
  return 0.0;
}

std::vector<double> limit_distance_matrix(const CoalescentRealization& real, const FunctionTable& table) {
  const std::size_t k = real.k;
  std::vector<double> d(k * k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      const double c = coalescence_time(real, j, l);
      d[j * k + l] = d[l * k + j] =
          integral_inv_f(table, c, real.births[j]) + integral_inv_f(table, c, real.births[l]);
    }
  }
  return d;
}

double density_g(const CoalescentForest& forest, std::span<const double> births,
                 std::span<const double> merge_times, const FunctionTable& table) {
  const std::size_t k = forest.k;
  const std::size_t merges = forest.merge_count();
  if (births.size() != k || k == 0) throw std::invalid_argument("births must list one time per particle");
  if (merge_times.size() != merges || forest.node_count() != k + merges || forest.parent.size() != k + merges) {
    throw std::invalid_argument("forest, births and merge times disagree in size");
  }
  if (merges > k - 1) throw std::invalid_argument("more merges than particles allow");

  std::vector<double> all;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(births[j] >= 0.0 && births[j] <= 1.0) || births[j] != forest.time[j]) {
      throw std::invalid_argument("leaf times must equal births in [0, 1]");
    }
    all.push_back(births[j]);
  }
  std::vector<double> internal(forest.time.begin() + static_cast<std::ptrdiff_t>(k), forest.time.end());
  std::vector<std::size_t> seen(k + merges, 0);
  for (std::size_t e = 0; e < merges; ++e) {
    const double c = internal[e];
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("merge times must lie in (0, 1)");
    for (auto child : forest.children[e]) {
      if (child < 0 || static_cast<std::size_t>(child) >= k + merges) {
        throw std::invalid_argument("child index out of range");
      }
      const auto ch = static_cast<std::size_t>(child);
      if (forest.parent[ch] != static_cast<std::int64_t>(k + e) || ++seen[ch] > 1) {
        throw std::invalid_argument("forest parent and child links disagree");
      }
      if (!(c < forest.time[ch])) throw std::invalid_argument("a merge must precede both children in time");
    }
    all.push_back(c);
  }
  std::sort(internal.begin(), internal.end());
  std::vector<double> given(merge_times.begin(), merge_times.end());
  std::sort(given.begin(), given.end());
  if (internal != given) throw std::invalid_argument("merge times do not match the forest");
  std::sort(all.begin(), all.end(), std::greater<>());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument("event times must be distinct");
  }

  // a(t) is constant between consecutive events; walk them from t = 1 down.
  double exponent = 0.0;
  long clusters = 0;
  double upper = all.front();
  auto is_birth = [&](double t) { return std::find(births.begin(), births.end(), t) != births.end(); };
  for (std::size_t e = 0; e < all.size(); ++e) {
    const double t = all[e];
    if (clusters >= 2) {
      exponent += 0.5 * static_cast<double>(clusters) * static_cast<double>(clusters - 1) *
                  table.inv_f2(t, upper).value;
    }
    clusters += is_birth(t) ? 1 : -1;
    upper = t;
  }
  if (clusters >= 2) {
    const auto tail = table.inv_f2(0.0, upper);
    if (tail.infinite) return 0.0;
    exponent += 0.5 * static_cast<double>(clusters) * static_cast<double>(clusters - 1) * tail.value;
  }

  double product = 1.0;
  for (double c : internal) {
    const double v = table.f(c);
    product /= v * v;
  }
  return std::ldexp(1.0, -static_cast<int>(merges)) * std::exp(-exponent) * product;
}

double RootDegreeStats::fraction(std::size_t clusters) const {
  if (total == 0 || clusters >= counts.size()) return 0.0;
  return static_cast<double>(counts[clusters]) / static_cast<double>(total);
}

double RootDegreeStats::fraction_at_least(std::size_t clusters) const {
  double acc = 0.0;
  for (std::size_t c = clusters; c < counts.size(); ++c) acc += fraction(c);
  return acc;
}

double RootDegreeStats::mean() const {
  double acc = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) acc += static_cast<double>(c) * fraction(c);
  return acc;
}

RootDegreeStats root_degree_stat(std::span<const CoalescentRealization> batch) {
  RootDegreeStats stats;
  for (const auto& r : batch) {
    if (stats.counts.size() <= r.surviving_clusters) stats.counts.resize(r.surviving_clusters + 1, 0);
    ++stats.counts[r.surviving_clusters];
    ++stats.total;
  }
  return stats;
}

std::string to_json(const CoalescentRealization& real) {
  nlohmann::json j;
  j["k"] = real.k;
  j["births"] = real.births;
  j["surviving_clusters"] = real.surviving_clusters;
  auto& merges = j["merges"] = nlohmann::json::array();
  for (std::size_t e = 0; e < real.forest.merge_count(); ++e) {
    merges.push_back({{"node", real.k + e},
                      {"time", real.forest.time[real.k + e]},
                      {"children", real.forest.children[e]}});
  }
  return j.dump();
}

void write_matrix_csv(std::ostream& out, std::span<const double> matrix, std::size_t k,
                      const std::string& comment) {
  if (matrix.size() != k * k) throw std::invalid_argument("matrix is not k x k");
  const auto old_precision = out.precision(17);
  out << "# " << comment << "\n";
  out << "particle";
  for (std::size_t j = 0; j < k; ++j) out << ',' << j;
  out << '\n';
  for (std::size_t i = 0; i < k; ++i) {
    out << i;
    for (std::size_t j = 0; j < k; ++j) out << ',' << matrix[i * k + j];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace freezetree
