#include "freezetree/sequences.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace freezetree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_double(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  if (pos != s.size()) {
    throw std::invalid_argument("trailing characters in " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in{std::string(text)};
  while (std::getline(in, token, ',')) {
    out.push_back(parse_double(token, "custom profile value"));
  }
  return out;
}

std::vector<double> read_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open custom profile file '" + path + "'");
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    std::replace(token.begin(), token.end(), ',', ' ');
    std::istringstream parts(token);
    std::string part;
    while (parts >> part) out.push_back(parse_double(part, "custom profile value"));
  }
  return out;
}

void validate_custom(const CustomShape& c) {
  if (c.values.size() < 2) {
    throw std::invalid_argument("custom profile needs at least two grid values");
  }
  for (double v : c.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("custom profile values must be finite and >= 0");
    }
  }
}

}  // namespace

FreezeSequence::FreezeSequence(std::vector<std::int8_t> steps) : steps_(std::move(steps)) {
  for (auto s : steps_) {
    if (s != 1 && s != -1) throw std::invalid_argument("freeze sequence entries must be +1 or -1");
  }
}

Walk walk(const FreezeSequence& seq) {
  const std::size_t n = seq.size();
  Walk w;
  w.values.resize(n + 1);
  w.inv_prefix.resize(n + 2);
  w.inv_plus_prefix.resize(n + 2);
  w.values[0] = 1;
  w.inv_prefix[0] = 0.0;
  w.inv_plus_prefix[0] = 0.0;
  w.inv_prefix[1] = 1.0;  // 1/S_0
  w.inv_plus_prefix[1] = 0.0;
  const auto steps = seq.steps();
  for (std::size_t k = 1; k <= n; ++k) {
    const std::int64_t s = w.values[k - 1] + steps[k - 1];
    w.values[k] = s;
    w.max_value = std::max(w.max_value, s);
    if (s == 0 && !w.tau) w.tau = k;
    const double inv = (w.tau ? kInf : 1.0 / static_cast<double>(s));
    w.inv_prefix[k + 1] = w.inv_prefix[k] + inv;
    w.inv_plus_prefix[k + 1] = w.inv_plus_prefix[k] + (steps[k - 1] > 0 ? inv : 0.0);
  }
  return w;
}

HarmonicSums h_sums(const Walk& w, const FreezeSequence& seq, std::size_t a, std::size_t b) {
  if (a < 1 || a > b || b > seq.size()) {
    throw std::out_of_range("h_sums requires 1 <= a <= b <= n");
  }
  if (w.tau && *w.tau <= b) {
    throw std::domain_error("h_sums window reaches a zero of the walk");
  }
  return {w.inv_prefix[b + 1] - w.inv_prefix[a], w.inv_plus_prefix[b + 1] - w.inv_plus_prefix[a]};
}

HarmonicSums h_sums(const FreezeSequence& seq, std::size_t a, std::size_t b) {
  return h_sums(walk(seq), seq, a, b);
}

ProfileShape parse_profile_shape(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto require_no_arg = [&] {
    if (colon != std::string_view::npos) {
      throw std::invalid_argument("profile '" + std::string(head) + "' takes no parameter");
    }
  };
  if (head == "power") {
    if (arg.empty()) throw std::invalid_argument("power profile needs an exponent, e.g. power:0.5");
    const double beta = parse_double(arg, "power exponent");
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::invalid_argument("power exponent must lie in (0, 1)");
    }
    return PowerShape{beta};
  }
  if (head == "excursion") return require_no_arg(), ProfileShape{ExcursionShape{}};
  if (head == "iid") return require_no_arg(), ProfileShape{IidShape{}};
  if (head == "all_plus") return require_no_arg(), ProfileShape{AllPlusShape{}};
  if (head == "bounded") {
    if (arg.empty()) throw std::invalid_argument("bounded profile needs a bound, e.g. bounded:3");
    const double m = parse_double(arg, "bound");
    if (m < 2 || m != std::floor(m)) throw std::invalid_argument("bound must be an integer >= 2");
    return BoundedShape{static_cast<int>(m)};
  }
  if (head == "custom") {
    if (arg.empty()) throw std::invalid_argument("custom profile needs values or a file path");
    CustomShape c;
    try {
      c.values = parse_value_list(arg);
    } catch (const std::invalid_argument&) {
      c.values = read_value_file(std::string(arg));
    }
    validate_custom(c);
    return c;
  }
  throw std::invalid_argument("unknown profile '" + std::string(text) +
                              "' (expected power:B, excursion, iid, all_plus, bounded:M, custom:...)");
}

std::string to_string(const ProfileShape& shape) {
  return std::visit(
      Overloaded{
          [](const PowerShape& p) {
            std::ostringstream os;
            os << "power:" << p.beta;
            return os.str();
          },
          [](const ExcursionShape&) { return std::string("excursion"); },
          [](const IidShape&) { return std::string("iid"); },
          [](const AllPlusShape&) { return std::string("all_plus"); },
          [](const BoundedShape& b) { return "bounded:" + std::to_string(b.max_active); },
          [](const CustomShape& c) { return "custom:" + std::to_string(c.values.size()) + "pts"; },
      },
      shape);
}

double profile_value(const ProfileShape& shape, double t) {
  if (const auto* p = std::get_if<PowerShape>(&shape)) {
    return t <= 0.0 ? 0.0 : std::pow(t, p->beta);
  }
  if (const auto* c = std::get_if<CustomShape>(&shape)) {
    const auto& v = c->values;
    const double x = std::clamp(t, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto j = std::min(static_cast<std::size_t>(x), v.size() - 2);
    const double frac = x - static_cast<double>(j);
    return v[j] + frac * (v[j + 1] - v[j]);
  }
  throw std::invalid_argument("profile '" + to_string(shape) + "' has no deterministic f");
}

std::vector<std::int64_t> profile_targets(std::size_t n, const ProfileSpec& spec) {
  if (n == 0) throw std::invalid_argument("profile length must be >= 1");
  const double scale = std::pow(static_cast<double>(n), spec.alpha);
  std::vector<std::int64_t> targets(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    targets[k] = std::llround(std::max(1.0, scale * profile_value(spec.shape, t)));
  }
  return targets;
}

std::int64_t staircase_lag(std::span<const std::int64_t> targets) {
  std::int64_t lag = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    lag = std::max(lag, targets[k] - static_cast<std::int64_t>(k + 1));
  }
  return lag;
}

FreezeSequence all_plus_sequence(std::size_t n) {
  return FreezeSequence(std::vector<std::int8_t>(n, 1));
}

FreezeSequence bounded_sequence(std::size_t n, int max_active) {
  if (max_active < 2) throw std::invalid_argument("bounded profile needs max_active >= 2");
  std::vector<std::int8_t> steps(n);
  std::int64_t s = 1;
  int dir = 1;
  for (auto& x : steps) {
    if (s == 1) dir = 1;
    if (s == max_active) dir = -1;
    x = static_cast<std::int8_t>(dir);
    s += dir;
  }
  return FreezeSequence(std::move(steps));
}

FreezeSequence profile_sequence(std::size_t n, const ProfileSpec& spec) {
  if (n == 0) throw std::invalid_argument("profile length must be >= 1");
  if (std::holds_alternative<AllPlusShape>(spec.shape)) return all_plus_sequence(n);
  if (const auto* b = std::get_if<BoundedShape>(&spec.shape)) {
    return bounded_sequence(n, b->max_active);
  }
  if (!std::holds_alternative<PowerShape>(spec.shape) &&
      !std::holds_alternative<CustomShape>(spec.shape)) {
    throw std::invalid_argument("profile '" + to_string(spec.shape) +
                                "' is random; use make_sequence with a seeded engine");
  }
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (const auto* c = std::get_if<CustomShape>(&spec.shape)) validate_custom(*c);
  const double scale = std::pow(static_cast<double>(n), spec.alpha);
  if (spec.alpha >= 1.0 && profile_value(spec.shape, 1.0) * scale >= static_cast<double>(n)) {
    throw std::invalid_argument("target n^alpha f(1) >= n cannot be reached with +-1 steps");
  }

  const auto targets = profile_targets(n, spec);
  std::vector<std::int8_t> steps(n);
  std::int64_t s = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    const bool up = s <= 1 || s < targets[k];
    steps[k - 1] = up ? 1 : -1;
    s += steps[k - 1];
  }
  return FreezeSequence(std::move(steps));
}

FreezeSequence iid_sequence(std::size_t n, Rng& rng) {
  std::vector<std::int8_t> steps(n);
  std::bernoulli_distribution coin(0.5);
  for (auto& x : steps) x = coin(rng) ? 1 : -1;
  return FreezeSequence(std::move(steps));
}

FreezeSequence excursion_sequence(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("excursion half-length must be >= 1");
  const std::size_t len = 2 * n + 1;
  std::vector<std::int8_t> arrangement(len, -1);
  std::fill_n(arrangement.begin(), n, std::int8_t{1});
  std::shuffle(arrangement.begin(), arrangement.end(), rng);

  // Cycle lemma: start right after the first position where the partial sum
  // attains its minimum.
  std::int64_t sum = 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::size_t argmin = 0;
  for (std::size_t k = 0; k < len; ++k) {
    sum += arrangement[k];
    if (sum < best) {
      best = sum;
      argmin = k;
    }
  }
  std::rotate(arrangement.begin(), arrangement.begin() + static_cast<std::ptrdiff_t>((argmin + 1) % len),
              arrangement.end());
  return FreezeSequence(std::move(arrangement));
}

FreezeSequence make_sequence(std::size_t n, const ProfileSpec& spec, Rng& rng, int max_attempts) {
  if (std::holds_alternative<IidShape>(spec.shape)) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      auto seq = iid_sequence(n, rng);
      if (walk(seq).survives()) return seq;
    }
    throw std::runtime_error("no surviving iid sequence after " + std::to_string(max_attempts) +
                             " attempts; lower n or raise the attempt budget");
  }
  if (std::holds_alternative<ExcursionShape>(spec.shape)) {
    // An excursion of length 2m+1 covering at least n steps.
    return excursion_sequence((n + 1) / 2, rng);
  }
  return profile_sequence(n, spec);
}

double tightness_diagnostic(const Walk& w, double alpha, double delta) {
  if (!w.survives()) throw std::domain_error("tightness diagnostic needs a walk that stays >= 1");
  const std::size_t n = w.n();
  const double dn = static_cast<double>(n);
  const double cutoff = delta * std::pow(dn, alpha);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto s = static_cast<double>(w.values[i]);
    if (s <= cutoff) total += 1.0 / s;
  }
  return total / std::pow(dn, 1.0 - alpha);
}

double tightness_diagnostic(const FreezeSequence& seq, double alpha, double delta) {
  return tightness_diagnostic(walk(seq), alpha, delta);
}

std::string to_text(const FreezeSequence& seq) {
  std::string out;
  out.reserve(seq.size());
  for (auto s : seq.steps()) out.push_back(s > 0 ? '+' : '-');
  return out;
}

FreezeSequence sequence_from_text(std::string_view text) {
  std::vector<std::int8_t> steps;
  steps.reserve(text.size());
  for (char c : text) {
    if (c == '+') {
      steps.push_back(1);
    } else if (c == '-') {
      steps.push_back(-1);
    } else if (c == ' ' || c == ',' || c == '\n' || c == '\r' || c == '\t') {
      continue;
    } else {
      throw std::invalid_argument(std::string("unexpected character '") + c + "' in step string");
    }
  }
  return FreezeSequence(std::move(steps));
}

std::string to_json(const FreezeSequence& seq) {
  nlohmann::json j;
  j["n"] = seq.size();
  auto& arr = j["steps"] = nlohmann::json::array();
  for (auto s : seq.steps()) arr.push_back(static_cast<int>(s));
  return j.dump();
}

FreezeSequence sequence_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  std::vector<std::int8_t> steps;
  for (const auto& v : j.at("steps")) steps.push_back(static_cast<std::int8_t>(v.get<int>()));
  if (j.contains("n") && j.at("n").get<std::size_t>() != steps.size()) {
    throw std::invalid_argument("sequence JSON: n does not match the number of steps");
  }
  return FreezeSequence(std::move(steps));
}

}  // namespace freezetree
