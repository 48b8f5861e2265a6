#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "freezetree/sequences.hpp"
#include "freezetree/stats.hpp"

using namespace freezetree;

namespace {

FreezeSequence seq_of(std::initializer_list<int> steps) {
  std::vector<std::int8_t> v;
  for (int s : steps) v.push_back(static_cast<std::int8_t>(s));
  return FreezeSequence(v);
}

// Every +-1 arrangement with `plus` plus steps and `minus` minus steps.
std::vector<std::vector<std::int8_t>> arrangements(int plus, int minus) {
  std::vector<std::int8_t> base(static_cast<std::size_t>(plus + minus), -1);
  std::fill_n(base.begin(), plus, std::int8_t{1});
  std::sort(base.begin(), base.end());
  std::vector<std::vector<std::int8_t>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

bool is_excursion(const std::vector<std::int8_t>& steps) {
  long s = 1;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    s += steps[k];
    if (s == 0) return k + 1 == steps.size();
  }
  return false;
}

}  // namespace

TEST(Walk, FigureSequence) {
  const auto w = walk(seq_of({1, -1, 1, 1, -1}));
  EXPECT_EQ(w.values, (std::vector<std::int64_t>{1, 2, 1, 2, 3, 2}));
  EXPECT_FALSE(w.tau.has_value());
  EXPECT_EQ(w.max_value, 3);
  EXPECT_TRUE(w.survives());
}

TEST(Walk, ImmediateExtinction) {
  const auto w = walk(seq_of({-1}));
  EXPECT_EQ(w.values, (std::vector<std::int64_t>{1, 0}));
  ASSERT_TRUE(w.tau.has_value());
  EXPECT_EQ(*w.tau, 1u);
}

TEST(Walk, AllPlus) {
  const auto w = walk(seq_of({1, 1, 1}));
  EXPECT_EQ(w.values, (std::vector<std::int64_t>{1, 2, 3, 4}));
  EXPECT_EQ(w.max_value, 4);
}

TEST(Walk, TauIsFirstZero) {
  const auto w = walk(seq_of({-1, 1, -1}));
  EXPECT_EQ(*w.tau, 1u);
  EXPECT_EQ(w.values.back(), 0);
}

TEST(Sequence, RejectsBadEntries) {
  EXPECT_THROW(FreezeSequence(std::vector<std::int8_t>{1, 0}), std::invalid_argument);
}

TEST(HSums, AllPlus) {
  const auto h = h_sums(seq_of({1, 1, 1}), 1, 3);
  EXPECT_NEAR(h.h, 1.0 / 2 + 1.0 / 3 + 1.0 / 4, 1e-15);
  EXPECT_NEAR(h.h_plus, h.h, 1e-15);
}

TEST(HSums, Mixed) {
  const auto h = h_sums(seq_of({1, -1}), 1, 2);
  EXPECT_DOUBLE_EQ(h.h, 1.5);
  EXPECT_DOUBLE_EQ(h.h_plus, 0.5);
}

TEST(HSums, SingleMinusStep) {
  const auto h = h_sums(seq_of({1, 1, -1}), 3, 3);
  EXPECT_DOUBLE_EQ(h.h_plus, 0.0);
  EXPECT_DOUBLE_EQ(h.h, 1.0 / 2);
}

TEST(HSums, RejectsZeroAndBadRange) {
  EXPECT_THROW(h_sums(seq_of({1, -1, -1, 1}), 1, 3), std::domain_error);
  EXPECT_NO_THROW(h_sums(seq_of({1, -1, -1, 1}), 1, 2));
  EXPECT_THROW(h_sums(seq_of({1, 1}), 2, 1), std::out_of_range);
  EXPECT_THROW(h_sums(seq_of({1, 1}), 0, 1), std::out_of_range);
  EXPECT_THROW(h_sums(seq_of({1, 1}), 1, 3), std::out_of_range);
}

TEST(Profile, SqrtTracksTarget) {
  const auto seq = profile_sequence(10000, {0.5, PowerShape{0.5}});
  const auto w = walk(seq);
  double worst = 0.0;
  for (std::size_t k = 0; k <= 10000; ++k) {
    worst = std::max(worst, std::abs(static_cast<double>(w[k]) - std::sqrt(static_cast<double>(k))));
  }
  EXPECT_LE(worst, 3.0);
}

TEST(Profile, AllPlus) {
  const auto seq = profile_sequence(4, {0.37, AllPlusShape{}});
  EXPECT_EQ(to_text(seq), "++++");
}

TEST(Profile, SubcriticalStaysPositive) {
  const auto w = walk(profile_sequence(100, {0.3, PowerShape{0.5}}));
  EXPECT_GE(*std::min_element(w.values.begin() + 1, w.values.end()), 1);
}

TEST(Profile, RejectsInfeasibleAndRandomShapes) {
  EXPECT_THROW(profile_sequence(100, {1.0, PowerShape{0.5}}), std::invalid_argument);
  EXPECT_THROW(profile_sequence(100, {0.5, IidShape{}}), std::invalid_argument);
  EXPECT_THROW(profile_sequence(100, {0.5, ExcursionShape{}}), std::invalid_argument);
  EXPECT_THROW(profile_sequence(0, {0.5, PowerShape{0.5}}), std::invalid_argument);
  EXPECT_NO_THROW(profile_sequence(100, {1.0, CustomShape{{0.0, 0.5}}}));
}

TEST(Profile, StaysPositiveAcrossSpecs) {
  const std::vector<ProfileSpec> specs = {
      {0.3, PowerShape{0.5}}, {0.5, PowerShape{0.25}}, {0.7, PowerShape{0.5}}, {0.5, PowerShape{0.9}},
      {0.5, CustomShape{{0.0, 1.0, 0.0}}}, {0.4, CustomShape{{0.0, 2.0, 1.0, 3.0, 0.0}}},
      {0.5, BoundedShape{3}}, {0.5, AllPlusShape{}}};
  for (const auto& spec : specs) {
    for (std::size_t n : {1u, 2u, 7u, 100u, 5000u}) {
      const auto w = walk(profile_sequence(n, spec));
      EXPECT_TRUE(w.survives()) << to_string(spec.shape) << " n=" << n;
    }
  }
}

TEST(Profile, LagBoundsTrackingError) {
  // Where the target climbs faster than the walk can, the error is the lag
  // plus the rounding/step slack.
  for (const ProfileSpec spec : {ProfileSpec{0.5, PowerShape{0.25}}, ProfileSpec{0.7, PowerShape{0.5}},
                                 ProfileSpec{0.3, PowerShape{0.5}}}) {
    const std::size_t n = 100000;
    const auto targets = profile_targets(n, spec);
    const auto w = walk(profile_sequence(n, spec));
    const auto lag = staircase_lag(targets);
    std::int64_t worst = 0;
    for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(w[k] - targets[k]));
    EXPECT_LE(worst, lag + 2) << to_string(spec.shape) << " alpha=" << spec.alpha;
  }
}

TEST(Profile, ParseShapes) {
  EXPECT_DOUBLE_EQ(std::get<PowerShape>(parse_profile_shape("power:0.25")).beta, 0.25);
  EXPECT_TRUE(std::holds_alternative<ExcursionShape>(parse_profile_shape("excursion")));
  EXPECT_TRUE(std::holds_alternative<IidShape>(parse_profile_shape("iid")));
  EXPECT_TRUE(std::holds_alternative<AllPlusShape>(parse_profile_shape("all_plus")));
  EXPECT_EQ(std::get<BoundedShape>(parse_profile_shape("bounded:3")).max_active, 3);
  EXPECT_EQ(std::get<CustomShape>(parse_profile_shape("custom:0,0.5,1")).values,
            (std::vector<double>{0.0, 0.5, 1.0}));
  for (const char* bad : {"power", "power:1.5", "power:x", "bounded:1", "iid:3", "nope", "custom:",
                          "custom:/does/not/exist"}) {
    EXPECT_THROW(parse_profile_shape(bad), std::invalid_argument) << bad;
  }
}

TEST(Iid, DeterministicUnderSeed) {
  Rng a = make_rng(11);
  Rng b = make_rng(11);
  Rng c = make_rng(12);
  const auto sa = iid_sequence(1000, a);
  EXPECT_EQ(sa, iid_sequence(1000, b));
  EXPECT_NE(sa, iid_sequence(1000, c));
}

TEST(Iid, PlusFractionConcentrates) {
  int inside = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng = make_rng(1000 + s);
    const auto seq = iid_sequence(100000, rng);
    const auto plus = std::count(seq.steps().begin(), seq.steps().end(), 1);
    const double frac = static_cast<double>(plus) / 100000.0;
    inside += (frac >= 0.49 && frac <= 0.51) ? 1 : 0;
  }
  EXPECT_GE(inside, 99);
}

TEST(Iid, MakeSequenceRetriesUntilSurvival) {
  Rng rng = make_rng(5);
  for (int r = 0; r < 20; ++r) {
    EXPECT_TRUE(walk(make_sequence(200, {0.5, IidShape{}}, rng)).survives());
  }
}

TEST(Excursion, CycleLemmaHasOneValidRotation) {
  for (int n = 1; n <= 5; ++n) {
    for (const auto& arr : arrangements(n, n + 1)) {
      int valid = 0;
      auto rot = arr;
      for (std::size_t r = 0; r < rot.size(); ++r) {
        valid += is_excursion(rot) ? 1 : 0;
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      }
      EXPECT_EQ(valid, 1);
    }
  }
}

TEST(Excursion, SmallestCase) {
  Rng rng = make_rng(3);
  for (int r = 0; r < 20; ++r) EXPECT_EQ(to_text(excursion_sequence(1, rng)), "+--");
}

TEST(Excursion, DefiningProperty) {
  Rng rng = make_rng(4);
  for (std::size_t n : {1u, 2u, 10u, 500u}) {
    for (int r = 0; r < 20; ++r) {
      const auto seq = excursion_sequence(n, rng);
      ASSERT_EQ(seq.size(), 2 * n + 1);
      const auto w = walk(seq);
      ASSERT_TRUE(w.tau.has_value());
      EXPECT_EQ(*w.tau, 2 * n + 1);
    }
  }
}

TEST(Excursion, UniformOverShapes) {
  const std::vector<std::size_t> catalan = {1, 1, 2, 5, 14, 42};
  for (int n = 2; n <= 5; ++n) {
    std::map<std::vector<std::int8_t>, std::size_t> index;
    for (const auto& arr : arrangements(n, n + 1)) {
      if (is_excursion(arr)) index.emplace(arr, index.size());
    }
    ASSERT_EQ(index.size(), catalan[static_cast<std::size_t>(n)]);
    const std::size_t samples = 400 * index.size();
    std::vector<double> counts(index.size(), 0.0);
    Rng rng = make_rng(100 + static_cast<std::uint64_t>(n));
    for (std::size_t s = 0; s < samples; ++s) {
      const auto seq = excursion_sequence(static_cast<std::size_t>(n), rng);
      std::vector<std::int8_t> v(seq.steps().begin(), seq.steps().end());
      counts.at(index.at(v)) += 1.0;
    }
    const std::vector<double> probs(index.size(), 1.0 / static_cast<double>(index.size()));
    EXPECT_GT(chi_square_gof(counts, probs).p_value, 0.001) << "n=" << n;
  }
}

TEST(Tightness, ZeroDelta) {
  EXPECT_DOUBLE_EQ(tightness_diagnostic(profile_sequence(1000, {0.5, PowerShape{0.5}}), 0.5, 0.0), 0.0);
}

TEST(Tightness, AllPlusIsHarmonic) {
  const std::size_t n = 1000;
  double expected = 0.0;
  for (std::size_t i = 1; i <= n - 1; ++i) expected += 1.0 / static_cast<double>(i + 1);
  EXPECT_NEAR(tightness_diagnostic(all_plus_sequence(n), 1.0, 1.0), expected, 1e-12);
}

TEST(Tightness, CriticalSqrtProfileIsOrderDelta) {
  // S_i ~ sqrt(i): the indicator keeps i <= delta^2 n and the sum is about
  // 2 delta sqrt(n), so the diagnostic settles near 2 delta rather than
  // shrinking with n. It does go to 0 with delta, which is what tightness asks.
  for (double delta : {0.2, 0.05}) {
    for (std::size_t n : {1000u, 10000u, 100000u}) {
      const double d = tightness_diagnostic(profile_sequence(n, {0.5, PowerShape{0.5}}), 0.5, delta);
      EXPECT_NEAR(d, 2.0 * delta, 0.5 * delta + 2.0 / std::sqrt(static_cast<double>(n))) << n;
    }
  }
}

TEST(Tightness, RejectsDeadWalk) {
  EXPECT_THROW(tightness_diagnostic(seq_of({1, -1, -1}), 0.5, 1.0), std::domain_error);
}

TEST(HarmonicAsymptotics, PowerProfilesAtOneMillion) {
  const std::size_t n = 1000000;
  for (double alpha : {0.3, 0.5}) {
    for (double beta : {0.25, 0.5}) {
      const auto seq = profile_sequence(n, {alpha, PowerShape{beta}});
      const auto h = h_sums(seq, 1, n);
      const double scale = std::pow(static_cast<double>(n), alpha - 1.0);
      const double limit = 1.0 / (1.0 - beta);
      EXPECT_NEAR(scale * h.h / limit, 1.0, 0.05) << alpha << " " << beta;
      EXPECT_NEAR(2.0 * scale * h.h_plus / limit, 1.0, 0.05) << alpha << " " << beta;
    }
  }
}

TEST(HarmonicAsymptotics, SupercriticalConvergesSlowly) {
  // For alpha > 1/2 the staircase lags near t = 0 where every step is a plus
  // step; that stretch adds about ln(n) / n^{1-alpha}, so only the trend is checked.
  const double alpha = 0.7;
  for (double beta : {0.25, 0.5}) {
    const double limit = 1.0 / (1.0 - beta);
    double prev_h = 1e9;
    double prev_plus = 1e9;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
      const auto seq = profile_sequence(n, {alpha, PowerShape{beta}});
      const auto h = h_sums(seq, 1, n);
      const double scale = std::pow(static_cast<double>(n), alpha - 1.0);
      const double err_h = std::abs(scale * h.h / limit - 1.0);
      const double err_plus = std::abs(2.0 * scale * h.h_plus / limit - 1.0);
      EXPECT_LT(err_h, prev_h) << n;
      EXPECT_LT(err_plus, prev_plus) << n;
      prev_h = err_h;
      prev_plus = err_plus;
    }
    EXPECT_LT(prev_h, 0.1);
    EXPECT_LT(prev_plus, 0.2);
  }
}

TEST(HarmonicAsymptotics, PlusHalfDiscrepancyShrinks) {
  // max_{a<=b} |h_plus(a,b) - h(a,b)/2| / n^{1-alpha} through prefix sums.
  auto discrepancy = [](std::size_t n, double alpha) {
    const auto seq = profile_sequence(n, {alpha, PowerShape{0.5}});
    const auto w = walk(seq);
    double d = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      d += (seq.is_plus(i) ? 1.0 : 0.0) / static_cast<double>(w[i]) - 0.5 / static_cast<double>(w[i]);
      worst = std::max({worst, d - lo, hi - d});
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return worst / std::pow(static_cast<double>(n), 1.0 - alpha);
  };
  for (double alpha : {0.3, 0.5, 0.7}) {
    const double a = discrepancy(1000, alpha);
    const double b = discrepancy(10000, alpha);
    const double c = discrepancy(100000, alpha);
    EXPECT_GT(a, b) << alpha;
    EXPECT_GT(b, c) << alpha;
  }
}

TEST(Serialization, TextRoundTrip) {
  const auto seq = seq_of({1, -1, 1, 1, -1});
  EXPECT_EQ(to_text(seq), "+-++-");
  EXPECT_EQ(sequence_from_text("+-++-"), seq);
  EXPECT_EQ(sequence_from_text("+ - +,+\n-"), seq);
  EXPECT_THROW(sequence_from_text("+x"), std::invalid_argument);
}

TEST(Serialization, JsonRoundTrip) {
  const auto seq = seq_of({1, -1, 1, 1, -1});
  EXPECT_EQ(to_json(seq), R"({"n":5,"steps":[1,-1,1,1,-1]})");
  EXPECT_EQ(sequence_from_json(to_json(seq)), seq);
  EXPECT_THROW(sequence_from_json(R"({"n":2,"steps":[1]})"), std::invalid_argument);
  EXPECT_THROW(sequence_from_json(R"({"steps":[1,2]})"), std::invalid_argument);
}
