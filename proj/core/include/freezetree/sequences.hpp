#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "freezetree/random.hpp"

namespace freezetree {

/// The driving +1/-1 sequence. Step indices are 1-based to match the usual
/// reading order: `step(1)` is the first event.
class FreezeSequence {
 public:
  FreezeSequence() = default;
  explicit FreezeSequence(std::vector<std::int8_t> steps);

  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  int step(std::size_t i) const { return steps_.at(i - 1); }
  bool is_plus(std::size_t i) const { return step(i) > 0; }
  std::span<const std::int8_t> steps() const noexcept { return steps_; }

  friend bool operator==(const FreezeSequence&, const FreezeSequence&) = default;

 private:
  std::vector<std::int8_t> steps_;
};

/// S_0..S_n with S_0 = 1, plus the first zero and the running maximum.
///
/// Also caches prefix sums of 1/S_i (all steps and plus steps only) so that
/// harmonic window sums are O(1). Entries past the first zero are +inf.
struct Walk {
  std::vector<std::int64_t> values;
  std::optional<std::size_t> tau;
  std::int64_t max_value = 1;

  // inv_prefix[i] = sum_{j < i} 1/S_j, so a window [a, b] is
  // inv_prefix[b + 1] - inv_prefix[a]. Same layout for the plus-only sums.
  std::vector<double> inv_prefix;
  std::vector<double> inv_plus_prefix;

  std::size_t n() const noexcept { return values.size() - 1; }
  std::int64_t operator[](std::size_t k) const { return values[k]; }
  /// True when the walk stays >= 1 on [1, n], i.e. the construction never stalls.
  bool survives() const noexcept { return !tau.has_value(); }
};

Walk walk(const FreezeSequence& seq);

struct HarmonicSums {
  double h = 0.0;       ///< sum of 1/S_i over the window
  double h_plus = 0.0;  ///< same, restricted to plus steps
};

/// Sums of 1/S_i for i in [a, b], 1 <= a <= b <= n.
/// Throws std::domain_error if the window reaches a zero of the walk.
HarmonicSums h_sums(const Walk& w, const FreezeSequence& seq, std::size_t a,
                    std::size_t b);
HarmonicSums h_sums(const FreezeSequence& seq, std::size_t a, std::size_t b);

// Profile shapes accepted by the generators and the CLI.
struct PowerShape {
  double beta = 0.5;
};
struct ExcursionShape {};
struct IidShape {};
struct AllPlusShape {};
/// Zig-zag between 1 and `max_active`; the walk never exceeds the bound.
struct BoundedShape {
  int max_active = 2;
};
/// f tabulated on a uniform grid of [0, 1], linearly interpolated.
struct CustomShape {
  std::vector<double> values;
};

using ProfileShape = std::variant<PowerShape, ExcursionShape, IidShape,
                                  AllPlusShape, BoundedShape, CustomShape>;

struct ProfileSpec {
  double alpha = 0.5;
  ProfileShape shape = PowerShape{};
};

/// "power:0.5", "excursion", "iid", "all_plus", "bounded:3",
/// "custom:v0,v1,...". Throws std::invalid_argument on anything else.
ProfileShape parse_profile_shape(std::string_view text);
std::string to_string(const ProfileShape& shape);

/// Value of f(t) for deterministic shapes (power, custom).
double profile_value(const ProfileShape& shape, double t);

/// Deterministic staircase tracking round(max(1, n^alpha f(k/n))).
///
/// At step k the walk goes up when S_{k-1} is below the target (or equals 1)
/// and down otherwise, so after a plus step S sits on the target and after a
/// minus step one below it. Where the target climbs faster than one unit per
/// step the walk lags; the lag is bounded by `staircase_lag`.
///
/// Supports power, custom, all_plus and bounded shapes. Throws
/// std::invalid_argument for random shapes or an infeasible target
/// (alpha >= 1 with f(1) n^alpha >= n).
FreezeSequence profile_sequence(std::size_t n, const ProfileSpec& spec);

/// Targets round(max(1, n^alpha f(k/n))) for k = 0..n.
std::vector<std::int64_t> profile_targets(std::size_t n, const ProfileSpec& spec);

/// max_k max(0, target_k - (k + 1)): how far the target outruns an all-plus walk.
std::int64_t staircase_lag(std::span<const std::int64_t> targets);

FreezeSequence iid_sequence(std::size_t n, Rng& rng);

/// Uniform excursion of length 2n+1: n plus steps, n+1 minus steps, the walk
/// from 1 stays >= 1 before the last step and hits 0 at time 2n+1.
/// Sampled exactly with the cycle lemma.
FreezeSequence excursion_sequence(std::size_t n, Rng& rng);

FreezeSequence bounded_sequence(std::size_t n, int max_active);

FreezeSequence all_plus_sequence(std::size_t n);

/// Builds the sequence for any profile. Random shapes draw from `rng`; iid
/// sequences are redrawn until the walk survives to n (up to `max_attempts`).
FreezeSequence make_sequence(std::size_t n, const ProfileSpec& spec, Rng& rng,
                             int max_attempts = 1000);

/// (1 / n^{1-alpha}) * sum_{i=1}^n (1/S_i) 1{S_i <= delta n^alpha}.
double tightness_diagnostic(const Walk& w, double alpha, double delta);
double tightness_diagnostic(const FreezeSequence& seq, double alpha, double delta);

// Serialization: compact "+-+" text and {"n": .., "steps": [..]} JSON.
std::string to_text(const FreezeSequence& seq);
FreezeSequence sequence_from_text(std::string_view text);
std::string to_json(const FreezeSequence& seq);
FreezeSequence sequence_from_json(std::string_view json);

}  // namespace freezetree
