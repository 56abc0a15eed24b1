#pragma once

#include <cstdint>
#include <vector>

#include "dynrmt/parallel.hpp"

namespace dynrmt {

/// Exact binary-digit representation of a point x in [0,1) together with its
/// forward orbit under the doubling map, which acts as a left shift on the
/// digit sequence. Digits are i.i.d. fair bits drawn from a counter-based
/// generator, so the same seed always reproduces the same orbit and a longer
/// orbit extends a shorter one with the same seed (prefix stability).
///
/// Iterating x -> 2x mod 1 in floating point is not an option here: it runs
/// out of mantissa after ~53 steps while the matrices need orbits of length
/// 2N^2. All dynamics stay on the stored bit sequence; conversion to a double
/// happens only at evaluation time, truncated to a precision window.
class BitOrbit {
 public:
  BitOrbit(std::uint64_t seed, std::int64_t length,
           ExecPolicy policy = ExecPolicy::parallel);

  /// Orbit with prescribed digits (controlled experiments; seed reads as 0).
  explicit BitOrbit(const std::vector<int>& digits);

  std::int64_t length() const { return length_; }
  std::uint64_t seed() const { return seed_; }

  /// Digit d_n, 1-based as in the expansion x = sum d_n 2^{-n}.
  int digit(std::int64_t n) const;

  /// Value of T^k x truncated to `precision` digits:
  ///   sum_{n=1..P} d_{n+k} 2^{-n},   truncation error < 2^{-P}.
  /// Requires k >= 0 and k + precision <= length().
  double shift_value(std::int64_t k, int precision) const;

 private:
  std::uint64_t seed_;
  std::int64_t length_;
  std::vector<std::uint64_t> words_;
};

/// The resampled orbit y_k: the first `window` digits of T^k x are kept, all
/// deeper digits are replaced by fresh fair bits drawn independently per k.
/// Hence |y_k - T^k x| <= 2^{-window}, and y_k, y_{k'} are independent beyond
/// the retained window. Fresh digits are generated on the fly from a
/// counter-based stream keyed by (seed, k), so the object stays small and
/// is safe to share read-only across threads.
class ResampledOrbit {
 public:
  ResampledOrbit(BitOrbit base, int window, std::int64_t index_count,
                 std::uint64_t seed);

  const BitOrbit& base() const { return base_; }
  int window() const { return window_; }
  std::int64_t index_count() const { return index_count_; }
  std::uint64_t seed() const { return seed_; }

  /// Fresh digit b^k_n for n > window(); digits with n <= window() come from
  /// the base orbit and are not part of the fresh stream.
  int fresh_digit(std::int64_t k, std::int64_t n) const;

  /// y_k truncated to `precision` digits. Requires 0 <= k <= index_count().
  /// When window() >= precision this is bit-identical to
  /// base().shift_value(k, precision).
  double value(std::int64_t k, int precision) const;

 private:
  BitOrbit base_;
  int window_;
  std::int64_t index_count_;
  std::uint64_t seed_;
};

}  // namespace dynrmt
