#include "dynrmt/orbit.hpp"

#include <stdexcept>
#include <string>

#include "dynrmt/error.hpp"
#include "dynrmt/rng.hpp"

namespace dynrmt {

namespace {
// Digit stream layout: digit n (1-based) lives in word (n-1)/64 at bit
// (n-1)%64. Words come from the counter generator, so digit n depends only
// on (seed, n): longer orbits extend shorter ones with the same seed.
constexpr std::uint64_t kOrbitStream = 0x6f72626974ULL;  // stream tag
constexpr std::uint64_t kFreshStream = 0x7461696cULL;
}  // namespace

BitOrbit::BitOrbit(std::uint64_t seed, std::int64_t length, ExecPolicy policy)
    : seed_(seed), length_(length) {
  if (length < 1) throw ConfigError("orbit length must be >= 1");
  const std::int64_t nwords = (length + 63) / 64;
  words_.resize(static_cast<std::size_t>(nwords));
  CounterRng rng(derive_key(seed, kOrbitStream));
  std::uint64_t* words = words_.data();
  parallel_for(policy, nwords, [&rng, words](std::int64_t w) {
    words[w] = rng.word(static_cast<std::uint64_t>(w));
  });
}

BitOrbit::BitOrbit(const std::vector<int>& digits) : seed_(0) {
  if (digits.empty()) throw ConfigError("orbit needs at least one digit");
  length_ = static_cast<std::int64_t>(digits.size());
  words_.assign(static_cast<std::size_t>((length_ + 63) / 64), 0);
  for (std::int64_t i = 0; i < length_; ++i) {
    if (digits[static_cast<std::size_t>(i)] != 0 &&
        digits[static_cast<std::size_t>(i)] != 1)
      throw ConfigError("digits must be 0 or 1");
    if (digits[static_cast<std::size_t>(i)])
      words_[static_cast<std::size_t>(i >> 6)] |= 1ULL << (i & 63);
  }
}

int BitOrbit::digit(std::int64_t n) const {
  if (n < 1 || n > length_)
    throw std::out_of_range("orbit digit index " + std::to_string(n) +
                            " outside [1," + std::to_string(length_) + "]");
  const std::int64_t i = n - 1;
  return static_cast<int>((words_[static_cast<std::size_t>(i >> 6)] >>
                           (i & 63)) &
                          1u);
}

double BitOrbit::shift_value(std::int64_t k, int precision) const {
  if (k < 0) throw std::out_of_range("negative orbit shift");
  if (precision < 1) throw std::out_of_range("precision must be >= 1");
  if (k + precision > length_)
    throw std::out_of_range("orbit too short: shift " + std::to_string(k) +
                            " + precision " + std::to_string(precision) +
                            " exceeds length " + std::to_string(length_));
  // Back-to-front accumulation: value = (value + d_{n+k}) / 2. Exact until
  // the final roundings, and the same loop shape as ResampledOrbit::value so
  // the W = P case agrees bit for bit.
  double v = 0.0;
  for (int n = precision; n >= 1; --n) {
    const std::int64_t i = k + n - 1;
    const int d = static_cast<int>(
        (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u);
    v = 0.5 * (v + d);
  }
  return v;
}

ResampledOrbit::ResampledOrbit(BitOrbit base, int window,
                               std::int64_t index_count, std::uint64_t seed)
    : base_(std::move(base)),
      window_(window),
      index_count_(index_count),
      seed_(seed) {
  if (window < 1) throw ConfigError("resampling window must be >= 1");
  if (index_count < 1) throw ConfigError("index count must be >= 1");
  if (index_count + window > base_.length())
    throw std::out_of_range(
        "orbit too short for resampling: need length >= " +
        std::to_string(index_count + window) + ", have " +
        std::to_string(base_.length()));
}

int ResampledOrbit::fresh_digit(std::int64_t k, std::int64_t n) const {
  if (k < 0 || k > index_count_)
    throw std::out_of_range("resample index out of range");
  if (n <= window_)
    throw std::out_of_range("digit " + std::to_string(n) +
                            " is inside the retained window");
  // One stream per index k; digits packed 64 to a word as in BitOrbit.
  const std::uint64_t key =
      derive_key(derive_key(seed_, kFreshStream), static_cast<std::uint64_t>(k));
  const std::int64_t i = n - window_ - 1;
  const std::uint64_t w =
      CounterRng(key).word(static_cast<std::uint64_t>(i >> 6));
  return static_cast<int>((w >> (i & 63)) & 1u);
}

double ResampledOrbit::value(std::int64_t k, int precision) const {
  if (k < 0 || k > index_count_)
    throw std::out_of_range("resample index out of range");
  if (precision < 1) throw std::out_of_range("precision must be >= 1");
  double v = 0.0;
  for (int n = precision; n >= 1; --n) {
    const int d = (n <= window_) ? base_.digit(k + n) : fresh_digit(k, n);
    v = 0.5 * (v + d);
  }
  return v;
}

}  // namespace dynrmt
