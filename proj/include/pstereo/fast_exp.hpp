#pragma once

#include <cstdint>
#include <cstring>

namespace pstereo {

// Arguments below this value return exactly 0.0. exp(-30) ~ 9.4e-14 is far
// below anything the probability weighting can distinguish.
inline constexpr double kFastExpCutoff = -30.0;

// Approximate exp(x) by writing a scaled argument straight into the exponent
// field of an IEEE-754 double (Schraudolph's method, double-precision layout).
// The mantissa then acts as a linear interpolation between powers of two.
// Maximum relative error is just under 4% on [kFastExpCutoff, 0].
inline double fast_exp(double x) {
  if (x < kFastExpCutoff) return 0.0;
  // 2^52 / ln 2 scales x so that one unit of x shifts the exponent field by
  // 1/ln2; the (1023 << 52) term is the IEEE bias and the (60801 << 32) term
  // is the classic correction that balances the interpolation error.
  constexpr double scale = 4503599627370496.0 / 0.6931471805599453;
  constexpr std::int64_t bias =
      (std::int64_t(1023) << 52) - (std::int64_t(60801) << 32);
  const std::int64_t bits = static_cast<std::int64_t>(x * scale) + bias;
  double out;
  std::memcpy(&out, &bits, sizeof out);
  return out;
}

}  // namespace pstereo
