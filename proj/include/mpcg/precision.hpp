#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mpcg {

/// Supported reduced floating-point formats, ordered narrow to wide.
enum class FormatTag : int { q52 = 0, bf16, fp16, tf32, fp32, fp64 };

inline constexpr std::array<FormatTag, 6> kAllFormats = {
    FormatTag::q52,  FormatTag::bf16, FormatTag::fp16,
    FormatTag::tf32, FormatTag::fp32, FormatTag::fp64};

const char* to_string(FormatTag tag);
FormatTag parse_format_tag(const std::string& name);

/// How emulated kernels apply rounding.
///
/// Strict rounds every elementary operation (each product, each partial
/// sum) into the target format. Fast rounds the operands, evaluates the
/// kernel in native double, and rounds only the final result.
enum class EmulationMode { Strict, Fast };

const char* to_string(EmulationMode mode);
EmulationMode parse_emulation_mode(const std::string& name);

/// A binary floating-point format emulated on top of native doubles.
///
/// `sig_bits` counts significand digits including the implicit leading
/// bit; `min_exp`/`max_exp` bound the exponent of normalized values.
/// Rounding constants are precomputed so round() stays branch-light.
struct PrecisionFormat {
  FormatTag tag;
  int sig_bits;
  int min_exp;
  int max_exp;

  double unit_roundoff;   // 2^-sig_bits
  double min_normal;      // 2^min_exp
  double max_value;       // 2^max_exp * (2 - 2^(1-sig_bits))
  double min_subnormal;   // 2^(min_exp - sig_bits + 1)

  // Rounding machinery over the double bit pattern.
  bool identity;          // fp64: rounding is a bit-exact no-op
  int shift;              // 53 - sig_bits
  std::uint64_t round_add;  // (1 << (shift-1)) - 1
  std::uint64_t keep_mask;  // ~((1 << shift) - 1)
  double sub_scale_up;    // 2^(sig_bits - 1 - min_exp)
  double sub_scale_down;  // 2^(min_exp - sig_bits + 1)
};

/// Returns the format parameters for a tag. Total over the enum.
const PrecisionFormat& format_of(FormatTag tag);

/// Rounds a native double to the format's grid, round-to-nearest
/// ties-to-even. Overflow beyond max_value maps to signed infinity,
/// gradual underflow through subnormals down to zero. NaN and infinity
/// pass through unchanged. Requires the default FP rounding mode.
inline double round_scalar(double x, const PrecisionFormat& f) {
  if (f.identity) return x;
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t abs_bits = bits & 0x7fffffffffffffffull;
  if (abs_bits >= 0x7ff0000000000000ull) return x;  // NaN or +-inf
  if (std::bit_cast<double>(abs_bits) < f.min_normal) {
    // Below the normal range: quantize onto the subnormal grid.
    return std::nearbyint(x * f.sub_scale_up) * f.sub_scale_down;
  }
  const std::uint64_t lsb = (bits >> f.shift) & 1u;
  const std::uint64_t rounded = (bits + f.round_add + lsb) & f.keep_mask;
  const double y = std::bit_cast<double>(rounded);
  if (std::bit_cast<double>(rounded & 0x7fffffffffffffffull) > f.max_value) {
    return std::bit_cast<double>((bits & 0x8000000000000000ull) |
                                 0x7ff0000000000000ull);
  }
  return y;
}

/// Elementwise round_scalar over a vector; length preserved.
std::vector<double> round_vector(const std::vector<double>& v,
                                 const PrecisionFormat& f);

}  // namespace mpcg
