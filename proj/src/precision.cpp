#include "mpcg/precision.hpp"

#include <stdexcept>

#include "mpcg/kernels.hpp"

namespace mpcg {

namespace {

constexpr PrecisionFormat make_format(FormatTag tag, int t, int e_min,
                                      int e_max) {
  PrecisionFormat f{};
  f.tag = tag;
  f.sig_bits = t;
  f.min_exp = e_min;
  f.max_exp = e_max;
  f.unit_roundoff = 0x1.0p0 / double(1ull << t);
  f.min_normal = 0.0;
  f.max_value = 0.0;
  f.min_subnormal = 0.0;
  f.identity = (t == 53 && e_min == -1022 && e_max == 1023);
  f.shift = 53 - t;
  f.round_add = f.shift > 0 ? (1ull << (f.shift - 1)) - 1 : 0;
  f.keep_mask = f.shift > 0 ? ~((1ull << f.shift) - 1) : ~0ull;
  return f;
}

PrecisionFormat finish(PrecisionFormat f) {
  f.min_normal = std::ldexp(1.0, f.min_exp);
  f.max_value = std::ldexp(2.0 - std::ldexp(1.0, 1 - f.sig_bits), f.max_exp);
  f.min_subnormal = std::ldexp(1.0, f.min_exp - f.sig_bits + 1);
  f.sub_scale_up = std::ldexp(1.0, f.sig_bits - 1 - f.min_exp);
  f.sub_scale_down = f.min_subnormal;
  return f;
}

// q52 is the 8-bit quarter-precision format with the fp16 exponent range
// and a 3-bit significand; tf32 keeps the fp16 significand width on the
// fp32 exponent range.
const std::array<PrecisionFormat, 6> kFormats = {
    finish(make_format(FormatTag::q52, 3, -14, 15)),
    finish(make_format(FormatTag::bf16, 8, -126, 127)),
    finish(make_format(FormatTag::fp16, 11, -14, 15)),
    finish(make_format(FormatTag::tf32, 11, -126, 127)),
    finish(make_format(FormatTag::fp32, 24, -126, 127)),
    finish(make_format(FormatTag::fp64, 53, -1022, 1023)),
};

}  // namespace

const PrecisionFormat& format_of(FormatTag tag) {
  return kFormats[static_cast<int>(tag)];
}

const char* to_string(FormatTag tag) {
  switch (tag) {
    case FormatTag::q52: return "q52";
    case FormatTag::bf16: return "bf16";
    case FormatTag::fp16: return "fp16";
    case FormatTag::tf32: return "tf32";
    case FormatTag::fp32: return "fp32";
    case FormatTag::fp64: return "fp64";
  }
  return "?";
}

FormatTag parse_format_tag(const std::string& name) {
  for (FormatTag t : kAllFormats)
    if (name == to_string(t)) return t;
  throw std::invalid_argument("unknown precision format: " + name);
}

const char* to_string(EmulationMode mode) {
  return mode == EmulationMode::Strict ? "strict" : "fast";
}

EmulationMode parse_emulation_mode(const std::string& name) {
  if (name == "strict") return EmulationMode::Strict;
  if (name == "fast") return EmulationMode::Fast;
  throw std::invalid_argument("unknown emulation mode: " + name);
}

std::vector<double> round_vector(const std::vector<double>& v,
                                 const PrecisionFormat& f) {
  std::vector<double> out(v.size());
  kernels::round_array(v.data(), out.data(), v.size(), f);
  return out;
}

}  // namespace mpcg
