#include "fsnet/ratio.hpp"

#include <charconv>
#include <numeric>

#include "fsnet/error.hpp"

namespace fsnet {

namespace {

__extension__ using wide_int = __int128;

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorCode::ParseError, "bad rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidRatio, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  num_ = num / (g == 0 ? 1 : g);
  den_ = den / (g == 0 ? 1 : g);
}

Ratio Ratio::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Ratio(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12) {
      throw Error(ErrorCode::ParseError, "bad rational '" + std::string(text) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto w = whole.empty() ? 0 : parse_int(whole, text);
    return Ratio(w * scale + parse_int(frac, text), scale);
  }
  return Ratio(parse_int(text, text));
}

std::string Ratio::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  std::int64_t d = den_;
  int digits = 0;
  while (d % 10 == 0) {
    d /= 10;
    ++digits;
  }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  auto frac = std::to_string(num_ % den_);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  return std::to_string(num_ / den_) + "." + frac;
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  const wide_int lhs = static_cast<wide_int>(a.num_) * b.den_;
  const wide_int rhs = static_cast<wide_int>(b.num_) * a.den_;
  return lhs <=> rhs;
}

Ratio operator*(const Ratio& a, const Ratio& b) {
  const auto g1 = std::gcd(a.num_, b.den_);
  const auto g2 = std::gcd(b.num_, a.den_);
  return Ratio((a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1)),
               (a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1)));
}

Ratio operator/(const Ratio& a, const Ratio& b) {
  if (b.num_ == 0) throw Error(ErrorCode::InvalidRatio, "division by zero");
  return a * Ratio(b.den_, b.num_);
}

std::int64_t floor_div(std::int64_t value, const Ratio& r) {
  if (r.num() <= 0) throw Error(ErrorCode::InvalidRatio, "non-positive divisor");
  const wide_int scaled = static_cast<wide_int>(value) * r.den();
  return static_cast<std::int64_t>(scaled / r.num());
}

}  // namespace fsnet
