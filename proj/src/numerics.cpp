#include "levtest/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levtest {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 5000;

[[noreturn]] void domain(const char* what) { throw std::domain_error(what); }

// Stirling series for ln Gamma, valid to double precision for x >= 15.
double ln_gamma_stirling(double x) {
  static constexpr double kCoef[] = {
      1.0 / 12.0,          -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0, -691.0 / 360360.0,    1.0 / 156.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kCoef) {
    series += c * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double ln_beta(double a, double b) { return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b); }

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

// I_x(a,b) with the complement xc = 1 - x supplied separately so callers that
// know it exactly avoid the rounding in 1 - x.
double inc_beta(double a, double b, double x, double xc) {
  if (x <= 0.0) return 0.0;
  if (xc <= 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(xc) - ln_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, xc) / b;
}

double gamma_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double ap = s;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + s * std::log(x) - ln_gamma(s));
    }
  }
  throw std::runtime_error("reg_inc_gamma: series did not converge");
}

// Q(s,x) by continued fraction, for x >= s + 1.
double gamma_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) {
      return std::exp(-x + s * std::log(x) - ln_gamma(s)) * h;
    }
  }
  throw std::runtime_error("reg_inc_gamma: continued fraction did not converge");
}

void check_gamma_args(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) domain("reg_inc_gamma: shape must be positive");
  if (!(x >= 0.0)) domain("reg_inc_gamma: x must be nonnegative");
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) domain("ln_gamma: argument must be positive");
  if (std::isinf(x)) return x;
  if (x >= 15.0) return ln_gamma_stirling(x);
  // Shift up into the Stirling range: ln G(x) = ln G(x+m) - ln(x (x+1) ... (x+m-1)).
  double product = 1.0;
  double shifted = x;
  while (shifted < 15.0) {
    product *= shifted;
    shifted += 1.0;
  }
  return ln_gamma_stirling(shifted) - std::log(product);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) domain("reg_inc_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) domain("reg_inc_beta: x must lie in [0, 1]");
  return inc_beta(a, b, x, 1.0 - x);
}

double reg_inc_gamma_lower(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return gamma_series(s, x);
  return 1.0 - gamma_cf(s, x);
}

double reg_inc_gamma_upper(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return 1.0 - gamma_series(s, x);
  return gamma_cf(s, x);
}

double f_sf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) domain("f_sf: degrees of freedom must be positive");
  if (!(x >= 0.0)) domain("f_sf: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  // P(F > x) = I_y(d2/2, d1/2) with y = d2 / (d2 + d1 x).
  const double denom = d2 + d1 * x;
  const double y = d2 / denom;
  const double yc = d1 * x / denom;
  return inc_beta(d2 / 2.0, d1 / 2.0, y, yc);
}

double chi_sq_sf(double x, double k) {
  if (!(k > 0.0)) domain("chi_sq_sf: degrees of freedom must be positive");
  if (!(x >= 0.0)) domain("chi_sq_sf: x must be nonnegative");
  return reg_inc_gamma_upper(k / 2.0, x / 2.0);
}

double std_normal_sf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// Distributions

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Normal: return "normal";
    case Family::Exponential: return "exponential";
    case Family::StudentT: return "t";
    case Family::ChiSquared: return "chisq";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "normal") return Family::Normal;
  if (name == "exponential" || name == "exp") return Family::Exponential;
  if (name == "t" || name == "student-t" || name == "studentt") return Family::StudentT;
  if (name == "chisq" || name == "chi-squared" || name == "chisquared") return Family::ChiSquared;
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
  if (!std::isfinite(location)) throw std::invalid_argument("distribution location must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("distribution scale must be positive");
  }
  const bool needs_shape = family == Family::StudentT || family == Family::ChiSquared;
  if (needs_shape && (!(shape > 0.0) || !std::isfinite(shape))) {
    throw std::invalid_argument("degrees of freedom must be positive");
  }
}

// ---------------------------------------------------------------------------
// Philox4x32-10

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;

Block philox4x32_10(Block ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

void RngStream::refill() {
  const Block ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                     static_cast<std::uint32_t>(stream_id_),
                     static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed_),
                                            static_cast<std::uint32_t>(master_seed_ >> 32)};
  const Block out = philox4x32_10(ctr, key);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (buffered_ == 0) refill();
  return buffer_[2 - buffered_--];
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Box-Muller; both outputs are used.
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) domain("gamma: shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

double RngStream::student_t(double df) {
  const double z = normal();
  return z / std::sqrt(chi_squared(df) / df);
}

double draw_standard(const DistributionSpec& dist, RngStream& stream) {
  switch (dist.family) {
    case Family::Normal: return stream.normal();
    case Family::Exponential: return stream.exponential();
    case Family::StudentT: return stream.student_t(dist.shape);
    case Family::ChiSquared: return stream.chi_squared(dist.shape);
  }
  throw std::invalid_argument("unknown distribution family");
}

std::vector<double> sample(const DistributionSpec& dist, std::size_t n, RngStream& stream) {
  dist.validate();
  if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(dist.location + dist.scale * draw_standard(dist, stream));
  }
  return out;
}

}  // namespace levtest
