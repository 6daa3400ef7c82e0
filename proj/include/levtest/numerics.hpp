#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace levtest {

// Special functions. Arguments outside the documented domain throw
// std::domain_error.

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(s, x).
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed without
/// forming the difference when Q is the small tail.
double reg_inc_gamma_upper(double s, double x);

/// P(F > x) for F ~ F(d1, d2).
double f_sf(double x, double d1, double d2);

/// P(X > x) for X ~ chi-squared with k degrees of freedom.
double chi_sq_sf(double x, double k);

/// P(Z > x) for a standard normal Z.
double std_normal_sf(double x);

enum class Family { Normal, Exponential, StudentT, ChiSquared };

std::string_view to_string(Family family);
/// Accepts "normal", "exponential", "t"/"student-t", "chisq"/"chi-squared".
Family parse_family(std::string_view name);

/// A location-scale family member. For Exponential the scale is the mean;
/// for StudentT and ChiSquared `shape` holds the degrees of freedom.
struct DistributionSpec {
  Family family = Family::Normal;
  double location = 0.0;
  double scale = 1.0;
  double shape = 1.0;

  /// Throws std::invalid_argument when scale <= 0, a needed shape <= 0, or a
  /// parameter is not finite.
  void validate() const;
};

/// Counter-based random stream (Philox4x32-10). The key is the master seed
/// and the stream id occupies the upper half of the 128-bit counter, so any
/// two (master_seed, stream_id) pairs index disjoint sequences. Copying a
/// stream copies its position.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Standard exponential (mean 1).
  double exponential();
  /// Gamma with the given shape and unit scale (Marsaglia-Tsang).
  double gamma(double shape);
  double chi_squared(double df);
  double student_t(double df);

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Draws n variates from `dist`, advancing `stream`.
std::vector<double> sample(const DistributionSpec& dist, std::size_t n, RngStream& stream);

/// Single standardized draw (location 0, scale 1) from the family.
double draw_standard(const DistributionSpec& dist, RngStream& stream);

}  // namespace levtest
