#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nucheck {

/// Radial weight nu(r) on [0, 1). Values are stored and combined as logarithms
/// so that weights such as exp(-c/(1-r)) stay representable as r -> 1.
///
/// Supported kinds and their textual spec (see `parse`):
///   standard:<a>   (1 - r^2)^a, a > 0
///   exp:<c>        exp(-c / (1 - r)), c > 0
///   const          1
///   table:<path>   two-column samples (r, nu(r)), monotone cubic in log nu
///
/// A fifth kind, the dual weight omega(r) = (1 - r^2)^alpha / nu(r) of a normal
/// pair, is produced by `make_normal_pair` and is not required to be monotone.
class RadialWeight {
 public:
  enum class Kind { Standard, Exponential, Constant, Tabulated, PairDual };

  static RadialWeight standard(double exponent);
  static RadialWeight exponential(double c);
  static RadialWeight constant();
  /// Radii strictly increasing in [0, 1); values positive and non-increasing.
  static RadialWeight tabulated(std::vector<double> radii, std::vector<double> values,
                                std::string source = {});
  static RadialWeight load_table(const std::string& path);
  static RadialWeight pair_dual(const RadialWeight& nu, double alpha);

  /// Parses the weight grammar above; throws ParseError.
  static RadialWeight parse(std::string_view spec);
  /// Inverse of `parse` (pair duals render as `dual(<alpha>,<nu spec>)`).
  std::string spec() const;

  Kind kind() const;
  /// Exponent a for Standard, c for Exponential, alpha for PairDual, 0 otherwise.
  double parameter() const;

  double operator()(double r) const;
  double log_value(double r) const;

  /// Largest radius at which the weight can be evaluated (exclusive bound 1
  /// for closed-form kinds, the last sample for tables).
  double max_radius() const;
  bool closed_form() const { return kind() != Kind::Tabulated; }

  /// Sampled positivity and monotonicity check on `samples` radii in [0, max_radius];
  /// throws InvalidWeightError. PairDual weights are only checked for positivity.
  void validate(int samples = 10000) const;

  struct Impl;

 private:
  explicit RadialWeight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

enum class NormalityVerdict { Normal, FailsI, FailsII };

std::string to_string(NormalityVerdict v);

struct NormalityOptions {
  int n_max = 20;
  int k_max = 4;
  double tol = 1e-6;
};

struct NormalityReport {
  /// nu(1 - 2^-(n+1)) / nu(1 - 2^-n) for n = 1..n_max.
  std::vector<double> condition_i_ratios;
  double condition_i_inf = 0.0;
  /// Smallest beta in (0, 8] for which nu(r)/(1-r^2)^beta passes the sampled
  /// almost-increasing test; empty when no beta <= 8 passes.
  std::optional<double> beta_estimate;
  /// Smallest k <= k_max with limsup_n nu(1-2^-(n+k))/nu(1-2^-n) < 1 - tol.
  std::optional<int> condition_ii_k;
  /// Largest gamma in (0, 8] passing the almost-decreasing test.
  std::optional<double> gamma_estimate;
  NormalityVerdict verdict = NormalityVerdict::FailsI;
  /// False for tabulated weights: the verdict is derived from samples only.
  bool certified = true;
};

NormalityReport check_normality(const RadialWeight& w, const NormalityOptions& options = {});

/// {nu, omega} with nu(r) * omega(r) = (1 - r^2)^alpha.
struct NormalPair {
  RadialWeight nu;
  RadialWeight omega;
  double alpha = 0.0;
  double beta_estimate = 0.0;
};

/// Throws InvalidWeightError when nu is not normal and PreconditionError when
/// alpha <= beta - 1.
NormalPair make_normal_pair(const RadialWeight& nu, double alpha,
                            const NormalityOptions& options = {});

}  // namespace nucheck
