#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "nucheck/polynomial.hpp"

namespace nucheck {

/// Immutable expression tree for a function analytic on the unit disk.
///
/// Primitives are polynomials and kernel powers z -> (1 - conj(c) z)^(-p) with
/// |c| < 1, p > 0. Trees are closed under sum, product, scalar multiple,
/// composition, derivative and antiderivative-from-zero. Operations on purely
/// polynomial operands fold into a single polynomial, so polynomial inputs stay
/// coefficient-exact. Antiderivatives of non-polynomial trees are evaluated by
/// a 128-node Gauss-Legendre rule along the segment [0, z].
///
/// Text form (see `parse`):
///   poly:[re,im;re,im;...]      coefficients, ascending degree
///   kernel:c_re,c_im,p
///   z
///   (add A B) (mul A B) (scale re,im A) (compose A B) (deriv A) (integ A)
/// where (compose A B) is A(B(z)).
class AnalyticFunction {
 public:
  /// The zero function.
  AnalyticFunction();
  AnalyticFunction(Polynomial p);  // NOLINT(google-explicit-constructor)

  static AnalyticFunction constant(cplx c);
  static AnalyticFunction identity();
  static AnalyticFunction monomial(int degree, cplx c = 1.0);
  static AnalyticFunction kernel_power(cplx c, double p);

  static AnalyticFunction parse(std::string_view text);
  std::string to_string() const;

  /// Value at z; throws DomainError when |z| >= 1.
  cplx operator()(cplx z) const;
  /// Value without the domain check (hot loops that already guarantee |z| < 1).
  cplx evaluate(cplx z) const;

  AnalyticFunction derivative() const;
  AnalyticFunction antiderivative() const;
  AnalyticFunction compose(const AnalyticFunction& inner) const;

  bool is_polynomial() const;
  /// The polynomial, if this tree is one.
  const Polynomial* as_polynomial() const;
  bool is_zero() const;
  /// Single-term polynomial c z^n (|f| is then radial).
  bool is_monomial() const;

  friend AnalyticFunction operator+(const AnalyticFunction& a, const AnalyticFunction& b);
  friend AnalyticFunction operator-(const AnalyticFunction& a, const AnalyticFunction& b);
  friend AnalyticFunction operator*(const AnalyticFunction& a, const AnalyticFunction& b);
  friend AnalyticFunction operator*(cplx s, const AnalyticFunction& a);

  struct Node;

 private:
  explicit AnalyticFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Analytic self-map of the disk with a sampling certificate: max |phi| on
/// |z| = 0.999 over 4096 angles must not exceed 1 + 1e-9.
class SelfMap {
 public:
  static constexpr double kCertificateRadius = 0.999;
  static constexpr int kCertificateAngles = 4096;

  /// Throws DomainError when the certificate fails.
  explicit SelfMap(AnalyticFunction phi);
  static SelfMap identity();

  const AnalyticFunction& function() const { return phi_; }
  double sampled_max() const { return sampled_max_; }
  cplx operator()(cplx z) const { return phi_.evaluate(z); }

  bool is_identity() const;
  std::optional<cplx> constant_value() const;

 private:
  AnalyticFunction phi_;
  double sampled_max_ = 0.0;
};

}  // namespace nucheck
