#pragma once

#include <complex>
#include <vector>

namespace nucheck {

using cplx = std::complex<double>;

/// Dense complex polynomial, coefficients in ascending degree. Trailing exact
/// zeros are dropped, so the zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coefficients);

  static Polynomial constant(cplx c);
  static Polynomial monomial(int degree, cplx c = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  cplx coefficient(int k) const;

  cplx operator()(cplx z) const;

  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  /// (*this)(inner(z)).
  Polynomial compose(const Polynomial& inner) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(cplx s, const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<cplx> coeffs_;
};

}  // namespace nucheck
