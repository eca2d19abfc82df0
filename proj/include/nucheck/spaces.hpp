#pragma once

#include <vector>

#include "nucheck/analytic.hpp"
#include "nucheck/quad.hpp"
#include "nucheck/sup_solver.hpp"
#include "nucheck/weights.hpp"

namespace nucheck {

/// Weighted Bergman kernel z -> (alpha+1) / (1 - conj(zeta) z)^(alpha+2), so
/// that pairing(f, bergman_kernel(zeta, alpha), alpha) = f(zeta).
AnalyticFunction bergman_kernel(cplx zeta, double alpha);

/// Rule used by `pairing` when none is given: 96 x 256 nodes on |z| <= 0.875.
DiskQuadrature default_pairing_quadrature();

/// Integral of f(z) conj(g(z)) (1 - |z|^2)^alpha dA(z). The rule covers
/// |z| <= quad.rho_outer; the remaining annulus is closed with a Gauss-Jacobi
/// rule carrying (1 - |z|^2)^alpha, which is exact whenever the angular mean of
/// f conj(g) is a polynomial in |z|^2 of degree < 64 (e.g. f polynomial).
cplx pairing(const AnalyticFunction& f, const AnalyticFunction& g, double alpha,
             const DiskQuadrature& quad = default_pairing_quadrature());

/// Integral of |f| omega dA. The rule covers |z| <= quad.rho_outer, dyadic
/// annuli continue toward the boundary and a geometric tail closes the sum.
/// Throws DivergenceError when the annulus contributions stop decaying.
double a1_norm(const AnalyticFunction& f, const RadialWeight& omega, const DiskQuadrature& quad);

/// f(z) = (1 - |w|^2)^(beta+1) / (nu(w) (1 - conj(w) z)^(beta+1)) with w = phi(zeta);
/// f(w) = 1 / nu(w).
AnalyticFunction test_function(cplx zeta, const SelfMap& phi, const RadialWeight& nu, double beta);

/// sup nu(|z|) |f(z)|. Single-term polynomials use the radial solver.
SupResult weighted_sup_norm(const AnalyticFunction& f, const RadialWeight& nu,
                            const SupSolverConfig& solver = {});

/// |f(0)| + sup nu(|z|) |f'(z)|; argmax and flag refer to the supremum part.
SupResult bloch_norm(const AnalyticFunction& f, const RadialWeight& nu,
                     const SupSolverConfig& solver = {});

enum class LittleSpace { H0, Bloch0 };
enum class Membership { Member, NonMember, Inconclusive };

std::string to_string(Membership m);

struct MembershipResult {
  Membership verdict = Membership::Inconclusive;
  /// Last circle maximum for NonMember.
  double limit = 0.0;
  std::vector<double> radii;
  std::vector<double> circle_max;
};

/// Radii 1 - 2^-k for k = 1..48.
std::vector<double> default_membership_schedule();

/// Tracks m(rho) = max_{|z| = rho} nu(z)|f(z)| (|f'| in Bloch0 mode) along the
/// schedule. Member when the last m falls below 1e-6 m(rho_0); NonMember when
/// the last three stay above 1e-3 m(rho_0) and agree within 1e-2 relative.
MembershipResult little_membership(const AnalyticFunction& f, const RadialWeight& nu,
                                   LittleSpace mode,
                                   const std::vector<double>& schedule = default_membership_schedule());

}  // namespace nucheck
