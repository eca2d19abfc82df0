#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nucheck/analytic.hpp"
#include "nucheck/quad.hpp"
#include "nucheck/sup_solver.hpp"
#include "nucheck/weights.hpp"

namespace nucheck {

enum class OperatorKind { T, S };

/// Factor families of a nuclearity criterion.
///   Weighted: target (1-|z|^2) mu(z), source (1-|zeta|^2)^alpha / nu(zeta)
///   Bloch:    target (1-|z|^2)^gamma, source (1-|zeta|^2)^(alpha - beta + 1)
enum class FactorFamily { Weighted, Bloch };

/// Symbol factor in the inner supremum.
enum class Numerator { GPrime, G, PhiPrimeTimesG };

std::string to_string(OperatorKind k);
std::string to_string(Numerator n);

/// Integrand of a nuclearity criterion:
///   zeta -> w_src(zeta) * sup_z w_tgt(z) |numerator(z)| / |1 - conj(zeta) phi(z)|^p
/// with p = alpha + 2 for kind T and alpha + 3 for kind S.
struct CriterionSpec {
  std::string label;
  OperatorKind kind = OperatorKind::T;
  FactorFamily family = FactorFamily::Weighted;
  Numerator numerator = Numerator::GPrime;
  double alpha = 0.0;
  std::optional<RadialWeight> nu;
  std::optional<RadialWeight> mu;
  double beta = 0.0;
  double gamma = 0.0;

  double kernel_exponent() const { return alpha + (kind == OperatorKind::T ? 2.0 : 3.0); }

  static CriterionSpec weighted(OperatorKind kind, RadialWeight nu, RadialWeight mu, double alpha);
  static CriterionSpec bloch(OperatorKind kind, double beta, double gamma, double alpha);

  /// Throws PreconditionError when the factors are inconsistent (missing
  /// weights, alpha <= -1, non-positive Bloch orders).
  void validate() const;

  double log_target(double r) const;
  double log_source(double r) const;
};

/// Radii schedule rho_k = 1 - 2^-k, k = k_min..k_max, and the node layout used
/// to integrate over |zeta| <= rho_k: Gauss-Legendre in s on the disk
/// |zeta| <= rho_{k_min} and on each annulus between consecutive radii, with
/// `n_theta` uniform angles. A ring whose inner suprema peak within 0.05 of
/// the boundary is re-evaluated with doubled angular count (up to
/// `max_theta_doublings` times) until its contribution changes by < 1e-4.
struct CriterionResolution {
  int k_min = 2;
  int k_max = 12;
  int disk_radial = 16;
  int annulus_radial = 8;
  int n_theta = 64;
  int max_theta_doublings = 1;
  /// An Inconclusive criterion is re-sampled with k_max raised two steps at a
  /// time, up to this value.
  int extend_to = 16;
  /// Grid of the inner supremum; its depth is raised to k_max + 8.
  SupSolverConfig inner{48, 96, 40, 1e-10, 12};

  void validate() const;
  std::vector<double> radii() const;
};

/// Evaluates the inner supremum at arbitrary zeta from a precomputed grid of
/// the zeta-independent factors, followed by local refinement.
class InnerSup {
 public:
  InnerSup(const CriterionSpec& spec, const AnalyticFunction& g, const SelfMap& phi,
           SupSolverConfig config = {});

  /// `seeds` are extra refinement starts (e.g. the neighbouring node's argmax).
  SupResult operator()(cplx zeta, const std::vector<cplx>& seeds = {}) const;
  /// log of the inner function at z for the given zeta.
  double log_field(cplx zeta, cplx z) const;
  /// True when the numerator vanishes identically.
  bool vanishes() const { return zero_; }

 private:
  double log_numerator(cplx z) const;

  CriterionSpec spec_;
  AnalyticFunction g_;
  AnalyticFunction dg_;
  AnalyticFunction dphi_;
  SelfMap phi_;
  SupSolverConfig config_;
  double p_ = 0.0;
  bool zero_ = false;
  std::optional<cplx> constant_phi_;
  SupResult constant_sup_;
  std::vector<double> grid_a_;
  std::vector<cplx> grid_phi_;
  std::vector<cplx> grid_z_;
};

SupResult inner_sup(cplx zeta, const CriterionSpec& spec, const AnalyticFunction& g,
                    const SelfMap& phi, const SupSolverConfig& solver = {});

enum class Finiteness { Finite, Diverging, Inconclusive };
std::string to_string(Finiteness f);

struct FinitenessVerdict {
  Finiteness kind = Finiteness::Inconclusive;
  /// Finite: extrapolated limit. Otherwise the last value.
  double value = 0.0;
  /// Least-squares slope of log I against k log 2 over the last four values.
  double exponent = 0.0;
  bool extrapolated = false;
  /// Diverging with a slope that keeps dropping (logarithmic-type growth).
  bool sublinear = false;
};

/// Diverging when the slope exceeds 0.1. Finite when the slope is below 0.01
/// and either the last three increments are below 1e-3 relative, or they
/// shrink geometrically (ratio < 0.9) and the last two Aitken limits agree to
/// 1e-3 relative. `ks` are the schedule exponents k of rho_k = 1 - 2^-k.
/// Throws PreconditionError for fewer than four values.
FinitenessVerdict classify_finiteness(const std::vector<double>& values, const std::vector<int>& ks);

/// One quadrature node of a criterion integral.
struct CriterionNode {
  cplx zeta;
  double weight = 0.0;      // area weight of the node
  double log_source = 0.0;  // log w_src(|zeta|)
  SupResult inner;
  int ring = 0;             // index into the radii schedule
};

struct CriterionReport {
  std::string label;
  OperatorKind kind = OperatorKind::T;
  FactorFamily family = FactorFamily::Weighted;
  Numerator numerator = Numerator::GPrime;
  double alpha = 0.0;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::vector<int> ks;
  std::vector<double> radii;
  std::vector<double> values;
  FinitenessVerdict verdict;
  /// Weighted family: whether {nu, omega} passed the normal-pair check.
  std::optional<bool> normal_pair_ok;
  std::string note;
  /// First node whose inner supremum was flagged unbounded.
  std::optional<CriterionNode> unbounded_node;
  /// Nodes at angular index 0 of every radial line, in integration order.
  std::vector<CriterionNode> diagnostics;
};

/// Node values and ring sums of a criterion integral (shared with the nuclear
/// decomposition, which needs the individual nodes).
struct CriterionSamples {
  std::vector<CriterionNode> nodes;
  std::vector<double> ring_sums;
  std::vector<int> ks;
  std::vector<double> radii;
};

CriterionSamples sample_criterion(const CriterionSpec& spec, const AnalyticFunction& g,
                                  const SelfMap& phi, const CriterionResolution& resolution = {});

/// `samples`, when given, receives the node data behind the reported values.
CriterionReport nuclearity_criterion(const CriterionSpec& spec, const AnalyticFunction& g,
                                     const SelfMap& phi, const CriterionResolution& resolution = {},
                                     CriterionSamples* samples = nullptr);

CriterionReport m_alpha(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                        const RadialWeight& mu, double alpha, const CriterionResolution& res = {});
CriterionReport n_alpha(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                        const RadialWeight& mu, double alpha, const CriterionResolution& res = {});
CriterionReport p_alpha(const AnalyticFunction& g, const SelfMap& phi, double beta, double gamma,
                        double alpha, const CriterionResolution& res = {});
CriterionReport q_alpha(const AnalyticFunction& g, const SelfMap& phi, double beta, double gamma,
                        double alpha, const CriterionResolution& res = {});
/// Composition operator (g = z) and plain Volterra (phi = identity) cases.
CriterionReport composition_m_alpha(const SelfMap& phi, const RadialWeight& nu,
                                    const RadialWeight& mu, double alpha,
                                    const CriterionResolution& res = {});
CriterionReport volterra_m_alpha(const AnalyticFunction& g, const RadialWeight& nu,
                                 const RadialWeight& mu, double alpha,
                                 const CriterionResolution& res = {});
CriterionReport volterra_n_alpha(const AnalyticFunction& g, const RadialWeight& nu,
                                 const RadialWeight& mu, double alpha,
                                 const CriterionResolution& res = {});

struct BlochMReports {
  /// sup_z (1-|z|^2)|phi'(z)||g(z)| / |1 - conj(w) phi(z)|^3, integrated dA(w).
  CriterionReport printed;
  /// sup_z (1-|z|^2)|g'(z)| / |1 - conj(w) phi(z)|^2, integrated dA(w).
  CriterionReport derived;
};

BlochMReports criterion_bloch_M(const AnalyticFunction& g, const SelfMap& phi,
                                const CriterionResolution& res = {});

/// sup (1-|z|^2) mu(z) / nu(phi(z)) |g'(z)|.
SupResult criterion_M1(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                       const RadialWeight& mu, const SupSolverConfig& solver = {});
/// sup (1-|z|^2) / (1-|phi(z)|^2) mu(z) / nu(phi(z)) |g(z)|.
SupResult criterion_S_sup(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                          const RadialWeight& mu, const SupSolverConfig& solver = {});

}  // namespace nucheck
