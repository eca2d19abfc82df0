#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "nucheck/analytic.hpp"
#include "nucheck/criteria.hpp"
#include "nucheck/spaces.hpp"
#include "nucheck/weights.hpp"

namespace nucheck {

/// (T f)(z) = int_0^z f(phi(t)) g'(t) dt. Exact for polynomial data, otherwise
/// a 128-node Gauss-Legendre rule along [0, z].
AnalyticFunction apply_T(const AnalyticFunction& g, const SelfMap& phi, const AnalyticFunction& f);
/// (S f)(z) = int_0^z f'(phi(t)) g(t) dt.
AnalyticFunction apply_S(const AnalyticFunction& g, const SelfMap& phi, const AnalyticFunction& f);
AnalyticFunction apply(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                       const AnalyticFunction& f);

enum class BasisNormalization { Raw, SourceNormalized };

struct OperatorTruncation {
  OperatorKind kind = OperatorKind::T;
  int degree = 0;
  /// Column n holds the Taylor coefficients of the image of z^n (divided by
  /// the source norm of z^n when normalized).
  Eigen::MatrixXcd matrix;
  BasisNormalization normalization = BasisNormalization::Raw;
};

/// Throws UnsupportedError for non-polynomial g or phi, PreconditionError for
/// N outside [0, 256] or a normalized request without `nu`.
OperatorTruncation truncation_matrix(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                     int N = 64, BasisNormalization normalization = BasisNormalization::Raw,
                                     const std::optional<RadialWeight>& nu = std::nullopt);

/// Norm on the target space H^inf_mu.
///   Bloch: |h(0)| + sup (1-|z|^2) mu(z) |h'(z)|   (the norm used for the nuclear terms)
///   Sup:   sup mu(z) |h(z)|
enum class TargetNorm { Bloch, Sup };

double target_norm(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                   const AnalyticFunction& f, const RadialWeight& mu, TargetNorm norm = TargetNorm::Bloch,
                   const SupSolverConfig& solver = {});

struct ProbeSet {
  int max_degree = 8;
  /// Points zeta of the test functions f_zeta centred at phi(zeta).
  std::vector<cplx> test_points = default_test_points();
  /// Test-function exponent; defaults to the beta estimate of nu (or 1).
  std::optional<double> beta;
  TargetNorm norm = TargetNorm::Bloch;
  SupSolverConfig solver{};

  static std::vector<cplx> default_test_points();
};

struct NormLowerBound {
  double bound = 0.0;
  /// "z^n" or "test(zeta)"; empty when every probe has a zero image.
  std::string witness;
  int probes_used = 0;
};

NormLowerBound operator_norm_lower(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                   const RadialWeight& nu, const RadialWeight& mu,
                                   const ProbeSet& probes = {});

struct DecompositionTerm {
  cplx zeta;
  double weight = 0.0;
  /// (alpha+1)(1-|zeta|^2)^alpha / nu(zeta), times (alpha+2)|zeta| for kind S.
  double functional_norm = 0.0;
  /// Bloch-form target norm of y_k.
  double image_norm = 0.0;
  cplx image_argmax;
  double bound = 0.0;
};

/// Discretized nuclear representation
///   T f = sum_k w_k x'_k(f) y_k,
///   x'_k(f) = (alpha+1) (1-|zeta_k|^2)^alpha f(zeta_k)          (kind T)
///   y_k(z)  = int_0^z g'(t) / (1 - conj(zeta_k) phi(t))^(alpha+2) dt
/// and for kind S with f'(zeta_k) in place of f(zeta_k):
///   x'_k(f) = (alpha+1)(alpha+2) (1-|zeta_k|^2)^alpha conj(zeta_k) f(zeta_k)
///   y_k(z)  = int_0^z g(t) / (1 - conj(zeta_k) phi(t))^(alpha+3) dt.
struct NuclearDecomposition {
  OperatorKind kind = OperatorKind::T;
  double alpha = 0.0;
  AnalyticFunction g;
  AnalyticFunction phi;
  RadialWeight nu = RadialWeight::constant();
  RadialWeight mu = RadialWeight::constant();
  std::vector<DecompositionTerm> terms;
  double total = 0.0;
  /// Parts of the total from |zeta| <= 1/2 and |zeta| > 1/2.
  double total_inner = 0.0;
  double total_outer = 0.0;
  /// Point evaluations on H^inf_nu have norm exactly 1/nu(zeta) for standard
  /// and constant weights; for other weights 1/nu is used without a constant.
  bool functional_norm_exact = true;
  CriterionReport criterion;

  AnalyticFunction image(std::size_t k) const;
  /// T_N f = sum_k w_k x'_k(f) y_k.
  AnalyticFunction apply(const AnalyticFunction& f) const;
};

/// Throws RefusalError when the nuclearity criterion at this resolution is not
/// Finite or the normal-pair check fails.
NuclearDecomposition nuclear_decomposition(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                           const RadialWeight& nu, const RadialWeight& mu, double alpha,
                                           const CriterionResolution& resolution = {});

struct FidelityResult {
  /// Bloch-form target norm of apply(f) - T_N f, per probe.
  std::vector<double> errors;
  std::vector<double> relative;
  double max_relative = 0.0;
};

/// Uses (T f - T_N f)'(z) = g'(z) (f - Q_N f)(phi(z)), where Q_N f is the
/// quadrature of the reproducing formula at the decomposition nodes.
FidelityResult decomposition_fidelity(const NuclearDecomposition& d,
                                      const std::vector<AnalyticFunction>& probes,
                                      const SupSolverConfig& solver = {32, 64, 40, 1e-9, 12});

/// Resolution of refinement level `level` (0, 1, 2, ...) used for the
/// decomposition fidelity study: n_theta = 16 + 8 level.
CriterionResolution fidelity_level(int level);

struct SummingProbeResult {
  double ratio = 0.0;
  double image_sum = 0.0;
  double source_sup = 0.0;
  std::vector<cplx> best_eta;
};

/// sum_i ||image(f_i)|| / max_{eta in {1,-1,i,-i}^n} ||sum eta_i f_i||_source.
/// eta_1 is fixed to 1 (norms are invariant under a common unimodular factor).
/// Throws PreconditionError for n outside [1, 8] or when every member is zero.
SummingProbeResult absolutely_summing_probe(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                            const RadialWeight& nu, const RadialWeight& mu,
                                            const std::vector<AnalyticFunction>& family,
                                            TargetNorm norm = TargetNorm::Bloch,
                                            const SupSolverConfig& solver = {});

enum class Compactness { CompactLikely, NonCompactLikely, Inconclusive };
std::string to_string(Compactness c);

struct CompactnessResult {
  Compactness verdict = Compactness::Inconclusive;
  /// Bloch-form target norms of the images of z^n / ||z^n||_nu, n = 0..N.
  std::vector<double> norms;
  std::vector<Membership> membership;
};

/// CompactLikely when the last quarter of the normalized image norms stays
/// below 1e-2 of their maximum and every image lies in H^0_mu;
/// NonCompactLikely when it stays above 1/4 of the maximum.
CompactnessResult compactness_probe(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                    const RadialWeight& nu, const RadialWeight& mu, int N = 24);

}  // namespace nucheck
