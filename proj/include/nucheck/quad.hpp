#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace nucheck {

using cplx = std::complex<double>;

/// One-dimensional rule on [0, 1].
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0, 1] (Newton on the three-term recurrence).
const Rule1D& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight (1 - s)^a, a > -1
/// (Golub-Welsch). Weights sum to 1/(a+1).
Rule1D gauss_jacobi(int n, double a);

enum class RadialClustering { None, DoubleExponential };

/// Polar product rule over the annulus rho_inner <= |z| <= rho_outer with the
/// normalized area measure dA = (1/pi) r dr dtheta. Radial nodes live in s = r^2;
/// each radial weight is split evenly over `n_theta` uniform angles.
struct DiskQuadrature {
  std::vector<double> s_nodes;
  std::vector<double> s_weights;  // sum = rho_outer^2 - rho_inner^2
  int n_theta = 0;
  double rho_inner = 0.0;
  double rho_outer = 0.0;
  double angle_offset = 0.0;
  RadialClustering clustering = RadialClustering::None;

  std::size_t size() const { return s_nodes.size() * static_cast<std::size_t>(n_theta); }
  std::size_t radial_count() const { return s_nodes.size(); }
  cplx node(std::size_t radial, int angular) const;
  double weight(std::size_t radial) const { return s_weights[radial] / n_theta; }
  double total_weight() const;
};

inline constexpr int kDefaultRadialNodes = 256;
inline constexpr int kDefaultAngularNodes = 512;

/// Full-disk rule |z| <= rho. Throws PreconditionError for n_r < 8, n_theta < 16
/// or rho outside (0, 1).
DiskQuadrature build_quadrature(int n_r, int n_theta, double rho,
                                RadialClustering clustering = RadialClustering::None);
/// Annulus rule; same size limits, 0 <= rho_inner < rho_outer <= 1.
DiskQuadrature build_annulus_quadrature(int n_r, int n_theta, double rho_inner, double rho_outer,
                                        RadialClustering clustering = RadialClustering::None);
/// Rule for the tail annulus rho <= |z| < 1 that carries the factor (1 - |z|^2)^a
/// in its weights (Gauss-Jacobi in s). Used to close truncated integrals whose
/// integrand is smooth up to the boundary apart from that factor.
DiskQuadrature build_weighted_tail(int n_r, int n_theta, double rho, double a);

DiskQuadrature rotated(const DiskQuadrature& q, double offset);

/// Weighted node sum, radial-major, compensated; rings are evaluated in
/// parallel and combined in fixed order. Throws EvaluationError naming the node
/// when the field is not finite there.
double integrate_disk(const std::function<double(cplx)>& field, const DiskQuadrature& q);
cplx integrate_disk_complex(const std::function<cplx(cplx)>& field, const DiskQuadrature& q);

}  // namespace nucheck
