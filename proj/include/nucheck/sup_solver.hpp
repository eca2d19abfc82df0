#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nucheck {

using cplx = std::complex<double>;

struct SupSolverConfig {
  int n_radial = 128;
  int n_angular = 256;
  int refine_iters = 40;
  double tol = 1e-10;
  /// The radial grid is r(t) = 1 - 2^(-depth * t), t in [0, 1], so the outermost
  /// radius probed is 1 - 2^-depth.
  int boundary_depth = 12;

  /// Throws PreconditionError for counts < 16, tol <= 0, depth outside [4, 50].
  void validate() const;
};

struct SupResult {
  double value = 0.0;
  cplx argmax = 0.0;
  /// Set when the best value sits on the outermost radius and is still
  /// increasing there: the supremum over the open disk is likely not attained
  /// (and possibly infinite). `value` is then the last value seen.
  bool unbounded = false;
};

/// Heuristic global maximum of F over |z| < 1: coarse polar scan (radius-major,
/// angles ascending, strict improvement so ties keep the smallest |z| and then
/// the smallest angle), followed by coordinate-wise golden-section refinement
/// in (t, theta) around the best few cells and around each seed. Throws
/// EvaluationError when F is not finite at a probed point.
SupResult sup_over_disk(const std::function<double(cplx)>& F, const SupSolverConfig& config = {},
                        const std::vector<cplx>& seeds = {});

/// Coordinate-wise golden-section ascent from `start`, with initial brackets of
/// one coarse-grid cell in t and theta. `start_value` must be F(start).
SupResult refine_local(const std::function<double(cplx)>& F, cplx start, double start_value,
                       const SupSolverConfig& config);

/// One-dimensional version for radial fields F(r), r in [0, 1). `argmax` is real.
SupResult sup_over_radius(const std::function<double(double)>& F,
                          const SupSolverConfig& config = {});

/// Radial grid map used by both solvers.
double radius_at(double t, int depth);
double grid_parameter(double r, int depth);

}  // namespace nucheck
