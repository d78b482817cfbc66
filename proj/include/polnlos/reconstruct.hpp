#pragma once

#include "polnlos/common.hpp"
#include "polnlos/transport.hpp"

#include <Eigen/SparseCore>

#include <cstddef>

namespace polnlos {

/// Relative singular-value cutoff of the pseudo-inverse.
inline constexpr double kPinvTolerance = 1e-12;

struct PinvResult {
  DenseVector estimate;
  /// Some entry lies outside [0, 1]. The estimate itself is not clamped.
  bool out_of_box = false;
};

/// Minimum-norm least-squares solution via SVD.
PinvResult pinv_solve(const DenseMatrix& transport, const DenseVector& observation);
PinvResult pinv_solve(const TransportMatrix& transport, const DenseVector& observation);

/// Anisotropic total variation of a row-major width x height image.
double tv_2d(const DenseVector& image, std::size_t width, std::size_t height);

/// Forward-difference operator: horizontal differences first (row-major,
/// (width-1)*height rows), then vertical ((height-1)*width rows).
Eigen::SparseMatrix<double> difference_operator(std::size_t width, std::size_t height);

struct AdmmParams {
  double reg_weight = 1e-2;
  double penalty = 1.0;
  std::size_t max_iters = 500;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  /// Start from the box-clamped pinv solution; otherwise from 0.5 everywhere.
  bool warm_start = true;

  void validate() const;
};

struct ReconResult {
  DenseVector estimate;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

/// ||i - T l||^2 + reg_weight * tv_2d(l).
double tv_objective(const DenseMatrix& transport, const DenseVector& observation,
                    const DenseVector& scene, double reg_weight, std::size_t width,
                    std::size_t height);

/// min ||i - T l||^2 + reg_weight * TV(l) subject to 0 <= l <= 1, by ADMM
/// with splits z1 = D l and z2 = l. The estimate is z2 and so lies in the
/// box exactly.
ReconResult admm_tv_box(const DenseMatrix& transport, const DenseVector& observation,
                        std::size_t width, std::size_t height, const AdmmParams& params);
ReconResult admm_tv_box(const TransportMatrix& transport, const DenseVector& observation,
                        const AdmmParams& params);

}  // namespace polnlos
