#include "polnlos/reconstruct.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <vector>

namespace polnlos {

namespace {

void require_dims(const DenseMatrix& t, const DenseVector& i) {
  if (t.rows() != i.size()) {
    throw DimensionError("transport matrix has " + std::to_string(t.rows()) + " rows (" +
                         std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                         ") but the observation has " + std::to_string(i.size()) + " entries");
  }
  if (t.rows() == 0 || t.cols() == 0) throw DimensionError("transport matrix is empty");
}

double soft_threshold(double x, double k) {
  if (x > k) return x - k;
  if (x < -k) return x + k;
  return 0.0;
}

}  // namespace

PinvResult pinv_solve(const DenseMatrix& transport, const DenseVector& observation) {
  require_dims(transport, observation);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(transport, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? s(0) * kPinvTolerance : 0.0;
  DenseVector coeffs = svd.matrixU().transpose() * observation;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    coeffs[k] = s(k) > cutoff && s(k) > 0.0 ? coeffs[k] / s(k) : 0.0;
  }
  PinvResult out;
  out.estimate = svd.matrixV() * coeffs;
  out.out_of_box = (out.estimate.array() < 0.0).any() || (out.estimate.array() > 1.0).any();
  return out;
}

PinvResult pinv_solve(const TransportMatrix& transport, const DenseVector& observation) {
  return pinv_solve(transport.data, observation);
}

double tv_2d(const DenseVector& image, std::size_t width, std::size_t height) {
  if (static_cast<std::size_t>(image.size()) != width * height) {
    throw DimensionError("tv_2d: " + std::to_string(image.size()) + " values do not form a " +
                         std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  double total = 0.0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x + 1 < width; ++x) {
      total += std::abs(image[static_cast<Eigen::Index>(y * width + x + 1)] -
                        image[static_cast<Eigen::Index>(y * width + x)]);
    }
  }
  for (std::size_t y = 0; y + 1 < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      total += std::abs(image[static_cast<Eigen::Index>((y + 1) * width + x)] -
                        image[static_cast<Eigen::Index>(y * width + x)]);
    }
  }
  return total;
}

Eigen::SparseMatrix<double> difference_operator(std::size_t width, std::size_t height) {
  const std::size_t rows = (width - 1) * height + (height - 1) * width;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * rows);
  Eigen::Index r = 0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x + 1 < width; ++x, ++r) {
      entries.emplace_back(r, static_cast<Eigen::Index>(y * width + x + 1), 1.0);
      entries.emplace_back(r, static_cast<Eigen::Index>(y * width + x), -1.0);
    }
  }
  for (std::size_t y = 0; y + 1 < height; ++y) {
    for (std::size_t x = 0; x < width; ++x, ++r) {
      entries.emplace_back(r, static_cast<Eigen::Index>((y + 1) * width + x), 1.0);
      entries.emplace_back(r, static_cast<Eigen::Index>(y * width + x), -1.0);
    }
  }
  Eigen::SparseMatrix<double> d(static_cast<Eigen::Index>(rows),
                                static_cast<Eigen::Index>(width * height));
  d.setFromTriplets(entries.begin(), entries.end());
  return d;
}

void AdmmParams::validate() const {
  if (!std::isfinite(reg_weight) || reg_weight < 0.0) {
    throw InvariantError("reg_weight must be >= 0");
  }
  if (!std::isfinite(penalty) || !(penalty > 0.0)) throw InvariantError("penalty must be > 0");
  if (max_iters < 1) throw InvariantError("max_iters must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw InvariantError("tolerances must be > 0");
}

double tv_objective(const DenseMatrix& transport, const DenseVector& observation,
                    const DenseVector& scene, double reg_weight, std::size_t width,
                    std::size_t height) {
  require_dims(transport, observation);
  return (observation - transport * scene).squaredNorm() +
         reg_weight * tv_2d(scene, width, height);
}

ReconResult admm_tv_box(const DenseMatrix& transport, const DenseVector& observation,
                        std::size_t width, std::size_t height, const AdmmParams& params) {
  require_dims(transport, observation);
  params.validate();
  if (!observation.allFinite()) throw InvariantError("observation entries must be finite");
  const Eigen::Index n = transport.cols();
  if (static_cast<std::size_t>(n) != width * height) {
    throw DimensionError("transport has " + std::to_string(n) + " columns but the scene is " +
                         std::to_string(width) + "x" + std::to_string(height));
  }

  // The objective is scaled by 1/2 so the usual ADMM updates apply; the TV
  // weight is halved accordingly.
  const double rho = params.penalty;
  const double threshold = 0.5 * params.reg_weight / rho;
  const Eigen::SparseMatrix<double> d = difference_operator(width, height);
  const Eigen::SparseMatrix<double> dt = d.transpose();

  Eigen::MatrixXd system = transport.transpose() * transport;
  system += rho * Eigen::MatrixXd(dt * d);
  system.diagonal().array() += rho;
  const Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) throw InvariantError("ADMM normal equations are singular");
  const DenseVector tti = transport.transpose() * observation;

  DenseVector l = params.warm_start
                      ? DenseVector(pinv_solve(transport, observation).estimate.cwiseMax(0.0).cwiseMin(1.0))
                      : DenseVector::Constant(n, 0.5);
  DenseVector z1 = d * l;
  DenseVector z2 = l;
  DenseVector u1 = DenseVector::Zero(z1.size());
  DenseVector u2 = DenseVector::Zero(n);

  const double scale = std::sqrt(static_cast<double>(n));
  ReconResult result;
  for (std::size_t it = 1; it <= params.max_iters; ++it) {
    l = llt.solve(tti + rho * (dt * (z1 - u1) + (z2 - u2)));

    const DenseVector dl = d * l;
    const DenseVector z1_old = z1;
    const DenseVector z2_old = z2;
    z1 = (dl + u1).unaryExpr([threshold](double v) { return soft_threshold(v, threshold); });
    z2 = (l + u2).cwiseMax(0.0).cwiseMin(1.0);
    u1 += dl - z1;
    u2 += l - z2;

    const double primal = std::sqrt((dl - z1).squaredNorm() + (l - z2).squaredNorm());
    const double dual = rho * (dt * (z1 - z1_old) + (z2 - z2_old)).norm();
    result.iterations = it;
    result.primal_residual = primal;
    result.dual_residual = dual;
    if (primal < params.tol_primal * scale && dual < params.tol_dual * scale) {
      result.converged = true;
      break;
    }
  }
  result.estimate = z2;
  result.objective =
      tv_objective(transport, observation, z2, params.reg_weight, width, height);
  return result;
}

ReconResult admm_tv_box(const TransportMatrix& transport, const DenseVector& observation,
                        const AdmmParams& params) {
  return admm_tv_box(transport.data, observation, transport.scene_width(),
                     transport.scene_height(), params);
}

}  // namespace polnlos
