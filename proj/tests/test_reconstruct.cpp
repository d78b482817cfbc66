#include "polnlos/conditioning.hpp"
#include "polnlos/reconstruct.hpp"

#include <doctest.h>

#include <Eigen/LU>
#include <Eigen/QR>
#include <random>

using namespace polnlos;

namespace {

DenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
  return m;
}

// Random matrix with condition number exactly `kappa`.
DenseMatrix conditioned(Eigen::Index rows, Eigen::Index cols, double kappa, std::mt19937_64& rng) {
  const DenseMatrix q1 = Eigen::HouseholderQR<DenseMatrix>(random_matrix(rows, rows, rng)).householderQ();
  const DenseMatrix q2 = Eigen::HouseholderQR<DenseMatrix>(random_matrix(cols, cols, rng)).householderQ();
  DenseMatrix s = DenseMatrix::Zero(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) s(k, k) = std::pow(kappa, -double(k) / double(cols - 1));
  return q1 * s * q2.transpose();
}

DenseVector uniform(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseVector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Brute force over all neighbouring pairs of a row-major image.
double tv_by_pairs(const DenseVector& img, std::size_t w, std::size_t h) {
  double sum = 0.0;
  for (std::size_t a = 0; a < w * h; ++a) {
    for (std::size_t b = a + 1; b < w * h; ++b) {
      const bool horizontal = b == a + 1 && a / w == b / w;
      const bool vertical = b == a + w;
      if (horizontal || vertical) sum += std::abs(img[b] - img[a]);
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("pinv examples") {
  std::mt19937_64 rng(1);
  const DenseVector i = uniform(6, -1.0, 2.0, rng);
  const auto id = pinv_solve(DenseMatrix::Identity(6, 6), i);
  CHECK(id.estimate.isApprox(i, 1e-15));
  CHECK(id.out_of_box);
  const DenseMatrix t = random_matrix(20, 8, rng);
  const DenseVector l = uniform(8, 0.1, 0.9, rng);
  const auto r = pinv_solve(t, t * l);
  CHECK((r.estimate - l).norm() <= 1e-10 * l.norm());
  CHECK_FALSE(r.out_of_box);
  CHECK_THROWS_AS(pinv_solve(t, DenseVector::Zero(3)), DimensionError);
}

TEST_CASE("pinv of rank-deficient matrices matches the ridge oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix t = random_matrix(9, 3, rng) * random_matrix(3, 7, rng);
    SUBCASE("consistent observations") {
      const DenseVector i = t * uniform(7, 0.0, 1.0, rng);
      // Ridge regression as an augmented least-squares problem. With i in
      // the range of t the ridge bias is O(1e-12) and the QR error O(kappa eps).
      const double ridge = 1e-12;
      DenseMatrix aug = DenseMatrix::Zero(16, 7);
      aug.topRows(9) = t;
      aug.bottomRows(7) = std::sqrt(ridge) * DenseMatrix::Identity(7, 7);
      DenseVector rhs = DenseVector::Zero(16);
      rhs.head(9) = i;
      const DenseVector want = aug.householderQr().solve(rhs);
      const DenseVector got = pinv_solve(t, i).estimate;
      CHECK((got - want).norm() <= 1e-8 * want.norm());
    }
    SUBCASE("inconsistent observations") {
      // The minimum-norm least-squares solution is the unique vector with a
      // residual orthogonal to the range and no null-space component.
      const DenseVector i = uniform(9, 0.0, 1.0, rng);
      const DenseVector got = pinv_solve(t, i).estimate;
      const Eigen::FullPivLU<DenseMatrix> lu(t);
      CHECK((t.transpose() * (i - t * got)).norm() <= 1e-10 * t.norm() * i.norm());
      CHECK((lu.kernel().transpose() * got).norm() <= 1e-10 * got.norm());
    }
  }
}

TEST_CASE("tv_2d examples") {
  CHECK(tv_2d(DenseVector::Constant(12, 0.3), 4, 3) == 0.0);
  CHECK(tv_2d((DenseVector(2) << 0.0, 1.0).finished(), 2, 1) == 1.0);
  DenseVector checker(9);
  for (int k = 0; k < 9; ++k) checker[k] = double((k % 3 + k / 3) % 2);
  CHECK(tv_by_pairs(checker, 3, 3) == 12.0);
  CHECK(tv_2d(checker, 3, 3) == 12.0);
  CHECK_THROWS_AS(tv_2d(checker, 2, 3), DimensionError);
}

TEST_CASE("tv_2d properties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 1 + rng() % 8, h = 1 + rng() % 8;
    const Eigen::Index n = static_cast<Eigen::Index>(w * h);
    const DenseVector a = uniform(n, 0.0, 1.0, rng), b = uniform(n, 0.0, 1.0, rng);
    CHECK(tv_2d(a, w, h) == doctest::Approx(tv_by_pairs(a, w, h)).epsilon(1e-12));
    CHECK(tv_2d(0.5 * (a + b), w, h) <= 0.5 * (tv_2d(a, w, h) + tv_2d(b, w, h)) + 1e-12);
    // Dyadic values keep every difference exact under a shift.
    DenseVector d(n);
    for (auto& x : d) x = double(rng() % 256) / 256.0;
    CHECK(tv_2d(d, w, h) == tv_2d((d.array() + 0.375).matrix(), w, h));
    CHECK(tv_2d(d, w, h) == tv_2d((d.array() - 3.0).matrix(), w, h));
  }
}

TEST_CASE("difference operator layout") {
  const auto d = difference_operator(3, 2);
  CHECK(d.rows() == 2 * 2 + 1 * 3);
  CHECK(d.cols() == 6);
  DenseVector img(6);
  img << 1, 2, 4, 8, 16, 32;
  const DenseVector diff = d * img;
  DenseVector want(7);
  want << 1, 2, 8, 16, 7, 14, 28;
  CHECK(diff == want);
  CHECK(diff.lpNorm<1>() == tv_2d(img, 3, 2));
}

TEST_CASE("admm without regularization matches pinv") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 60);
    const DenseMatrix t = conditioned(n + 10, n, 1.0 + 49.0 * double(trial) / 19.0, rng);
    const DenseVector l = uniform(n, 0.1, 0.9, rng);
    const DenseVector i = t * l + 1e-3 * random_matrix(n + 10, 1, rng);
    const DenseVector p = pinv_solve(t, i).estimate;
    REQUIRE(p.minCoeff() > 0.0);
    REQUIRE(p.maxCoeff() < 1.0);
    AdmmParams params;
    params.reg_weight = 0.0;
    params.max_iters = 5000;
    params.tol_primal = params.tol_dual = 1e-10;
    const auto r = admm_tv_box(t, i, static_cast<std::size_t>(n), 1, params);
    CHECK((r.estimate - p).norm() <= 1e-6 * p.norm());

    params.warm_start = false;
    params.penalty = 0.01;
    const auto cold = admm_tv_box(t, i, static_cast<std::size_t>(n), 1, params);
    CHECK(cold.converged);
    CHECK((cold.estimate - p).norm() <= 1e-6 * p.norm());
  }
}

TEST_CASE("cold start begins mid-box") {
  const DenseMatrix t = DenseMatrix::Identity(4, 4);
  const DenseVector i = DenseVector::Constant(4, 0.2);
  AdmmParams params;
  params.max_iters = 1;
  params.reg_weight = 0.0;
  params.warm_start = false;
  // One step from l = 0.5: the constant image has no differences, so 2 l = 0.2 + 0.5.
  const auto r = admm_tv_box(t, i, 2, 2, params);
  CHECK(r.estimate.isApprox(DenseVector::Constant(4, 0.35), 1e-15));
  params.warm_start = true;
  CHECK(admm_tv_box(t, i, 2, 2, params).estimate.isApprox(i, 1e-15));
}

TEST_CASE("admm recovers a noiseless scene") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix t = conditioned(80, 64, 100.0, rng);
    const DenseVector l = uniform(64, 0.1, 0.9, rng);
    AdmmParams params;
    params.reg_weight = 1e-6;
    const auto r = admm_tv_box(t, t * l, 8, 8, params);
    CHECK((r.estimate - l).norm() <= 1e-3 * l.norm());
    CHECK(r.converged);
    CHECK(r.primal_residual < params.tol_primal * 8.0);
    CHECK(r.dual_residual < params.tol_dual * 8.0);
  }
}

TEST_CASE("admm estimate is feasible and improves on the clamped pinv start") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int seed = 0; seed < 50; ++seed) {
    const std::size_t w = 2 + rng() % 15, h = 2 + rng() % 15;
    const Eigen::Index n = static_cast<Eigen::Index>(w * h);
    const DenseMatrix t = random_matrix(n + static_cast<Eigen::Index>(rng() % 20), n, rng);
    DenseVector l = uniform(n, -0.2, 1.2, rng);
    DenseVector i = t * l;
    for (auto& x : i) x += 0.5 * g(rng);
    AdmmParams params;
    params.reg_weight = std::pow(10.0, -3.0 + 2.0 * double(seed % 3));
    const auto r = admm_tv_box(t, i, w, h, params);
    CHECK(r.estimate.minCoeff() >= 0.0);
    CHECK(r.estimate.maxCoeff() <= 1.0);
    CHECK(r.primal_residual >= 0.0);
    CHECK(r.dual_residual >= 0.0);
    CHECK((r.converged || r.iterations == params.max_iters));
    const DenseVector start = pinv_solve(t, i).estimate.cwiseMax(0.0).cwiseMin(1.0);
    CHECK(r.objective <= tv_objective(t, i, start, params.reg_weight, w, h));
    CHECK(r.objective == doctest::Approx(tv_objective(t, i, r.estimate, params.reg_weight, w, h)));
  }
}

TEST_CASE("admm input validation") {
  const DenseMatrix t = DenseMatrix::Identity(4, 4);
  AdmmParams params;
  CHECK_THROWS_AS(admm_tv_box(t, DenseVector::Zero(3), 2, 2, params), DimensionError);
  CHECK_THROWS_AS(admm_tv_box(t, DenseVector::Zero(4), 3, 2, params), DimensionError);
  DenseVector bad = DenseVector::Zero(4);
  bad[1] = std::nan("");
  CHECK_THROWS_AS(admm_tv_box(t, bad, 2, 2, params), InvariantError);
  params.penalty = 0.0;
  CHECK_THROWS_AS(admm_tv_box(t, DenseVector::Zero(4), 2, 2, params), InvariantError);
  params = AdmmParams{};
  params.reg_weight = -1.0;
  CHECK_THROWS_AS(params.validate(), InvariantError);
}
