#include "doctest.h"

#include "gpsim/rng.hpp"
#include "gpsim/sequence_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gpsim;

TEST_CASE("projection onto an eigenvector gives a unit coordinate") {
  auto p = brownian_motion_prior(20);
  const CoefficientVector f = to_coefficients(p, p->basis_vector(2));
  for (std::size_t j = 0; j < 20; ++j) CHECK(f[j] == doctest::Approx(j == 2 ? 1.0 : 0.0).epsilon(1e-12).scale(1));
  const CoefficientVector z = to_coefficients(p, Eigen::VectorXd::Zero(20));
  CHECK(z.coeffs.norm() == 0.0);
}

TEST_CASE("coefficients of the identity on the bm grid match a dense projection") {
  auto p = brownian_motion_prior(4);
  Eigen::VectorXd x(4);
  for (int i = 0; i < 4; ++i) x[i] = p->grid().axis[static_cast<std::size_t>(i)];
  Eigen::MatrixXd E(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i)
      E(i, j) = std::sqrt(2.0 / 4.5) * std::sin((j + 0.5) * std::numbers::pi * x[i]);
  const Eigen::VectorXd oracle = E.transpose() * x;
  CHECK((to_coefficients(p, x).coeffs - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("round trips, Parseval and linearity") {
  Rng rng(3);
  for (auto p : {brownian_motion_prior(32), power_law_prior(64, 3.0, 1.0), tensor_prior_2d(brownian_motion_prior(8)),
                 sobolev_prior_2d(6, 2.0), laplacian_prior(17, Boundary::dirichlet)}) {
    const auto N = static_cast<Eigen::Index>(p->dim());
    Eigen::VectorXd u(N), v(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      u[i] = rng.normal();
      v[i] = rng.normal();
    }
    const CoefficientVector cu = to_coefficients(p, u);
    CHECK((from_coefficients(cu) - u).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(cu.coeffs.norm() == doctest::Approx(u.norm()).epsilon(1e-12));
    const CoefficientVector lin = to_coefficients(p, 2.0 * u - 3.0 * v);
    CHECK((lin.coeffs - (2.0 * cu.coeffs - 3.0 * to_coefficients(p, v).coeffs)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((to_coefficients(p, from_coefficients(CoefficientVector(p, u))).coeffs - u).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("smooth function survives the round trip") {
  auto p = brownian_motion_prior(32);
  Eigen::VectorXd v(32);
  for (int i = 0; i < 32; ++i) v[i] = std::sin(1.5 * std::numbers::pi * p->grid().axis[static_cast<std::size_t>(i)]);
  CHECK((from_coefficients(to_coefficients(p, v)) - v).cwiseAbs().maxCoeff() < 1e-12);
  const CoefficientVector d1 = CoefficientVector::unit(p, 0);
  CHECK((from_coefficients(d1) - p->basis_vector(0)).norm() < 1e-14);
}

TEST_CASE("length mismatches are rejected") {
  auto p = brownian_motion_prior(5);
  CHECK_THROWS_AS(to_coefficients(p, Eigen::VectorXd::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientVector(p, Eigen::VectorXd::Zero(6)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(5);
  bad[2] = std::nan("");
  CHECK_THROWS_AS(CoefficientVector(p, bad), std::invalid_argument);
}

TEST_CASE("simulated data is reproducible with noise of unit variance") {
  auto p = brownian_motion_prior(16);
  const CoefficientVector zero = CoefficientVector::zero(p);
  CHECK(simulate_data(zero, 9).y == simulate_data(zero, 9).y);
  CHECK(simulate_data(zero, 9).y != simulate_data(zero, 10).y);
  const int reps = 10000;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(16), s2 = Eigen::VectorXd::Zero(16);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(16, 16);
  for (int r = 0; r < reps; ++r) {
    const Observation obs = simulate_data(zero, mix_seed({77, static_cast<std::uint64_t>(r)}));
    s1 += obs.y;
    s2 += obs.y.cwiseAbs2();
    const Eigen::VectorXd yt = transformed_observation(p, obs).coeffs;
    cov += yt * yt.transpose();
  }
  s1 /= reps;
  s2 /= reps;
  cov /= reps;
  CHECK(s1.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(reps));
  CHECK((s2.array() - 1.0).abs().maxCoeff() < 0.1);
  Eigen::MatrixXd off = cov;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(reps));
  CHECK((cov.diagonal().array() - 1.0).abs().maxCoeff() < 0.1);
}

TEST_CASE("transformed observation of an eigenvector is a unit coordinate") {
  auto p = brownian_motion_prior(10);
  Observation obs{p->basis_vector(1), std::nullopt};
  const CoefficientVector yt = transformed_observation(p, obs);
  CHECK(yt[1] == doctest::Approx(1.0));
  CHECK(yt.coeffs.norm() == doctest::Approx(1.0));
}

TEST_CASE("observation CSV round trip, 1-D and 2-D") {
  for (auto p : {brownian_motion_prior(7), tensor_prior_2d(brownian_motion_prior(3))}) {
    const Observation obs = simulate_data(CoefficientVector::zero(p), 5);
    std::stringstream ss;
    write_observation_csv(ss, p->grid(), obs);
    const std::string text = ss.str();
    CHECK(text.rfind(p->is_two_dimensional() ? "i,j,x1,x2,y\n" : "index,x,y\n", 0) == 0);
    const Observation back = read_observation_csv(ss, p->grid());
    CHECK((back.y - obs.y).cwiseAbs().maxCoeff() == 0.0);
  }
  std::stringstream bad("index,x,y\n1,0.1,2\n");
  CHECK_THROWS(read_observation_csv(bad, DesignGrid::bm_special(2)));
  std::stringstream header("idx,x,y\n");
  CHECK_THROWS(read_observation_csv(header, DesignGrid::bm_special(2)));
}
