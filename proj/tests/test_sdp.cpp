#include <doctest.h>

#include <sstream>

#include "fda/rng.hpp"
#include "fda/sdp.hpp"

using namespace fda;

namespace {

CMat random_hermitian(int n, std::mt19937_64& gen) {
  CMat a(n, n);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cxd(nd(gen), nd(gen));
  return hermitize(a);
}

}  // namespace

TEST_CASE("hermitian embedding round-trips and preserves spectra") {
  std::mt19937_64 gen(3);

  SUBCASE("identity maps to the doubled identity") {
    CHECK((hermitian_to_real_embedding(CMat::Identity(4, 4)) - Mat::Identity(8, 8)).norm() == 0.0);
  }
  SUBCASE("the canonical antisymmetric example keeps eigenvalues ±1") {
    CMat h(2, 2);
    h << 0.0, -kJ, kJ, 0.0;
    const Mat e = hermitian_to_real_embedding(h);
    Eigen::SelfAdjointEigenSolver<Mat> eig(e);
    CHECK(eig.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(eig.eigenvalues()(3) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("round trip is exact and traces halve") {
    for (int rep = 0; rep < 20; ++rep) {
      const CMat a = random_hermitian(5, gen);
      const CMat x = random_hermitian(5, gen);
      CHECK((real_embedding_to_hermitian(hermitian_to_real_embedding(a)) - a).norm() < 1e-14);
      const double direct = (a.conjugate().cwiseProduct(x)).sum().real();
      const double embedded =
          (hermitian_to_real_embedding(a).cwiseProduct(hermitian_to_real_embedding(x))).sum();
      CHECK(direct == doctest::Approx(0.5 * embedded).epsilon(1e-12));
    }
  }
  SUBCASE("non-Hermitian input throws") {
    CMat bad(2, 2);
    bad << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(hermitian_to_real_embedding(bad), std::invalid_argument);
  }
}

TEST_CASE("scalar and diagonal toy problems") {
  SUBCASE("dim 1: max Tr(X) with Tr(X) = 1") {
    SdpProblem p;
    p.objective = CMat::Identity(1, 1);
    p.eq.push_back({CMat::Identity(1, 1), 1.0});
    const SdpSolution sol = solve(p);
    CHECK(sol.status == SdpStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(sol.x_opt(0, 0) - cxd(1.0, 0.0)) < 1e-6);
  }
  SUBCASE("dim 2: C = diag(1,2) picks the dominant eigenvector") {
    SdpProblem p;
    CVec diag(2);
    diag << 1.0, 2.0;
    p.objective = diag.asDiagonal();
    p.eq.push_back({CMat::Identity(2, 2), 1.0});
    const SdpSolution sol = solve(p);
    CHECK(sol.status == SdpStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::abs(sol.x_opt(1, 1).real() - 1.0) < 1e-6);
    CHECK(std::abs(sol.x_opt(0, 0)) < 1e-6);
  }
}

TEST_CASE("lambda-max specialization on random Hermitian objectives") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 5;
    SdpProblem p;
    p.objective = random_hermitian(n, gen);
    p.eq.push_back({CMat::Identity(n, n), 1.0});
    const SdpSolution sol = solve(p, 1e-7, 100);
    Eigen::SelfAdjointEigenSolver<CMat> eig(p.objective);
    CHECK(sol.status == SdpStatus::optimal);
    CHECK(sol.objective_value ==
          doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-6).scale(1.0));
    CHECK(sol.duality_gap < 1e-5 * std::max(1.0, std::abs(sol.objective_value)));
    // X is the rank-one eigenprojector when the top eigenvalue is simple
    Eigen::SelfAdjointEigenSolver<CMat> xeig(sol.x_opt);
    if (eig.eigenvalues()(n - 1) - eig.eigenvalues()(n - 2) > 1e-3)
      CHECK(xeig.eigenvalues()(n - 1) > 1.0 - 1e-4);
  }
}

TEST_CASE("trace scaling: value = c * lambda_max under Tr(X) = c") {
  std::mt19937_64 gen(13);
  const CMat c_mat = random_hermitian(4, gen);
  Eigen::SelfAdjointEigenSolver<CMat> eig(c_mat);
  SdpProblem p;
  p.objective = c_mat;
  p.eq.push_back({CMat::Identity(4, 4), 3.5});
  const SdpSolution sol = solve(p);
  CHECK(sol.objective_value == doctest::Approx(3.5 * eig.eigenvalues().maxCoeff()).epsilon(1e-6));
}

TEST_CASE("inequality constraints bind correctly") {
  // maximize x11 + x22 with Tr(X) <= 2, x11 <= 0.5
  SdpProblem p;
  p.objective = CMat::Identity(2, 2);
  p.le.push_back({CMat::Identity(2, 2), 2.0});
  CMat e11 = CMat::Zero(2, 2);
  e11(0, 0) = 1.0;
  p.le.push_back({e11, 0.5});
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.x_opt(0, 0).real() <= 0.5 + 1e-6);

  SUBCASE("a >= constraint forces weight into a block") {
    SdpProblem q;
    q.objective = -CMat::Identity(2, 2);  // minimize trace
    q.eq.push_back({CMat::Identity(2, 2), 1.0});
    q.ge.push_back({e11, 0.75});
    const SdpSolution sq = solve(q);
    CHECK(sq.status == SdpStatus::optimal);
    CHECK(sq.x_opt(0, 0).real() >= 0.75 - 1e-6);
  }
}

TEST_CASE("complex off-diagonal objective is handled through the embedding") {
  // maximize Tr(C X), C = [[0, j], [-j, 0]] has eigenvalues ±1
  CMat c(2, 2);
  c << 0.0, kJ, -kJ, 0.0;
  SdpProblem p;
  p.objective = c;
  p.eq.push_back({CMat::Identity(2, 2), 1.0});
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK((sol.x_opt - sol.x_opt.adjoint()).norm() < 1e-10);
}

TEST_CASE("weak duality sandwich against supplied feasible points") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 3;
    SdpProblem p;
    p.objective = random_hermitian(n, gen);
    p.eq.push_back({CMat::Identity(n, n), 1.0});
    const SdpSolution sol = solve(p);
    REQUIRE(sol.status == SdpStatus::optimal);
    for (int k = 0; k < 10; ++k) {
      CVec v = complex_gaussian(n, gen);
      v /= v.norm();
      const double feasible_value = (v.adjoint() * p.objective * v).value().real();
      CHECK(feasible_value <= sol.objective_value + 1e-6);
    }
  }
}

TEST_CASE("determinism: identical problems give bit-identical solutions") {
  std::mt19937_64 gen(23);
  const CMat c = random_hermitian(6, gen);
  SdpProblem p;
  p.objective = c;
  p.eq.push_back({CMat::Identity(6, 6), 2.0});
  p.le.push_back({CMat(0.5 * CMat::Identity(6, 6)), 1.0});
  const SdpSolution a = solve(p);
  const SdpSolution b = solve(p);
  CHECK(a.objective_value == b.objective_value);
  CHECK((a.x_opt - b.x_opt).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("problems without a bounding constraint are rejected") {
  SdpProblem p;
  p.objective = CMat::Identity(2, 2);
  p.ge.push_back({CMat::Identity(2, 2), 1.0});
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("constraint residuals are reported post-unscaling") {
  SdpProblem p;
  p.objective = CMat::Identity(3, 3);
  p.eq.push_back({CMat::Identity(3, 3) * 100.0, 250.0});  // Tr(X) = 2.5 after scaling
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(sol.max_eq_residual < 1e-4);  // absolute, in the original units of 250
  CHECK(sol.objective_value == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("problem dump emits every block") {
  SdpProblem p;
  p.objective = CMat::Identity(2, 2);
  p.eq.push_back({CMat::Identity(2, 2), 1.0});
  p.le.push_back({CMat::Identity(2, 2), 2.0});
  std::ostringstream os;
  dump_problem(p, os);
  const std::string text = os.str();
  CHECK(text.find("sdp dim 2 eq 1 le 1 ge 0") != std::string::npos);
  CHECK(text.find("objective") != std::string::npos);
  CHECK(text.find("le 0 2") != std::string::npos);
}
