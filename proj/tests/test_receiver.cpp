#include <doctest.h>

#include "fda/receiver.hpp"
#include "fda/signal_model.hpp"
#include "test_util.hpp"

using namespace fda;

namespace {

// Element-by-element oracle for the stacked target snapshot: entry
// ((l·N_R + n)·N_T + m) = b_n · w_m · a_m · s_m(l).
CVec stacked_snapshot_oracle(double r, double th, const CVec& w, const CMat& S,
                             const ArrayConfig& cfg) {
  const CVec a = tx_steering_range_angle(r, th, cfg);
  const CVec b = rx_steering(th, cfg);
  CVec out(cfg.stacked_dim());
  for (int l = 0; l < cfg.n_samples; ++l)
    for (int n = 0; n < cfg.n_rx; ++n)
      for (int m = 0; m < cfg.n_tx; ++m)
        out((l * cfg.n_rx + n) * cfg.n_tx + m) = b(n) * w(m) * a(m) * S(m, l);
  return out;
}

}  // namespace

TEST_CASE("receive operators against the per-element oracle") {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 8; ++rep) {
    ScenarioConfig cfg = test::random_scenario(gen);
    const int n_tx = cfg.array.n_tx, L = cfg.array.n_samples;
    const CMat S = test::random_unit_energy_waveforms(n_tx, L, gen);
    const CVec w = complex_gaussian(n_tx, gen);
    WaveformSet ws;
    ws.samples = S;
    const CVec s = ws.vec_snapshot();
    const double r = cfg.target.range_m, th = cfg.target.angle_deg;

    const CVec oracle = stacked_snapshot_oracle(r, th, w, S, cfg.array);
    const CMat a_w = build_a_of_w(r, th, w, cfg.array);
    const CMat a_s = build_a_of_s(r, th, s, cfg.array);
    CHECK((CVec(a_w * s) - oracle).norm() < 1e-12 * std::max(1.0, oracle.norm()));
    CHECK((CVec(a_s * w) - oracle).norm() < 1e-12 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("degenerate operator shapes") {
  SUBCASE("all dimensions one with integer range term") {
    ScenarioConfig cfg = test::small_scenario(1, 1, 2);
    const double r = 100.0 * kSpeedOfLight / (2.0 * cfg.array.delta_f_hz);
    CVec w = CVec::Ones(1);
    const CMat a = build_a_of_w(r, 0.0, w, cfg.array);
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 2);
    CHECK(std::abs(a(0, 0) - cxd(1.0, 0.0)) < 1e-9);
  }
  SUBCASE("zero weights give the zero operator") {
    ScenarioConfig cfg = test::small_scenario(3, 2, 4);
    CHECK(build_a_of_w(1e4, 25.0, CVec::Zero(3), cfg.array).norm() == 0.0);
  }
  SUBCASE("zero waveform gives the zero operator") {
    ScenarioConfig cfg = test::small_scenario(3, 2, 4);
    CHECK(build_a_of_s(1e4, 25.0, CVec::Zero(12), cfg.array).norm() == 0.0);
  }
  SUBCASE("dimension mismatches throw") {
    ScenarioConfig cfg = test::small_scenario(3, 2, 4);
    CHECK_THROWS_AS(build_a_of_w(1e4, 0.0, CVec::Ones(2), cfg.array), std::invalid_argument);
    CHECK_THROWS_AS(build_a_of_s(1e4, 0.0, CVec::Ones(5), cfg.array), std::invalid_argument);
  }
}

TEST_CASE("mvdr weights are distortionless and scale-invariant") {
  ScenarioConfig cfg = paper_scenario();
  const CovarianceModel cov = assemble_qbar(cfg.interferers, cfg.array, cfg.target.noise_power);
  const QbarFactor qf(cov.full);

  const auto ref = reference_lfm(cfg.array);
  WaveformSet ws = ref.waveforms;
  const CVec w = CVec::Ones(cfg.array.n_tx);
  const CMat a = build_a_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array);
  const CVec u = a * ws.vec_snapshot();

  const CVec v = mvdr_weights(u, qf);
  CHECK(std::abs(v.dot(u) - cxd(1.0, 0.0)) < 1e-10);

  SUBCASE("identity covariance reduces to matched filtering") {
    const QbarFactor id(CMat::Identity(u.size(), u.size()));
    const CVec v_id = mvdr_weights(u, id);
    CHECK((v_id - u / u.squaredNorm()).norm() < 1e-12);
  }
  SUBCASE("v is invariant under scaling the covariance") {
    const QbarFactor scaled(CMat(2.5 * cov.full));
    CHECK((mvdr_weights(u, scaled) - v).norm() < 1e-10 * v.norm());
  }
  SUBCASE("mvdr maximizes SINR over random receive vectors") {
    std::mt19937_64 gen(19);
    const double best = sinr_of_v(v, u, cov.full, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      CVec vr = complex_gaussian(static_cast<int>(u.size()), gen);
      CHECK(sinr_of_v(vr, u, cov.full, 1.0) <= best * (1.0 + 1e-8));
    }
  }
}

TEST_CASE("interference-free SINR ceiling is SNR * N_R") {
  ScenarioConfig cfg = paper_scenario();
  cfg.interferers.clear();
  const CovarianceModel cov = assemble_qbar(cfg.interferers, cfg.array);
  const QbarFactor qf(cov.full);
  const auto ref = reference_lfm(cfg.array);
  WaveformSet ws = ref.waveforms;
  const CVec w = CVec::Ones(cfg.array.n_tx);
  const double pi = sinr(ws.vec_snapshot(), w, cfg, qf, db2lin(cfg.target.snr_db));
  CHECK(lin2db(pi) == doctest::Approx(6.0205999).epsilon(1e-6));

  SUBCASE("zero waveform gives zero SINR") {
    CHECK(sinr(CVec::Zero(cfg.array.waveform_dim()), w, cfg, qf, 1.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("kernel duality and phase invariance") {
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 10; ++rep) {
    ScenarioConfig cfg = test::random_scenario(gen);
    const CovarianceModel cov = assemble_qbar(cfg.interferers, cfg.array);
    const QbarFactor qf(cov.full);
    const CVec s = complex_gaussian(cfg.array.waveform_dim(), gen);
    const CVec w = complex_gaussian(cfg.array.n_tx, gen);
    const double r = cfg.target.range_m, th = cfg.target.angle_deg;

    const CMat psi_w = psi_of_w(r, th, w, cfg.array, qf);
    const CMat psi_s = psi_of_s(r, th, s, cfg.array, qf);
    const double via_w = (s.adjoint() * psi_w * s).value().real();
    const double via_s = (w.adjoint() * psi_s * w).value().real();
    CHECK(std::abs(via_w - via_s) / std::max(1e-30, std::abs(via_w)) < 1e-10);

    CHECK((psi_w - psi_w.adjoint()).norm() < 1e-12 * std::max(1.0, psi_w.norm()));
    Eigen::SelfAdjointEigenSolver<CMat> eig(psi_w);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10 * std::max(1.0, psi_w.norm()));

    // global phases drop out
    const cxd phase = std::exp(kJ * 0.7);
    const double with_phase =
        (CVec(phase * s).adjoint() * psi_w * CVec(phase * s)).value().real();
    CHECK(with_phase == doctest::Approx(via_w).epsilon(1e-12));
  }
}

TEST_CASE("identity covariance kernel has N_R-weighted diagonal blocks") {
  ScenarioConfig cfg = test::small_scenario(3, 2, 4);
  const QbarFactor id(CMat::Identity(cfg.array.stacked_dim(), cfg.array.stacked_dim()));
  CVec w(3);
  w << 1.0, std::exp(kJ * 0.3), std::exp(kJ * 1.1);  // unit modulus
  const CMat psi = psi_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array, id);
  CHECK((psi - cfg.array.n_rx * CMat::Identity(12, 12)).norm() < 1e-10);
}

TEST_CASE("sinr_kernels bundles a consistent snapshot") {
  ScenarioConfig cfg = test::small_scenario(3, 2, 6);
  cfg.interferers = {{cfg.array.carrier_hz, 10.0, 15.0}};
  validate_scenario(cfg);
  const CovarianceModel cov = assemble_qbar(cfg.interferers, cfg.array);
  const QbarFactor qf(cov.full);
  std::mt19937_64 gen(31);
  const CMat S = test::random_unit_energy_waveforms(3, 6, gen);
  WaveformSet ws;
  ws.samples = S;
  const CVec w = CVec::Ones(3);

  const SinrKernels k = sinr_kernels(ws.vec_snapshot(), w, cfg, qf);
  const CMat a = build_a_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array);
  const CVec u = a * ws.vec_snapshot();
  CHECK(std::abs(k.mvdr.dot(u) - cxd(1.0, 0.0)) < 1e-10);
  CHECK(k.sinr_linear == doctest::Approx(sinr_of_v(k.mvdr, u, cov.full, 1.0)).epsilon(1e-9));
  CHECK(k.psi_w.rows() == 18);
  CHECK(k.psi_s.rows() == 3);
}
