#include "fda/receiver.hpp"

#include <stdexcept>

#include "fda/signal_model.hpp"

namespace fda {

namespace {

// One snapshot block b_R(θ) ⊗ diag(g), size N_T·N_R × N_T.
CMat snapshot_block(const CVec& b, const CVec& g) {
  const int n_rx = static_cast<int>(b.size());
  const int n_tx = static_cast<int>(g.size());
  CMat blk = CMat::Zero(n_rx * n_tx, n_tx);
  for (int n = 0; n < n_rx; ++n)
    for (int m = 0; m < n_tx; ++m) blk(n * n_tx + m, m) = b(n) * g(m);
  return blk;
}

}  // namespace

CMat build_a_of_w(double range_m, double theta_deg, const CVec& w, const ArrayConfig& cfg) {
  if (w.size() != cfg.n_tx) throw std::invalid_argument("build_a_of_w: weight length mismatch");
  const CVec a = tx_steering_range_angle(range_m, theta_deg, cfg);
  const CVec b = rx_steering(theta_deg, cfg);
  const CMat blk = snapshot_block(b, w.cwiseProduct(a));
  const int rows = cfg.snapshot_dim();
  CMat out = CMat::Zero(cfg.stacked_dim(), cfg.waveform_dim());
  for (int l = 0; l < cfg.n_samples; ++l) out.block(l * rows, l * cfg.n_tx, rows, cfg.n_tx) = blk;
  return out;
}

CMat build_a_of_s(double range_m, double theta_deg, const CVec& s_snapshot, const ArrayConfig& cfg) {
  if (s_snapshot.size() != cfg.waveform_dim())
    throw std::invalid_argument("build_a_of_s: snapshot vector length mismatch");
  const CVec a = tx_steering_range_angle(range_m, theta_deg, cfg);
  const CVec b = rx_steering(theta_deg, cfg);
  const int rows = cfg.snapshot_dim();
  CMat out(cfg.stacked_dim(), cfg.n_tx);
  for (int l = 0; l < cfg.n_samples; ++l) {
    const CVec s_l = s_snapshot.segment(l * cfg.n_tx, cfg.n_tx);
    out.middleRows(l * rows, rows) = snapshot_block(b, s_l.cwiseProduct(a));
  }
  return out;
}

CVec mvdr_weights(const CVec& target_signature, const QbarFactor& qbar) {
  const CVec qinv_u = qbar.solve(target_signature);
  const cxd denom = target_signature.dot(qinv_u);  // u^H Q̄⁻¹ u, real positive
  if (std::abs(denom) == 0.0) throw std::runtime_error("mvdr_weights: zero target signature");
  return qinv_u / denom.real();
}

double sinr_of_v(const CVec& v, const CVec& target_signature, const CMat& qbar, double snr_linear) {
  const double num = std::norm(v.dot(target_signature));
  const double den = (v.adjoint() * qbar * v).value().real();
  return snr_linear * num / den;
}

CMat psi_of_w(double range_m, double theta_deg, const CVec& w, const ArrayConfig& cfg,
              const QbarFactor& qbar) {
  const CMat a = build_a_of_w(range_m, theta_deg, w, cfg);
  return hermitize(a.adjoint() * qbar.solve(a));
}

CMat psi_of_s(double range_m, double theta_deg, const CVec& s_snapshot, const ArrayConfig& cfg,
              const QbarFactor& qbar) {
  const CMat a = build_a_of_s(range_m, theta_deg, s_snapshot, cfg);
  return hermitize(a.adjoint() * qbar.solve(a));
}

double sinr(const CVec& s_snapshot, const CVec& w, const ScenarioConfig& cfg,
            const QbarFactor& qbar, double snr_linear) {
  const CMat psi = psi_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array, qbar);
  return snr_linear * (s_snapshot.adjoint() * psi * s_snapshot).value().real();
}

SinrKernels sinr_kernels(const CVec& s_snapshot, const CVec& w, const ScenarioConfig& cfg,
                         const QbarFactor& qbar) {
  SinrKernels out;
  out.psi_w = psi_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array, qbar);
  out.psi_s = psi_of_s(cfg.target.range_m, cfg.target.angle_deg, s_snapshot, cfg.array, qbar);
  const CMat a = build_a_of_w(cfg.target.range_m, cfg.target.angle_deg, w, cfg.array);
  const CVec u = a * s_snapshot;
  out.mvdr = mvdr_weights(u, qbar);
  const double quad = (s_snapshot.adjoint() * out.psi_w * s_snapshot).value().real();
  out.sinr_linear = db2lin(cfg.target.snr_db) * quad;
  return out;
}

}  // namespace fda
