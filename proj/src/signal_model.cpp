#include "fda/signal_model.hpp"

#include <cmath>
#include <stdexcept>

#include "fda/spectral.hpp"

namespace fda {

namespace {

CVec phase_ramp(int n, double step_cycles) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = std::exp(kJ * (2.0 * kPi * step_cycles * i));
  return v;
}

}  // namespace

CVec tx_steering_angle(double theta_deg, const ArrayConfig& cfg) {
  const double step = cfg.tx_spacing_m * std::sin(deg2rad(theta_deg)) / cfg.wavelength();
  return phase_ramp(cfg.n_tx, step);
}

CVec tx_steering_range_angle(double range_m, double theta_deg, const ArrayConfig& cfg) {
  const double step = cfg.tx_spacing_m * std::sin(deg2rad(theta_deg)) / cfg.wavelength() -
                      2.0 * cfg.delta_f_hz * range_m / kSpeedOfLight;
  return phase_ramp(cfg.n_tx, step);
}

CVec rx_steering(double theta_deg, const ArrayConfig& cfg) {
  const double step = cfg.rx_spacing_m * std::sin(deg2rad(theta_deg)) / cfg.wavelength();
  return phase_ramp(cfg.n_rx, step);
}

Eigen::PermutationMatrix<Eigen::Dynamic> commutation_matrix(int n_tx, int n_samples) {
  if (n_tx < 1 || n_samples < 1) throw std::invalid_argument("commutation_matrix: sizes must be >= 1");
  // Column l*N_T+m of T carries its 1 at row m*L+l, so T maps the
  // snapshot-major stack onto the waveform-major stack.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(n_tx * n_samples);
  auto& idx = perm.indices();
  for (int l = 0; l < n_samples; ++l)
    for (int m = 0; m < n_tx; ++m) idx[l * n_tx + m] = m * n_samples + l;
  return perm;
}

Vec energy_selector_diag(int m, const ArrayConfig& cfg) {
  if (m < 0 || m >= cfg.n_tx) throw std::out_of_range("energy_selector: channel index out of range");
  Vec d = Vec::Zero(cfg.waveform_dim());
  d.segment(m * cfg.n_samples, cfg.n_samples).setOnes();
  return d;
}

CMat energy_selector(int m, const ArrayConfig& cfg) {
  return energy_selector_diag(m, cfg).cast<cxd>().asDiagonal();
}

CMat bandwidth_gram_block(int m, const ArrayConfig& cfg) {
  if (m < 0 || m >= cfg.n_tx) throw std::out_of_range("bandwidth_gram: channel index out of range");
  return frequency_gram(0.0, cfg.lp_cutoff[m], cfg.n_samples);
}

CMat bandwidth_gram(int m, const ArrayConfig& cfg) {
  const int L = cfg.n_samples;
  CMat b = CMat::Zero(cfg.waveform_dim(), cfg.waveform_dim());
  b.block(m * L, m * L, L, L) = bandwidth_gram_block(m, cfg);
  return b;
}

ReferenceLfm reference_lfm(const ArrayConfig& cfg) {
  const int L = cfg.n_samples;
  const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_tx) * L);
  double cutoff = *std::min_element(cfg.lp_cutoff.begin(), cfg.lp_cutoff.end());
  double sweep = cutoff;

  std::vector<CMat> grams(cfg.n_tx);
  for (int m = 0; m < cfg.n_tx; ++m) grams[m] = bandwidth_gram_block(m, cfg);

  CVec row(L);
  for (int iter = 0; iter < 400; ++iter) {
    // Chirp centered inside [0, cutoff]: instantaneous frequency runs from
    // (cutoff−sweep)/2 up by `sweep` cycles/sample across the pulse.
    const double f0 = 0.5 * (cutoff - sweep);
    for (int l = 0; l < L; ++l) {
      const double phase = 2.0 * kPi * (f0 * l + 0.5 * sweep * l * l / L);
      row(l) = amp * std::exp(kJ * phase);
    }
    bool ok = true;
    for (int m = 0; m < cfg.n_tx; ++m) {
      const double inband = (row.adjoint() * grams[m] * row).value().real();
      const double fraction = inband * cfg.n_tx;  // row energy is exactly 1/N_T
      if (fraction < cfg.inband_tolerance[m]) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    sweep *= 0.93;
  }

  ReferenceLfm out;
  out.sweep_cycles_per_sample = sweep;
  out.waveforms.samples = row.transpose().replicate(cfg.n_tx, 1);
  return out;
}

CVec reference_weights(const ScenarioConfig& cfg) {
  if (!cfg.controls.reference_weights.empty())
    return Eigen::Map<const CVec>(cfg.controls.reference_weights.data(), cfg.array.n_tx);
  return CVec::Ones(cfg.array.n_tx);
}

StructuralMatrices build_structural_matrices(const ScenarioConfig& cfg) {
  StructuralMatrices out;
  out.commutation = commutation_matrix(cfg.array.n_tx, cfg.array.n_samples);
  out.energy_selectors.reserve(cfg.array.n_tx);
  out.bandwidth_blocks.reserve(cfg.array.n_tx);
  for (int m = 0; m < cfg.array.n_tx; ++m) {
    out.energy_selectors.push_back(energy_selector_diag(m, cfg.array));
    out.bandwidth_blocks.push_back(bandwidth_gram_block(m, cfg.array));
  }
  auto ref = reference_lfm(cfg.array);
  out.s_ref = ref.waveforms.vec_waveform();
  out.lfm_sweep = ref.sweep_cycles_per_sample;
  out.w_ref = reference_weights(cfg);
  return out;
}

}  // namespace fda
