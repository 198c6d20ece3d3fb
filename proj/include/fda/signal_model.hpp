#pragma once

#include "fda/scenario.hpp"
#include "fda/types.hpp"

namespace fda {

/// N_T×L baseband sample matrix with its two vectorizations.
/// vec_snapshot stacks columns s(1..L); vec_waveform stacks rows (waveform-major).
struct WaveformSet {
  CMat samples;  // N_T × L

  CVec vec_snapshot() const {
    return Eigen::Map<const CVec>(samples.data(), samples.size());
  }
  CVec vec_waveform() const {
    CMat t = samples.transpose();
    return Eigen::Map<const CVec>(t.data(), t.size());
  }
  static WaveformSet from_vec_waveform(const CVec& s_t, int n_tx, int n_samples) {
    WaveformSet ws;
    ws.samples = Eigen::Map<const CMat>(s_t.data(), n_samples, n_tx).transpose();
    return ws;
  }
  static WaveformSet from_vec_snapshot(const CVec& s, int n_tx, int n_samples) {
    WaveformSet ws;
    ws.samples = Eigen::Map<const CMat>(s.data(), n_tx, n_samples);
    return ws;
  }
};

/// Transmit steering a_T(θ), entry m = exp(j2π m d_t sinθ / λ), m = 0..N_T−1.
CVec tx_steering_angle(double theta_deg, const ArrayConfig& cfg);

/// Range-angle transmit steering a_T(r,θ), entry m = exp(j2π m (d_t sinθ/λ − 2Δf r/c)).
CVec tx_steering_range_angle(double range_m, double theta_deg, const ArrayConfig& cfg);

/// Receive steering b_R(θ), entry n = exp(j2π n d_r sinθ / λ).
CVec rx_steering(double theta_deg, const ArrayConfig& cfg);

/// Permutation T(N_T,L) with T·vec_snapshot = vec_waveform.
Eigen::PermutationMatrix<Eigen::Dynamic> commutation_matrix(int n_tx, int n_samples);

/// Diagonal of the waveform-major energy selector Σ_m (0/1, block m of size L).
/// m is 0-based; throws std::out_of_range otherwise.
Vec energy_selector_diag(int m, const ArrayConfig& cfg);
CMat energy_selector(int m, const ArrayConfig& cfg);

/// L×L in-band Gram block of B_m: ∫_0^{f_lp} ẽ_f ẽ_f^H df.
CMat bandwidth_gram_block(int m, const ArrayConfig& cfg);
/// Full N_T·L bandwidth matrix B_m (zero outside diagonal block m).
CMat bandwidth_gram(int m, const ArrayConfig& cfg);

/// Reference waveform set: every channel carries the same unit-modulus linear
/// chirp of amplitude 1/√(N_T·L) sweeping [0, sweep] cycles/sample. The sweep
/// starts at the channel low-pass cutoff and is shrunk until the in-band
/// fraction meets γ_m on every channel; the sweep actually used is returned.
struct ReferenceLfm {
  WaveformSet waveforms;
  double sweep_cycles_per_sample = 0.0;
};
ReferenceLfm reference_lfm(const ArrayConfig& cfg);

/// Reference weights: scenario override or all-ones.
CVec reference_weights(const ScenarioConfig& cfg);

/// Everything the constraint assembly reuses across iterations.
struct StructuralMatrices {
  Eigen::PermutationMatrix<Eigen::Dynamic> commutation;  // T(N_T,L)
  std::vector<Vec> energy_selectors;                     // diagonals of Σ_m
  std::vector<CMat> bandwidth_blocks;                    // L×L blocks of B_m
  CVec s_ref;                                            // waveform-major reference
  CVec w_ref;
  double lfm_sweep = 0.0;
};
StructuralMatrices build_structural_matrices(const ScenarioConfig& cfg);

}  // namespace fda
