#pragma once

#include <span>
#include <vector>

#include "fda/scenario.hpp"
#include "fda/types.hpp"

namespace fda {

/// Per-channel interference powers under the ideal-filter model: the full tone
/// power lands in the unique channel whose band [f_k − f_s/2, f_k + f_s/2)
/// contains the tone; a tone outside every channel raises the warning flag.
struct ChannelPowers {
  Vec powers;             // length N_T, absolute units (σ² included)
  bool out_of_band = false;
};
ChannelPowers channel_powers(const InterfererSpec& intf, const ArrayConfig& cfg,
                             double noise_power = 1.0);

/// Snapshot covariance of one interferer, (b_R(θ_i) b_R^H(θ_i)) ⊗ P_i, in the
/// receive-major ordering of the stacked snapshot (receive element outer,
/// channel inner). Hermitian PSD, rank = number of active channels.
CMat q_block(const InterfererSpec& intf, const ArrayConfig& cfg, double noise_power = 1.0);

/// The formula as printed in the source material (non-Hermitian through
/// b_R^H(θ_t) and channel-major ordering); kept for comparison only.
CMat q_block_printed(const InterfererSpec& intf, const ArrayConfig& cfg, double target_angle_deg,
                     double noise_power = 1.0);

struct CovarianceModel {
  std::vector<CMat> per_interferer;  // Q_i, order N_T·N_R
  CMat full;                         // Q̄_{i+n}, order N_T·N_R·L, σ²-normalized
  double noise_power = 1.0;

  /// Single-snapshot marginal Σ_i Q_i/σ² + I, order N_T·N_R.
  CMat q_single() const;
};

/// Q̄ = (1/σ²) Σ_i (1_L 1_Lᵀ) ⊗ Q_i + I. Rejects N_T·N_R·L above the cap.
CovarianceModel assemble_qbar(std::span<const InterfererSpec> interferers, const ArrayConfig& cfg,
                              double noise_power = 1.0, int size_cap = 4096);

enum class InterfererModel { tone, bandlimited_white };

/// Monte-Carlo validator for the diagonal cross-channel property: synthesizes
/// the interferer (tone with uniform random phase, or band-limited white),
/// runs it through per-channel mixing and an ideal low-pass, and returns the
/// N_T×N_T sample covariance of the channel outputs.
CMat simulate_interferer_channels(const InterfererSpec& intf, const ArrayConfig& cfg, int n_trials,
                                  std::uint64_t seed, InterfererModel model = InterfererModel::tone,
                                  double noise_power = 1.0);

}  // namespace fda
