#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fda/types.hpp"

namespace fda {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array geometry and per-channel sampling grid. Channel m (0-based) is
/// carried at f_m = f_c + m·Δf; Δf ≥ f_s keeps the channel spectra disjoint.
struct ArrayConfig {
  int n_tx = 1;
  int n_rx = 1;
  double carrier_hz = 10e9;
  double delta_f_hz = 1e6;
  double sample_rate_hz = 1e6;
  int n_samples = 2;
  double tx_spacing_m = 0.0;  // 0 means λ/2 default, resolved at validation
  double rx_spacing_m = 0.0;
  std::vector<double> inband_tolerance;  // γ_m, one per channel
  std::vector<double> lp_cutoff;         // f_{m,lp} in cycles/sample, one per channel

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double channel_carrier(int m) const { return carrier_hz + m * delta_f_hz; }
  double total_band_hz() const { return n_tx * delta_f_hz; }
  int snapshot_dim() const { return n_tx * n_rx; }
  int stacked_dim() const { return n_tx * n_rx * n_samples; }
  int waveform_dim() const { return n_tx * n_samples; }

  bool operator==(const ArrayConfig&) const = default;
};

struct TargetSpec {
  double range_m = 15e3;
  double angle_deg = 0.0;
  double snr_db = 0.0;
  double noise_power = 1.0;  // σ²

  bool operator==(const TargetSpec&) const = default;
};

struct InterfererSpec {
  double freq_hz = 0.0;   // tone center
  double angle_deg = 0.0;
  double inr_db = 0.0;    // power relative to σ²

  bool operator==(const InterfererSpec&) const = default;
};

/// Shared band in normalized units over the total FDA band [0,1].
struct SharedBandSpec {
  double f_low = 0.0;
  double f_high = 0.0;
  double eta = 0.0;  // acceptable in-band energy η_b

  bool operator==(const SharedBandSpec&) const = default;
};

struct DesignControls {
  double waveform_similarity = 6.0;   // ε²
  double weight_similarity = 15.0;    // µ²
  int max_iters = 4;                  // G_max
  int n_randomizations = 1000;        // J
  std::uint64_t rng_seed = 1;
  int covariance_size_cap = 4096;     // guard on N_T·N_R·L
  std::vector<cxd> reference_weights; // empty → all-ones

  bool operator==(const DesignControls&) const = default;
};

struct ScenarioConfig {
  ArrayConfig array;
  TargetSpec target;
  std::vector<InterfererSpec> interferers;
  std::vector<SharedBandSpec> shared_bands;
  DesignControls controls;

  std::vector<double> channel_carriers_hz;  // derived: f_m list

  bool operator==(const ScenarioConfig&) const = default;
};

/// Resolved indexing of one shared band onto the channel grid (Eq.-36-style
/// floor with the f_h = 1.0 boundary clamped to the last channel).
struct BandIndexing {
  int ch_low = 0;      // p_b, 0-based channel holding the lower edge
  int ch_high = 0;     // p̃_b
  double local_low = 0.0;   // (f_l − p_b·Δf)/f_s, cycles/sample
  double local_high = 0.0;  // (f_h − p̃_b·Δf)/f_s, cycles/sample
  enum class Case { same_channel, adjacent, spanning } kind = Case::same_channel;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// Validates all invariants; fills derived fields and per-channel defaults.
/// Throws ScenarioError naming the offending field.
void validate_scenario(ScenarioConfig& cfg);

BandIndexing normalize_band(const SharedBandSpec& band, const ArrayConfig& cfg);

/// The Tables II+III configuration used throughout the evaluation.
ScenarioConfig paper_scenario();

}  // namespace fda
