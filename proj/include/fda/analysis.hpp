#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fda/codesign.hpp"
#include "fda/types.hpp"

namespace fda {

inline constexpr const char* kToolVersion = "0.1.0";

/// Normalized autocorrelation of one waveform row, in dB, with the peak
/// sidelobe level taken outside the mainlobe (lags inside the first local
/// minimum of |r| are excluded).
struct AcfReport {
  std::vector<int> lags;  // −L+1 .. L−1
  Vec acf_db;
  double psl_db = 0.0;
};
AcfReport acf(const CMat& waveforms, int m);

/// Receive beampattern P_R(θ) = |v^H {I_L ⊗ [b_R(θ) ⊗ diag(w ⊙ a_T(r_t,θ))]} s|².
Vec receive_beampattern(const CVec& v_opt, const CVec& s_snapshot, const CVec& w,
                        const std::vector<double>& theta_deg_grid, double range_m,
                        const ArrayConfig& cfg);

/// Capon-style interference power over (channel, angle) from the
/// single-snapshot marginal of Q̄: probe b_R(θ) ⊗ e_m, rows = channels.
Mat interference_spectrum(const CovarianceModel& cov, const std::vector<double>& theta_deg_grid,
                          const ArrayConfig& cfg);

/// Run provenance recorded verbatim in summary.json. Wall time goes to
/// timing.json, which is excluded from the determinism guarantee.
struct RunManifest {
  std::string scenario_path;
  std::string mode;
  std::uint64_t seed = 0;
  int iters = 0;
  int trials = 0;
  std::string out_dir;
  std::string tool_version = kToolVersion;
};

/// Writes esd.csv, acf.csv, beampattern.csv, spectrum.csv, waveform.csv,
/// weights.csv and summary.json (with per-file content hashes) to out_dir.
void report(const DesignResult& result, const ScenarioConfig& scenario, const DesignContext& ctx,
            const std::filesystem::path& out_dir, const RunManifest& manifest);

}  // namespace fda
