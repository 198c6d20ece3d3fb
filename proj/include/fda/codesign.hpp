#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fda/interference.hpp"
#include "fda/receiver.hpp"
#include "fda/scenario.hpp"
#include "fda/sdp.hpp"
#include "fda/signal_model.hpp"
#include "fda/types.hpp"

namespace fda {

enum class DesignMode { joint, waveform_only, weight_only, baseline };

const char* to_string(DesignMode mode);
std::optional<DesignMode> design_mode_from_string(const std::string& name);

class InfeasibleScenarioError : public std::runtime_error {
 public:
  InfeasibleScenarioError(const std::string& msg, std::string binding_constraint)
      : std::runtime_error(msg), binding(std::move(binding_constraint)) {}
  std::string binding;
};

/// Everything the design loop shares read-only: structural matrices, bands,
/// covariance and its factorization.
struct DesignContext {
  ScenarioConfig cfg;
  StructuralMatrices mats;
  std::vector<BandIndexing> bands;
  CovarianceModel cov;
  std::shared_ptr<const QbarFactor> qbar;
  double snr_linear = 1.0;
};
DesignContext make_design_context(const ScenarioConfig& cfg);

/// Declared feasibility tolerances for the constraint-satisfaction report.
struct FeasibilityTolerances {
  double energy = 1e-10;      // per-waveform energy equalities
  double weight_norm = 1e-10; // ‖w‖² = N_T
  double bandwidth = 1e-9;    // s^H B_m s ≥ γ_m/N_T − bandwidth
  double similarity = 1e-9;
  double band = 1e-8;         // E_b ≤ η_b + band
};

struct ConstraintReport {
  double max_energy_residual = 0.0;
  double weight_norm_residual = 0.0;
  double min_bandwidth_margin = 0.0;  // min_m (s^H B_m s − γ_m/N_T)
  double waveform_similarity = 0.0;   // ‖s_T − s_Ref‖²
  double weight_similarity = 0.0;     // ‖w − w_Ref‖²
  std::vector<double> band_energies;  // E_b per band (algebraic form)
  bool feasible = false;
  std::string binding;  // first violated constraint, empty when feasible
};
ConstraintReport check_constraints(const CVec& s_t, const CVec& w, const DesignContext& ctx,
                                   const FeasibilityTolerances& tol = {});

struct DesignResult {
  DesignMode mode = DesignMode::joint;
  std::uint64_t seed = 0;
  CVec weights;            // w
  CVec waveform;           // s_T, waveform-major
  double sinr_linear = 0.0;
  double sinr_db = 0.0;
  std::vector<double> sinr_trace_db;  // incumbent Π after each iteration; [0] = initial point
  ConstraintReport constraints;
  std::vector<double> band_limits;    // η_b
  CVec v_opt;
  bool incumbent_feasible = false;
  bool weight_rounding_exhausted = false;
  bool waveform_rounding_exhausted = false;
  int iterations_run = 0;
};

/// P5: maximize Tr{Ψ̃(s)W} s.t. Tr{W}=N_T, Tr{(I−w_Ref w_Ref^H)W} ≤ µ²,
/// Tr{Ĩ_b(S)W} ≤ η_b, W ⪰ 0.
SdpProblem build_weight_sdp(const CVec& s_t, const DesignContext& ctx);

/// P7: maximize Tr{TΨ(w)TᵀS̄} s.t. Tr{Σ_m S̄}=1/N_T, Tr{(I−s_Ref s_Ref^H)S̄} ≤ ε²,
/// Tr{B_m S̄} ≥ γ_m/N_T, Tr{H_b(w)S̄} ≤ η_b, S̄ ⪰ 0.
SdpProblem build_waveform_sdp(const CVec& w, const DesignContext& ctx);

struct RoundingOutcome {
  CVec vec;
  double objective = 0.0;     // kernel quadratic form of the returned vector
  int n_feasible = 0;
  bool exhausted = false;     // no feasible trial; vec is the fallback
  bool rank_one = false;
};

/// Gaussian randomization for the weight step (Algorithm 1 steps i–v).
/// psi_s is the current Ψ̃(s) kernel; fallback is returned on exhaustion.
RoundingOutcome randomize_weights(const CMat& w_opt, const CMat& psi_s, const CMat& waveforms,
                                  const DesignContext& ctx, int n_trials, std::uint64_t seed,
                                  const CVec& fallback);

/// Gaussian randomization for the waveform step; trials are projected onto the
/// per-waveform energy manifold by per-block rescaling before filtering.
/// psi_t is the commutation-conjugated kernel T Ψ(w) Tᵀ.
RoundingOutcome randomize_waveform(const CMat& s_bar_opt, const CMat& psi_t, const CVec& w,
                                   const DesignContext& ctx, int n_trials, std::uint64_t seed,
                                   const CVec& fallback);

/// Algorithm 2 with an incumbent that only moves to feasible, improving
/// candidates, so the reported SINR trace cannot regress.
DesignResult alternate(const DesignContext& ctx, DesignMode mode = DesignMode::joint);

DesignResult run_mode(const ScenarioConfig& cfg, DesignMode mode);

}  // namespace fda
