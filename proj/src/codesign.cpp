#include "fda/codesign.hpp"

#include <cmath>
#include <limits>

#include "fda/parallel.hpp"
#include "fda/rng.hpp"
#include "fda/spectral.hpp"

namespace fda {

namespace {

constexpr double kRankOneRatio = 1e-8;

// Global phase is free for every constraint and for the SINR; align it so the
// Euclidean similarity to the reference is smallest.
CVec phase_align(const CVec& v, const CVec& ref) {
  const cxd inner = ref.dot(v);  // ref^H v
  if (std::abs(inner) < 1e-300) return v;
  return v * std::conj(inner / std::abs(inner));
}

double quad(const CMat& a, const CVec& v) { return (v.adjoint() * a * v).value().real(); }

// Lower Cholesky factor with escalating diagonal jitter for rank-deficient
// covariances out of the SDP.
CMat cholesky_with_jitter(const CMat& w) {
  const int n = static_cast<int>(w.rows());
  const double scale = std::max(1e-300, std::abs(w.trace().real()) / n);
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    CMat shifted = w + jitter * scale * CMat::Identity(n, n);
    Eigen::LLT<CMat> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = jitter == 0.0 ? 1e-14 : jitter * 100.0;
  }
  throw std::runtime_error("randomization: covariance factorization failed");
}

struct EigPair {
  CVec dominant;
  double ratio;  // λ₂/λ₁
};
EigPair dominant_eigvec(const CMat& w) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(hermitize(w));
  const int n = static_cast<int>(w.rows());
  EigPair out;
  out.dominant = eig.eigenvectors().col(n - 1);
  const double l1 = std::max(0.0, eig.eigenvalues()(n - 1));
  const double l2 = n > 1 ? std::max(0.0, eig.eigenvalues()(n - 2)) : 0.0;
  out.ratio = l1 > 0.0 ? l2 / l1 : 1.0;
  return out;
}

// Per-block rescale onto the energy manifold s^H Σ_m s = 1/N_T.
CVec project_energy(const CVec& s_t, const DesignContext& ctx) {
  const int n_tx = ctx.cfg.array.n_tx;
  const int L = ctx.cfg.array.n_samples;
  const double target = 1.0 / std::sqrt(static_cast<double>(n_tx));
  CVec out = s_t;
  for (int m = 0; m < n_tx; ++m) {
    auto block = out.segment(m * L, L);
    const double norm = block.norm();
    if (norm < 1e-300)
      block = ctx.mats.s_ref.segment(m * L, L) * (target / ctx.mats.s_ref.segment(m * L, L).norm());
    else
      block *= target / norm;
  }
  return out;
}

bool weight_trial_feasible(const CVec& w, const std::vector<CMat>& i_tildes,
                           const DesignContext& ctx, const FeasibilityTolerances& tol) {
  const double mu2 = ctx.cfg.controls.weight_similarity;
  if ((w - ctx.mats.w_ref).squaredNorm() > mu2 + tol.similarity) return false;
  const double rewrite = w.squaredNorm() - std::norm(ctx.mats.w_ref.dot(w));  // P3 form
  if (rewrite > mu2 + tol.similarity) return false;
  for (size_t b = 0; b < ctx.bands.size(); ++b)
    if (quad(i_tildes[b], w) > ctx.cfg.shared_bands[b].eta + tol.band) return false;
  return true;
}

bool waveform_trial_feasible(const CVec& s_t, const std::vector<CMat>& h_bs,
                             const DesignContext& ctx, const FeasibilityTolerances& tol) {
  const int n_tx = ctx.cfg.array.n_tx;
  const int L = ctx.cfg.array.n_samples;
  for (int m = 0; m < n_tx; ++m) {
    const auto block = s_t.segment(m * L, L);
    const double inband = quad(ctx.mats.bandwidth_blocks[m], block);
    if (inband < ctx.cfg.array.inband_tolerance[m] / n_tx - tol.bandwidth) return false;
  }
  if ((s_t - ctx.mats.s_ref).squaredNorm() > ctx.cfg.controls.waveform_similarity + tol.similarity)
    return false;
  for (size_t b = 0; b < ctx.bands.size(); ++b)
    if (quad(h_bs[b], s_t) > ctx.cfg.shared_bands[b].eta + tol.band) return false;
  return true;
}

struct BestTrial {
  double objective = -std::numeric_limits<double>::infinity();
  int index = std::numeric_limits<int>::max();
  CVec vec;
};

// Deterministic winner: higher objective, ties to the lowest trial index.
void merge_best(BestTrial& into, const BestTrial& cand) {
  if (cand.vec.size() == 0) return;
  if (cand.objective > into.objective ||
      (cand.objective == into.objective && cand.index < into.index))
    into = cand;
}

// Structural infeasibility screen; returns the binding band description.
std::optional<std::string> feasibility_screen(const DesignContext& ctx, DesignMode mode) {
  const int n_tx = ctx.cfg.array.n_tx;
  const bool weights_frozen =
      mode == DesignMode::waveform_only || mode == DesignMode::baseline;
  for (size_t b = 0; b < ctx.bands.size(); ++b) {
    const auto& band = ctx.bands[b];
    const double eta = ctx.cfg.shared_bands[b].eta;
    const std::string name = "shared_bands[" + std::to_string(b) + "]";
    if (eta == 0.0) return name + ": eta = 0 is unreachable under the per-waveform energy constraint";
    if (weights_frozen) {
      // Interior channels of a spanning band radiate |w_m|²/N_T no matter the waveform.
      double lb = 0.0;
      for (int m = band.ch_low + 1; m < band.ch_high; ++m)
        lb += std::norm(ctx.mats.w_ref(m)) / n_tx;
      if (eta < lb - 1e-9)
        return name + ": eta below the fixed-weight floor " + std::to_string(lb);
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(DesignMode mode) {
  switch (mode) {
    case DesignMode::joint: return "joint";
    case DesignMode::waveform_only: return "waveform";
    case DesignMode::weight_only: return "weight";
    case DesignMode::baseline: return "baseline";
  }
  return "unknown";
}

std::optional<DesignMode> design_mode_from_string(const std::string& name) {
  if (name == "joint") return DesignMode::joint;
  if (name == "waveform" || name == "waveform_only") return DesignMode::waveform_only;
  if (name == "weight" || name == "weight_only") return DesignMode::weight_only;
  if (name == "baseline") return DesignMode::baseline;
  return std::nullopt;
}

DesignContext make_design_context(const ScenarioConfig& cfg) {
  DesignContext ctx;
  ctx.cfg = cfg;
  ctx.mats = build_structural_matrices(cfg);
  for (const auto& band : cfg.shared_bands) ctx.bands.push_back(normalize_band(band, cfg.array));
  ctx.cov = assemble_qbar(cfg.interferers, cfg.array, cfg.target.noise_power,
                          cfg.controls.covariance_size_cap);
  ctx.qbar = std::make_shared<const QbarFactor>(ctx.cov.full);
  ctx.snr_linear = db2lin(cfg.target.snr_db);
  return ctx;
}

ConstraintReport check_constraints(const CVec& s_t, const CVec& w, const DesignContext& ctx,
                                   const FeasibilityTolerances& tol) {
  const int n_tx = ctx.cfg.array.n_tx;
  const int L = ctx.cfg.array.n_samples;
  ConstraintReport rep;
  rep.feasible = true;
  auto fail = [&rep](const std::string& what) {
    if (rep.feasible) rep.binding = what;
    rep.feasible = false;
  };

  for (int m = 0; m < n_tx; ++m) {
    const double e = s_t.segment(m * L, L).squaredNorm();
    rep.max_energy_residual = std::max(rep.max_energy_residual, std::abs(e - 1.0 / n_tx));
  }
  if (rep.max_energy_residual > tol.energy) fail("per-waveform energy equality");

  rep.weight_norm_residual = std::abs(w.squaredNorm() - n_tx);
  if (rep.weight_norm_residual > tol.weight_norm) fail("weight energy equality");

  rep.min_bandwidth_margin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < n_tx; ++m) {
    const double inband = quad(ctx.mats.bandwidth_blocks[m], s_t.segment(m * L, L));
    rep.min_bandwidth_margin =
        std::min(rep.min_bandwidth_margin, inband - ctx.cfg.array.inband_tolerance[m] / n_tx);
  }
  if (rep.min_bandwidth_margin < -tol.bandwidth) fail("bandwidth constraint");

  rep.waveform_similarity = (s_t - ctx.mats.s_ref).squaredNorm();
  if (rep.waveform_similarity > ctx.cfg.controls.waveform_similarity + tol.similarity)
    fail("waveform similarity");
  rep.weight_similarity = (w - ctx.mats.w_ref).squaredNorm();
  if (rep.weight_similarity > ctx.cfg.controls.weight_similarity + tol.similarity)
    fail("weight similarity");

  const WaveformSet ws = WaveformSet::from_vec_waveform(s_t, n_tx, L);
  for (size_t b = 0; b < ctx.bands.size(); ++b) {
    const double e_b = band_energy(ws.samples, w, ctx.bands[b], ctx.cfg.array);
    rep.band_energies.push_back(e_b);
    if (e_b > ctx.cfg.shared_bands[b].eta + tol.band)
      fail("shared_bands[" + std::to_string(b) + "] energy");
  }
  return rep;
}

SdpProblem build_weight_sdp(const CVec& s_t, const DesignContext& ctx) {
  const int n_tx = ctx.cfg.array.n_tx;
  const WaveformSet ws = WaveformSet::from_vec_waveform(s_t, n_tx, ctx.cfg.array.n_samples);
  const CVec s = ws.vec_snapshot();

  SdpProblem prob;
  prob.objective = psi_of_s(ctx.cfg.target.range_m, ctx.cfg.target.angle_deg, s, ctx.cfg.array,
                            *ctx.qbar);
  prob.eq.push_back({CMat::Identity(n_tx, n_tx), static_cast<double>(n_tx)});
  const CMat wref_proj = ctx.mats.w_ref * ctx.mats.w_ref.adjoint();
  prob.le.push_back({CMat::Identity(n_tx, n_tx) - wref_proj, ctx.cfg.controls.weight_similarity});
  for (size_t b = 0; b < ctx.bands.size(); ++b)
    prob.le.push_back(
        {i_tilde_matrix(ws.samples, ctx.bands[b], ctx.cfg.array), ctx.cfg.shared_bands[b].eta});
  return prob;
}

SdpProblem build_waveform_sdp(const CVec& w, const DesignContext& ctx) {
  const int n_tx = ctx.cfg.array.n_tx;
  const int dim = ctx.cfg.array.waveform_dim();
  const auto& perm = ctx.mats.commutation;

  SdpProblem prob;
  const CMat psi =
      psi_of_w(ctx.cfg.target.range_m, ctx.cfg.target.angle_deg, w, ctx.cfg.array, *ctx.qbar);
  prob.objective = hermitize(perm * psi * perm.transpose());  // T Ψ(w) T(L,N_T)
  for (int m = 0; m < n_tx; ++m)
    prob.eq.push_back({ctx.mats.energy_selectors[m].cast<cxd>().asDiagonal(), 1.0 / n_tx});
  const CMat sref_proj = ctx.mats.s_ref * ctx.mats.s_ref.adjoint();
  prob.le.push_back({CMat::Identity(dim, dim) - sref_proj, ctx.cfg.controls.waveform_similarity});
  for (int m = 0; m < n_tx; ++m)
    prob.ge.push_back({bandwidth_gram(m, ctx.cfg.array), ctx.cfg.array.inband_tolerance[m] / n_tx});
  for (size_t b = 0; b < ctx.bands.size(); ++b)
    prob.le.push_back({h_b_matrix(w, ctx.bands[b], ctx.cfg.array), ctx.cfg.shared_bands[b].eta});
  return prob;
}

RoundingOutcome randomize_weights(const CMat& w_opt, const CMat& psi_s, const CMat& waveforms,
                                  const DesignContext& ctx, int n_trials, std::uint64_t seed,
                                  const CVec& fallback) {
  const int n_tx = ctx.cfg.array.n_tx;
  const double root = std::sqrt(static_cast<double>(n_tx));
  FeasibilityTolerances tol;

  std::vector<CMat> i_tildes;
  for (const auto& band : ctx.bands)
    i_tildes.push_back(i_tilde_matrix(waveforms, band, ctx.cfg.array));

  RoundingOutcome out;
  const EigPair eig = dominant_eigvec(w_opt);
  if (eig.ratio < kRankOneRatio) {
    CVec w = phase_align(root * eig.dominant, ctx.mats.w_ref);
    if (weight_trial_feasible(w, i_tildes, ctx, tol)) {
      out.vec = w;
      out.objective = quad(psi_s, w);
      out.n_feasible = 1;
      out.rank_one = true;
      return out;
    }
  }

  const CMat chol = cholesky_with_jitter(w_opt);
  std::vector<BestTrial> best_per_chunk(max_threads());
  std::vector<int> feasible_per_chunk(max_threads(), 0);
  const int workers = std::min(max_threads(), n_trials);
  parallel_for(n_trials, [&](int j) {
    std::mt19937_64 gen(derive_seed(seed, {static_cast<std::uint64_t>(j)}));
    CVec p = chol * complex_gaussian(n_tx, gen);
    const double norm = p.norm();
    if (norm < 1e-300) return;
    CVec w = phase_align(root * p / norm, ctx.mats.w_ref);
    if (!weight_trial_feasible(w, i_tildes, ctx, tol)) return;
    const int slot = j % workers;
    ++feasible_per_chunk[slot];
    BestTrial cand{quad(psi_s, w), j, std::move(w)};
    merge_best(best_per_chunk[slot], cand);
  });

  BestTrial best;
  for (const auto& b : best_per_chunk) merge_best(best, b);
  for (int c : feasible_per_chunk) out.n_feasible += c;
  if (best.vec.size() == 0) {
    out.vec = fallback;
    out.objective = quad(psi_s, fallback);
    out.exhausted = true;
  } else {
    out.vec = best.vec;
    out.objective = best.objective;
  }
  return out;
}

RoundingOutcome randomize_waveform(const CMat& s_bar_opt, const CMat& psi_t, const CVec& w,
                                   const DesignContext& ctx, int n_trials, std::uint64_t seed,
                                   const CVec& fallback) {
  const int dim = ctx.cfg.array.waveform_dim();
  FeasibilityTolerances tol;

  std::vector<CMat> h_bs;
  for (const auto& band : ctx.bands) h_bs.push_back(h_b_matrix(w, band, ctx.cfg.array));

  RoundingOutcome out;
  const EigPair eig = dominant_eigvec(s_bar_opt);
  if (eig.ratio < kRankOneRatio) {
    CVec s = phase_align(project_energy(eig.dominant, ctx), ctx.mats.s_ref);
    if (waveform_trial_feasible(s, h_bs, ctx, tol)) {
      out.vec = s;
      out.objective = quad(psi_t, s);
      out.n_feasible = 1;
      out.rank_one = true;
      return out;
    }
  }

  const CMat chol = cholesky_with_jitter(s_bar_opt);
  std::vector<BestTrial> best_per_chunk(max_threads());
  std::vector<int> feasible_per_chunk(max_threads(), 0);
  const int workers = std::min(max_threads(), n_trials);
  parallel_for(n_trials, [&](int j) {
    std::mt19937_64 gen(derive_seed(seed, {static_cast<std::uint64_t>(j)}));
    CVec p = chol * complex_gaussian(dim, gen);
    CVec s = phase_align(project_energy(p, ctx), ctx.mats.s_ref);
    if (!waveform_trial_feasible(s, h_bs, ctx, tol)) return;
    const int slot = j % workers;
    ++feasible_per_chunk[slot];
    BestTrial cand{quad(psi_t, s), j, std::move(s)};
    merge_best(best_per_chunk[slot], cand);
  });

  BestTrial best;
  for (const auto& b : best_per_chunk) merge_best(best, b);
  for (int c : feasible_per_chunk) out.n_feasible += c;
  if (best.vec.size() == 0) {
    out.vec = fallback;
    out.objective = quad(psi_t, fallback);
    out.exhausted = true;
  } else {
    out.vec = best.vec;
    out.objective = best.objective;
  }
  return out;
}

DesignResult alternate(const DesignContext& ctx, DesignMode mode) {
  if (auto binding = feasibility_screen(ctx, mode))
    throw InfeasibleScenarioError("infeasible scenario: " + *binding, *binding);

  const auto& controls = ctx.cfg.controls;
  const int n_tx = ctx.cfg.array.n_tx;
  const int L = ctx.cfg.array.n_samples;
  const auto& perm = ctx.mats.commutation;

  DesignResult result;
  result.mode = mode;
  result.seed = controls.rng_seed;
  for (const auto& band : ctx.cfg.shared_bands) result.band_limits.push_back(band.eta);

  CVec s_t = ctx.mats.s_ref;
  CVec w = ctx.mats.w_ref;

  auto snapshot_of = [&](const CVec& st) {
    return WaveformSet::from_vec_waveform(st, n_tx, L).vec_snapshot();
  };
  auto evaluate = [&](const CVec& st, const CVec& wv) {
    return ctx.snr_linear * sinr(snapshot_of(st), wv, ctx.cfg, *ctx.qbar, 1.0);
  };

  struct Incumbent {
    CVec s_t, w;
    double sinr = 0.0;
    bool feasible = false;
  } incumbent;
  incumbent.s_t = s_t;
  incumbent.w = w;
  incumbent.sinr = evaluate(s_t, w);
  incumbent.feasible = check_constraints(s_t, w, ctx).feasible;
  result.sinr_trace_db.push_back(lin2db(incumbent.sinr));

  const bool weight_step = mode == DesignMode::joint || mode == DesignMode::weight_only;
  const bool waveform_step = mode == DesignMode::joint || mode == DesignMode::waveform_only;
  const int iters = mode == DesignMode::baseline ? 0 : controls.max_iters;

  // The SDP input changes only when the opposite variable moved, so frozen
  // modes solve each relaxation once and re-round per iteration.
  std::optional<CMat> cached_w_opt, cached_s_opt;
  CVec cached_s_for_w, cached_w_for_s;

  for (int q = 1; q <= iters; ++q) {
    if (weight_step) {
      if (controls.weight_similarity == 0.0) {
        w = ctx.mats.w_ref;  // similarity pin: the only feasible point
      } else {
        const CVec s = snapshot_of(s_t);
        const CMat psi_s =
            psi_of_s(ctx.cfg.target.range_m, ctx.cfg.target.angle_deg, s, ctx.cfg.array, *ctx.qbar);
        if (!cached_w_opt || (cached_s_for_w - s_t).norm() > 0) {
          auto sol = solve(build_weight_sdp(s_t, ctx), 1e-7, 100);
          if (sol.status == SdpStatus::infeasible && q == 1 && !incumbent.feasible)
            throw InfeasibleScenarioError("infeasible scenario: weight relaxation has no solution",
                                          "weight constraints");
          cached_w_opt = sol.x_opt;
          cached_s_for_w = s_t;
        }
        const WaveformSet ws = WaveformSet::from_vec_waveform(s_t, n_tx, L);
        auto rounded = randomize_weights(*cached_w_opt, psi_s, ws.samples, ctx,
                                         controls.n_randomizations,
                                         derive_seed(controls.rng_seed, {kStreamWeightRounding,
                                                                         static_cast<std::uint64_t>(q)}),
                                         w);
        result.weight_rounding_exhausted |= rounded.exhausted;
        w = rounded.vec;
      }
    }
    if (waveform_step) {
      if (controls.waveform_similarity == 0.0) {
        s_t = ctx.mats.s_ref;
      } else {
        if (!cached_s_opt || (cached_w_for_s - w).norm() > 0) {
          auto sol = solve(build_waveform_sdp(w, ctx), 1e-7, 100);
          if (sol.status == SdpStatus::infeasible && q == 1 && !incumbent.feasible)
            throw InfeasibleScenarioError(
                "infeasible scenario: waveform relaxation has no solution", "waveform constraints");
          cached_s_opt = sol.x_opt;
          cached_w_for_s = w;
        }
        const CMat psi =
            psi_of_w(ctx.cfg.target.range_m, ctx.cfg.target.angle_deg, w, ctx.cfg.array, *ctx.qbar);
        const CMat psi_t = hermitize(perm * psi * perm.transpose());
        auto rounded = randomize_waveform(*cached_s_opt, psi_t, w, ctx, controls.n_randomizations,
                                          derive_seed(controls.rng_seed,
                                                      {kStreamWaveformRounding,
                                                       static_cast<std::uint64_t>(q)}),
                                          s_t);
        result.waveform_rounding_exhausted |= rounded.exhausted;
        s_t = rounded.vec;
      }
    }

    const double cand_sinr = evaluate(s_t, w);
    const bool cand_feasible = check_constraints(s_t, w, ctx).feasible;
    if (cand_feasible && (!incumbent.feasible || cand_sinr > incumbent.sinr)) {
      incumbent = {s_t, w, cand_sinr, true};
    }
    result.sinr_trace_db.push_back(lin2db(incumbent.feasible ? incumbent.sinr : cand_sinr));
    result.iterations_run = q;
  }

  result.weights = incumbent.w;
  result.waveform = incumbent.s_t;
  result.sinr_linear = incumbent.sinr;
  result.sinr_db = lin2db(incumbent.sinr);
  result.incumbent_feasible = incumbent.feasible;
  result.constraints = check_constraints(incumbent.s_t, incumbent.w, ctx);
  const auto kernels = sinr_kernels(snapshot_of(incumbent.s_t), incumbent.w, ctx.cfg, *ctx.qbar);
  result.v_opt = kernels.mvdr;
  return result;
}

DesignResult run_mode(const ScenarioConfig& cfg, DesignMode mode) {
  return alternate(make_design_context(cfg), mode);
}

}  // namespace fda
