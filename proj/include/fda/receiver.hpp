#pragma once

#include "fda/interference.hpp"
#include "fda/scenario.hpp"
#include "fda/types.hpp"

namespace fda {

/// Stacked receive operator A(r,θ;w): block-diagonal over the L snapshots,
/// each block b_R(θ) ⊗ diag(w ⊙ a_T(r,θ)), size N_T·N_R·L × N_T·L.
CMat build_a_of_w(double range_m, double theta_deg, const CVec& w, const ArrayConfig& cfg);

/// Companion operator Ã(r,θ;s): rows stacked over snapshots of
/// b_R ⊗ diag(s(l) ⊙ a_T), size N_T·N_R·L × N_T. Satisfies A·s = Ã·w.
CMat build_a_of_s(double range_m, double theta_deg, const CVec& s_snapshot, const ArrayConfig& cfg);

/// Cached symmetric factorization of Q̄, shared read-only across kernels.
class QbarFactor {
 public:
  explicit QbarFactor(const CMat& qbar) : llt_(qbar), dim_(static_cast<int>(qbar.rows())) {
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("QbarFactor: covariance is not positive definite");
  }
  CMat solve(const CMat& rhs) const { return llt_.solve(rhs); }
  CVec solve(const CVec& rhs) const { return llt_.solve(rhs); }
  int dim() const { return dim_; }

 private:
  Eigen::LLT<CMat> llt_;
  int dim_;
};

/// MVDR weights v = Q̄⁻¹u / (u^H Q̄⁻¹ u) for the target signature u = A·s.
CVec mvdr_weights(const CVec& target_signature, const QbarFactor& qbar);

/// SINR of an arbitrary receive vector v (the pre-MVDR quotient).
double sinr_of_v(const CVec& v, const CVec& target_signature, const CMat& qbar, double snr_linear);

/// Ψ(w) = A^H Q̄⁻¹ A, Hermitian PSD of order N_T·L (snapshot-major).
CMat psi_of_w(double range_m, double theta_deg, const CVec& w, const ArrayConfig& cfg,
              const QbarFactor& qbar);

/// Ψ̃(s) = Ã^H Q̄⁻¹ Ã, Hermitian PSD of order N_T.
CMat psi_of_s(double range_m, double theta_deg, const CVec& s_snapshot, const ArrayConfig& cfg,
              const QbarFactor& qbar);

/// Output SINR after MVDR, reported with the SNR prefactor:
/// Π = SNR · s^H Ψ(w) s = SNR · w^H Ψ̃(s) w.
double sinr(const CVec& s_snapshot, const CVec& w, const ScenarioConfig& cfg,
            const QbarFactor& qbar, double snr_linear);

struct SinrKernels {
  CMat psi_w;        // N_T·L
  CMat psi_s;        // N_T
  CVec mvdr;         // v_opt, N_T·N_R·L
  double sinr_linear = 0.0;
};
SinrKernels sinr_kernels(const CVec& s_snapshot, const CVec& w, const ScenarioConfig& cfg,
                         const QbarFactor& qbar);

}  // namespace fda
