#pragma once

#include <vector>

#include "fda/scenario.hpp"
#include "fda/types.hpp"

namespace fda {

/// L×L Gram of the sampling exponentials over [f_start, f_end] ⊂ [0,1]
/// (cycles/sample): entry (p,q) = (f_end−f_start) on the diagonal, else
/// (e^{j2πf_end(q−p)} − e^{j2πf_start(q−p)}) / (j2π(q−p)). Hermitian PSD;
/// the full band [0,1] gives the identity.
CMat frequency_gram(double f_start, double f_end, int n_samples);

/// Energy radiated by (S, w) into one shared band; dispatches on the
/// same-channel / adjacent / spanning cases. Interior channels of a spanning
/// band contribute |w_m|²·(energy of waveform m), which is |w_m|²/N_T under
/// the per-waveform energy constraint.
double band_energy(const CMat& S, const CVec& w, const BandIndexing& band, const ArrayConfig& cfg);

/// N_T×N_T diagonal Hermitian Ĩ_b(S): E_b = w^H Ĩ_b(S) w.
CMat i_tilde_matrix(const CMat& S, const BandIndexing& band, const ArrayConfig& cfg);

/// N_T·L block-diagonal Hermitian H_b(w): E_b = s_T^H H_b(w) s_T.
/// The printed w² factors are implemented as |w_m|² so the form is Hermitian.
CMat h_b_matrix(const CVec& w, const BandIndexing& band, const ArrayConfig& cfg);

/// Sampled ESD over the total band: per channel m, |w_m Σ_l S(m,l)e^{j2πfl}|²
/// on a uniform local grid spanning the channel slot, placed at the channel's
/// global offset. Frequencies are normalized over the total band.
struct EsdCurve {
  std::vector<double> freq;     // global normalized frequency in [0,1]
  std::vector<double> value;
  std::vector<int> channel;     // 0-based channel index
};
EsdCurve esd_curve(const CMat& S, const CVec& w, const ArrayConfig& cfg, int n_grid_per_channel);

/// Independent quadrature oracle for E_b: composite Simpson over a
/// band-aligned grid per covered channel (n_grid points per channel).
double band_energy_quadrature(const CMat& S, const CVec& w, const BandIndexing& band,
                              const ArrayConfig& cfg, int n_grid);

}  // namespace fda
