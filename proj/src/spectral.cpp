#include "fda/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fda {

namespace {

// |Σ_l S(m,l) e^{−j2πf(l+1)}|², f in cycles/sample, so that c^H K c over a
// band with the gram below integrates exactly this density. The sampled
// spectrum is 1-periodic; the transmitted channel carries nothing above one
// cycle/sample, so callers clamp integration limits to [0,1].
double esd_point(const CMat& S, int m, double f) {
  cxd acc = 0.0;
  for (int l = 0; l < S.cols(); ++l) acc += S(m, l) * std::exp(-kJ * (2.0 * kPi * f * (l + 1)));
  return std::norm(acc);
}

double simpson_channel(const CMat& S, int m, double lo, double hi, int n_grid) {
  if (hi <= lo) return 0.0;
  int n = std::max(2, n_grid);
  if (n % 2) ++n;
  const double h = (hi - lo) / n;
  double acc = esd_point(S, m, lo) + esd_point(S, m, hi);
  for (int i = 1; i < n; ++i) acc += esd_point(S, m, lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double clamp01(double f) { return std::min(1.0, std::max(0.0, f)); }

double quad_form(const CMat& K, const Eigen::RowVectorXcd& row) {
  return (row.conjugate() * K * row.transpose()).value().real();  // c^H K c, c = rowᵀ
}

}  // namespace

CMat frequency_gram(double f_start, double f_end, int n_samples) {
  if (f_start < 0.0 || f_end > 1.0 || f_start > f_end)
    throw std::invalid_argument("frequency_gram: need 0 <= f_start <= f_end <= 1");
  CMat k(n_samples, n_samples);
  for (int p = 0; p < n_samples; ++p) {
    k(p, p) = f_end - f_start;
    for (int q = 0; q < p; ++q) {
      const double d = p - q;
      const cxd num = std::exp(kJ * (2.0 * kPi * f_end * d)) - std::exp(kJ * (2.0 * kPi * f_start * d));
      k(p, q) = num / (kJ * 2.0 * kPi * d);
      k(q, p) = std::conj(k(p, q));
    }
  }
  return k;
}

double band_energy(const CMat& S, const CVec& w, const BandIndexing& band, const ArrayConfig& cfg) {
  const int L = cfg.n_samples;
  const double top = clamp01(cfg.delta_f_hz / cfg.sample_rate_hz);
  if (band.kind == BandIndexing::Case::same_channel) {
    const CMat k = frequency_gram(clamp01(band.local_low), clamp01(band.local_high), L);
    return std::norm(w(band.ch_low)) * quad_form(k, S.row(band.ch_low));
  }
  const CMat k_low = frequency_gram(clamp01(band.local_low), top, L);
  const CMat k_high = frequency_gram(0.0, clamp01(band.local_high), L);
  double e = std::norm(w(band.ch_low)) * quad_form(k_low, S.row(band.ch_low)) +
             std::norm(w(band.ch_high)) * quad_form(k_high, S.row(band.ch_high));
  for (int m = band.ch_low + 1; m < band.ch_high; ++m)
    e += std::norm(w(m)) * S.row(m).squaredNorm();
  return e;
}

CMat i_tilde_matrix(const CMat& S, const BandIndexing& band, const ArrayConfig& cfg) {
  const int L = cfg.n_samples;
  const double top = clamp01(cfg.delta_f_hz / cfg.sample_rate_hz);
  CMat out = CMat::Zero(cfg.n_tx, cfg.n_tx);
  if (band.kind == BandIndexing::Case::same_channel) {
    const CMat k = frequency_gram(clamp01(band.local_low), clamp01(band.local_high), L);
    out(band.ch_low, band.ch_low) = quad_form(k, S.row(band.ch_low));
    return out;
  }
  const CMat k_low = frequency_gram(clamp01(band.local_low), top, L);
  const CMat k_high = frequency_gram(0.0, clamp01(band.local_high), L);
  out(band.ch_low, band.ch_low) = quad_form(k_low, S.row(band.ch_low));
  out(band.ch_high, band.ch_high) = quad_form(k_high, S.row(band.ch_high));
  for (int m = band.ch_low + 1; m < band.ch_high; ++m) out(m, m) = 1.0 / cfg.n_tx;
  return out;
}

CMat h_b_matrix(const CVec& w, const BandIndexing& band, const ArrayConfig& cfg) {
  const int L = cfg.n_samples;
  const double top = clamp01(cfg.delta_f_hz / cfg.sample_rate_hz);
  CMat out = CMat::Zero(cfg.waveform_dim(), cfg.waveform_dim());
  auto block = [&](int m) { return out.block(m * L, m * L, L, L); };
  if (band.kind == BandIndexing::Case::same_channel) {
    block(band.ch_low) = std::norm(w(band.ch_low)) *
                         frequency_gram(clamp01(band.local_low), clamp01(band.local_high), L);
    return out;
  }
  block(band.ch_low) = std::norm(w(band.ch_low)) * frequency_gram(clamp01(band.local_low), top, L);
  block(band.ch_high) = std::norm(w(band.ch_high)) * frequency_gram(0.0, clamp01(band.local_high), L);
  for (int m = band.ch_low + 1; m < band.ch_high; ++m)
    block(m) = std::norm(w(m)) * CMat::Identity(L, L);
  return out;
}

EsdCurve esd_curve(const CMat& S, const CVec& w, const ArrayConfig& cfg, int n_grid_per_channel) {
  if (n_grid_per_channel < 64) throw std::invalid_argument("esd_curve: n_grid must be >= 64");
  const double slot = cfg.delta_f_hz / cfg.sample_rate_hz;  // channel slot in cycles/sample
  EsdCurve out;
  out.freq.reserve(static_cast<size_t>(cfg.n_tx) * n_grid_per_channel);
  out.value.reserve(out.freq.capacity());
  out.channel.reserve(out.freq.capacity());
  for (int m = 0; m < cfg.n_tx; ++m) {
    const double wm2 = std::norm(w(m));
    for (int i = 0; i < n_grid_per_channel; ++i) {
      const double f_local = slot * i / (n_grid_per_channel - 1);
      const double global = (m + f_local / slot) / cfg.n_tx;
      out.freq.push_back(global);
      out.value.push_back(f_local <= 1.0 ? wm2 * esd_point(S, m, f_local) : 0.0);
      out.channel.push_back(m);
    }
  }
  return out;
}

double band_energy_quadrature(const CMat& S, const CVec& w, const BandIndexing& band,
                              const ArrayConfig& cfg, int n_grid) {
  const double top = clamp01(cfg.delta_f_hz / cfg.sample_rate_hz);
  if (band.kind == BandIndexing::Case::same_channel) {
    return std::norm(w(band.ch_low)) *
           simpson_channel(S, band.ch_low, clamp01(band.local_low), clamp01(band.local_high), n_grid);
  }
  double e = std::norm(w(band.ch_low)) *
                 simpson_channel(S, band.ch_low, clamp01(band.local_low), top, n_grid) +
             std::norm(w(band.ch_high)) *
                 simpson_channel(S, band.ch_high, 0.0, clamp01(band.local_high), n_grid);
  for (int m = band.ch_low + 1; m < band.ch_high; ++m)
    e += std::norm(w(m)) * simpson_channel(S, m, 0.0, top, n_grid);
  return e;
}

}  // namespace fda
