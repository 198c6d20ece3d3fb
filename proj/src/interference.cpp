#include "fda/interference.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "fda/rng.hpp"
#include "fda/signal_model.hpp"

namespace fda {

ChannelPowers channel_powers(const InterfererSpec& intf, const ArrayConfig& cfg, double noise_power) {
  ChannelPowers out;
  out.powers = Vec::Zero(cfg.n_tx);
  const double half = cfg.sample_rate_hz / 2.0;
  for (int m = 0; m < cfg.n_tx; ++m) {
    const double f_m = cfg.channel_carrier(m);
    if (intf.freq_hz >= f_m - half && intf.freq_hz < f_m + half) {
      out.powers(m) = noise_power * db2lin(intf.inr_db);
      return out;
    }
  }
  out.out_of_band = true;
  return out;
}

CMat q_block(const InterfererSpec& intf, const ArrayConfig& cfg, double noise_power) {
  const ChannelPowers cp = channel_powers(intf, cfg, noise_power);
  const CVec b = rx_steering(intf.angle_deg, cfg);
  const CMat spatial = b * b.adjoint();
  const CMat p = cp.powers.cast<cxd>().asDiagonal();
  return kron(spatial, p);
}

CMat q_block_printed(const InterfererSpec& intf, const ArrayConfig& cfg, double target_angle_deg,
                     double noise_power) {
  const ChannelPowers cp = channel_powers(intf, cfg, noise_power);
  const CVec bi = rx_steering(intf.angle_deg, cfg);
  const CVec bt = rx_steering(target_angle_deg, cfg);
  const CMat p = cp.powers.cast<cxd>().asDiagonal();
  return kron(p, CMat(bi * bt.adjoint()));
}

CMat CovarianceModel::q_single() const {
  const int n = per_interferer.empty() ? 0 : static_cast<int>(per_interferer.front().rows());
  if (n == 0) return full.topLeftCorner(0, 0);
  CMat q = CMat::Identity(n, n);
  for (const auto& qi : per_interferer) q += qi / noise_power;
  return q;
}

CovarianceModel assemble_qbar(std::span<const InterfererSpec> interferers, const ArrayConfig& cfg,
                              double noise_power, int size_cap) {
  const int dim = cfg.stacked_dim();
  if (dim > size_cap)
    throw std::invalid_argument("assemble_qbar: N_T*N_R*L = " + std::to_string(dim) +
                                " exceeds the size cap " + std::to_string(size_cap));
  CovarianceModel model;
  model.noise_power = noise_power;
  model.full = CMat::Identity(dim, dim);
  const int L = cfg.n_samples;
  const CMat ones = CMat::Ones(L, L);
  for (const auto& intf : interferers) {
    CMat qi = q_block(intf, cfg, noise_power);
    model.full += kron(ones, qi) / noise_power;
    model.per_interferer.push_back(std::move(qi));
  }
  if (interferers.empty()) {
    // keep q_single() well-defined for the interference-free case
    model.per_interferer.push_back(CMat::Zero(cfg.snapshot_dim(), cfg.snapshot_dim()));
  }
  model.full = hermitize(model.full);
  return model;
}

CMat simulate_interferer_channels(const InterfererSpec& intf, const ArrayConfig& cfg, int n_trials,
                                  std::uint64_t seed, InterfererModel model, double noise_power) {
  if (n_trials < 100) throw std::invalid_argument("simulate_interferer_channels: n_trials must be >= 100");
  const int L = cfg.n_samples;
  const double offset_hz = intf.freq_hz - cfg.carrier_hz;

  // Simulation rate: integer multiple of f_s wide enough to hold the whole
  // channel grid and the tone without aliasing.
  const double span = std::max(cfg.n_tx * cfg.delta_f_hz, std::abs(offset_hz) + cfg.sample_rate_hz);
  const int oversample = static_cast<int>(std::ceil(2.0 * span / cfg.sample_rate_hz));
  const double f_sim = oversample * cfg.sample_rate_hz;
  int n_sim = L * oversample;
  if (n_sim % 2) ++n_sim;

  const double power = noise_power * db2lin(intf.inr_db);
  const double amp = std::sqrt(power);

  Eigen::FFT<double> fft;
  CMat cov = CMat::Zero(cfg.n_tx, cfg.n_tx);
  std::vector<cxd> time(n_sim), freq(n_sim), chan(n_sim);
  CVec outputs(cfg.n_tx);

  for (int trial = 0; trial < n_trials; ++trial) {
    std::mt19937_64 gen(derive_seed(seed, {kStreamMonteCarlo, static_cast<std::uint64_t>(trial)}));
    if (model == InterfererModel::tone) {
      const double phase = uniform_phase(gen);
      for (int k = 0; k < n_sim; ++k) {
        const double t = k / f_sim;
        time[k] = amp * std::exp(kJ * (2.0 * kPi * offset_hz * t + phase));
      }
    } else {
      std::normal_distribution<double> nd(0.0, amp / std::sqrt(2.0));
      for (int k = 0; k < n_sim; ++k) time[k] = cxd(nd(gen), nd(gen));
    }
    fft.fwd(freq, time);

    CMat trial_cov = CMat::Zero(cfg.n_tx, cfg.n_tx);
    std::vector<CVec> sampled(cfg.n_tx, CVec(L));
    for (int m = 0; m < cfg.n_tx; ++m) {
      // Mix down by f_m − f_c: a circular shift in the DFT domain when the
      // channel offset lands on a bin, which the integer oversample ensures.
      const double mix_hz = m * cfg.delta_f_hz;
      const long shift = std::lround(mix_hz * n_sim / f_sim);
      const double cutoff_hz = cfg.lp_cutoff[m] * cfg.sample_rate_hz;
      for (int k = 0; k < n_sim; ++k) {
        const long src = (k + shift) % n_sim;
        double f_hz = static_cast<double>(k) * f_sim / n_sim;
        if (f_hz >= f_sim / 2.0) f_hz -= f_sim;
        // Half-open passband so adjacent channels never share a boundary bin.
        chan[k] = (f_hz >= -cutoff_hz && f_hz < cutoff_hz) ? freq[src] : cxd(0.0);
      }
      std::vector<cxd> filtered(n_sim);
      fft.inv(filtered, chan);
      for (int l = 0; l < L; ++l) sampled[m](l) = filtered[static_cast<size_t>(l) * oversample];
    }
    for (int l = 0; l < L; ++l) {
      for (int m = 0; m < cfg.n_tx; ++m) outputs(m) = sampled[m](l);
      trial_cov += outputs * outputs.adjoint();
    }
    cov += trial_cov / static_cast<double>(L);
  }
  return cov / static_cast<double>(n_trials);
}

}  // namespace fda
