#pragma once

#include <random>

#include "fda/rng.hpp"
#include "fda/scenario.hpp"
#include "fda/signal_model.hpp"
#include "fda/types.hpp"

namespace fda::test {

inline ScenarioConfig small_scenario(int n_tx = 3, int n_rx = 2, int n_samples = 8) {
  ScenarioConfig cfg;
  cfg.array.n_tx = n_tx;
  cfg.array.n_rx = n_rx;
  cfg.array.carrier_hz = 10e9;
  cfg.array.delta_f_hz = 1e6;
  cfg.array.sample_rate_hz = 1e6;
  cfg.array.n_samples = n_samples;
  cfg.target.range_m = 15e3;
  cfg.target.angle_deg = 40.0;
  validate_scenario(cfg);
  return cfg;
}

/// Random scenario with interferers on random channels, for property tests.
inline ScenarioConfig random_scenario(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> ntx(1, 4), nrx(1, 3), len(2, 8), nintf(0, 2);
  std::uniform_real_distribution<double> ang(-80.0, 80.0), inr(5.0, 25.0);
  ScenarioConfig cfg;
  cfg.array.n_tx = ntx(gen);
  cfg.array.n_rx = nrx(gen);
  cfg.array.carrier_hz = 10e9;
  cfg.array.delta_f_hz = 1e6;
  cfg.array.sample_rate_hz = 1e6;
  cfg.array.n_samples = len(gen);
  cfg.target.range_m = 15e3;
  cfg.target.angle_deg = ang(gen);
  const int n_i = nintf(gen);
  std::uniform_int_distribution<int> chan(0, cfg.array.n_tx - 1);
  for (int i = 0; i < n_i; ++i)
    cfg.interferers.push_back({cfg.array.carrier_hz + chan(gen) * cfg.array.delta_f_hz,
                               ang(gen), inr(gen)});
  validate_scenario(cfg);
  return cfg;
}

/// Random complex waveform matrix with every row projected to energy 1/N_T.
inline CMat random_unit_energy_waveforms(int n_tx, int n_samples, std::mt19937_64& gen) {
  CMat s(n_tx, n_samples);
  for (int m = 0; m < n_tx; ++m) {
    CVec row = complex_gaussian(n_samples, gen);
    s.row(m) = row.transpose() / (row.norm() * std::sqrt(static_cast<double>(n_tx)));
  }
  return s;
}

}  // namespace fda::test
