#include "fda/scenario.hpp"

#include <cmath>
#include <fstream>

namespace fda {

namespace {

std::vector<double> per_channel(const nlohmann::json& j, const char* key, int n, double dflt) {
  std::vector<double> out;
  if (!j.contains(key)) {
    out.assign(n, dflt);
  } else if (j.at(key).is_number()) {
    out.assign(n, j.at(key).get<double>());
  } else {
    out = j.at(key).get<std::vector<double>>();
    if (static_cast<int>(out.size()) == 1) out.assign(n, out[0]);
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ScenarioError(msg);
}

}  // namespace

void validate_scenario(ScenarioConfig& cfg) {
  auto& a = cfg.array;
  require(a.n_tx >= 1, "array.n_tx: must be >= 1");
  require(a.n_rx >= 1, "array.n_rx: must be >= 1");
  require(a.n_samples >= 2, "array.n_samples: must be >= 2");
  require(a.carrier_hz > 0, "array.carrier_hz: must be positive");
  require(a.delta_f_hz > 0, "array.delta_f_hz: must be positive");
  require(a.sample_rate_hz > 0, "array.sample_rate_hz: must be positive");
  require(a.delta_f_hz >= a.sample_rate_hz, "array.delta_f_hz: overlapping channel spectra");

  if (a.tx_spacing_m <= 0) a.tx_spacing_m = a.wavelength() / 2.0;
  if (a.rx_spacing_m <= 0) a.rx_spacing_m = a.wavelength() / 2.0;

  if (a.inband_tolerance.empty()) a.inband_tolerance.assign(a.n_tx, 0.91);
  if (static_cast<int>(a.inband_tolerance.size()) == 1)
    a.inband_tolerance.assign(a.n_tx, a.inband_tolerance[0]);
  require(static_cast<int>(a.inband_tolerance.size()) == a.n_tx,
          "array.inband_tolerance: needs one value per transmit channel");
  for (double g : a.inband_tolerance)
    require(g > 0.0 && g <= 1.0, "array.inband_tolerance: values must lie in (0,1]");

  if (a.lp_cutoff.empty()) a.lp_cutoff.assign(a.n_tx, 0.5);
  if (static_cast<int>(a.lp_cutoff.size()) == 1) a.lp_cutoff.assign(a.n_tx, a.lp_cutoff[0]);
  require(static_cast<int>(a.lp_cutoff.size()) == a.n_tx,
          "array.lp_cutoff: needs one value per transmit channel");
  for (double f : a.lp_cutoff)
    require(f > 0.0 && f <= 1.0, "array.lp_cutoff: values must lie in (0,1]");

  require(cfg.target.range_m > 0, "target.range_m: must be positive");
  require(cfg.target.angle_deg >= -90.0 && cfg.target.angle_deg <= 90.0,
          "target.angle_deg: must lie in [-90, 90]");
  require(cfg.target.noise_power > 0, "target.noise_power: must be positive");
  require(std::isfinite(cfg.target.snr_db), "target.snr_db: must be finite");

  for (size_t i = 0; i < cfg.interferers.size(); ++i) {
    const auto& it = cfg.interferers[i];
    const std::string tag = "interferers[" + std::to_string(i) + "]";
    require(it.angle_deg >= -90.0 && it.angle_deg <= 90.0, tag + ".angle_deg: must lie in [-90, 90]");
    require(std::isfinite(it.inr_db), tag + ".inr_db: must be finite");
    require(it.freq_hz > 0, tag + ".freq_hz: must be positive");
  }

  for (size_t b = 0; b < cfg.shared_bands.size(); ++b) {
    const auto& sb = cfg.shared_bands[b];
    const std::string tag = "shared_bands[" + std::to_string(b) + "]";
    require(sb.f_low >= 0.0 && sb.f_low < sb.f_high && sb.f_high <= 1.0,
            tag + ": needs 0 <= f_low < f_high <= 1");
    require(sb.eta >= 0.0, tag + ".eta: must be nonnegative");
  }

  const auto& c = cfg.controls;
  require(c.waveform_similarity >= 0.0, "controls.waveform_similarity: must be >= 0");
  require(c.weight_similarity >= 0.0, "controls.weight_similarity: must be >= 0");
  require(c.max_iters >= 1, "controls.max_iters: must be >= 1");
  require(c.n_randomizations >= 1, "controls.n_randomizations: must be >= 1");
  require(c.covariance_size_cap >= 1, "controls.covariance_size_cap: must be >= 1");
  if (!c.reference_weights.empty())
    require(static_cast<int>(c.reference_weights.size()) == a.n_tx,
            "controls.reference_weights: needs one value per transmit channel");

  cfg.channel_carriers_hz.resize(a.n_tx);
  for (int m = 0; m < a.n_tx; ++m) cfg.channel_carriers_hz[m] = a.channel_carrier(m);
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  const auto& ja = j.at("array");
  cfg.array.n_tx = ja.at("n_tx").get<int>();
  cfg.array.n_rx = ja.at("n_rx").get<int>();
  cfg.array.carrier_hz = ja.at("carrier_hz").get<double>();
  cfg.array.delta_f_hz = ja.at("delta_f_hz").get<double>();
  cfg.array.sample_rate_hz = ja.at("sample_rate_hz").get<double>();
  if (ja.contains("n_samples")) {
    cfg.array.n_samples = ja.at("n_samples").get<int>();
    if (ja.contains("duration_s")) {
      int from_duration =
          static_cast<int>(std::llround(ja.at("duration_s").get<double>() * cfg.array.sample_rate_hz));
      if (from_duration != cfg.array.n_samples)
        throw ScenarioError("array.n_samples: disagrees with duration_s * sample_rate_hz");
    }
  } else if (ja.contains("duration_s")) {
    cfg.array.n_samples =
        static_cast<int>(std::llround(ja.at("duration_s").get<double>() * cfg.array.sample_rate_hz));
  } else {
    throw ScenarioError("array: needs n_samples or duration_s");
  }
  cfg.array.tx_spacing_m = ja.value("tx_spacing_m", 0.0);
  cfg.array.rx_spacing_m = ja.value("rx_spacing_m", 0.0);
  cfg.array.inband_tolerance = per_channel(ja, "inband_tolerance", cfg.array.n_tx, 0.91);
  cfg.array.lp_cutoff = per_channel(ja, "lp_cutoff", cfg.array.n_tx, 0.5);

  if (j.contains("target")) {
    const auto& jt = j.at("target");
    cfg.target.range_m = jt.at("range_m").get<double>();
    cfg.target.angle_deg = jt.at("angle_deg").get<double>();
    cfg.target.snr_db = jt.value("snr_db", 0.0);
    cfg.target.noise_power = jt.value("noise_power", 1.0);
  }

  if (j.contains("interferers")) {
    for (const auto& ji : j.at("interferers")) {
      InterfererSpec it;
      it.freq_hz = ji.at("freq_hz").get<double>();
      it.angle_deg = ji.at("angle_deg").get<double>();
      it.inr_db = ji.at("inr_db").get<double>();
      cfg.interferers.push_back(it);
    }
  }

  if (j.contains("shared_bands")) {
    for (const auto& jb : j.at("shared_bands")) {
      SharedBandSpec sb;
      sb.f_low = jb.at("f_low").get<double>();
      sb.f_high = jb.at("f_high").get<double>();
      sb.eta = jb.at("eta").get<double>();
      cfg.shared_bands.push_back(sb);
    }
  }

  if (j.contains("controls")) {
    const auto& jc = j.at("controls");
    cfg.controls.waveform_similarity = jc.value("waveform_similarity", 6.0);
    cfg.controls.weight_similarity = jc.value("weight_similarity", 15.0);
    cfg.controls.max_iters = jc.value("max_iters", 4);
    cfg.controls.n_randomizations = jc.value("n_randomizations", 1000);
    cfg.controls.rng_seed = jc.value("rng_seed", std::uint64_t{1});
    cfg.controls.covariance_size_cap = jc.value("covariance_size_cap", 4096);
    if (jc.contains("reference_weights")) {
      for (const auto& jw : jc.at("reference_weights")) {
        if (jw.is_number()) {
          cfg.controls.reference_weights.emplace_back(jw.get<double>(), 0.0);
        } else {
          cfg.controls.reference_weights.emplace_back(jw.at(0).get<double>(), jw.at(1).get<double>());
        }
      }
    }
  }

  validate_scenario(cfg);
  return cfg;
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["array"] = {{"n_tx", cfg.array.n_tx},
                {"n_rx", cfg.array.n_rx},
                {"carrier_hz", cfg.array.carrier_hz},
                {"delta_f_hz", cfg.array.delta_f_hz},
                {"sample_rate_hz", cfg.array.sample_rate_hz},
                {"n_samples", cfg.array.n_samples},
                {"tx_spacing_m", cfg.array.tx_spacing_m},
                {"rx_spacing_m", cfg.array.rx_spacing_m},
                {"inband_tolerance", cfg.array.inband_tolerance},
                {"lp_cutoff", cfg.array.lp_cutoff}};
  j["target"] = {{"range_m", cfg.target.range_m},
                 {"angle_deg", cfg.target.angle_deg},
                 {"snr_db", cfg.target.snr_db},
                 {"noise_power", cfg.target.noise_power}};
  j["interferers"] = nlohmann::json::array();
  for (const auto& it : cfg.interferers)
    j["interferers"].push_back(
        {{"freq_hz", it.freq_hz}, {"angle_deg", it.angle_deg}, {"inr_db", it.inr_db}});
  j["shared_bands"] = nlohmann::json::array();
  for (const auto& sb : cfg.shared_bands)
    j["shared_bands"].push_back({{"f_low", sb.f_low}, {"f_high", sb.f_high}, {"eta", sb.eta}});
  j["controls"] = {{"waveform_similarity", cfg.controls.waveform_similarity},
                   {"weight_similarity", cfg.controls.weight_similarity},
                   {"max_iters", cfg.controls.max_iters},
                   {"n_randomizations", cfg.controls.n_randomizations},
                   {"rng_seed", cfg.controls.rng_seed},
                   {"covariance_size_cap", cfg.controls.covariance_size_cap}};
  if (!cfg.controls.reference_weights.empty()) {
    auto jw = nlohmann::json::array();
    for (const auto& w : cfg.controls.reference_weights) jw.push_back({w.real(), w.imag()});
    j["controls"]["reference_weights"] = jw;
  }
  return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("parse failure in " + path.string() + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("invalid scenario in " + path.string() + ": " + e.what());
  }
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path.string());
  out << scenario_to_json(cfg).dump(2) << "\n";
}

BandIndexing normalize_band(const SharedBandSpec& band, const ArrayConfig& cfg) {
  if (band.f_low < 0.0 || band.f_high > 1.0 || band.f_low >= band.f_high)
    throw ScenarioError("shared band outside [0,1] or reversed");
  const double df_norm = 1.0 / cfg.n_tx;  // channel width over the total band
  BandIndexing out;
  out.ch_low = static_cast<int>(std::floor(band.f_low / df_norm));
  out.ch_high = static_cast<int>(std::floor(band.f_high / df_norm));
  out.ch_low = std::min(out.ch_low, cfg.n_tx - 1);
  out.ch_high = std::min(out.ch_high, cfg.n_tx - 1);  // f_high == 1.0 clamps, not floors

  // Channel-local edges in cycles/sample.
  const double total = cfg.total_band_hz();
  const double low_hz = band.f_low * total - out.ch_low * cfg.delta_f_hz;
  const double high_hz = band.f_high * total - out.ch_high * cfg.delta_f_hz;
  out.local_low = low_hz / cfg.sample_rate_hz;
  out.local_high = high_hz / cfg.sample_rate_hz;

  const int span = out.ch_high - out.ch_low;
  out.kind = span == 0   ? BandIndexing::Case::same_channel
             : span == 1 ? BandIndexing::Case::adjacent
                         : BandIndexing::Case::spanning;
  return out;
}

ScenarioConfig paper_scenario() {
  ScenarioConfig cfg;
  cfg.array.n_tx = 6;
  cfg.array.n_rx = 4;
  cfg.array.carrier_hz = 10e9;
  cfg.array.delta_f_hz = 1e6;
  cfg.array.sample_rate_hz = 1e6;
  cfg.array.n_samples = 40;  // 40 µs at 1 MHz
  cfg.target.range_m = 15e3;
  cfg.target.angle_deg = 40.0;
  cfg.target.snr_db = 0.0;
  cfg.interferers = {{10000e6, 10.0, 20.0}, {10002e6, 40.0, 22.0}, {10004e6, 60.0, 24.0}};
  cfg.shared_bands = {{0.073, 0.200, 1.0 / 30.0}, {0.556, 0.884, 1.0 / 200.0}};
  cfg.controls.waveform_similarity = 6.0;
  cfg.controls.weight_similarity = 15.0;
  cfg.controls.max_iters = 4;
  cfg.controls.n_randomizations = 1000;
  validate_scenario(cfg);
  return cfg;
}

}  // namespace fda
