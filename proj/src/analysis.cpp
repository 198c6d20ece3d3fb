#include "fda/analysis.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "fda/io.hpp"
#include "fda/signal_model.hpp"
#include "fda/spectral.hpp"

namespace fda {

AcfReport acf(const CMat& waveforms, int m) {
  const int L = static_cast<int>(waveforms.cols());
  const auto row = waveforms.row(m);
  Vec mag(2 * L - 1);
  for (int tau = -(L - 1); tau <= L - 1; ++tau) {
    cxd r = 0.0;
    for (int l = std::max(0, tau); l < std::min(L, L + tau); ++l) r += row(l) * std::conj(row(l - tau));
    mag(tau + L - 1) = std::abs(r);
  }
  const double r0 = mag(L - 1);

  AcfReport out;
  out.lags.resize(2 * L - 1);
  out.acf_db.resize(2 * L - 1);
  for (int i = 0; i < 2 * L - 1; ++i) {
    out.lags[i] = i - (L - 1);
    out.acf_db(i) = 20.0 * std::log10(mag(i) / r0);
  }

  // Mainlobe edge: first local minimum of |r| walking out from lag 0.
  int edge = 1;
  while (edge + 1 <= L - 1 && mag(L - 1 + edge + 1) < mag(L - 1 + edge)) ++edge;
  double peak = 0.0;
  for (int tau = edge; tau <= L - 1; ++tau) peak = std::max(peak, mag(L - 1 + tau));
  out.psl_db = peak > 0.0 ? 20.0 * std::log10(peak / r0) : -std::numeric_limits<double>::infinity();
  return out;
}

Vec receive_beampattern(const CVec& v_opt, const CVec& s_snapshot, const CVec& w,
                        const std::vector<double>& theta_deg_grid, double range_m,
                        const ArrayConfig& cfg) {
  const int n_tx = cfg.n_tx, n_rx = cfg.n_rx, L = cfg.n_samples;
  Vec out(static_cast<Eigen::Index>(theta_deg_grid.size()));
  for (size_t t = 0; t < theta_deg_grid.size(); ++t) {
    const CVec a = tx_steering_range_angle(range_m, theta_deg_grid[t], cfg);
    const CVec b = rx_steering(theta_deg_grid[t], cfg);
    cxd acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const auto s_l = s_snapshot.segment(l * n_tx, n_tx);
      const auto v_l = v_opt.segment(l * n_tx * n_rx, n_tx * n_rx);
      // v_l^H [b ⊗ diag(w ⊙ a)] s_l
      for (int n = 0; n < n_rx; ++n) {
        cxd partial = 0.0;
        for (int m = 0; m < n_tx; ++m)
          partial += std::conj(v_l(n * n_tx + m)) * w(m) * a(m) * s_l(m);
        acc += partial * b(n);
      }
    }
    out(static_cast<Eigen::Index>(t)) = std::norm(acc);
  }
  return out;
}

Mat interference_spectrum(const CovarianceModel& cov, const std::vector<double>& theta_deg_grid,
                          const ArrayConfig& cfg) {
  const CMat q = cov.q_single();
  Eigen::LLT<CMat> llt(q);
  Mat out(cfg.n_tx, static_cast<Eigen::Index>(theta_deg_grid.size()));
  CVec probe(cfg.snapshot_dim());
  for (size_t t = 0; t < theta_deg_grid.size(); ++t) {
    const CVec b = rx_steering(theta_deg_grid[t], cfg);
    for (int m = 0; m < cfg.n_tx; ++m) {
      probe.setZero();
      for (int n = 0; n < cfg.n_rx; ++n) probe(n * cfg.n_tx + m) = b(n);
      out(m, static_cast<Eigen::Index>(t)) = probe.dot(llt.solve(probe)).real();
    }
  }
  return out;
}

namespace {

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (double th = -90.0; th <= 90.0 + 1e-9; th += 0.25) grid.push_back(th);
  return grid;
}

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void report(const DesignResult& result, const ScenarioConfig& scenario, const DesignContext& ctx,
            const std::filesystem::path& out_dir, const RunManifest& manifest) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string());

  const int n_tx = scenario.array.n_tx;
  const int L = scenario.array.n_samples;
  const WaveformSet ws = WaveformSet::from_vec_waveform(result.waveform, n_tx, L);

  write_complex_csv(out_dir / "waveform.csv", ws.samples);
  write_complex_csv(out_dir / "weights.csv", result.weights.transpose());

  // esd.csv
  {
    const EsdCurve esd = esd_curve(ws.samples, result.weights, scenario.array, 1024);
    std::string csv = "global_normalized_freq,esd_value,channel_index\n";
    for (size_t i = 0; i < esd.freq.size(); ++i) {
      csv += format_double(esd.freq[i]);
      csv += ',';
      csv += format_double(esd.value[i]);
      csv += ',';
      csv += std::to_string(esd.channel[i]);
      csv += '\n';
    }
    write_text_file(out_dir / "esd.csv", csv);
  }

  // acf.csv
  std::vector<double> psl(n_tx);
  {
    std::string csv = "waveform,lag,acf_db\n";
    for (int m = 0; m < n_tx; ++m) {
      const AcfReport rep = acf(ws.samples, m);
      psl[m] = rep.psl_db;
      for (size_t i = 0; i < rep.lags.size(); ++i) {
        csv += std::to_string(m);
        csv += ',';
        csv += std::to_string(rep.lags[i]);
        csv += ',';
        csv += format_double(rep.acf_db(static_cast<Eigen::Index>(i)));
        csv += '\n';
      }
    }
    write_text_file(out_dir / "acf.csv", csv);
  }

  const auto grid = default_theta_grid();

  // beampattern.csv: raw and peak-normalized dB columns
  {
    const Vec bp = receive_beampattern(result.v_opt, ws.vec_snapshot(), result.weights, grid,
                                       scenario.target.range_m, scenario.array);
    const double peak = bp.maxCoeff();
    std::string csv = "theta_deg,power,power_db,power_db_rel_peak\n";
    for (size_t i = 0; i < grid.size(); ++i) {
      const double p = bp(static_cast<Eigen::Index>(i));
      csv += format_double(grid[i]);
      csv += ',';
      csv += format_double(p);
      csv += ',';
      csv += format_double(lin2db(p));
      csv += ',';
      csv += format_double(lin2db(p / peak));
      csv += '\n';
    }
    write_text_file(out_dir / "beampattern.csv", csv);
  }

  // spectrum.csv
  {
    const Mat sp = interference_spectrum(ctx.cov, grid, scenario.array);
    std::string csv = "channel,theta_deg,power,power_db\n";
    for (int m = 0; m < n_tx; ++m)
      for (size_t t = 0; t < grid.size(); ++t) {
        csv += std::to_string(m);
        csv += ',';
        csv += format_double(grid[t]);
        csv += ',';
        csv += format_double(sp(m, static_cast<Eigen::Index>(t)));
        csv += ',';
        csv += format_double(lin2db(sp(m, static_cast<Eigen::Index>(t))));
        csv += '\n';
      }
    write_text_file(out_dir / "spectrum.csv", csv);
  }

  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["mode"] = to_string(result.mode);
  j["seed"] = result.seed;
  j["sinr_db"] = result.sinr_db;
  j["sinr_linear"] = result.sinr_linear;
  j["sinr_trace_db"] = result.sinr_trace_db;
  j["iterations_run"] = result.iterations_run;
  j["incumbent_feasible"] = result.incumbent_feasible;

  auto bands = nlohmann::ordered_json::array();
  for (size_t b = 0; b < scenario.shared_bands.size(); ++b) {
    bands.push_back({{"f_low", scenario.shared_bands[b].f_low},
                     {"f_high", scenario.shared_bands[b].f_high},
                     {"eta", scenario.shared_bands[b].eta},
                     {"energy", result.constraints.band_energies[b]}});
  }
  j["bands"] = bands;

  j["constraints"] = {{"max_energy_residual", result.constraints.max_energy_residual},
                      {"weight_norm_residual", result.constraints.weight_norm_residual},
                      {"min_bandwidth_margin", result.constraints.min_bandwidth_margin},
                      {"waveform_similarity", result.constraints.waveform_similarity},
                      {"weight_similarity", result.constraints.weight_similarity},
                      {"feasible", result.constraints.feasible},
                      {"binding", result.constraints.binding}};
  j["rounding"] = {{"weight_exhausted", result.weight_rounding_exhausted},
                   {"waveform_exhausted", result.waveform_rounding_exhausted}};
  auto jpsl = nlohmann::ordered_json::array();
  for (double p : psl) jpsl.push_back(finite_or_null(p));
  j["psl_db"] = jpsl;

  j["manifest"] = {{"scenario_path", manifest.scenario_path},
                   {"mode", manifest.mode},
                   {"seed", manifest.seed},
                   {"iters", manifest.iters},
                   {"trials", manifest.trials},
                   {"out_dir", manifest.out_dir},
                   {"tool_version", manifest.tool_version}};

  nlohmann::ordered_json files;
  for (const char* name :
       {"waveform.csv", "weights.csv", "esd.csv", "acf.csv", "beampattern.csv", "spectrum.csv"})
    files[name] = hash_file(out_dir / name);
  j["files"] = files;

  write_text_file(out_dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace fda
