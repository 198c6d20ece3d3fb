#include <doctest.h>

#include "fda/spectral.hpp"
#include "test_util.hpp"

using namespace fda;

TEST_CASE("frequency gram closed forms") {
  SUBCASE("full band is the identity") {
    CHECK((frequency_gram(0.0, 1.0, 7) - CMat::Identity(7, 7)).norm() < 1e-12);
  }
  SUBCASE("half band first off-diagonal magnitude is 1/pi") {
    const CMat k = frequency_gram(0.0, 0.5, 4);
    CHECK(std::abs(k(1, 2)) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(k(2, 2).real() == doctest::Approx(0.5));
  }
  SUBCASE("zero-width interval is the zero matrix") {
    CHECK(frequency_gram(0.3, 0.3, 5).norm() == 0.0);
  }
  SUBCASE("reversed interval throws") {
    CHECK_THROWS_AS(frequency_gram(0.6, 0.4, 3), std::invalid_argument);
  }
  SUBCASE("Hermitian PSD") {
    const CMat k = frequency_gram(0.11, 0.73, 9);
    CHECK((k - k.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMat> eig(k);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("band energy matches the quadrature oracle on the paper bands") {
  ScenarioConfig cfg = paper_scenario();
  std::mt19937_64 gen(17);
  const CMat s = test::random_unit_energy_waveforms(6, 40, gen);
  const CVec w = complex_gaussian(6, gen);

  for (const auto& spec_band : cfg.shared_bands) {
    const BandIndexing band = normalize_band(spec_band, cfg.array);
    const double algebraic = band_energy(s, w, band, cfg.array);
    const double quadrature = band_energy_quadrature(s, w, band, cfg.array, 4096);
    CHECK(algebraic == doctest::Approx(quadrature).epsilon(1e-4));
    CHECK(algebraic >= 0.0);
  }
}

TEST_CASE("whole-spectrum band captures the total energy") {
  ScenarioConfig cfg = test::small_scenario(4, 1, 10);
  std::mt19937_64 gen(23);
  const CMat s = test::random_unit_energy_waveforms(4, 10, gen);
  CVec w(4);
  for (int m = 0; m < 4; ++m) w(m) = std::exp(kJ * (0.3 * m));  // unit modulus
  const BandIndexing band = normalize_band({0.0, 1.0, 1.0}, cfg.array);
  CHECK(band_energy(s, w, band, cfg.array) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one full channel with flat weights carries 1/N_T") {
  ScenarioConfig cfg = test::small_scenario(4, 1, 10);
  std::mt19937_64 gen(29);
  const CMat s = test::random_unit_energy_waveforms(4, 10, gen);
  const CVec w = CVec::Ones(4);
  const BandIndexing band = normalize_band({0.25, 0.5, 1.0}, cfg.array);  // exactly channel 2
  CHECK(band.kind == BandIndexing::Case::adjacent);  // upper edge floors into channel 3 at width 0
  CHECK(band_energy(s, w, band, cfg.array) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("three-way identity E_b = w-form = s-form across all cases") {
  ScenarioConfig cfg = test::small_scenario(5, 1, 9);
  const std::vector<SharedBandSpec> bands = {
      {0.05, 0.15, 1.0},   // same channel
      {0.15, 0.35, 1.0},   // adjacent
      {0.08, 0.92, 1.0},   // spanning with interior channels
      {0.0, 1.0, 1.0},     // whole band
  };
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 10; ++rep) {
    const CMat s = test::random_unit_energy_waveforms(5, 9, gen);
    const CVec w = complex_gaussian(5, gen);
    WaveformSet ws;
    ws.samples = s;
    const CVec st = ws.vec_waveform();
    for (const auto& sb : bands) {
      const BandIndexing band = normalize_band(sb, cfg.array);
      const double direct = band_energy(s, w, band, cfg.array);
      const double w_form = (w.adjoint() * i_tilde_matrix(s, band, cfg.array) * w).value().real();
      const double s_form = (st.adjoint() * h_b_matrix(w, band, cfg.array) * st).value().real();
      CHECK(std::abs(direct - w_form) < 1e-10);
      CHECK(std::abs(direct - s_form) < 1e-10);
    }
  }
}

TEST_CASE("i_tilde is diagonal nonnegative; zero-width band gives zero") {
  ScenarioConfig cfg = test::small_scenario(4, 1, 6);
  std::mt19937_64 gen(37);
  const CMat s = test::random_unit_energy_waveforms(4, 6, gen);
  const BandIndexing band = normalize_band({0.3, 0.7, 1.0}, cfg.array);
  const CMat it = i_tilde_matrix(s, band, cfg.array);
  for (int p = 0; p < 4; ++p) {
    CHECK(it(p, p).real() >= 0.0);
    for (int q = 0; q < 4; ++q)
      if (p != q) CHECK(std::abs(it(p, q)) == 0.0);
  }
  BandIndexing degenerate = band;
  degenerate.ch_high = degenerate.ch_low;
  degenerate.local_high = degenerate.local_low;
  degenerate.kind = BandIndexing::Case::same_channel;
  CHECK(i_tilde_matrix(s, degenerate, cfg.array).norm() == 0.0);
}

TEST_CASE("h_b with zero weights is zero; adjacent case has exactly two blocks") {
  ScenarioConfig cfg = paper_scenario();
  const BandIndexing f1 = normalize_band(cfg.shared_bands[0], cfg.array);
  CHECK(h_b_matrix(CVec::Zero(6), f1, cfg.array).norm() == 0.0);

  const CMat h = h_b_matrix(CVec::Ones(6), f1, cfg.array);
  const int L = cfg.array.n_samples;
  for (int m = 0; m < 6; ++m) {
    const double blk = h.block(m * L, m * L, L, L).norm();
    if (m <= 1)
      CHECK(blk > 0.0);
    else
      CHECK(blk == 0.0);
  }
}

TEST_CASE("band energy additivity within one channel") {
  ScenarioConfig cfg = test::small_scenario(4, 1, 8);
  std::mt19937_64 gen(41);
  const CMat s = test::random_unit_energy_waveforms(4, 8, gen);
  const CVec w = complex_gaussian(4, gen);
  // [a,b] + [b,c] = [a,c], all inside channel 2 (global [0.25, 0.5])
  const auto e = [&](double lo, double hi) {
    return band_energy(s, w, normalize_band({lo, hi, 1.0}, cfg.array), cfg.array);
  };
  CHECK(e(0.26, 0.33) + e(0.33, 0.41) == doctest::Approx(e(0.26, 0.41)).epsilon(1e-10));
}

TEST_CASE("esd curve: flat case, Parseval, and band consistency") {
  SUBCASE("single-sample constant-modulus waveforms give a flat ESD") {
    ScenarioConfig cfg = test::small_scenario(2, 1, 2);
    CMat s(2, 2);
    s << 0.5, 0.0, 0.5, 0.0;  // one nonzero sample per row
    const EsdCurve esd = esd_curve(s, CVec::Ones(2), cfg.array, 64);
    for (double v : esd.value) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("trapezoidal integral over the full band equals the total energy") {
    ScenarioConfig cfg = test::small_scenario(3, 1, 12);
    std::mt19937_64 gen(43);
    const CMat s = test::random_unit_energy_waveforms(3, 12, gen);
    const CVec w = CVec::Ones(3);
    const int grid = 1024;
    const EsdCurve esd = esd_curve(s, w, cfg.array, grid);
    double integral = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double h = 1.0 / (grid - 1);  // local step in cycles/sample
      for (int i = 0; i + 1 < grid; ++i) {
        const size_t at = static_cast<size_t>(m) * grid + i;
        integral += 0.5 * (esd.value[at] + esd.value[at + 1]) * h;
      }
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("quadrature over F1 matches band_energy to 1e-4") {
    ScenarioConfig cfg = paper_scenario();
    std::mt19937_64 gen(47);
    const CMat s = test::random_unit_energy_waveforms(6, 40, gen);
    const CVec w = complex_gaussian(6, gen);
    const BandIndexing f1 = normalize_band(cfg.shared_bands[0], cfg.array);
    const double algebraic = band_energy(s, w, f1, cfg.array);
    CHECK(band_energy_quadrature(s, w, f1, cfg.array, 4096) ==
          doctest::Approx(algebraic).epsilon(1e-4));
  }
  SUBCASE("grid below 64 points is rejected") {
    ScenarioConfig cfg = test::small_scenario(2, 1, 4);
    CHECK_THROWS_AS(esd_curve(CMat::Zero(2, 4), CVec::Ones(2), cfg.array, 32),
                    std::invalid_argument);
  }
}
