#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "impedukt/oracles.hpp"
#include "impedukt/tmtf.hpp"
#include "synth.hpp"

using namespace impedukt;

TEST_CASE("transfer function identities and floor flags") {
  std::vector<cdouble> p1 = {{1, 0}, {2, 1}, {0.5, -0.5}, {1e-15, 0}};
  SUBCASE("P2 = P1 gives H12 = 1") {
    const auto tf = transfer_function(p1, p1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(tf.h12[i] - cdouble(1, 0)) < 1e-14);
  }
  SUBCASE("P2 = 2 P1 gives H12 = 2") {
    auto p2 = p1;
    for (auto& v : p2) v *= 2.0;
    const auto tf = transfer_function(p1, p2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(tf.h12[i] - cdouble(2, 0)) < 1e-14);
  }
  SUBCASE("bins below the P1 floor are flagged, not divided") {
    const auto tf = transfer_function(p1, p1);
    CHECK(tf.invalid[3] == 1);
    CHECK(tf.invalid[0] == 0);
  }
  SUBCASE("mismatched grids are rejected") {
    std::vector<cdouble> shorter = {{1, 0}};
    CHECK_THROWS_AS(transfer_function(p1, shorter), DomainError);
  }
}

TEST_CASE("synthetic plane-wave field reproduces the textbook H12") {
  oracles::SyntheticFieldSpec spec;
  const cdouble k(25.0, -0.8);
  const cdouble r0 = std::polar(0.6, 1.1);
  spec.reflection = {r0};
  spec.wavenumber = {k};
  spec.amplitude = {cdouble(2.0, 0.3)};
  spec.x1 = 0.035;
  spec.x2 = 0.02;
  const auto f = oracles::synthetic_two_point_field(spec);
  const cdouble j(0.0, 1.0);
  const cdouble expect = (std::exp(j * k * spec.x2) + r0 * std::exp(-j * k * spec.x2)) /
                         (std::exp(j * k * spec.x1) + r0 * std::exp(-j * k * spec.x1));
  CHECK(std::abs(f.p2[0] / f.p1[0] - expect) < 1e-13);
}

TEST_CASE("reflection recovery from synthetic fields") {
  const ProbeGeometry geom{0.032, 0.018};
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> umag(0.0, 1.0);

  SUBCASE("anechoic field gives R = 0") {
    const cdouble k(40.0, -1.0);
    oracles::SyntheticFieldSpec spec;
    spec.reflection = {cdouble(0, 0)};
    spec.wavenumber = {k};
    spec.amplitude = {cdouble(1, 0)};
    spec.x1 = geom.x1;
    spec.x2 = geom.x2;
    const auto f = oracles::synthetic_two_point_field(spec);
    const auto r = reflection_at_reference(f.p2[0] / f.p1[0], geom, k);
    CHECK(std::abs(r) < 1e-12);
  }
  SUBCASE("rigid lossless field gives R = 1 and an impedance pole") {
    const cdouble k(40.0, 0.0);
    oracles::SyntheticFieldSpec spec;
    spec.reflection = {cdouble(1, 0)};
    spec.wavenumber = {k};
    spec.amplitude = {cdouble(1, 0)};
    spec.x1 = geom.x1;
    spec.x2 = geom.x2;
    const auto f = oracles::synthetic_two_point_field(spec);
    const auto r = reflection_at_reference(f.p2[0] / f.p1[0], geom, k);
    CHECK(std::abs(r - cdouble(1, 0)) < 1e-11);
    bool pole = false;
    normalized_impedance(r, &pole);
    CHECK(pole);
  }
  SUBCASE("random complex reflections round-trip to 1e-10") {
    for (int trial = 0; trial < 200; ++trial) {
      const cdouble k(20.0 + 150.0 * umag(rng), -2.0 * umag(rng));
      const cdouble r0 = std::polar(umag(rng), uphase(rng));
      oracles::SyntheticFieldSpec spec;
      spec.reflection = {r0};
      spec.wavenumber = {k};
      spec.amplitude = {std::polar(1.0 + umag(rng), uphase(rng))};
      spec.x1 = geom.x1;
      spec.x2 = geom.x2;
      // keep k s away from the spacing singularity
      if (std::sin(k.real() * geom.spacing()) < 0.2) continue;
      const auto f = oracles::synthetic_two_point_field(spec);
      const auto r = reflection_at_reference(f.p2[0] / f.p1[0], geom, k);
      CHECK(std::abs(r - r0) < 1e-10);
    }
  }
}

TEST_CASE("moebius impedance map") {
  CHECK(std::abs(normalized_impedance(cdouble(0, 0)) - cdouble(1, 0)) < 1e-15);
  CHECK(std::abs(normalized_impedance(cdouble(-1, 0)) - cdouble(0, 0)) < 1e-15);
  CHECK(std::abs(normalized_impedance(cdouble(0, 1)) - cdouble(0, 1)) < 1e-15);

  // involution: Z(-R) = 1/Z(R)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 100; ++i) {
    const cdouble r(u(rng), u(rng));
    const auto z = normalized_impedance(r);
    const auto zi = normalized_impedance(-r);
    CHECK(std::abs(z * zi - cdouble(1, 0)) < 1e-12);
  }
}

TEST_CASE("real-wavenumber processing loses exactly the translation factor") {
  LossyDuctModel duct{circular_section(0.01), 0.01, 345.0};
  const ProbeGeometry geom{0.04, 0.03};
  const double f = 2000.0;
  const cdouble kz = kz_for(f, duct);
  const cdouble r0 = std::polar(0.7, 0.4);

  oracles::SyntheticFieldSpec spec;
  spec.reflection = {r0};
  spec.wavenumber = {kz};
  spec.amplitude = {cdouble(1, 0)};
  spec.x1 = geom.x1;
  spec.x2 = geom.x2;
  const auto fld = oracles::synthetic_two_point_field(spec);
  const cdouble h12 = fld.p2[0] / fld.p1[0];

  // translation-only substitution: the magnitude ratio is e^{2 x1 Im kz}
  const cdouble r1 = reflection_at_probe(h12, geom.spacing(), kz);
  const cdouble full = translate_reflection(r1, geom.x1, kz);
  const cdouble lossless_prop = translate_reflection(r1, geom.x1, cdouble(kz.real(), 0.0));
  const double predicted = std::exp(2.0 * geom.x1 * kz.imag());
  CHECK(std::abs(full - r0) < 1e-12);
  CHECK(std::abs(lossless_prop) / std::abs(full) == doctest::Approx(predicted).epsilon(1e-12));

  // full real-k processing lands near the same law (error O(|Im kz| s))
  const cdouble real_k = reflection_at_reference(h12, geom, cdouble(kz.real(), 0.0));
  CHECK(std::abs(real_k) / std::abs(full) == doctest::Approx(predicted).epsilon(0.05));

  // and the deviation grows with x1
  double prev_err = 0.0;
  for (double x1 : {0.02, 0.04, 0.08, 0.16}) {
    ProbeGeometry g{x1, x1 - 0.01};
    oracles::SyntheticFieldSpec sp;
    sp.reflection = {r0};
    sp.wavenumber = {kz};
    sp.amplitude = {cdouble(1, 0)};
    sp.x1 = g.x1;
    sp.x2 = g.x2;
    const auto fl = oracles::synthetic_two_point_field(sp);
    const cdouble h = fl.p2[0] / fl.p1[0];
    const cdouble rk = reflection_at_reference(h, g, cdouble(kz.real(), 0.0));
    const cdouble ck = reflection_at_reference(h, g, kz);
    const double err = std::abs(std::abs(rk) / std::abs(ck) - 1.0);
    CHECK(err > prev_err);
    prev_err = err;
  }
}

TEST_CASE("decay diagnostics") {
  ProbeRecord good, bad;
  good.dt = bad.dt = 1e-5;
  const std::size_t n = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * 1e-5;
    good.pressure.push_back(std::exp(-t / 2e-3) * std::sin(2.0 * std::numbers::pi * 800.0 * t));
    bad.pressure.push_back(std::exp(-t / 5e-2) * std::sin(2.0 * std::numbers::pi * 800.0 * t));
  }
  const auto sg = spectra_from_probes(good, good);
  CHECK_FALSE(sg.decay_warning);
  const auto sb = spectra_from_probes(bad, bad);
  CHECK(sb.decay_warning);

  // tail above 10% of peak escalates to an error in extract_impedance
  LossyDuctModel duct{circular_section(0.01), 0.01, 345.0};
  CHECK_THROWS_AS(extract_impedance(bad, bad, {0.03, 0.02}, duct, 2000.0), DomainError);

  ProbeRecord mismatched = good;
  mismatched.pressure.pop_back();
  CHECK_THROWS_AS(spectra_from_probes(good, mismatched), DomainError);
}

TEST_CASE("end-to-end extraction from synthetic records") {
  synth::Spec s;
  s.duct = LossyDuctModel{circular_section(0.01), 0.01, 345.0};
  s.x1 = 0.032;
  s.x2 = 0.02;
  s.rho = 0.62;
  s.theta0 = 0.9;
  const auto made = synth::make_records(s);

  const double f_max = 6000.0;
  const auto spec = extract_impedance(made.r1, made.r2, {s.x1, s.x2}, s.duct, f_max);
  REQUIRE(!spec.bins.empty());
  CHECK(spec.bins.back().f <= f_max);

  std::size_t checked = 0;
  for (const auto& bin : spec.bins) {
    const std::size_t k = static_cast<std::size_t>(std::llround(bin.f / made.df));
    if (bin.f < 400.0) continue;  // source spectrum carries little energy at DC
    if (bin.flag != BinFlag::Ok) continue;
    CHECK(std::abs(bin.reflection - made.reference[k]) < 1e-10);
    ++checked;
  }
  CHECK(checked > 50);

  SUBCASE("swapping the probe labels changes nothing") {
    const auto swapped = extract_impedance(made.r2, made.r1, {s.x2, s.x1}, s.duct, f_max);
    REQUIRE(swapped.bins.size() == spec.bins.size());
    for (std::size_t i = 0; i < spec.bins.size(); ++i)
      CHECK(std::abs(swapped.bins[i].reflection - spec.bins[i].reflection) < 1e-14);
  }
}

TEST_CASE("cutoff warnings and flags for circular ducts") {
  synth::Spec s;
  s.duct = LossyDuctModel{circular_section(0.012), 0.01, 345.0};
  const auto made = synth::make_records(s);
  // centerline limit for a = 1.2 cm is ~17.5 kHz; ask beyond it
  const double limit = centerline_limit_hz(0.012, 345.0);
  const auto spec = extract_impedance(made.r1, made.r2, {s.x1, s.x2}, s.duct, limit * 1.2);
  bool saw_cutoff_warning = false;
  for (const auto& w : spec.warnings)
    if (w.find("cutoff") != std::string::npos) saw_cutoff_warning = true;
  CHECK(saw_cutoff_warning);
  bool above = false;
  for (const auto& bin : spec.bins)
    if (bin.flag == BinFlag::AboveCutoff) above = true;
  CHECK(above);
}

TEST_CASE("probe geometry validation") {
  const ProbeGeometry swapped{0.01, 0.02};
  CHECK_THROWS_AS(swapped.validate(), DomainError);
  const ProbeGeometry at_ref{0.02, 0.0};
  CHECK_THROWS_AS(at_ref.validate(), DomainError);
  const ProbeGeometry fine{0.02, 0.01};
  CHECK_NOTHROW(fine.validate());
}
