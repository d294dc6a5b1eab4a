#include <doctest.h>

#include <complex>
#include <numbers>

#include "impedukt/oracles.hpp"
#include "impedukt/wavenumbers.hpp"

using namespace impedukt;

TEST_CASE("elliptic integral series against the quadrature oracle") {
  CHECK(elliptic_I(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  // values pinned by oracles::quadrature_elliptic_integral
  CHECK(elliptic_I(0.6) == doctest::Approx(1.418083394448724).epsilon(1e-12));
  CHECK(elliptic_I(0.8) == doctest::Approx(1.276349943169906).epsilon(1e-12));
  for (double e = 0.0; e <= 0.9501; e += 0.05) {
    const double q = oracles::quadrature_elliptic_integral(e);
    CHECK(std::abs(elliptic_I(e) - q) < 1e-10);
  }
  CHECK_THROWS_AS(elliptic_I(1.0), DomainError);
  CHECK_THROWS_AS(elliptic_I(-0.1), DomainError);
}

TEST_CASE("circular wavenumber") {
  SUBCASE("lossless reduces to k0") {
    const auto kz = kz_circular(1000.0, 0.01, 0.0, 345.0);
    CHECK(kz.real() == doctest::Approx(2.0 * std::numbers::pi * 1000.0 / 345.0).epsilon(1e-15));
    CHECK(kz.imag() == 0.0);
  }
  SUBCASE("lossy value and first-order imaginary part") {
    const auto kz = kz_circular(1000.0, 0.01, 0.01, 345.0);
    CHECK(kz.real() == doctest::Approx(18.2394827369).epsilon(1e-9));
    CHECK(kz.imag() == doctest::Approx(-0.9985004283).epsilon(1e-9));
    // Im(kz) ~ -mu/a for a small correction term
    CHECK(std::abs(kz.imag() + 0.01 / 0.01) < 0.01);
  }
  SUBCASE("imaginary part scales linearly in mu for small mu") {
    const double slope_lo = kz_circular(1000.0, 0.01, 0.001, 345.0).imag() / 0.001;
    const double slope_hi = kz_circular(1000.0, 0.01, 0.01, 345.0).imag() / 0.01;
    CHECK(std::abs(slope_hi / slope_lo - 1.0) < 0.01);
  }
  CHECK_THROWS_AS(kz_circular(0.0, 0.01, 0.01, 345.0), DomainError);
  CHECK_THROWS_AS(kz_circular(1000.0, 0.0, 0.01, 345.0), DomainError);
}

TEST_CASE("elliptical wavenumber") {
  LossyDuctModel m;
  m.section.a_major = 0.005 / std::sqrt(1.0 - 0.64);
  m.section.b_minor = 0.005;
  m.mu_z = 0.01;
  m.c0 = 345.0;

  SUBCASE("lossless reduces to k0") {
    LossyDuctModel l = m;
    l.mu_z = 0.0;
    const auto kz = kz_elliptical(1000.0, l);
    CHECK(kz.real() == doctest::Approx(2.0 * std::numbers::pi * 1000.0 / 345.0).epsilon(1e-15));
    CHECK(kz.imag() == 0.0);
  }
  SUBCASE("pinned lossy value") {
    const auto kz = kz_elliptical(1000.0, m);
    CHECK(kz.real() == doctest::Approx(18.2839266905).epsilon(1e-9));
    CHECK(kz.imag() == doctest::Approx(-1.6187179550).epsilon(1e-9));
  }
  SUBCASE("zero eccentricity matches the circular formula") {
    LossyDuctModel c;
    c.section = circular_section(0.01);
    c.mu_z = 0.01;
    for (double f : {100.0, 1000.0, 5000.0, 10000.0}) {
      const auto ke = kz_elliptical(f, c);
      const auto kc = kz_circular(f, 0.01, 0.01, 345.0);
      CHECK(std::abs(ke - kc) / std::abs(kc) < 1e-12);
    }
  }
  SUBCASE("attenuation grows with mu and shrinks with b") {
    LossyDuctModel lo = m, hi = m, wide = m;
    lo.mu_z = 0.005;
    hi.mu_z = 0.02;
    wide.section.b_minor = 0.008;
    wide.section.a_major = 0.008 / std::sqrt(1.0 - 0.64);
    const double base = -kz_elliptical(2000.0, m).imag();
    CHECK(-kz_elliptical(2000.0, lo).imag() < base);
    CHECK(-kz_elliptical(2000.0, hi).imag() > base);
    CHECK(-kz_elliptical(2000.0, wide).imag() < base);
  }
  CHECK_THROWS_AS(kz_elliptical(-5.0, m), DomainError);
}

TEST_CASE("admittance matching equalizes the wavenumbers") {
  CHECK(match_admittance(0.01, 0.3, 0.007, 0.3, 0.007) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(match_admittance(0.01, 0.0, 0.01, 0.0, 0.02) == doctest::Approx(0.02).epsilon(1e-15));

  const double mu_i = match_admittance(0.01, 0.0, 0.01, 0.8, 0.005);
  CHECK(mu_i == doctest::Approx(0.0061534704).epsilon(1e-7));

  LossyDuctModel base{circular_section(0.01), 0.01, 345.0};
  LossyDuctModel ell;
  ell.section.b_minor = 0.005;
  ell.section.a_major = 0.005 / std::sqrt(1.0 - 0.64);
  ell.mu_z = mu_i;
  ell.c0 = 345.0;
  for (double f : {150.0, 1000.0, 4000.0, 9000.0}) {
    const auto kb = kz_for(f, base);
    const auto ke = kz_elliptical(f, ell);
    CHECK(std::abs(kb - ke) / std::abs(kb) < 1e-12);
  }
}

TEST_CASE("circular cutoffs") {
  const auto modes = circular_cutoffs(0.01, 345.0);
  REQUIRE(modes.size() == 3);
  CHECK(modes[0].cutoff_hz == doctest::Approx(10109.6557).epsilon(1e-8));
  CHECK(modes[1].cutoff_hz == doctest::Approx(16770.3432).epsilon(1e-8));
  CHECK(modes[2].cutoff_hz == doctest::Approx(21039.3056).epsilon(1e-8));
  CHECK_FALSE(modes[0].centerline_limiting);
  CHECK_FALSE(modes[1].centerline_limiting);
  CHECK(modes[2].centerline_limiting);

  const auto doubled = circular_cutoffs(0.02, 345.0);
  for (int i = 0; i < 3; ++i)
    CHECK(doubled[i].cutoff_hz == doctest::Approx(0.5 * modes[i].cutoff_hz).epsilon(1e-13));

  CHECK_THROWS_AS(circular_cutoffs(0.0, 345.0), DomainError);
}

TEST_CASE("spacing advice") {
  SUBCASE("paper operating point") {
    const auto adv = spacing_advice(10000.0, 345.0, 0.001, 0.01);
    CHECK(adv.lambda_min == doctest::Approx(0.0345).epsilon(1e-12));
    CHECK(adv.s_opt == doctest::Approx(0.008625).epsilon(1e-12));
    CHECK(adv.s_min == doctest::Approx(0.00345).epsilon(1e-12));
    CHECK(adv.s_max == doctest::Approx(0.0138).epsilon(1e-12));
    CHECK(adv.x1_min == doctest::Approx(0.021).epsilon(1e-12));
    CHECK_FALSE(adv.mesh_limited);
    // the paper's s = 1 cm sits inside (0.1, 0.4) lambda_min
    CHECK(0.01 > adv.s_min);
    CHECK(0.01 < adv.s_max);
    CHECK(0.01 / adv.lambda_min == doctest::Approx(0.2899).epsilon(1e-3));
  }
  SUBCASE("halving f_max doubles every spacing") {
    const auto a = spacing_advice(10000.0, 345.0, 0.0005);
    const auto b = spacing_advice(5000.0, 345.0, 0.0005);
    CHECK(b.s_min == doctest::Approx(2.0 * a.s_min).epsilon(1e-12));
    CHECK(b.s_max == doctest::Approx(2.0 * a.s_max).epsilon(1e-12));
    CHECK(b.s_opt == doctest::Approx(2.0 * a.s_opt).epsilon(1e-12));
  }
  SUBCASE("coarse mesh limits the minimum spacing") {
    const auto adv = spacing_advice(10000.0, 345.0, 0.005);
    CHECK(adv.mesh_limited);
    CHECK(adv.s_min == doctest::Approx(0.005).epsilon(1e-12));
  }
  CHECK_THROWS_AS(spacing_advice(10000.0, 345.0, 0.014), DomainError);
}

TEST_CASE("sensitivity proxy has the TMTF singularity structure") {
  const double c0 = 345.0, f = 5000.0;
  const double lambda = c0 / f;
  CHECK(sensitivity_proxy(0.5 * lambda, f, c0) == std::numeric_limits<double>::infinity());
  CHECK(sensitivity_proxy(lambda, f, c0) == std::numeric_limits<double>::infinity());
  CHECK(sensitivity_proxy(0.25 * lambda, f, c0) == doctest::Approx(1.0).epsilon(1e-9));

  // dense scan: the minimum over (0, lambda/2) sits at lambda/4
  double best_s = 0.0, best = 1e300;
  for (int i = 1; i < 500; ++i) {
    const double s = 0.5 * lambda * i / 500.0;
    const double v = sensitivity_proxy(s, f, c0);
    if (v < best) {
      best = v;
      best_s = s;
    }
  }
  CHECK(best_s == doctest::Approx(0.25 * lambda).epsilon(0.01));
  CHECK_THROWS_AS(sensitivity_proxy(0.0, f, c0), DomainError);
}
