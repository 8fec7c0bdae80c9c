#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "pcs/linkmodel.hpp"

using namespace pcs;

namespace {

double to_db(double x) { return 10.0 * std::log10(x); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

// NLI coefficient of one span from the GN reference integral over the
// region where f1, f2 and f1 + f2 all fall inside a flat WDM spectrum of
// width B: eta = (16/27) gamma^2 / Rs^2 * integral of the link kernel.
double gn_integral_eta(const LinkConfig& l) {
  const double a = l.alpha_per_m();
  const double len = l.span_length_km * 1e3;
  const double b2 = l.beta2();
  const double g = l.gamma_per_w_m();
  const double half = 0.5 * l.wdm_channels * l.wdm_spacing_hz;
  const double e = std::exp(-a * len);
  auto rho = [&](double f1, double f2) {
    const double u = 4.0 * std::numbers::pi * std::numbers::pi * b2 * f1 * f2;
    return (1.0 - 2.0 * e * std::cos(u * len) + e * e) / (a * a + u * u);
  };
  const double leff2 = std::pow((1.0 - e) / a, 2);
  auto inner = [&](double f1) {
    const double lo = std::max(-half, -half - f1), hi = std::min(half, half - f1);
    auto f = [&](double f2) { return rho(f1, f2); };
    double s = 0.0;
    if (lo < 0.0) s += integrate(f, lo, std::min(0.0, hi), 1e-7 * leff2 * half);
    if (hi > 0.0) s += integrate(f, std::max(0.0, lo), hi, 1e-7 * leff2 * half);
    return s;
  };
  const double total = integrate(inner, -half, 0.0, 1e-6 * leff2 * half * half) +
                       integrate(inner, 0.0, half, 1e-6 * leff2 * half * half);
  return 16.0 / 27.0 * g * g * total / (l.baud * l.baud);
}

}  // namespace

TEST_CASE("reference link parameters") {
  const LinkConfig l;
  CHECK(l.span_gain() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(l.launch_power_w() == doctest::Approx(std::pow(10.0, -0.16) * 1e-3).epsilon(1e-12));
  CHECK(l.beta2() == doctest::Approx(-2.1683e-26).epsilon(1e-4));
  CHECK(l.alpha_per_m() == doctest::Approx(0.2 * std::log(10.0) / 10.0 / 1e3).epsilon(1e-12));
}

TEST_CASE("validation names the offending field") {
  LinkConfig l;
  l.rolloff = 1.5;
  CHECK_THROWS_WITH_AS(l.validate(), doctest::Contains("rolloff"), std::invalid_argument);
  l = {};
  l.num_spans = -1;
  CHECK_THROWS_AS(l.validate(), std::invalid_argument);
  l = {};
  l.baud = 0.0;
  CHECK_THROWS_AS(l.validate(), std::invalid_argument);
}

TEST_CASE("ASE power") {
  LinkConfig l;
  l.num_spans = 0;
  CHECK(ase_power(l) == 0.0);
  l.num_spans = 1;
  // 99 * h * (c / 1550 nm) * 10^0.4 * 28 GHz, evaluated by hand.
  CHECK(ase_power(l) == doctest::Approx(8.923562302147258e-07).epsilon(1e-9));
  const double one = ase_power(l);
  l.num_spans = 2;
  CHECK(ase_power(l) == doctest::Approx(2.0 * one).epsilon(1e-14));
}

TEST_CASE("NLI power") {
  LinkConfig l;
  SUBCASE("vanishes without nonlinearity") {
    l.gamma_per_w_km = 0.0;
    CHECK(nli_power(l) == 0.0);
  }
  SUBCASE("cubic in launch power and linear in spans") {
    const double p0 = nli_power(l);
    l.launch_power_dbm += 3.0;
    CHECK(to_db(nli_power(l)) - to_db(p0) == doctest::Approx(9.0).epsilon(1e-9));
    l.launch_power_dbm -= 3.0;
    l.num_spans = 7;
    CHECK(nli_power(l) == doctest::Approx(7.0 * p0).epsilon(1e-12));
  }
  SUBCASE("closed form is within 0.5 dB of the GN reference integral") {
    const double closed = nli_coefficient_per_span(l);
    const double numeric = gn_integral_eta(l);
    INFO("closed " << closed << " numeric " << numeric);
    CHECK(std::abs(to_db(closed) - to_db(numeric)) < 0.5);
    CHECK(nli_power(l) == doctest::Approx(closed * std::pow(l.launch_power_w(), 3)).epsilon(1e-12));
  }
}

TEST_CASE("GN SNR and launch-power optimum") {
  LinkConfig l;
  SUBCASE("reference link optimum lies near -1.6 dBm") {
    const auto o = optimal_launch_power(l);
    CHECK_FALSE(o.at_boundary);
    CHECK(o.power_dbm >= -2.6);
    CHECK(o.power_dbm <= -0.6);
  }
  SUBCASE("at the optimum NLI is half the ASE") {
    for (int spans : {1, 10, 40}) {
      l.num_spans = spans;
      const auto o = optimal_launch_power(l);
      LinkConfig at = l;
      at.launch_power_dbm = o.power_dbm;
      CHECK(nli_power(at) / ase_power(at) == doctest::Approx(0.5).epsilon(1e-4));
      CHECK(o.snr == doctest::Approx(gn_snr(at)).epsilon(1e-12));
    }
  }
  SUBCASE("optimum does not depend on the span count") {
    l.num_spans = 1;
    const double ref = optimal_launch_power(l).power_dbm;
    for (int spans = 2; spans <= 80; spans += 7) {
      l.num_spans = spans;
      CHECK(optimal_launch_power(l).power_dbm == doctest::Approx(ref).epsilon(1e-5));
    }
  }
  SUBCASE("without nonlinearity the optimum runs to the boundary") {
    l.gamma_per_w_km = 0.0;
    double prev = 0.0;
    for (double p = -20.0; p <= 20.0; p += 1.0) {
      l.launch_power_dbm = p;
      CHECK(gn_snr(l) > prev);
      prev = gn_snr(l);
    }
    const auto o = optimal_launch_power(l);
    CHECK(o.at_boundary);
    CHECK(o.power_dbm == doctest::Approx(20.0).epsilon(1e-3));
  }
  SUBCASE("SNR falls with distance") {
    double prev = INFINITY;
    for (int spans = 1; spans <= 80; ++spans) {
      l.num_spans = spans;
      CHECK(gn_snr(l) < prev);
      prev = gn_snr(l);
    }
  }
  SUBCASE("SNR slope is +1 at low power and -2 at high power") {
    auto snr_db = [&](double p) {
      l.launch_power_dbm = p;
      return to_db(gn_snr(l));
    };
    CHECK((snr_db(-19.0) - snr_db(-20.0)) == doctest::Approx(1.0).epsilon(0.01));
    CHECK((snr_db(20.0) - snr_db(19.0)) == doctest::Approx(-2.0).epsilon(0.01));
  }
}

TEST_CASE("SNR grid CSV") {
  std::ostringstream os;
  const std::vector<int> spans = {1, 10};
  const std::vector<double> launch = {-2.0, 0.0};
  write_snr_grid_csv(os, LinkConfig{}, spans, launch);
  const std::string text = os.str();
  CHECK(text.rfind("spans,distance_km,launch_dbm,snr_db\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
