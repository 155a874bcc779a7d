#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fdstab/errors.hpp"
#include "fdstab/poly.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/trace.hpp"

using namespace fdstab;

namespace {

SchemeDef load(const char* file) {
  return SchemeDef::load(std::string(FDSTAB_SCHEME_DIR "/") + file);
}

SchemeDef trapezoidal() {
  return SchemeDef::parse(R"(name trapezoidal
dim 1
s 0
r 1
p 1
q1 0
lambda 1.0
interior
  1 0 1.0
  1 1 -0.25
  1 -1 0.25
  0 0 -1.0
  0 1 -0.25
  0 -1 0.25
end
boundary
end
)",
                          "trapezoidal-inline");
}

// Greedy nearest match between two spectra of equal size.
double spectrum_distance(std::vector<Complex> lhs, std::vector<Complex> rhs) {
  double worst = 0.0;
  for (const Complex& v : lhs) {
    double best = 1e300;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      if (std::abs(v - rhs[k]) < best) {
        best = std::abs(v - rhs[k]);
        best_k = k;
      }
    }
    worst = std::max(worst, best);
    rhs.erase(rhs.begin() + static_cast<std::ptrdiff_t>(best_k));
  }
  return worst;
}

} // namespace

TEST_CASE("boundary symbols of leap-frog match hand expansion") {
  const SchemeDef scheme = load("leapfrog.scm");
  const Complex z(2.0, 0.0);
  const auto a = boundary_symbols(scheme, z, {});
  REQUIRE(a.size() == 3);
  CHECK(std::abs(a[0] - Complex(1.6, 0.0)) < 1e-14);  // +lambda_a z
  CHECK(std::abs(a[1] - Complex(3.0, 0.0)) < 1e-14);  // z^2 - 1
  CHECK(std::abs(a[2] - Complex(-1.6, 0.0)) < 1e-14); // -lambda_a z

  const auto b = boundary_symbols_zdz(scheme, z, {});
  CHECK(std::abs(b[0] - Complex(1.6, 0.0)) < 1e-14);
  CHECK(std::abs(b[1] - Complex(8.0, 0.0)) < 1e-14);  // z * 2z
  CHECK(std::abs(b[2] - Complex(-1.6, 0.0)) < 1e-14);
}

TEST_CASE("leap-frog companion matrices take their closed form") {
  const SchemeDef scheme = load("leapfrog.scm");
  const double lam = 0.8;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Complex z = std::polar(1.0 + 2.0 * unit(gen), 2.0 * M_PI * unit(gen));
    const CompanionPair pair = companions(scheme, z, {});
    REQUIRE(pair.L_mat.rows() == 2);

    const Complex l00 = (z * z - 1.0) / (lam * z);
    CHECK(std::abs(pair.L_mat(0, 0) - l00) < 1e-12 * std::abs(l00));
    CHECK(std::abs(pair.L_mat(0, 1) - 1.0) < 1e-13);
    CHECK(std::abs(pair.L_mat(1, 0) - 1.0) < 1e-13);
    CHECK(std::abs(pair.L_mat(1, 1)) < 1e-13);

    const Complex m00 = 2.0 * z / lam;
    CHECK(std::abs(pair.M_mat(0, 0) - m00) < 1e-12 * std::abs(m00));
    CHECK(std::abs(pair.M_mat(0, 1) - 1.0) < 1e-13);

    // Both recurrences have reciprocal-with-sign symmetry, so each spectrum
    // multiplies to -1 and splits one inside, one outside.
    CHECK(std::abs(pair.L_mat.determinant() + 1.0) < 1e-12);
    CHECK(std::abs(pair.M_mat.determinant() + 1.0) < 1e-12);
    CHECK(pair.L_split.n_stable == 1);
    CHECK(pair.L_split.n_unstable == 1);
    CHECK(pair.M_split.n_stable == 1);
    CHECK(pair.M_split.n_unstable == 1);
    CHECK(pair.M_split.n_central == 0);
  }
}

TEST_CASE("companion eigenvalues agree with edge polynomial roots") {
  for (const char* file : {"leapfrog.scm", "ab3_centered.scm"}) {
    const SchemeDef scheme = load(file);
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Complex z = std::polar(1.05 + unit(gen), 2.0 * M_PI * unit(gen));
      const CompanionPair pair = companions(scheme, z, {});

      const std::vector<Complex> a = boundary_symbols(scheme, z, {});
      const std::vector<Complex> kappa = poly_roots(Poly(a));
      std::vector<Complex> eig(pair.L_split.eigenvalues.data(),
                               pair.L_split.eigenvalues.data() +
                                   pair.L_split.eigenvalues.size());
      REQUIRE(kappa.size() == eig.size());
      CHECK(spectrum_distance(kappa, eig) < 1e-8);

      const std::vector<Complex> b = boundary_symbols_zdz(scheme, z, {});
      const std::vector<Complex> kappa_m = poly_roots(Poly(b));
      std::vector<Complex> eig_m(pair.M_split.eigenvalues.data(),
                                 pair.M_split.eigenvalues.data() +
                                     pair.M_split.eigenvalues.size());
      CHECK(spectrum_distance(kappa_m, eig_m) < 1e-8);
    }
  }
}

TEST_CASE("spectral projectors are consistent") {
  for (const char* file : {"leapfrog.scm", "ab3_centered.scm"}) {
    const SchemeDef scheme = load(file);
    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Complex z = std::polar(1.0 + 1.5 * unit(gen), 2.0 * M_PI * unit(gen));
      const CompanionPair pair = companions(scheme, z, {});
      CHECK(pair.M_split.projector_residual <= 1e-10);
      CHECK(std::isfinite(pair.M_split.eigenvector_cond));
      const Complex tr = pair.M_split.proj_stable.trace();
      CHECK(std::abs(tr - Complex(pair.M_split.n_stable, 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("third-order scheme dissipation companion at z = 1 is exact") {
  const SchemeDef scheme = load("ab3_centered.scm");
  const CompanionPair pair = companions(scheme, Complex(1.0, 0.0), {});
  // z d/dz coefficients at z = 1: leading 0.375, middle 1, trailing -0.375,
  // so the spectrum solves mu^2 + (8/3) mu - 1 = 0 with roots 1/3 and -3.
  std::vector<Complex> eig(pair.M_split.eigenvalues.data(),
                           pair.M_split.eigenvalues.data() + 2);
  CHECK(spectrum_distance({Complex(1.0 / 3.0, 0.0), Complex(-3.0, 0.0)}, eig) <
        1e-10);
  CHECK(pair.M_split.margin == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("powers of the dissipation companion decay on the stable subspace") {
  const SchemeDef scheme = load("leapfrog.scm");
  for (const Complex z : {Complex(1.0, 0.0), Complex(0.0, 1.2), Complex(-1.4, 0.3)}) {
    const CompanionPair pair = companions(scheme, z, {});
    Eigen::MatrixXcd cur = pair.M_split.proj_stable;
    std::vector<double> norms;
    for (int n = 1; n <= 50; ++n) {
      // Re-projecting after each application prunes the rounding-induced
      // component along the expanding eigenvector, which would otherwise
      // overtake the decaying signal near n = 18.
      cur = pair.M_split.proj_stable * (pair.M_mat * cur);
      norms.push_back(cur.norm());
    }
    const double rate =
        std::exp((std::log(norms[39]) - std::log(norms[9])) / 30.0);
    CHECK(rate < 1.0);
    CHECK(norms.back() < 1e-12);

    // The fitted rate is the stable eigenvalue modulus.
    double mu_s = 2.0;
    for (int i = 0; i < pair.M_split.eigenvalues.size(); ++i) {
      mu_s = std::min(mu_s, std::abs(pair.M_split.eigenvalues(i)));
    }
    CHECK(rate == doctest::Approx(mu_s).epsilon(1e-8));
  }
}

TEST_CASE("derivative roots stay inside the root hull") {
  // Quadratic edge symbol: the derivative root is the midpoint of the roots.
  const SchemeDef scheme = load("ab3_centered.scm");
  const Poly a1 = scheme.edge_symbol(1, {});
  const std::vector<Complex> roots = poly_roots(a1);
  REQUIRE(roots.size() == 2);
  const std::vector<Complex> droots = poly_roots(a1.derivative());
  REQUIRE(droots.size() == 1);
  CHECK(std::abs(droots[0] - 0.5 * (roots[0] + roots[1])) < 1e-12);
  CHECK(std::abs(droots[0] - 0.2 / 0.575) < 1e-12);
  for (const Complex& r : roots) {
    CHECK(std::abs(r) < 1.0 - 1e-6);
  }

  // Random polynomials with roots in the unit disk: every derivative root
  // stays within the largest root modulus.
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> rts;
    const int deg = 2 + static_cast<int>(unit(gen) * 4.0);
    double max_mod = 0.0;
    for (int k = 0; k < deg; ++k) {
      rts.push_back(std::polar(unit(gen), 2.0 * M_PI * unit(gen)));
      max_mod = std::max(max_mod, std::abs(rts.back()));
    }
    const Poly p = Poly::from_roots(Complex(1.0, 0.0), rts);
    for (const Complex& d : poly_roots(p.derivative())) {
      CHECK(std::abs(d) <= max_mod + 1e-8);
    }
  }
}

TEST_CASE("vanishing extreme symbol is rejected") {
  const SchemeDef scheme = trapezoidal();
  // a_{+1}(z) = -(z + 1)/4 vanishes at z = -1 on the unit circle.
  CHECK_NOTHROW(companions(scheme, Complex(1.0, 0.0), {}));
  CHECK_THROWS_AS(companions(scheme, Complex(-1.0, 0.0), {}), Error);
  try {
    companions(scheme, Complex(-1.0, 0.0), {});
  } catch (const Error& err) {
    CHECK(err.code() == Errc::edge_symbol_vanishes);
  }

  // One-step upwinded transport has extreme symbols constant in z, so the
  // derivative-side companion never exists and every probe degenerates.
  const SchemeDef lxf = load("lax_friedrichs.scm");
  CHECK_THROWS_AS(companions(lxf, Complex(2.0, 0.0), {}), Error);
  const std::vector<Complex> a = boundary_symbols(lxf, Complex(2.0, 0.0), {});
  CHECK(poly_roots(Poly(a)).size() == 2);
  const MarginScan scan = central_margin_scan(lxf, 50, std::exp(1.0), 3);
  CHECK_FALSE(scan.pass);
  CHECK(scan.min_margin == 0.0);
}

TEST_CASE("margin scan clears the conservative schemes") {
  double margin_fast = 0.0;
  double margin_slow = 0.0;
  for (const char* file : {"leapfrog.scm", "leapfrog_half.scm", "ab3_centered.scm"}) {
    const SchemeDef scheme = load(file);
    const MarginScan scan = central_margin_scan(scheme, 1000, std::exp(1.0), 97);
    CHECK(scan.pass);
    CHECK(scan.min_margin > 1e-3);
    CHECK(scan.samples > 1000);
    if (std::string(file) == "leapfrog.scm") {
      margin_fast = scan.min_margin;
    } else if (std::string(file) == "leapfrog_half.scm") {
      margin_slow = scan.min_margin;
    }
  }
  CHECK(margin_fast > 0.3);
  // Halving the advection number pushes the spectrum further from the circle.
  CHECK(margin_slow > margin_fast);
}

TEST_CASE("margin scan flags a double root pinned to the circle") {
  const SchemeDef scheme = load("circle_pair.scm");
  const MarginScan scan = central_margin_scan(scheme, 200, std::exp(1.0), 97);
  CHECK_FALSE(scan.pass);
  CHECK(scan.min_margin < 1e-5);
  CHECK(std::abs(std::abs(scan.worst_z) - 1.0) < 1e-9);
}

TEST_CASE("trace ratio of a boundary spike matches the closed form") {
  const SchemeDef scheme = load("leapfrog.scm");
  const Complex z(2.0, 0.0);
  const TraceSample sample = trace_ratio(scheme, z, {}, {Complex(1.0, 0.0)}, 0, 5);
  // Numerator 1; denominator sums |a_l|^2 over all offsets plus
  // |z a_l'|^2 over offsets >= 0, with a = (1.6, 3, -1.6), z a' = (1.6, 8, -1.6).
  const double rhs = (1.6 * 1.6 + 9.0 + 1.6 * 1.6) + (64.0 + 1.6 * 1.6);
  CHECK(sample.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sample.rhs == doctest::Approx(rhs).epsilon(1e-13));
  CHECK(sample.ratio == doctest::Approx(1.0 / rhs).epsilon(1e-13));
  CHECK_FALSE(sample.counterexample);
}

TEST_CASE("trace ratio windowing") {
  const SchemeDef scheme = load("leapfrog.scm");
  const Complex z(1.5, 0.5);
  const std::vector<Complex> spike = {Complex(1.0, 0.0)};

  // A spike just inside each end of the window [-r1-p1, p1_cut] counts;
  // one cell further out it does not, and the ratio collapses to zero.
  CHECK(trace_ratio(scheme, z, {}, spike, -2, 5).lhs == doctest::Approx(1.0));
  CHECK(trace_ratio(scheme, z, {}, spike, -3, 5).lhs == 0.0);
  CHECK(trace_ratio(scheme, z, {}, spike, -3, 5).ratio == 0.0);
  CHECK(trace_ratio(scheme, z, {}, spike, 5, 5).lhs == doctest::Approx(1.0));
  CHECK(trace_ratio(scheme, z, {}, spike, 6, 5).ratio == 0.0);
  CHECK_FALSE(trace_ratio(scheme, z, {}, spike, 6, 5).counterexample);

  // The denominator still sees mass that the window misses.
  CHECK(trace_ratio(scheme, z, {}, spike, -3, 5).rhs > 0.0);
}

TEST_CASE("trace scan is finite, nested, and counterexample-free") {
  const SchemeDef scheme = load("leapfrog.scm");
  const TraceScan small = trace_scan(scheme, 1000, 5, std::exp(1.0), 7);
  const TraceScan big = trace_scan(scheme, 2000, 5, std::exp(1.0), 7);
  CHECK(small.counterexamples == 0);
  CHECK(big.counterexamples == 0);
  CHECK(std::isfinite(small.max_ratio));
  CHECK(small.max_ratio > 0.0);
  // Same seed: the longer run extends the shorter one, so its max dominates.
  CHECK(big.max_ratio >= small.max_ratio);
  CHECK(big.max_ratio <= 2.0 * small.max_ratio);
}

TEST_CASE("serial and parallel scans agree bitwise") {
  const SchemeDef scheme = load("ab3_centered.scm");
  const MarginScan m_ser = central_margin_scan(scheme, 300, std::exp(1.0), 5, 1e-3, 8, Exec::serial);
  const MarginScan m_par = central_margin_scan(scheme, 300, std::exp(1.0), 5, 1e-3, 8, Exec::parallel);
  CHECK(m_ser.min_margin == m_par.min_margin);
  CHECK(m_ser.worst_z == m_par.worst_z);
  CHECK(m_ser.samples == m_par.samples);

  const TraceScan t_ser = trace_scan(scheme, 500, 5, std::exp(1.0), 5, Exec::serial);
  const TraceScan t_par = trace_scan(scheme, 500, 5, std::exp(1.0), 5, Exec::parallel);
  CHECK(t_ser.max_ratio == t_par.max_ratio);
  CHECK(t_ser.worst_z == t_par.worst_z);
  CHECK(t_ser.counterexamples == t_par.counterexamples);
}

TEST_CASE("scan argument validation") {
  const SchemeDef scheme = load("leapfrog.scm");
  CHECK_THROWS_AS(central_margin_scan(scheme, 0, std::exp(1.0), 1), Error);
  CHECK_THROWS_AS(central_margin_scan(scheme, 10, 0.9, 1), Error);
  CHECK_THROWS_AS(trace_scan(scheme, 10, -1, std::exp(1.0), 1), Error);
  CHECK_THROWS_AS(trace_ratio(scheme, Complex(2.0, 0.0), {}, {}, 0, 5), Error);
}
