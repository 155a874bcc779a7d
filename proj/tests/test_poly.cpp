#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdstab/errors.hpp"
#include "fdstab/poly.hpp"

using namespace fdstab;

namespace {

Poly real_poly(std::initializer_list<double> coeffs_low_first) {
  std::vector<Complex> c;
  for (double x : coeffs_low_first) c.emplace_back(x, 0.0);
  return Poly(std::move(c));
}

double coeff_distance(const Poly& a, const Poly& b) {
  double d = 0;
  const int n = std::max(a.degree(), b.degree());
  for (int i = 0; i <= n; ++i) d = std::max(d, std::abs(a.coeff(i) - b.coeff(i)));
  return d;
}

}  // namespace

TEST_CASE("roots of X^2 - 1 cluster into two simple groups, modulus-then-arg order") {
  const auto groups = roots_clustered(real_poly({-1, 0, 1}), 1e-6);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].multiplicity == 1);
  CHECK(groups[1].multiplicity == 1);
  CHECK(std::abs(groups[0].value - Complex(1)) < 1e-10);
  CHECK(std::abs(groups[1].value - Complex(-1)) < 1e-10);
}

TEST_CASE("double root of X^2 - X + 1/4 collapses to one group at 1/2") {
  const auto groups = roots_clustered(real_poly({0.25, -1, 1}), 1e-6);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].multiplicity == 2);
  CHECK(std::abs(groups[0].value - Complex(0.5)) < 1e-7);
}

TEST_CASE("X^3 - X^2 groups as a double root at 0 plus a simple root at 1") {
  const auto groups = roots_clustered(real_poly({0, 0, -1, 1}), 1e-6);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].multiplicity == 2);
  CHECK(std::abs(groups[0].value) < 1e-7);
  CHECK(groups[1].multiplicity == 1);
  CHECK(std::abs(groups[1].value - Complex(1)) < 1e-9);
}

TEST_CASE("zero polynomial is rejected") {
  CHECK_THROWS_AS(roots_clustered(real_poly({0, 0}), 1e-6), Error);
}

TEST_CASE("linkage chains wider than 10x the radius raise ClusterAmbiguity") {
  const double r = 0.05;
  std::vector<Complex> roots;
  for (int k = 0; k <= 12; ++k) roots.emplace_back(k * 0.9 * r, 0.0);
  bool caught = false;
  try {
    roots_clustered(Poly::from_roots(Complex(1), roots), r);
  } catch (const Error& e) {
    caught = e.code() == Errc::cluster_ambiguity;
  }
  CHECK(caught);
}

TEST_CASE("random root configurations are recovered with matching multiplicities") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    // partition a degree <= 8 into multiplicities (each capped at 4) and plant
    // the groups well apart so clustering is unambiguous
    const int degree = 1 + int(unit(rng) * 8.0);
    std::vector<int> mult;
    int left = degree;
    while (left > 0) {
      int m = 1 + int(unit(rng) * std::min(4, left));
      m = std::min(m, left);
      mult.push_back(m);
      left -= m;
    }
    std::vector<Complex> values;
    for (size_t g = 0; g < mult.size(); ++g) {
      for (int attempt = 0;; ++attempt) {
        REQUIRE(attempt < 200);
        const double rad = 0.1 + 0.85 * unit(rng);
        const double ang = 2.0 * M_PI * unit(rng);
        const Complex z = std::polar(rad, ang);
        bool far = true;
        for (Complex other : values)
          if (std::abs(z - other) < 0.35) far = false;
        if (far) {
          values.push_back(z);
          break;
        }
      }
    }
    std::vector<Complex> all;
    for (size_t g = 0; g < mult.size(); ++g) all.insert(all.end(), mult[g], values[g]);
    const Complex lead = std::polar(0.5 + 1.5 * unit(rng), 2.0 * M_PI * unit(rng));
    const Poly p = Poly::from_roots(lead, all);

    const auto groups = roots_clustered(p, 0.02);
    REQUIRE(groups.size() == mult.size());
    for (const RootGroup& g : groups) {
      bool matched = false;
      for (size_t j = 0; j < values.size(); ++j)
        if (std::abs(g.value - values[j]) < 1e-8 && g.multiplicity == mult[j]) matched = true;
      CHECK(matched);
    }
  }
}

TEST_CASE("lagrange system of X^3 - X^2/2 matches the hand expansion") {
  const Poly p = real_poly({0, 0, -0.5, 1});
  const std::vector<RootGroup> groups{{Complex(0), 2}, {Complex(0.5), 1}};
  const LagrangeSystem sys = lagrange_and_aux(p, groups);

  REQUIRE(sys.principal.size() == 2);
  CHECK(coeff_distance(sys.principal[0], real_poly({0, -0.5, 1})) < 1e-14);  // X(X - 1/2)
  CHECK(coeff_distance(sys.principal[1], real_poly({0, 0, 1})) < 1e-14);     // X^2
  REQUIRE(sys.aux[0].size() == 1);
  CHECK(coeff_distance(sys.aux[0][0], real_poly({-0.5, 1})) < 1e-14);        // X - 1/2
  CHECK(sys.aux[1].empty());
}

TEST_CASE("P' equals the multiplicity-weighted sum of the principal polynomials") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int ngroups = 1 + int(unit(rng) * 3.0);
    std::vector<RootGroup> groups;
    std::vector<Complex> all;
    for (int g = 0; g < ngroups; ++g) {
      const Complex z = std::polar(0.9 * unit(rng), 2.0 * M_PI * unit(rng));
      const int mu = 1 + int(unit(rng) * 2.0);
      groups.push_back({z, mu});
      all.insert(all.end(), mu, z);
    }
    const Complex lead = std::polar(0.5 + unit(rng), 2.0 * M_PI * unit(rng));
    const Poly p = Poly::from_roots(lead, all);
    const LagrangeSystem sys = lagrange_and_aux(p, groups);

    Poly sum = Poly::constant(Complex(0));
    for (size_t k = 0; k < groups.size(); ++k)
      sum = sum + sys.principal[k] * Complex(double(groups[k].multiplicity));
    double scale = 0;
    for (Complex c : p.derivative().coeffs()) scale = std::max(scale, std::abs(c));
    CHECK(coeff_distance(p.derivative(), sum) < 1e-10 * (1.0 + scale));
  }
}

TEST_CASE("pair expansion coefficient is the root difference") {
  const std::vector<RootGroup> pair{{Complex(0.3, 0.1), 1}, {Complex(-0.2, 0.4), 1}};
  const auto a = hermite_expand(pair, 0);
  REQUIRE(a.size() == 1);
  CHECK(std::abs(a[0] - (pair[1].value - pair[0].value)) < 1e-14);
}

TEST_CASE("expansion coefficients vanish when the cluster coalesces") {
  const std::vector<RootGroup> merged{{Complex(0.25, -0.3), 2}};
  for (Complex a : hermite_expand(merged, 0)) CHECK(std::abs(a) < 1e-15);
}

TEST_CASE("random nearby triples expand consistently and shrink with the diameter") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex center = std::polar(0.8 * unit(rng), 2.0 * M_PI * unit(rng));
    const double spread = 0.001 + 0.099 * unit(rng);
    std::vector<RootGroup> groups;
    for (int i = 0; i < 3; ++i) {
      const Complex dz = std::polar(spread * unit(rng), 2.0 * M_PI * unit(rng));
      groups.push_back({center + dz, 1});
    }
    double diam = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        diam = std::max(diam, std::abs(groups[i].value - groups[j].value));

    for (int k = 0; k < 3; ++k) {
      const auto a = hermite_expand(groups, k);
      REQUIRE(a.size() == 2);
      // rebuild both sides: (X - z_k)^2 vs prod_{j != k}(X - z_j) + a1 + a2 (X - z_k)
      const Complex zk = groups[k].value;
      const Poly lhs = Poly::from_roots(Complex(1), {zk, zk});
      std::vector<Complex> others;
      for (int j = 0; j < 3; ++j)
        if (j != k) others.push_back(groups[j].value);
      const Poly rhs =
          Poly::from_roots(Complex(1), others) + Poly::constant(a[0]) + Poly::from_roots(a[1], {zk});
      CHECK(coeff_distance(lhs, rhs) < 1e-12);
      for (Complex c : a) CHECK(std::abs(c) <= 4.0 * diam + 1e-12);
    }
  }
}
