#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fdstab/cauchy.hpp"
#include "fdstab/errors.hpp"
#include "fdstab/ibvp.hpp"

using namespace fdstab;

namespace {

const std::string kSchemeDir = FDSTAB_SCHEME_DIR;

SchemeDef load_scheme(const std::string& stem) {
  return SchemeDef::load(kSchemeDir + "/" + stem + ".scm");
}

SchemeDef trapezoidal() {
  return SchemeDef::parse(
      "name trapezoidal\ndim 1\ns 0\nr 1\np 1\nlambda 1.0\n"
      "interior\n"
      "1  0  1.0\n1  1 -0.25\n1 -1  0.25\n"
      "0  0 -1.0\n0  1 -0.25\n0 -1  0.25\n"
      "end\nboundary\nend\n",
      "trapezoidal");
}

double max_abs(const Eigen::VectorXcd& u) {
  double m = 0.0;
  for (int i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u(i)));
  return m;
}

}  // namespace

TEST_CASE("interior evolution matches the periodic stepper away from edges") {
  const SchemeDef lf = load_scheme("leapfrog_dirichlet");
  const int J = 128, steps = 20;
  const IbvpEngine engine(lf, J, 1.0 / J);

  // bump supported well inside; ghost cell and tails zero
  IbvpData data;
  data.f.assign(2, Eigen::VectorXcd::Zero(J + 1));
  for (int sigma = 0; sigma < 2; ++sigma)
    for (int j = 40; j <= 60; ++j)
      data.f[sigma](j - 0) = std::exp(-0.05 * (j - 50) * (j - 50)) * Complex(1.0, 0.3);
  data.forcing.assign(steps, Eigen::VectorXcd::Zero(J));
  data.boundary.assign(steps, Eigen::VectorXcd::Zero(1));

  const HalfSpaceRun run = engine.run_direct(data);

  const CauchyEngine torus(lf, J);
  TorusState st;
  st.grid = torus.grid();
  st.levels.assign(2, Eigen::VectorXcd::Zero(J));
  for (int sigma = 0; sigma < 2; ++sigma)
    for (int j = 1; j <= J; ++j) st.levels[sigma](j - 1) = data.f[sigma](j);
  for (int k = 0; k < steps; ++k) torus.advance(st);

  // influence cones from the boundary and the truncation edge stay outside
  // [20, 80] for 20 steps of a unit-width stencil
  for (int j = 20; j <= 80; ++j)
    CHECK(std::abs(run.history.back()(j) - st.levels.back()(j - 1)) < 1e-12);
}

TEST_CASE("doubling the domain does not change the interior") {
  const SchemeDef lf = load_scheme("leapfrog");
  const int steps = 20;
  const IbvpEngine small(lf, 128, 1.0 / 128);
  const IbvpEngine big(lf, 256, 1.0 / 128);

  IbvpData data = small.smooth_data(steps, true, true, true);
  IbvpData data_big = big.smooth_data(steps, true, true, true);
  const HalfSpaceRun a = small.run_direct(data);
  const HalfSpaceRun b = big.run_direct(data_big);
  for (size_t n = 0; n < a.history.size(); ++n)
    for (int i = 0; i < a.history[n].size(); ++i)
      CHECK(std::abs(a.history[n](i) - b.history[n](i)) < 1e-10);
}

TEST_CASE("doubling the auxiliary buffer does not change the physical region") {
  const SchemeDef lf = load_scheme("leapfrog");
  const IbvpEngine engine(lf, 96, 1.0 / 96);
  const IbvpData data = engine.smooth_data(30, true, true, false);
  const HalfSpaceRun a = engine.run_aux(data, 20);
  const HalfSpaceRun b = engine.run_aux(data, 40);
  for (size_t n = 0; n < a.history.size(); ++n)
    for (int j = 0; j <= 96; ++j)
      CHECK(std::abs(a.history[n](j - a.j_min) - b.history[n](j - b.j_min)) < 1e-10);
}

TEST_CASE("runs are linear in the data") {
  const SchemeDef lf = load_scheme("leapfrog");
  const IbvpEngine engine(lf, 64, 1.0 / 64);
  const IbvpData d1 = engine.smooth_data(25, true, false, true);
  const IbvpData d2 = engine.smooth_data(25, false, true, false);
  IbvpData sum = d1;
  for (size_t i = 0; i < sum.f.size(); ++i) sum.f[i] = 2.0 * d1.f[i] + d2.f[i];
  for (size_t i = 0; i < sum.forcing.size(); ++i)
    sum.forcing[i] = 2.0 * d1.forcing[i] + d2.forcing[i];
  for (size_t i = 0; i < sum.boundary.size(); ++i)
    sum.boundary[i] = 2.0 * d1.boundary[i] + d2.boundary[i];

  const HalfSpaceRun r1 = engine.run_direct(d1);
  const HalfSpaceRun r2 = engine.run_direct(d2);
  const HalfSpaceRun rs = engine.run_direct(sum);
  for (size_t n = 0; n < rs.history.size(); ++n) {
    const Eigen::VectorXcd want = 2.0 * r1.history[n] + r2.history[n];
    CHECK(max_abs(rs.history[n] - want) < 1e-12);
  }
}

TEST_CASE("superposition reproduces the direct run") {
  const SchemeDef lf = load_scheme("leapfrog");
  const IbvpEngine engine(lf, 64, 1.0 / 64);
  const IbvpData data = engine.smooth_data(40, true, true, true);
  const IbvpEngine::Superposition sp = engine.superpose(data, 20);
  CHECK(sp.max_diff < 1e-10);
  // the corrected problem really moved the data to the boundary terms
  CHECK(sp.aux.history.back().size() > sp.bvp.history.back().size());
}

TEST_CASE("superposition holds on the implicit path") {
  const SchemeDef tz = trapezoidal();
  const IbvpEngine engine(tz, 48, 1.0 / 48);
  const IbvpData data = engine.smooth_data(30, true, true, true);
  const IbvpEngine::Superposition sp = engine.superpose(data, 16);
  CHECK(sp.max_diff < 1e-10);
}

TEST_CASE("estimate ratios are finite and vanish on zero data") {
  const SchemeDef lf = load_scheme("leapfrog");
  const IbvpEngine engine(lf, 64, 1.0 / 64);

  const IbvpData driven = engine.smooth_data(40, false, true, true);
  const HalfSpaceRun run = engine.run_direct(driven);
  const EstimateReport rep = engine.measure_estimates(run, driven, 1.0);
  CHECK(rep.strong_ratio > 0.0);
  CHECK(rep.strong_ratio < 1e6);
  CHECK(rep.semigroup_ratio > 0.0);

  IbvpData zero = engine.smooth_data(10, false, false, false);
  const HalfSpaceRun zrun = engine.run_direct(zero);
  const EstimateReport zrep = engine.measure_estimates(zrun, zero, 1.0);
  CHECK(zrep.strong_ratio == 0.0);
  CHECK(zrep.semigroup_ratio == 0.0);
  CHECK(zrep.sup_weighted == 0.0);
}

TEST_CASE("truncation breach is detected") {
  const SchemeDef lf = load_scheme("leapfrog");
  const int J = 32;
  const IbvpEngine engine(lf, J, 1.0 / J);
  IbvpData data;
  data.f.assign(2, Eigen::VectorXcd::Zero(J + 1));
  data.f[0](J - 1) = 1.0;  // sits in the closure zone immediately
  data.f[1](J - 1) = 1.0;
  data.forcing.assign(5, Eigen::VectorXcd::Zero(J));
  data.boundary.assign(5, Eigen::VectorXcd::Zero(1));
  CHECK_THROWS_AS(engine.run_direct(data, true), Error);
  try {
    engine.run_direct(data, true);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::truncation_breach);
  }
  // without enforcement the run records the activity instead
  const HalfSpaceRun run = engine.run_direct(data, false);
  CHECK(run.truncation_activity > 0.5);
}

TEST_CASE("serial and parallel runs agree bitwise") {
  const SchemeDef ab3 = load_scheme("ab3_centered");
  const IbvpEngine se(ab3, 64, 1.0 / 64, Exec::serial);
  const IbvpEngine pa(ab3, 64, 1.0 / 64, Exec::parallel);
  const IbvpData data = se.smooth_data(30, true, true, true);
  const HalfSpaceRun a = se.run_direct(data);
  const HalfSpaceRun b = pa.run_direct(data);
  for (size_t n = 0; n < a.history.size(); ++n)
    CHECK(max_abs(a.history[n] - b.history[n]) == 0.0);
}

TEST_CASE("data shape errors are rejected") {
  const SchemeDef lf = load_scheme("leapfrog");
  const IbvpEngine engine(lf, 32, 1.0 / 32);
  IbvpData data = engine.smooth_data(5, true, false, false);
  data.f.pop_back();
  CHECK_THROWS_AS(engine.run_direct(data), Error);
  IbvpData empty;
  empty.f.assign(2, Eigen::VectorXcd::Zero(33));
  CHECK_THROWS_AS(engine.run_direct(empty), Error);
  CHECK_THROWS_AS(IbvpEngine(lf, 2, 0.1), Error);
  CHECK_THROWS_AS(IbvpEngine(lf, 32, -0.1), Error);
}
