#include "fdstab/cauchy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fdstab/errors.hpp"

namespace fdstab {

double TorusState::sup_norm() const {
  double m = 0.0;
  for (const Eigen::VectorXcd& u : levels)
    for (int j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u(j)));
  return m;
}

CauchyEngine::CauchyEngine(const SchemeDef& scheme, int grid_n, const FormTableOptions& opt,
                           Exec exec)
    : scheme_(scheme),
      grid_{scheme.dim, {grid_n, scheme.dim == 2 ? grid_n : 1}},
      options_(opt),
      exec_(exec),
      table_(build_form_table(scheme, grid_n, opt, exec)) {
  const int total = grid_.size();
  symbols_.resize(scheme_.s + 2);
  for (int sigma = 0; sigma <= scheme_.s + 1; ++sigma) {
    symbols_[sigma].resize(total);
    for (int idx = 0; idx < total; ++idx)
      symbols_[sigma](idx) = scheme_.symbol(sigma, grid_.theta(idx));
  }
  for (int idx = 0; idx < total; ++idx)
    if (std::abs(symbols_[scheme_.s + 1](idx)) <= 1e-12)
      raise(Errc::characteristic_symbol, "leading symbol vanishes on the lattice");

  explicit_ = scheme_.is_explicit();
  lead_ = scheme_.leading_coefficient();

  buf_in_ = fftw_malloc(sizeof(fftw_complex) * total);
  buf_out_ = fftw_malloc(sizeof(fftw_complex) * total);
  auto* in = static_cast<fftw_complex*>(buf_in_);
  auto* out = static_cast<fftw_complex*>(buf_out_);
  if (grid_.dim == 1) {
    plan_fwd_ = fftw_plan_dft_1d(grid_.n[0], in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_1d(grid_.n[0], in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    plan_fwd_ = fftw_plan_dft_2d(grid_.n[0], grid_.n[1], in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_2d(grid_.n[0], grid_.n[1], in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

CauchyEngine::~CauchyEngine() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(buf_in_);
  fftw_free(buf_out_);
}

void CauchyEngine::dft(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, int sign) const {
  const int total = grid_.size();
  if (in.size() != total) raise(Errc::length_mismatch, "grid function has the wrong size");
  auto* bi = static_cast<fftw_complex*>(buf_in_);
  auto* bo = static_cast<fftw_complex*>(buf_out_);
  for (int j = 0; j < total; ++j) {
    bi[j][0] = in(j).real();
    bi[j][1] = in(j).imag();
  }
  fftw_execute(static_cast<fftw_plan>(sign == FFTW_FORWARD ? plan_fwd_ : plan_inv_));
  out.resize(total);
  for (int j = 0; j < total; ++j) out(j) = Complex(bo[j][0], bo[j][1]);
}

TorusState CauchyEngine::random_state(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TorusState st;
  st.grid = grid_;
  st.levels.resize(scheme_.s + 1);
  for (Eigen::VectorXcd& u : st.levels) {
    u.resize(grid_.size());
    for (int j = 0; j < u.size(); ++j) u(j) = Complex(unit(rng), unit(rng));
  }
  return st;
}

Eigen::VectorXcd CauchyEngine::apply_operator(int sigma, const Eigen::VectorXcd& u) const {
  const int total = grid_.size();
  if (u.size() != total) raise(Errc::length_mismatch, "grid function has the wrong size");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total);
  const bool par = exec_ == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int idx = 0; idx < total; ++idx) {
    const auto c = grid_.coords(idx);
    Complex acc(0);
    for (const InteriorCoeff& e : scheme_.interior) {
      if (e.sigma != sigma) continue;
      std::array<int, 2> shifted = c;
      shifted[0] += e.offset[0];
      if (scheme_.dim == 2) shifted[1] += e.offset[1];
      acc += e.value * u(grid_.index(shifted));
    }
    out(idx) = acc;
  }
  return out;
}

Eigen::VectorXcd CauchyEngine::scheme_residual(
    const std::vector<Eigen::VectorXcd>& window) const {
  if (static_cast<int>(window.size()) != scheme_.s + 2)
    raise(Errc::wrong_time_levels, "scheme residual needs s+2 levels");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(grid_.size());
  for (int sigma = 0; sigma <= scheme_.s + 1; ++sigma)
    acc += apply_operator(sigma, window[sigma]);
  return acc;
}

Eigen::VectorXcd CauchyEngine::apply_derivative_operator(
    const std::vector<Eigen::VectorXcd>& window) const {
  if (static_cast<int>(window.size()) != scheme_.s + 1)
    raise(Errc::wrong_time_levels, "derivative operator needs s+1 levels");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(grid_.size());
  for (int sigma = 0; sigma <= scheme_.s; ++sigma)
    acc += double(sigma + 1) * apply_operator(sigma + 1, window[sigma]);
  return acc;
}

double CauchyEngine::advance(TorusState& state) const {
  if (static_cast<int>(state.levels.size()) != scheme_.s + 1)
    raise(Errc::wrong_time_levels, "state window must hold s+1 levels");
  const int total = grid_.size();

  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(total);
  for (int sigma = 0; sigma <= scheme_.s; ++sigma)
    acc += apply_operator(sigma, state.levels[sigma]);

  Eigen::VectorXcd next(total);
  if (explicit_) {
    next = -acc / lead_;
  } else {
    Eigen::VectorXcd acc_hat, next_hat(total);
    dft(acc, acc_hat, FFTW_FORWARD);
    for (int idx = 0; idx < total; ++idx)
      next_hat(idx) = -acc_hat(idx) / symbols_[scheme_.s + 1](idx);
    dft(next_hat, next, FFTW_BACKWARD);
    next /= double(total);
  }

  std::vector<Eigen::VectorXcd> window = state.levels;
  window.push_back(next);
  const Eigen::VectorXcd res = scheme_residual(window);
  double res_max = 0.0, scale = 0.0;
  for (int j = 0; j < total; ++j) {
    res_max = std::max(res_max, std::abs(res(j)));
    scale = std::max(scale, std::abs(next(j)));
  }

  state.levels.erase(state.levels.begin());
  state.levels.push_back(std::move(next));
  state.n0 += 1;
  return res_max / (1.0 + scale);
}

CauchyEngine::Measure CauchyEngine::measure(const TorusState& state) const {
  if (static_cast<int>(state.levels.size()) != scheme_.s + 1)
    raise(Errc::wrong_time_levels, "state window must hold s+1 levels");
  const int total = grid_.size();
  const int nu = scheme_.s + 1;

  std::vector<Eigen::VectorXcd> hats(nu);
  for (int i = 0; i < nu; ++i) dft(state.levels[i], hats[i], FFTW_FORWARD);

  std::vector<double> e(total), d(total);
  const bool par = exec_ == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXcd w(nu);
    for (int i = 0; i < nu; ++i) w(i) = hats[i](idx);
    e[idx] = table_.forms[idx].eval_qe(w);
    d[idx] = table_.forms[idx].eval_qd(w);
  }

  // 1/total from Parseval and another 1/total to report mean squares
  const double weight = 1.0 / (double(total) * double(total));
  Measure m;
  for (int idx = 0; idx < total; ++idx) {
    m.energy += e[idx] * weight;
    m.dissipation += d[idx] * weight;
  }
  return m;
}

CauchyEngine::LocalDensities CauchyEngine::local_densities(const TorusState& state) const {
  if (scheme_.s != 1)
    raise(Errc::config_error, "local densities are defined for two-level windows only");
  if (static_cast<int>(state.levels.size()) != 2)
    raise(Errc::wrong_time_levels, "state window must hold s+1 levels");
  const int total = grid_.size();

  const Eigen::VectorXcd q2u0 = apply_operator(2, state.levels[0]);
  const Eigen::VectorXcd q1u0 = apply_operator(1, state.levels[0]);
  const Eigen::VectorXcd q0u0 = apply_operator(0, state.levels[0]);
  const Eigen::VectorXcd q2u1 = apply_operator(2, state.levels[1]);
  const Eigen::VectorXcd q1u1 = apply_operator(1, state.levels[1]);
  const Eigen::VectorXcd q0u1 = apply_operator(0, state.levels[1]);

  LocalDensities out;
  out.energy.resize(total);
  out.dissipation.resize(total);
  const double weight = 1.0 / double(total);
  for (int j = 0; j < total; ++j) {
    const double e = 2.0 * std::norm(q2u1(j)) +
                     2.0 * std::real(std::conj(q2u1(j)) * q1u0(j)) + std::norm(q2u0(j)) +
                     std::norm(q0u0(j));
    const double d = std::norm(q2u0(j)) - std::norm(q0u0(j)) + std::norm(q2u1(j)) -
                     std::norm(q0u1(j)) + 2.0 * std::real(std::conj(q2u1(j)) * q1u0(j)) -
                     2.0 * std::real(std::conj(q1u1(j)) * q0u0(j));
    out.energy[j] = e * weight;
    out.dissipation[j] = d * weight;
  }
  return out;
}

CauchyRun run_cauchy(const SchemeDef& scheme, int grid_n, int steps, std::uint64_t seed,
                     const FormTableOptions& opt, Exec exec) {
  if (steps < 1) raise(Errc::empty_run, "step count must be positive");
  const CauchyEngine engine(scheme, grid_n, opt, exec);
  TorusState state = engine.random_state(seed);

  CauchyRun run;
  run.rows.reserve(steps + 1);
  CauchyEngine::Measure m = engine.measure(state);
  run.energy0 = m.energy;
  run.rows.push_back({0, m.energy, m.dissipation, state.sup_norm(), 0.0});

  for (int n = 1; n <= steps; ++n) {
    const double prev_e = m.energy;
    const double prev_d = m.dissipation;
    const double res = engine.advance(state);
    m = engine.measure(state);
    run.rows.push_back({n, m.energy, m.dissipation, state.sup_norm(), res});

    run.residual_max = std::max(run.residual_max, res);
    run.drift_max = std::max(run.drift_max, std::abs(m.energy - run.energy0));
    run.growth_max = std::max(run.growth_max, m.energy - prev_e);
    run.balance_max = std::max(
        run.balance_max, std::abs(m.energy - prev_e + prev_d) / (1.0 + run.energy0));
  }
  return run;
}

}  // namespace fdstab
