#include "fdstab/ibvp.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "fdstab/errors.hpp"

namespace fdstab {

namespace {

Complex at(const Eigen::VectorXcd& u, int j_min, int j) {
  const int i = j - j_min;
  return (i < 0 || i >= u.size()) ? Complex(0) : u(i);
}

double sq(double x) { return x * x; }

}  // namespace

IbvpEngine::IbvpEngine(const SchemeDef& scheme, int J, double dt, Exec exec)
    : scheme_(scheme), J_(J), dt_(dt), exec_(exec) {
  if (scheme_.dim != 1) raise(Errc::config_error, "half-space runs are one dimensional");
  if (!(dt > 0.0)) raise(Errc::config_error, "dt must be positive");
  dx_ = dt / scheme_.lambda[0];
  const int need = std::max({1 + scheme_.q1, 1 + scheme_.p[0], scheme_.r[0] + 2});
  if (J < need) raise(Errc::config_error, "domain too short for the stencil widths");
}

Eigen::VectorXcd IbvpEngine::interior_rows(const std::vector<Eigen::VectorXcd>& window,
                                           int j_min, const Eigen::VectorXcd& forcing) const {
  if (static_cast<int>(window.size()) != scheme_.s + 2)
    raise(Errc::wrong_time_levels, "row evaluation needs s+2 levels");
  if (forcing.size() != J_) raise(Errc::length_mismatch, "forcing must cover [1, J]");
  Eigen::VectorXcd out(J_);
  const bool par = exec_ == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int j = 1; j <= J_; ++j) {
    Complex acc(0);
    for (const InteriorCoeff& e : scheme_.interior)
      acc += e.value * at(window[e.sigma], j_min, j + e.offset[0]);
    out(j - 1) = acc - dt_ * forcing(j - 1);
  }
  return out;
}

Eigen::VectorXcd IbvpEngine::boundary_rows(const std::vector<Eigen::VectorXcd>& window,
                                           int j_min, const Eigen::VectorXcd& g) const {
  if (static_cast<int>(window.size()) != scheme_.s + 2)
    raise(Errc::wrong_time_levels, "row evaluation needs s+2 levels");
  const int r1 = scheme_.r[0];
  if (g.size() != r1) raise(Errc::length_mismatch, "boundary data must cover [1-r1, 0]");
  Eigen::VectorXcd out(r1);
  for (int j1 = 1 - r1; j1 <= 0; ++j1) {
    Complex acc = at(window[scheme_.s + 1], j_min, j1);
    for (const BoundaryCoeff& b : scheme_.boundary)
      if (b.j1 == j1) acc += b.value * at(window[b.sigma], j_min, 1 + b.offset[0]);
    out(j1 - (1 - r1)) = acc - g(j1 - (1 - r1));
  }
  return out;
}

void IbvpEngine::advance(std::vector<Eigen::VectorXcd>& levels, int j_min,
                         const Eigen::VectorXcd& forcing, const Eigen::VectorXcd* g) const {
  const int width = J_ - j_min + 1;
  const int s = scheme_.s;
  const bool direct = g != nullptr;
  const int first_scheme_row = direct ? 1 : j_min;
  Eigen::VectorXcd next(width);

  auto forcing_at = [&](int j) { return j >= 1 && j <= J_ ? forcing(j - 1) : Complex(0); };

  if (scheme_.is_explicit()) {
    const double lead = scheme_.leading_coefficient();
    const bool par = exec_ == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (int j = first_scheme_row; j <= J_; ++j) {
      Complex acc(0);
      for (const InteriorCoeff& e : scheme_.interior) {
        if (e.sigma > s) continue;
        acc += e.value * at(levels[e.sigma], j_min, j + e.offset[0]);
      }
      next(j - j_min) = (dt_ * forcing_at(j) - acc) / lead;
    }
    if (direct) {
      for (int j1 = 1 - scheme_.r[0]; j1 <= 0; ++j1) {
        Complex acc(0);
        for (const BoundaryCoeff& b : scheme_.boundary) {
          if (b.j1 != j1) continue;
          const int cell = 1 + b.offset[0];
          acc += b.value * (b.sigma <= s ? at(levels[b.sigma], j_min, cell)
                                         : next(cell - j_min));
        }
        next(j1 - j_min) = (*g)(j1 - (1 - scheme_.r[0])) - acc;
      }
    }
  } else {
    // banded new-level system; reassembled per call, the domains are small
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int j = j_min; j <= J_; ++j) {
      if (direct && j <= 0) {
        trip.emplace_back(j - j_min, j - j_min, Complex(1));
        for (const BoundaryCoeff& b : scheme_.boundary)
          if (b.j1 == j && b.sigma == s + 1)
            trip.emplace_back(j - j_min, 1 + b.offset[0] - j_min, Complex(b.value));
      } else {
        for (const InteriorCoeff& e : scheme_.interior) {
          if (e.sigma != s + 1) continue;
          const int col = j + e.offset[0];
          if (col >= j_min && col <= J_)
            trip.emplace_back(j - j_min, col - j_min, Complex(e.value));
        }
      }
    }
    Eigen::SparseMatrix<Complex> A(width, width);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(A);
    if (lu.info() != Eigen::Success)
      raise(Errc::singular_step, "new-level system is not invertible");

    Eigen::VectorXcd rhs(width);
    const bool par = exec_ == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (int j = j_min; j <= J_; ++j) {
      if (direct && j <= 0) {
        Complex acc(0);
        for (const BoundaryCoeff& b : scheme_.boundary)
          if (b.j1 == j && b.sigma <= s)
            acc += b.value * at(levels[b.sigma], j_min, 1 + b.offset[0]);
        rhs(j - j_min) = (*g)(j - (1 - scheme_.r[0])) - acc;
      } else {
        Complex acc(0);
        for (const InteriorCoeff& e : scheme_.interior)
          if (e.sigma <= s) acc += e.value * at(levels[e.sigma], j_min, j + e.offset[0]);
        rhs(j - j_min) = dt_ * forcing_at(j) - acc;
      }
    }
    next = lu.solve(rhs);
  }

  levels.erase(levels.begin());
  levels.push_back(std::move(next));
}

namespace {

HalfSpaceRun make_run(int j_min, int J, int steps, double dt, double dx) {
  HalfSpaceRun run;
  run.j_min = j_min;
  run.J = J;
  run.steps = steps;
  run.dt = dt;
  run.dx = dx;
  return run;
}

}  // namespace

HalfSpaceRun IbvpEngine::run_direct(const IbvpData& data, bool enforce_truncation) const {
  const int r1 = scheme_.r[0];
  const int j_min = 1 - r1;
  const int width = J_ - j_min + 1;
  const int steps = static_cast<int>(data.forcing.size());
  if (steps == 0) raise(Errc::empty_run, "no forcing steps given");
  if (data.boundary.size() != data.forcing.size())
    raise(Errc::length_mismatch, "forcing and boundary step counts differ");
  if (static_cast<int>(data.f.size()) != scheme_.s + 1)
    raise(Errc::wrong_time_levels, "initial data must hold s+1 levels");
  for (const Eigen::VectorXcd& f : data.f)
    if (f.size() != width) raise(Errc::length_mismatch, "initial level has the wrong size");

  HalfSpaceRun run = make_run(j_min, J_, steps, dt_, dx_);
  std::vector<Eigen::VectorXcd> levels = data.f;
  run.history = levels;
  for (int k = 0; k < steps; ++k) {
    advance(levels, j_min, data.forcing[k], &data.boundary[k]);
    run.history.push_back(levels.back());
  }

  double scale = 0.0;
  for (const Eigen::VectorXcd& u : run.history)
    for (int i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(u(i)));
  const int zone = std::max(scheme_.p[0], 1);
  for (const Eigen::VectorXcd& u : run.history)
    for (int j = J_ - zone + 1; j <= J_; ++j)
      run.truncation_activity = std::max(run.truncation_activity, std::abs(at(u, j_min, j)));
  if (enforce_truncation && run.truncation_activity > 1e-8 * (1.0 + scale))
    raise(Errc::truncation_breach, "solution reached the truncation edge");
  return run;
}

HalfSpaceRun IbvpEngine::run_aux(const IbvpData& data, int buffer) const {
  if (buffer < 0) raise(Errc::config_error, "buffer must be nonnegative");
  const int r1 = scheme_.r[0];
  const int j_min = 1 - r1 - buffer;
  const int steps = static_cast<int>(data.forcing.size());
  if (steps == 0) raise(Errc::empty_run, "no forcing steps given");
  if (static_cast<int>(data.f.size()) != scheme_.s + 1)
    raise(Errc::wrong_time_levels, "initial data must hold s+1 levels");

  HalfSpaceRun run = make_run(j_min, J_, steps, dt_, dx_);
  const int width = J_ - j_min + 1;
  std::vector<Eigen::VectorXcd> levels(scheme_.s + 1);
  for (int sigma = 0; sigma <= scheme_.s; ++sigma) {
    if (data.f[sigma].size() != J_ - (1 - r1) + 1)
      raise(Errc::length_mismatch, "initial level has the wrong size");
    levels[sigma] = Eigen::VectorXcd::Zero(width);
    levels[sigma].tail(J_ - (1 - r1) + 1) = data.f[sigma];
  }
  run.history = levels;
  for (int k = 0; k < steps; ++k) {
    advance(levels, j_min, data.forcing[k], nullptr);
    run.history.push_back(levels.back());
  }
  return run;
}

IbvpData IbvpEngine::smooth_data(int steps, bool with_initial, bool with_forcing,
                                 bool with_boundary) const {
  if (steps < 1) raise(Errc::empty_run, "step count must be positive");
  const int r1 = scheme_.r[0];
  const int width = J_ - (1 - r1) + 1;
  IbvpData data;

  data.f.assign(scheme_.s + 1, Eigen::VectorXcd::Zero(width));
  if (with_initial) {
    for (int sigma = 0; sigma <= scheme_.s; ++sigma)
      for (int i = 0; i < width; ++i) {
        const double x = (1 - r1 + i) * dx_ + 0.8 * sigma * dt_;
        data.f[sigma](i) = std::exp(-80.0 * sq(x - 0.3)) * Complex(1.0, 0.25);
      }
  }

  data.forcing.assign(steps, Eigen::VectorXcd::Zero(J_));
  if (with_forcing) {
    for (int k = 0; k < steps; ++k) {
      const double t = (k + scheme_.s + 1) * dt_;
      for (int j = 1; j <= J_; ++j) {
        const double x = j * dx_;
        data.forcing[k](j - 1) =
            std::exp(-80.0 * sq(x - 0.4)) * std::sin(3.0 * t) * Complex(0.5, 1.0);
      }
    }
  }

  data.boundary.assign(steps, Eigen::VectorXcd::Zero(r1));
  if (with_boundary) {
    for (int k = 0; k < steps; ++k) {
      const double t = (k + scheme_.s + 1) * dt_;
      const Complex pulse = std::exp(-30.0 * sq(t - 0.2)) * Complex(1.0, -0.5);
      for (int i = 0; i < r1; ++i) data.boundary[k](i) = pulse;
    }
  }
  return data;
}

EstimateReport IbvpEngine::measure_estimates(const HalfSpaceRun& run, const IbvpData& data,
                                             double gamma) const {
  if (!(gamma > 0.0)) raise(Errc::config_error, "gamma must be positive");
  EstimateReport rep;
  const double dt = run.dt;
  const double dx = run.dx;
  const int r1 = scheme_.r[0];

  for (size_t n = 0; n < run.history.size(); ++n) {
    const Eigen::VectorXcd& u = run.history[n];
    const double w = std::exp(-2.0 * gamma * double(n) * dt);
    double norm2 = 0.0;
    for (int i = 0; i < u.size(); ++i) norm2 += std::norm(u(i));
    norm2 *= dx;
    double trace2 = 0.0;
    for (int j = 1 - r1; j <= 1 + scheme_.q1; ++j) trace2 += std::norm(at(u, run.j_min, j));
    rep.interior_sum += dt * w * norm2;
    rep.trace_sum += dt * w * trace2;
    rep.sup_weighted = std::max(rep.sup_weighted, w * norm2);
  }
  rep.interior_sum *= gamma / (gamma * dt + 1.0);

  for (size_t k = 0; k < data.forcing.size(); ++k) {
    const double w = std::exp(-2.0 * gamma * double(k + scheme_.s + 1) * dt);
    double f2 = 0.0;
    for (int i = 0; i < data.forcing[k].size(); ++i) f2 += std::norm(data.forcing[k](i));
    rep.forcing_sum += dt * w * f2 * dx;
    if (k < data.boundary.size()) {
      double g2 = 0.0;
      for (int i = 0; i < data.boundary[k].size(); ++i) g2 += std::norm(data.boundary[k](i));
      rep.boundary_sum += dt * w * g2;
    }
  }
  rep.forcing_sum *= (gamma * dt + 1.0) / gamma;

  for (const Eigen::VectorXcd& f : data.f) {
    double f2 = 0.0;
    for (int i = 0; i < f.size(); ++i) f2 += std::norm(f(i));
    rep.initial_sum += f2 * dx;
  }

  const double strong_rhs = rep.forcing_sum + rep.boundary_sum;
  rep.strong_ratio = strong_rhs > 0.0 ? (rep.interior_sum + rep.trace_sum) / strong_rhs : 0.0;
  const double semi_rhs = rep.initial_sum + strong_rhs;
  rep.semigroup_ratio = semi_rhs > 0.0 ? rep.sup_weighted / semi_rhs : 0.0;
  return rep;
}

IbvpEngine::Superposition IbvpEngine::superpose(const IbvpData& data, int buffer) const {
  Superposition out;
  out.direct = run_direct(data);
  out.aux = run_aux(data, buffer);

  const int r1 = scheme_.r[0];
  const int width = J_ - (1 - r1) + 1;
  const int steps = static_cast<int>(data.forcing.size());

  IbvpData corrected;
  corrected.f.assign(scheme_.s + 1, Eigen::VectorXcd::Zero(width));
  corrected.forcing.resize(steps);
  corrected.boundary.resize(steps);
  for (int k = 0; k < steps; ++k) {
    std::vector<Eigen::VectorXcd> window(out.aux.history.begin() + k,
                                         out.aux.history.begin() + k + scheme_.s + 2);
    corrected.forcing[k] = -interior_rows(window, out.aux.j_min, data.forcing[k]) / dt_;
    corrected.boundary[k] = -boundary_rows(window, out.aux.j_min, data.boundary[k]);
  }
  out.bvp = run_direct(corrected);

  double scale = 0.0;
  for (const Eigen::VectorXcd& u : out.direct.history)
    for (int i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(u(i)));
  for (size_t n = 0; n < out.direct.history.size(); ++n) {
    for (int j = 1 - r1; j <= J_; ++j) {
      const Complex sum = at(out.aux.history[n], out.aux.j_min, j) +
                          at(out.bvp.history[n], out.bvp.j_min, j);
      const Complex direct = at(out.direct.history[n], out.direct.j_min, j);
      out.max_diff = std::max(out.max_diff, std::abs(direct - sum) / (1.0 + scale));
    }
  }
  return out;
}

}  // namespace fdstab
