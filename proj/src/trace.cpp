#include "fdstab/trace.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "fdstab/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdstab {

namespace {

constexpr double kLeadTol = 1e-12;

std::vector<Complex> eval_edge_row(const SchemeDef& scheme, Complex z,
                                   const std::vector<double>& eta,
                                   bool derivative) {
  const int n = scheme.r[0] + scheme.p[0];
  std::vector<Complex> out(static_cast<std::size_t>(n) + 1);
  for (int l1 = -scheme.r[0]; l1 <= scheme.p[0]; ++l1) {
    Poly sym = scheme.edge_symbol(l1, eta);
    if (derivative) {
      out[static_cast<std::size_t>(l1 + scheme.r[0])] =
          z * sym.derivative().eval(z);
    } else {
      out[static_cast<std::size_t>(l1 + scheme.r[0])] = sym.eval(z);
    }
  }
  return out;
}

// First-row companion matrix of sum_m c[m] kappa^m with c.size() == n+1.
Eigen::MatrixXcd companion_of(const std::vector<Complex>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    mat(0, k) = -c[static_cast<std::size_t>(n - 1 - k)] / c[static_cast<std::size_t>(n)];
  }
  for (int k = 0; k + 1 < n; ++k) {
    mat(k + 1, k) = 1.0;
  }
  return mat;
}

double spectral_norm(const Eigen::MatrixXcd& mat) {
  return mat.jacobiSvd().singularValues()(0);
}

SpectralSplit split_spectrum(const Eigen::MatrixXcd& mat, double delta) {
  const int n = static_cast<int>(mat.rows());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(mat, true);
  if (solver.info() != Eigen::Success) {
    raise(Errc::degenerate_basis, "eigenvalue iteration failed on companion matrix");
  }

  SpectralSplit split;
  split.eigenvalues = solver.eigenvalues();
  split.margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXd stable_sel = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double dist = std::abs(std::abs(split.eigenvalues(i)) - 1.0);
    split.margin = std::min(split.margin, dist);
    if (std::abs(split.eigenvalues(i)) < 1.0 - delta) {
      ++split.n_stable;
      stable_sel(i) = 1.0;
    } else if (std::abs(split.eigenvalues(i)) > 1.0 + delta) {
      ++split.n_unstable;
    } else {
      ++split.n_central;
    }
  }

  const Eigen::MatrixXcd& vecs = solver.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(vecs);
  if (!lu.isInvertible()) {
    // Defective eigenvector basis: report an infinite condition number and
    // fall back to trivial projectors so callers can still read the split.
    split.eigenvector_cond = std::numeric_limits<double>::infinity();
    split.proj_stable = Eigen::MatrixXcd::Zero(n, n);
    split.proj_unstable = Eigen::MatrixXcd::Identity(n, n);
    split.projector_residual = std::numeric_limits<double>::infinity();
    return split;
  }
  const Eigen::MatrixXcd inv = lu.inverse();
  split.eigenvector_cond = spectral_norm(vecs) * spectral_norm(inv);
  split.proj_stable = vecs * stable_sel.asDiagonal() * inv;
  split.proj_unstable = Eigen::MatrixXcd::Identity(n, n) - split.proj_stable;

  const Eigen::MatrixXcd& ps = split.proj_stable;
  const Eigen::MatrixXcd& pu = split.proj_unstable;
  double res = (ps * ps - ps).norm();
  res = std::max(res, (pu * pu - pu).norm());
  res = std::max(res, (ps * pu).norm());
  res = std::max(res, (mat * ps - ps * mat).norm() / (1.0 + mat.norm()));
  split.projector_residual = res;
  return split;
}

struct MarginProbe {
  Complex z;
  std::vector<double> eta;
};

std::vector<std::vector<double>> eta_probe_grid(const SchemeDef& scheme,
                                                int eta_grid_n) {
  std::vector<std::vector<double>> etas;
  if (scheme.dim == 1) {
    etas.push_back({});
  } else {
    for (int m = 0; m < eta_grid_n; ++m) {
      etas.push_back({2.0 * M_PI * m / eta_grid_n});
    }
  }
  return etas;
}

} // namespace

std::vector<Complex> boundary_symbols(const SchemeDef& scheme, Complex z,
                                      const std::vector<double>& eta) {
  return eval_edge_row(scheme, z, eta, false);
}

std::vector<Complex> boundary_symbols_zdz(const SchemeDef& scheme, Complex z,
                                          const std::vector<double>& eta) {
  return eval_edge_row(scheme, z, eta, true);
}

CompanionPair companions(const SchemeDef& scheme, Complex z,
                         const std::vector<double>& eta, double delta) {
  CompanionPair pair;
  pair.z = z;
  pair.eta = eta;

  const std::vector<Complex> a = boundary_symbols(scheme, z, eta);
  const std::vector<Complex> b = boundary_symbols_zdz(scheme, z, eta);
  if (std::abs(a.back()) <= kLeadTol) {
    raise(Errc::edge_symbol_vanishes,
          "extreme boundary symbol vanishes at |z| = " + std::to_string(std::abs(z)));
  }
  if (std::abs(b.back()) <= kLeadTol) {
    raise(Errc::edge_symbol_vanishes,
          "derivative of extreme boundary symbol vanishes at |z| = " +
              std::to_string(std::abs(z)));
  }

  pair.L_mat = companion_of(a);
  pair.M_mat = companion_of(b);
  pair.L_split = split_spectrum(pair.L_mat, delta);
  pair.M_split = split_spectrum(pair.M_mat, delta);
  return pair;
}

MarginScan central_margin_scan(const SchemeDef& scheme, int n_samples,
                               double r0, std::uint64_t seed, double threshold,
                               int eta_grid_n, Exec exec) {
  if (n_samples < 1 || r0 <= 1.0 || eta_grid_n < 1) {
    raise(Errc::config_error, "margin scan needs n_samples >= 1, r0 > 1, eta_grid >= 1");
  }

  const std::vector<std::vector<double>> etas = eta_probe_grid(scheme, eta_grid_n);

  // Probe set: a deterministic ring on the circle, a geometric approach to
  // the circle from outside, and random points log-uniform in modulus.
  // The deterministic part makes margin collapse at |z| -> 1 reproducible
  // instead of depending on a lucky random draw.
  std::vector<MarginProbe> probes;
  for (int k = 0; k < 32; ++k) {
    const double arg = 2.0 * M_PI * k / 32.0;
    for (const auto& eta : etas) {
      probes.push_back({std::polar(1.0, arg), eta});
    }
  }
  for (int k = 1; k <= 44; ++k) {
    const double rho = 1.0 + std::ldexp(1.0, -k);
    for (int q = 0; q < 4; ++q) {
      for (const auto& eta : etas) {
        probes.push_back({std::polar(rho, 0.5 * M_PI * q), eta});
      }
    }
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n_samples; ++i) {
    const double u = 1.0 - unit(gen); // (0, 1]
    const double rho = std::exp(u * std::log(r0));
    const double arg = 2.0 * M_PI * unit(gen);
    std::vector<double> eta;
    if (scheme.dim == 2) {
      eta.push_back(2.0 * M_PI * unit(gen));
    }
    probes.push_back({std::polar(rho, arg), eta});
  }

  const int total = static_cast<int>(probes.size());
  std::vector<double> margins(static_cast<std::size_t>(total), 0.0);
  std::vector<std::unique_ptr<Error>> failures(static_cast<std::size_t>(total));
  const bool par = exec == Exec::parallel;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (int i = 0; i < total; ++i) {
    try {
      const CompanionPair pair =
          companions(scheme, probes[static_cast<std::size_t>(i)].z,
                     probes[static_cast<std::size_t>(i)].eta);
      margins[static_cast<std::size_t>(i)] = pair.M_split.margin;
    } catch (const Error& err) {
      if (err.code() == Errc::edge_symbol_vanishes) {
        // A degenerate companion at a probe point is itself a margin
        // failure; record it as distance zero instead of aborting the scan.
        margins[static_cast<std::size_t>(i)] = 0.0;
      } else {
        failures[static_cast<std::size_t>(i)] = std::make_unique<Error>(err);
      }
    }
  }
  for (const auto& failure : failures) {
    if (failure) {
      throw *failure;
    }
  }

  MarginScan scan;
  scan.min_margin = std::numeric_limits<double>::infinity();
  scan.samples = total;
  scan.threshold = threshold;
  for (int i = 0; i < total; ++i) {
    if (margins[static_cast<std::size_t>(i)] < scan.min_margin) {
      scan.min_margin = margins[static_cast<std::size_t>(i)];
      scan.worst_z = probes[static_cast<std::size_t>(i)].z;
      scan.worst_eta = probes[static_cast<std::size_t>(i)].eta;
    }
  }
  scan.pass = scan.min_margin > threshold;
  return scan;
}

TraceSample trace_ratio(const SchemeDef& scheme, Complex z,
                        const std::vector<double>& eta,
                        const std::vector<Complex>& w, int origin, int p1_cut) {
  const int r1 = scheme.r[0];
  const int p1 = scheme.p[0];
  const int len = static_cast<int>(w.size());
  if (len == 0) {
    raise(Errc::config_error, "trace ratio needs a nonempty sequence");
  }

  const std::vector<Complex> a = boundary_symbols(scheme, z, eta);
  const std::vector<Complex> b = boundary_symbols_zdz(scheme, z, eta);

  const auto w_at = [&](int j1) -> Complex {
    const int k = j1 - origin;
    if (k < 0 || k >= len) {
      return Complex(0.0, 0.0);
    }
    return w[static_cast<std::size_t>(k)];
  };
  const auto row_apply = [&](const std::vector<Complex>& coeffs, int j1) {
    Complex acc(0.0, 0.0);
    for (int l1 = -r1; l1 <= p1; ++l1) {
      acc += coeffs[static_cast<std::size_t>(l1 + r1)] * w_at(j1 + l1);
    }
    return acc;
  };

  TraceSample sample;
  for (int j1 = -r1 - p1; j1 <= p1_cut; ++j1) {
    sample.lhs += std::norm(w_at(j1));
  }

  // Both recurrence images have finite support, so summing over the index
  // range reached from the support of w is exact.
  const int lo = origin - p1;
  const int hi = origin + len - 1 + r1;
  for (int j1 = lo; j1 <= hi; ++j1) {
    sample.rhs += std::norm(row_apply(a, j1));
  }
  for (int j1 = lo; j1 <= std::min(hi, 0); ++j1) {
    sample.rhs += std::norm(row_apply(b, j1));
  }

  if (sample.lhs == 0.0) {
    sample.ratio = 0.0;
  } else if (sample.rhs == 0.0) {
    sample.counterexample = true;
    sample.ratio = std::numeric_limits<double>::infinity();
  } else {
    sample.ratio = sample.lhs / sample.rhs;
  }
  return sample;
}

TraceScan trace_scan(const SchemeDef& scheme, int n_samples, int p1_cut,
                     double r0, std::uint64_t seed, Exec exec) {
  if (n_samples < 1 || r0 <= 1.0 || p1_cut < 0) {
    raise(Errc::config_error, "trace scan needs n_samples >= 1, r0 > 1, p1_cut >= 0");
  }

  const int r1 = scheme.r[0];
  const int p1 = scheme.p[0];
  const int origin = -r1 - p1 - 20;
  const int len = (p1_cut + 20) - origin + 1;

  struct Draw {
    Complex z;
    std::vector<double> eta;
    std::vector<Complex> w;
  };

  // All randomness is drawn serially so a longer run with the same seed
  // extends a shorter one sample for sample.
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Draw> draws(static_cast<std::size_t>(n_samples));
  for (auto& draw : draws) {
    const double u = 1.0 - unit(gen);
    draw.z = std::polar(std::exp(u * std::log(r0)), 2.0 * M_PI * unit(gen));
    if (scheme.dim == 2) {
      draw.eta.push_back(2.0 * M_PI * unit(gen));
    }
    draw.w.resize(static_cast<std::size_t>(len));
    double norm2 = 0.0;
    for (auto& entry : draw.w) {
      entry = Complex(gauss(gen), gauss(gen));
      norm2 += std::norm(entry);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& entry : draw.w) {
      entry *= scale;
    }
  }

  std::vector<double> ratios(static_cast<std::size_t>(n_samples), 0.0);
  std::vector<char> flags(static_cast<std::size_t>(n_samples), 0);
  std::vector<std::unique_ptr<Error>> failures(static_cast<std::size_t>(n_samples));
  const bool par = exec == Exec::parallel;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (int i = 0; i < n_samples; ++i) {
    try {
      const TraceSample sample =
          trace_ratio(scheme, draws[static_cast<std::size_t>(i)].z,
                      draws[static_cast<std::size_t>(i)].eta,
                      draws[static_cast<std::size_t>(i)].w, origin, p1_cut);
      ratios[static_cast<std::size_t>(i)] = sample.ratio;
      flags[static_cast<std::size_t>(i)] = sample.counterexample ? 1 : 0;
    } catch (const Error& err) {
      failures[static_cast<std::size_t>(i)] = std::make_unique<Error>(err);
    }
  }
  for (const auto& failure : failures) {
    if (failure) {
      throw *failure;
    }
  }

  TraceScan scan;
  scan.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    scan.counterexamples += flags[static_cast<std::size_t>(i)];
    if (ratios[static_cast<std::size_t>(i)] > scan.max_ratio) {
      scan.max_ratio = ratios[static_cast<std::size_t>(i)];
      scan.worst_z = draws[static_cast<std::size_t>(i)].z;
    }
  }
  return scan;
}

} // namespace fdstab
