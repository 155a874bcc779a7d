#include "fdstab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fdstab/errors.hpp"

namespace fdstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  raise(Errc::config_error, origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int to_int(const std::string& s, const std::string& origin, int line) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected an integer, got '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& origin, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected a number, got '" + s + "'");
  }
}

}  // namespace

SchemeDef SchemeDef::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::config_error, "cannot open scheme file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

SchemeDef SchemeDef::parse(const std::string& text, const std::string& origin) {
  SchemeDef def;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  enum class Section { top, interior, boundary } section = Section::top;
  bool saw_dim = false, saw_s = false, saw_r = false, saw_p = false, saw_lambda = false;

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (section != Section::top) {
      if (toks[0] == "end") {
        section = Section::top;
        continue;
      }
      const size_t fixed = section == Section::interior ? 1 : 2;  // sigma [j1]
      if (!saw_dim) parse_fail(origin, lineno, "dim must precede coefficient tables");
      if (toks.size() != fixed + def.dim + 1)
        parse_fail(origin, lineno, "expected " + std::to_string(fixed + def.dim + 1) +
                                       " fields in this table row");
      std::vector<int> offset(def.dim);
      for (int k = 0; k < def.dim; ++k) offset[k] = to_int(toks[fixed + k], origin, lineno);
      const double value = to_double(toks.back(), origin, lineno);
      if (section == Section::interior) {
        def.interior.push_back({to_int(toks[0], origin, lineno), offset, value});
      } else {
        def.boundary.push_back({to_int(toks[0], origin, lineno),
                                to_int(toks[1], origin, lineno), offset, value});
      }
      continue;
    }

    const std::string& key = toks[0];
    auto ints_after = [&](size_t want) {
      if (toks.size() != want + 1)
        parse_fail(origin, lineno, "key '" + key + "' takes " + std::to_string(want) + " value(s)");
      std::vector<int> v;
      for (size_t i = 1; i < toks.size(); ++i) v.push_back(to_int(toks[i], origin, lineno));
      return v;
    };
    if (key == "name") {
      if (toks.size() != 2) parse_fail(origin, lineno, "name takes one token");
      def.name = toks[1];
    } else if (key == "dim") {
      def.dim = ints_after(1)[0];
      if (def.dim < 1 || def.dim > 2) parse_fail(origin, lineno, "dim must be 1 or 2");
      saw_dim = true;
    } else if (key == "s") {
      def.s = ints_after(1)[0];
      saw_s = true;
    } else if (key == "r") {
      if (!saw_dim) parse_fail(origin, lineno, "dim must precede r");
      def.r = ints_after(def.dim);
      saw_r = true;
    } else if (key == "p") {
      if (!saw_dim) parse_fail(origin, lineno, "dim must precede p");
      def.p = ints_after(def.dim);
      saw_p = true;
    } else if (key == "q1") {
      def.q1 = ints_after(1)[0];
    } else if (key == "qprime") {
      if (!saw_dim) parse_fail(origin, lineno, "dim must precede qprime");
      def.qprime = ints_after(def.dim - 1);
    } else if (key == "lambda") {
      if (!saw_dim) parse_fail(origin, lineno, "dim must precede lambda");
      if (toks.size() != size_t(def.dim) + 1)
        parse_fail(origin, lineno, "lambda takes one value per axis");
      def.lambda.clear();
      for (int k = 0; k < def.dim; ++k) def.lambda.push_back(to_double(toks[1 + k], origin, lineno));
      saw_lambda = true;
    } else if (key == "interior") {
      section = Section::interior;
    } else if (key == "boundary") {
      section = Section::boundary;
    } else {
      parse_fail(origin, lineno, "unknown key '" + key + "'");
    }
  }
  if (section != Section::top) raise(Errc::config_error, origin + ": unterminated table");
  if (!saw_dim || !saw_s || !saw_r || !saw_p || !saw_lambda)
    raise(Errc::config_error, origin + ": missing required key (dim, s, r, p, lambda)");
  if (def.dim == 1) def.qprime.clear();
  def.validate();
  return def;
}

void SchemeDef::validate() const {
  if (s < 0) raise(Errc::config_error, "s must be >= 0");
  if (static_cast<int>(r.size()) != dim || static_cast<int>(p.size()) != dim ||
      static_cast<int>(lambda.size()) != dim)
    raise(Errc::config_error, "r, p, lambda must each have one entry per axis");
  if (dim >= 2 && static_cast<int>(qprime.size()) != dim - 1)
    raise(Errc::config_error, "qprime must have dim-1 entries");
  for (int k = 0; k < dim; ++k) {
    if (r[k] < 0 || p[k] < 0) raise(Errc::config_error, "stencil extents must be nonnegative");
    if (!(lambda[k] > 0)) raise(Errc::config_error, "lambda must be positive");
  }
  if (q1 < 0) raise(Errc::config_error, "q1 must be nonnegative");
  if (interior.empty()) raise(Errc::config_error, "no interior coefficients");

  bool touch_low = false, touch_high = false, leading = false;
  for (const InteriorCoeff& e : interior) {
    if (e.sigma < 0 || e.sigma > s + 1) raise(Errc::config_error, "sigma out of range in interior table");
    if (static_cast<int>(e.offset.size()) != dim)
      raise(Errc::config_error, "interior offset arity mismatch");
    for (int k = 0; k < dim; ++k)
      if (e.offset[k] < -r[k] || e.offset[k] > p[k])
        raise(Errc::config_error, "interior offset outside the declared stencil");
    if (e.value != 0.0 && e.offset[0] == -r[0]) touch_low = true;
    if (e.value != 0.0 && e.offset[0] == p[0]) touch_high = true;
    if (e.sigma == s + 1 && e.value != 0.0) leading = true;
  }
  if (!touch_low || !touch_high)
    raise(Errc::config_error, "stencil extents are not tight (no nonzero coefficient at -r1 or p1)");
  if (!leading) raise(Errc::config_error, "no nonzero coefficient at the new time level");

  for (const BoundaryCoeff& e : boundary) {
    if (e.sigma < 0 || e.sigma > s + 1) raise(Errc::config_error, "sigma out of range in boundary table");
    if (e.j1 < 1 - r[0] || e.j1 > 0) raise(Errc::config_error, "boundary cell j1 outside [1-r1, 0]");
    if (static_cast<int>(e.offset.size()) != dim)
      raise(Errc::config_error, "boundary offset arity mismatch");
    if (e.offset[0] < 0 || e.offset[0] > q1)
      raise(Errc::config_error, "boundary offset l1 outside [0, q1]");
    for (int k = 1; k < dim; ++k)
      if (std::abs(e.offset[k]) > qprime[k - 1])
        raise(Errc::config_error, "boundary transverse offset outside [-q', q']");
  }

  // Q^_{s+1} must not vanish anywhere; sample a coarse grid
  TorusGrid g{dim, {64, dim == 2 ? 64 : 1}};
  for (int idx = 0; idx < g.size(); ++idx) {
    if (std::abs(symbol(s + 1, g.theta(idx))) <= 1e-12)
      raise(Errc::characteristic_symbol,
            "leading symbol vanishes on the sampled frequency grid");
  }
}

bool SchemeDef::is_explicit() const {
  for (const InteriorCoeff& e : interior) {
    if (e.sigma != s + 1 || e.value == 0.0) continue;
    for (int k = 0; k < dim; ++k)
      if (e.offset[k] != 0) return false;
  }
  return true;
}

double SchemeDef::leading_coefficient() const {
  double c = 0.0;
  for (const InteriorCoeff& e : interior)
    if (e.sigma == s + 1) {
      bool origin = true;
      for (int k = 0; k < dim; ++k)
        if (e.offset[k] != 0) origin = false;
      if (origin) c += e.value;
    }
  return c;
}

Complex SchemeDef::symbol(int sigma, const std::vector<double>& theta) const {
  if (static_cast<int>(theta.size()) != dim) raise(Errc::config_error, "theta arity mismatch");
  Complex acc(0);
  for (const InteriorCoeff& e : interior) {
    if (e.sigma != sigma) continue;
    double phase = 0;
    for (int k = 0; k < dim; ++k) phase += e.offset[k] * theta[k];
    acc += e.value * std::polar(1.0, phase);
  }
  return acc;
}

Poly SchemeDef::dispersion_poly(const std::vector<double>& theta) const {
  std::vector<Complex> c(s + 2);
  for (int sigma = 0; sigma <= s + 1; ++sigma) c[sigma] = symbol(sigma, theta);
  return Poly(std::move(c));
}

Poly SchemeDef::edge_symbol(int l1, const std::vector<double>& eta) const {
  if (static_cast<int>(eta.size()) != dim - 1) raise(Errc::config_error, "eta arity mismatch");
  std::vector<Complex> c(s + 2, Complex(0));
  for (const InteriorCoeff& e : interior) {
    if (e.offset[0] != l1) continue;
    double phase = 0;
    for (int k = 1; k < dim; ++k) phase += e.offset[k] * eta[k - 1];
    c[e.sigma] += e.value * std::polar(1.0, phase);
  }
  return Poly(std::move(c));
}

Eigen::MatrixXcd SchemeDef::amplification(const std::vector<double>& theta) const {
  const Complex lead = symbol(s + 1, theta);
  if (std::abs(lead) <= 1e-12)
    raise(Errc::characteristic_symbol, "leading symbol vanishes at the requested frequency");
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(s + 1, s + 1);
  for (int sigma = s; sigma >= 0; --sigma) A(0, s - sigma) = -symbol(sigma, theta) / lead;
  for (int i = 1; i <= s; ++i) A(i, i - 1) = Complex(1);
  return A;
}

PowerBoundScan power_bound_scan(const SchemeDef& scheme, int grid_n, int n_max, Exec exec) {
  if (grid_n < 1 || n_max < 1) raise(Errc::config_error, "grid and power count must be positive");
  TorusGrid g{scheme.dim, {grid_n, scheme.dim == 2 ? grid_n : 1}};
  const int total = g.size();
  std::vector<double> per_point(total, 0.0);
  std::vector<char> capped(total, 0);
  const double cap = 1e12;

  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int idx = 0; idx < total; ++idx) {
    const Eigen::MatrixXcd A = scheme.amplification(g.theta(idx));
    Eigen::MatrixXcd B = A;
    double best = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      const double norm = B.jacobiSvd().singularValues()(0);
      best = std::max(best, norm);
      if (norm > cap) {
        capped[idx] = 1;
        break;
      }
      if (n < n_max) B = A * B;
    }
    per_point[idx] = best;
  }

  PowerBoundScan out;
  out.per_point = std::move(per_point);
  for (int idx = 0; idx < total; ++idx) {
    if (out.per_point[idx] > out.max_norm) {
      out.max_norm = out.per_point[idx];
      out.argmax_index = idx;
    }
    if (capped[idx]) out.capped = true;
  }
  return out;
}

namespace {

// Smallest pairwise distance between the (unclustered) dispersion roots;
// large sentinel when the polynomial has a single root.
double root_separation(const SchemeDef& scheme, const std::vector<double>& theta) {
  const auto roots = poly_roots(scheme.dispersion_poly(theta));
  if (roots.size() < 2) return 1e9;
  double sep = 1e9;
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      sep = std::min(sep, std::abs(roots[i] - roots[j]));
  return sep;
}

// Golden-section minimization of the root separation along one axis.
std::pair<double, double> refine_axis(const SchemeDef& scheme, std::vector<double> theta,
                                      int axis, double lo, double hi, int iters) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  auto eval = [&](double t) {
    theta[axis] = t;
    return root_separation(scheme, theta);
  };
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, eval(t)};
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0 ? t + kTwoPi : t;
}

}  // namespace

RootClassification classify_roots(const SchemeDef& scheme, int grid_n,
                                   double cluster_radius, Exec exec) {
  if (grid_n < 4) raise(Errc::config_error, "classification grid too coarse");
  RootClassification out;
  out.grid = TorusGrid{scheme.dim, {grid_n, scheme.dim == 2 ? grid_n : 1}};
  out.cluster_radius = cluster_radius;
  const int total = out.grid.size();
  out.points.resize(total);
  std::vector<double> separation(total, 1e9);

  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int idx = 0; idx < total; ++idx) {
    const auto theta = out.grid.theta(idx);
    GridPointRoots pt;
    pt.groups = roots_clustered(scheme.dispersion_poly(theta), cluster_radius);
    pt.min_separation = 1e9;
    for (size_t i = 0; i < pt.groups.size(); ++i) {
      pt.max_modulus = std::max(pt.max_modulus, std::abs(pt.groups[i].value));
      if (pt.groups[i].multiplicity >= 2) {
        pt.interior_multiple = true;
        if (std::abs(pt.groups[i].value) >= 1.0 - 1e-6) pt.boundary_cluster = true;
      }
      for (size_t j = i + 1; j < pt.groups.size(); ++j)
        pt.min_separation = std::min(pt.min_separation,
                                     std::abs(pt.groups[i].value - pt.groups[j].value));
    }
    separation[idx] = root_separation(scheme, theta);
    out.points[idx] = std::move(pt);
  }

  // crossing hunt: refine around every local separation minimum
  std::vector<Crossing> found;
  const double cell = kTwoPi / grid_n;
  auto record = [&](std::vector<double> theta) {
    for (double& t : theta) t = wrap_angle(std::abs(t) < 1e-9 ? 0.0 : t);
    for (const Crossing& c : found) {
      double d = 0;
      for (int k = 0; k < scheme.dim; ++k)
        d = std::max(d, std::abs(std::remainder(c.theta[k] - theta[k], kTwoPi)));
      if (d < 1e-5) return;  // duplicate of an already-located crossing
    }
    Crossing c;
    c.theta = theta;
    c.groups = roots_clustered(scheme.dispersion_poly(theta), cluster_radius);
    found.push_back(std::move(c));
  };

  if (scheme.dim == 1) {
    for (int i = 0; i < grid_n; ++i) {
      const double here = separation[i];
      const double left = separation[(i + grid_n - 1) % grid_n];
      const double right = separation[(i + 1) % grid_n];
      if (here > left || here > right) continue;  // not a local minimum
      if (here <= cluster_radius) {
        record(out.grid.theta(i));
        continue;
      }
      const double t0 = i * cell;
      // 40 shrink steps take the bracketing cell well below the 1e-6 target
      const auto [t, sep] = refine_axis(scheme, {t0}, 0, t0 - cell, t0 + cell, 40);
      if (sep <= cluster_radius) record({t});
    }
  } else {
    for (int idx = 0; idx < total; ++idx) {
      const auto c = out.grid.coords(idx);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (separation[out.grid.index({c[0] + di, c[1] + dj})] < separation[idx]) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;
      if (separation[idx] <= cluster_radius) {
        record(out.grid.theta(idx));
        continue;
      }
      // coordinate descent, one golden-section pass per axis per sweep
      std::vector<double> theta = out.grid.theta(idx);
      double sep = separation[idx];
      for (int sweep = 0; sweep < 10; ++sweep) {
        for (int axis = 0; axis < 2; ++axis) {
          const double width = cell / std::pow(2.0, sweep);
          const auto [t, s2] =
              refine_axis(scheme, theta, axis, theta[axis] - width, theta[axis] + width, 24);
          theta[axis] = t;
          sep = s2;
        }
      }
      if (sep <= cluster_radius) record(theta);
    }
  }
  out.crossings = std::move(found);

  bool circle_ok = true;
  for (const GridPointRoots& pt : out.points) {
    out.max_root_modulus = std::max(out.max_root_modulus, pt.max_modulus);
    if (pt.boundary_cluster) circle_ok = false;
  }
  for (const Crossing& c : out.crossings)
    for (const RootGroup& g : c.groups)
      if (g.multiplicity >= 2 && std::abs(g.value) >= 1.0 - 1e-6) circle_ok = false;
  out.pass = out.max_root_modulus <= 1.0 + 1e-10 && circle_ok;
  return out;
}

EdgeSymbolAudit audit_edge_symbols(const SchemeDef& scheme, int eta_grid_n) {
  EdgeSymbolAudit out;
  const int count = scheme.dim == 1 ? 1 : eta_grid_n;
  for (int i = 0; i < count; ++i) {
    std::vector<double> eta;
    if (scheme.dim == 2) eta.push_back(kTwoPi * i / eta_grid_n);
    EdgeSymbolReport rep;
    rep.eta = eta;
    auto probe = [&](int l1, double& roots_max, double& droots_max) {
      Poly a = scheme.edge_symbol(l1, eta);
      a.trim(1e-12);
      if (a.degree() < 1)
        raise(Errc::degenerate_edge_symbol,
              "edge symbol at l1=" + std::to_string(l1) + " is constant in z");
      for (Complex z : poly_roots(a)) roots_max = std::max(roots_max, std::abs(z));
      Poly da = a.derivative();
      da.trim(1e-12);
      if (da.degree() >= 1)
        for (Complex z : poly_roots(da)) droots_max = std::max(droots_max, std::abs(z));
    };
    probe(-scheme.r[0], rep.low, rep.dlow);
    probe(scheme.p[0], rep.high, rep.dhigh);
    out.worst_modulus = std::max({out.worst_modulus, rep.low, rep.high, rep.dlow, rep.dhigh});
    out.per_eta.push_back(std::move(rep));
  }
  out.pass = out.worst_modulus < 1.0 - 1e-6;
  return out;
}

std::vector<Complex> derivative_dispersion_roots(const SchemeDef& scheme,
                                                 const std::vector<double>& theta) {
  Poly dp = scheme.dispersion_poly(theta).derivative();
  dp.trim(1e-14);
  return poly_roots(dp);
}

}  // namespace fdstab
