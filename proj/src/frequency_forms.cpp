#include "fdstab/frequency_forms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "fdstab/errors.hpp"

namespace fdstab {

namespace {

// Single-linkage components of the root set at the given radius, returned as
// sorted index lists in index order; only components of two or more roots.
std::vector<std::vector<int>> near_clusters(const std::vector<Complex>& roots, double radius) {
  const int n = static_cast<int>(roots.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> comps(n);
  for (int i = 0; i < n; ++i) comps[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : comps)
    if (c.size() >= 2) out.push_back(std::move(c));
  return out;
}

}  // namespace

HermitianFormPair forms_at_frequency(const SchemeDef& scheme, const std::vector<double>& theta,
                                     const FormTableOptions& opt) {
  const Poly p = scheme.dispersion_poly(theta);
  if (std::abs(p.coeff(scheme.s + 1)) <= 1e-12)
    raise(Errc::characteristic_symbol, "leading symbol vanishes at the requested frequency");

  if (scheme.s == 0) return build_forms(p, roots_clustered(p, opt.cluster_radius), opt.epsilon);
  if (scheme.s == 1) return build_forms_degree2(p.coeff(2), p.coeff(1), p.coeff(0));

  const auto tight = roots_clustered(p, opt.cluster_radius);
  bool has_multiple = false;
  for (const RootGroup& g : tight)
    if (g.multiplicity >= 2) has_multiple = true;
  if (has_multiple) return build_forms(p, tight, opt.epsilon);

  // all roots simple here; the sorted group values are the root list
  std::vector<Complex> roots;
  roots.reserve(tight.size());
  for (const RootGroup& g : tight) roots.push_back(g.value);

  const auto clusters = near_clusters(roots, opt.near_radius);
  bool admissible = !clusters.empty();
  for (const auto& cluster : clusters) {
    std::vector<Complex> values;
    for (int idx : cluster) values.push_back(roots[idx]);
    if (!near_crossing_admissible(values, opt.epsilon)) admissible = false;
  }
  if (admissible) return build_forms_near_crossing(p, roots, clusters, opt.epsilon);
  return build_forms(p, tight, opt.epsilon);
}

FormTable build_form_table(const SchemeDef& scheme, int grid_n, const FormTableOptions& opt,
                           Exec exec) {
  if (grid_n < 1) raise(Errc::config_error, "form table grid must be positive");
  FormTable out;
  out.grid = TorusGrid{scheme.dim, {grid_n, scheme.dim == 2 ? grid_n : 1}};
  out.options = opt;
  const int total = out.grid.size();
  out.forms.resize(total);
  out.qe_min_per_point.assign(total, 0.0);
  std::vector<double> qd_min_per_point(total, 0.0);
  std::vector<std::unique_ptr<Error>> errors(total);

  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int idx = 0; idx < total; ++idx) {
    try {
      HermitianFormPair pair = forms_at_frequency(scheme, out.grid.theta(idx), opt);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ee(pair.qe, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ed(pair.qd, Eigen::EigenvaluesOnly);
      out.qe_min_per_point[idx] = ee.eigenvalues().minCoeff();
      qd_min_per_point[idx] = ed.eigenvalues().minCoeff();
      out.forms[idx] = std::move(pair);
    } catch (const Error& e) {
      errors[idx] = std::make_unique<Error>(e);
    }
  }
  for (const auto& e : errors)
    if (e) throw *e;

  out.qe_min = out.qe_min_per_point[0];
  out.qd_min = qd_min_per_point[0];
  for (int idx = 0; idx < total; ++idx) {
    if (out.qe_min_per_point[idx] < out.qe_min) {
      out.qe_min = out.qe_min_per_point[idx];
      out.argmin_qe = idx;
    }
    out.qd_min = std::min(out.qd_min, qd_min_per_point[idx]);
    out.regime_counts[static_cast<int>(out.forms[idx].regime)] += 1;
  }
  return out;
}

}  // namespace fdstab
