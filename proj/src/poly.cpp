#include "fdstab/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "fdstab/errors.hpp"

namespace fdstab {

Poly Poly::from_roots(Complex leading, const std::vector<Complex>& roots) {
  std::vector<Complex> c{leading};
  for (Complex r : roots) {
    // multiply by (X - r)
    std::vector<Complex> next(c.size() + 1, Complex(0));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c.swap(next);
  }
  return Poly(std::move(c));
}

bool Poly::is_zero(double tol) const {
  for (Complex a : c_)
    if (std::abs(a) > tol) return false;
  return true;
}

Complex Poly::eval(Complex x) const {
  Complex acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({Complex(0)});
  std::vector<Complex> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
  return Poly(std::move(d));
}

Poly& Poly::trim(double tol) {
  while (c_.size() > 1 && std::abs(c_.back()) <= tol) c_.pop_back();
  return *this;
}

Poly Poly::operator*(const Poly& rhs) const {
  if (c_.empty() || rhs.c_.empty()) return Poly({Complex(0)});
  std::vector<Complex> out(c_.size() + rhs.c_.size() - 1, Complex(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += c_[i] * rhs.c_[j];
  return Poly(std::move(out));
}

Poly Poly::operator+(const Poly& rhs) const {
  std::vector<Complex> out(std::max(c_.size(), rhs.c_.size()), Complex(0));
  for (size_t i = 0; i < c_.size(); ++i) out[i] += c_[i];
  for (size_t i = 0; i < rhs.c_.size(); ++i) out[i] += rhs.c_[i];
  return Poly(std::move(out));
}

Poly Poly::operator-(const Poly& rhs) const { return *this + rhs * Complex(-1); }

Poly Poly::operator*(Complex a) const {
  std::vector<Complex> out(c_);
  for (Complex& x : out) x *= a;
  return Poly(std::move(out));
}

namespace {

// Parlett-Reinsch balancing adapted to a complex companion matrix: rescales
// rows/columns by powers of two until row and column norms roughly agree,
// which noticeably improves eigenvalue accuracy for lopsided coefficients.
void balance_companion(Eigen::MatrixXcd& C) {
  const int n = static_cast<int>(C.rows());
  const double gamma = 0.9;
  bool again = true;
  int guard = 0;
  while (again && guard++ < 40) {
    again = false;
    for (int i = 0; i < n; ++i) {
      double row = 0, col = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        row += std::abs(C(i, j));
        col += std::abs(C(j, i));
      }
      if (row == 0 || col == 0) continue;
      double row_scaled = row, col_scaled = col;
      double scale = 1.0;
      while (col_scaled < row_scaled / 2.0) {
        col_scaled *= 2.0;
        row_scaled /= 2.0;
        scale *= 2.0;
      }
      while (col_scaled > row_scaled * 2.0) {
        col_scaled /= 2.0;
        row_scaled *= 2.0;
        scale /= 2.0;
      }
      if (row_scaled + col_scaled < gamma * (row + col)) {
        again = true;
        C.row(i) /= scale;
        C.col(i) *= scale;
      }
    }
  }
}

// Quantized (|z|, arg z) sort key. Quantizing keeps the comparison a strict
// weak ordering while absorbing last-digit noise in computed roots.
std::pair<long long, long long> order_key(Complex z) {
  double a = std::arg(z);
  // put arg 0 first and keep the branch cut away from the positive real axis
  if (a < -1e-12) a += 2.0 * std::numbers::pi;
  return {std::llround(std::abs(z) * 1e12), std::llround(a * 1e12)};
}

}  // namespace

std::vector<Complex> poly_roots(const Poly& p) {
  Poly q = p;
  q.trim(0.0);
  if (q.is_zero()) raise(Errc::zero_polynomial, "cannot take roots of the zero polynomial");
  const int n = q.degree();
  if (n < 1) raise(Errc::zero_polynomial, "polynomial is a nonzero constant, no roots");
  if (n == 1) return {-q.coeff(0) / q.coeff(1)};

  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  const Complex lead = q.leading();
  for (int j = 0; j < n; ++j) C(0, j) = -q.coeff(n - 1 - j) / lead;
  for (int i = 1; i < n; ++i) C(i, i - 1) = Complex(1);
  balance_companion(C);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    raise(Errc::zero_polynomial, "eigenvalue iteration failed on the companion matrix");
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

std::vector<RootGroup> roots_clustered(const Poly& p, double cluster_radius) {
  if (cluster_radius <= 0) raise(Errc::config_error, "cluster radius must be positive");
  std::vector<Complex> roots = poly_roots(p);
  const int n = static_cast<int>(roots.size());

  // single linkage via union-find on all pairs within cluster_radius
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= cluster_radius) parent[find(i)] = find(j);

  std::vector<RootGroup> groups;
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[find(i)].push_back(i);
  for (const auto& m : members) {
    if (m.empty()) continue;
    Complex centroid(0);
    for (int i : m) centroid += roots[i];
    centroid /= double(m.size());
    double diameter = 0;
    for (size_t a = 0; a < m.size(); ++a)
      for (size_t b = a + 1; b < m.size(); ++b)
        diameter = std::max(diameter, std::abs(roots[m[a]] - roots[m[b]]));
    if (diameter > 10.0 * cluster_radius)
      raise(Errc::cluster_ambiguity, "linkage chain diameter exceeds 10x the cluster radius");
    groups.push_back({centroid, static_cast<int>(m.size())});
  }

  std::sort(groups.begin(), groups.end(), [](const RootGroup& a, const RootGroup& b) {
    return order_key(a.value) < order_key(b.value);
  });
  return groups;
}

LagrangeSystem lagrange_and_aux(const Poly& p, const std::vector<RootGroup>& groups) {
  if (groups.empty()) raise(Errc::config_error, "empty root group list");
  const Complex a = Poly(p).trim(0.0).leading();
  if (a == Complex(0)) raise(Errc::zero_polynomial, "leading coefficient vanishes");

  LagrangeSystem sys;
  const int K = static_cast<int>(groups.size());
  sys.principal.resize(K);
  sys.aux.resize(K);
  for (int k = 0; k < K; ++k) {
    // cross product over the other groups, full multiplicities
    Poly cross = Poly::constant(a);
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      std::vector<Complex> rep(groups[j].multiplicity, groups[j].value);
      cross = cross * Poly::from_roots(Complex(1), rep);
    }
    const Complex zk = groups[k].value;
    const int mu = groups[k].multiplicity;
    std::vector<Complex> self(mu - 1, zk);
    sys.principal[k] = cross * Poly::from_roots(Complex(1), self);
    for (int j = 1; j <= mu - 1; ++j) {
      std::vector<Complex> part(j - 1, zk);
      sys.aux[k].push_back(cross * Poly::from_roots(Complex(1), part));
    }
  }
  return sys;
}

std::vector<Complex> hermite_expand(const std::vector<RootGroup>& groups, int k) {
  if (k < 0 || k >= static_cast<int>(groups.size()))
    raise(Errc::config_error, "group index out of range");
  int m = 0;
  for (const RootGroup& g : groups) m += g.multiplicity;
  if (m < 2) raise(Errc::config_error, "expansion needs a cluster of at least two roots");

  const Complex zk = groups[k].value;
  // prod over the cluster excluding one copy of z_k, written in powers of
  // Y = X - z_k so the matching against the basis is a triangular read-off
  Poly prod = Poly::constant(Complex(1));
  for (size_t g = 0; g < groups.size(); ++g) {
    int rep = groups[g].multiplicity - (static_cast<int>(g) == k ? 1 : 0);
    // (X - z_g) = (Y + (z_k - z_g)) in the shifted variable
    std::vector<Complex> shifted(rep, groups[g].value - zk);
    prod = prod * Poly::from_roots(Complex(1), shifted);
  }
  // basis diagonal is identically 1; a vanishing leading term would mean the
  // triangular system lost its pivot
  if (std::abs(prod.leading() - Complex(1)) > 1e-9)
    raise(Errc::degenerate_basis, "triangular solve lost its unit pivot");

  // (X - z_k)^(m-1) is Y^(m-1); subtract the cross product and read off the
  // low-order coefficients in Y
  std::vector<Complex> out(m - 1, Complex(0));
  for (int j = 1; j <= m - 1; ++j) out[j - 1] = -prod.coeff(j - 1);
  return out;
}

}  // namespace fdstab
