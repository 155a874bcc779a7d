#pragma once

#include <complex>
#include <vector>

namespace fdstab {

using Complex = std::complex<double>;

// Dense univariate polynomial with complex coefficients, lowest degree first.
// Trailing (near-)zero coefficients are kept unless trim() is called, so a
// polynomial's nominal degree is coeffs.size() - 1.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}
  static Poly constant(Complex a) { return Poly({a}); }
  // leading * prod_k (X - roots[k]), multiplicities by repetition.
  static Poly from_roots(Complex leading, const std::vector<Complex>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero(double tol = 0.0) const;
  const std::vector<Complex>& coeffs() const { return c_; }
  Complex coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : Complex(0); }
  Complex leading() const { return c_.empty() ? Complex(0) : c_.back(); }

  Complex eval(Complex x) const;       // Horner
  Poly derivative() const;
  Poly& trim(double tol = 0.0);        // drop trailing coefficients with |c| <= tol

  Poly operator*(const Poly& rhs) const;
  Poly operator+(const Poly& rhs) const;
  Poly operator-(const Poly& rhs) const;
  Poly operator*(Complex a) const;

 private:
  std::vector<Complex> c_;
};

// A cluster of coincident (or numerically indistinguishable) roots.
struct RootGroup {
  Complex value = 0.0;   // cluster centroid
  int multiplicity = 0;  // cluster size
};

// All roots of p, unclustered, via balanced companion-matrix eigenvalues.
// Requires degree >= 1 after trimming; raises ZeroPolynomial otherwise.
std::vector<Complex> poly_roots(const Poly& p);

// Roots of p grouped by single-linkage clustering at distance cluster_radius,
// each group reported as (centroid, size) and sorted by (|z|, arg z).
// Raises ClusterAmbiguity when a linkage chain has diameter > 10 * radius.
std::vector<RootGroup> roots_clustered(const Poly& p, double cluster_radius);

// The interpolation-style polynomials attached to a root configuration:
//   P_k = a (X - z_k)^(mu_k - 1) prod_{j != k} (X - z_j)^(mu_j)
//   Q_{k,j} = a (X - z_k)^(j - 1) prod_{l != k} (X - z_l)^(mu_l),  j = 1..mu_k-1
// with a the leading coefficient of p. aux[k] lists Q_{k,1}..Q_{k,mu_k-1}
// (empty for simple roots); by convention Q_{k,mu_k} coincides with P_k.
struct LagrangeSystem {
  std::vector<Poly> principal;            // P_k per group
  std::vector<std::vector<Poly>> aux;     // Q_{k,j} per group
};
LagrangeSystem lagrange_and_aux(const Poly& p, const std::vector<RootGroup>& groups);

// Expansion of (X - z_k)^(m-1) over the basis
//   { 1, (X - z_k), ..., (X - z_k)^(m-2), prod_{j != k} (X - z_j) }
// for a cluster of m = sum mu_j roots: returns a_{k,1}..a_{k,m-1} with
//   (X - z_k)^(m-1) = prod_{j != k} (X - z_j) + sum_j a_{k,j} (X - z_k)^(j-1).
// The coefficients shrink to zero as the cluster coalesces.
std::vector<Complex> hermite_expand(const std::vector<RootGroup>& groups, int k);

}  // namespace fdstab
