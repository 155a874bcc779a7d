#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fdstab/poly.hpp"

namespace fdstab {

enum class FormRegime { simple, multiple, near_crossing, degree2 };

const char* regime_name(FormRegime r);

// Pair of Hermitian forms (q_e, q_d) on the window vector (w^0, ..., w^(nu-1))
// entering the recurrence balance
//   2 Re( conj(T P'(T) v^n) * P(T) v^n )
//     = nu |P(T) v^n|^2 + (T - I) q_e(window) + q_d(window).
struct HermitianFormPair {
  Eigen::MatrixXcd qe;
  Eigen::MatrixXcd qd;
  int nu = 0;
  FormRegime regime = FormRegime::simple;
  std::optional<double> epsilon;  // set only when auxiliary terms were used

  double eval_qe(const Eigen::VectorXcd& w) const;
  double eval_qd(const Eigen::VectorXcd& w) const;
};

struct BalanceCertificate {
  double residual = 0.0;     // caller-measured max relative balance residual
  double qe_min_eig = 0.0;
  double qd_min_eig = 0.0;
  FormRegime regime = FormRegime::simple;
  bool pass = false;
};

// Forms for a polynomial whose roots are given as clustered groups. Groups of
// size one use the plain interpolation squares; any group of size >= 2
// switches the construction to the multiple-root variant with epsilon-weighted
// auxiliary terms. Validates the root location hypotheses:
//   UnstableRoot            some |z_k| > 1 + 1e-10
//   BoundaryMultipleRoot    mu_k >= 2 with |z_k| >= 1 - 1e-10
//   BadEpsilon              epsilon outside (0, 1/4]
HermitianFormPair build_forms(const Poly& p, const std::vector<RootGroup>& groups,
                              double epsilon);

// Explicit second-order forms for p = a X^2 + b X + c (no root extraction in
// the output, but the hypotheses are still checked through the roots):
//   q_e = 2|a|^2|x2|^2 + 2 Re(conj(a x2) b x1) + (|a|^2 + |c|^2)|x1|^2
//   q_d = (|a|^2-|c|^2)|x2|^2 + 2 Re(conj(a x2) b x1)
//         - 2 Re(conj(b x2) c x1) + (|a|^2-|c|^2)|x1|^2
// with the window ordered (x1, x2) = (w^0, w^1).
HermitianFormPair build_forms_degree2(Complex a, Complex b, Complex c);

// Forms for a polynomial with nu distinct roots of which some subsets sit in
// tight clusters (nearly crossing): the plain interpolation squares over all
// roots plus epsilon-weighted auxiliary terms per cluster member. The balance
// identity is exact for any cluster choice; dissipativity additionally needs
// the expansion coefficients of each cluster to be small, which
// near_crossing_admissible checks. Requires epsilon <= 1/8 and cluster
// members strictly inside the unit disk.
HermitianFormPair build_forms_near_crossing(const Poly& p, const std::vector<Complex>& roots,
                                            const std::vector<std::vector<int>>& clusters,
                                            double epsilon);

// Sufficient condition for q_d >= 0 under build_forms_near_crossing: for every
// cluster member, |a_{k,j}|^2 <= eps^(m-j) (1-|z_k|^2)^(2(m-j)) / (2(m-1)).
bool near_crossing_admissible(const std::vector<Complex>& cluster, double epsilon);

// Relative residual of the balance identity for the given windowed trajectory,
// evaluated at its first index. Needs at least nu+1 samples.
double balance_residual(const Poly& p, const HermitianFormPair& pair,
                        const std::vector<Complex>& trajectory);

// Eigenvalue certificate: q_e positive definite, q_d >= -1e-12.
BalanceCertificate certify(const HermitianFormPair& pair);

}  // namespace fdstab
