#include "fdstab/forms.hpp"

#include <cmath>

#include "fdstab/errors.hpp"

namespace fdstab {

const char* regime_name(FormRegime r) {
  switch (r) {
    case FormRegime::simple: return "simple";
    case FormRegime::multiple: return "multiple";
    case FormRegime::near_crossing: return "near_crossing";
    case FormRegime::degree2: return "degree2";
  }
  return "?";
}

namespace {

// Coefficient vector of q padded to length nu; applying q(T) to w^shift then
// reads off sum_i c_i w^(i+shift).
Eigen::VectorXcd padded(const Poly& q, int nu, int shift = 0) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nu);
  for (int i = 0; i + shift < nu; ++i) v[i + shift] = q.coeff(i);
  if (q.degree() + shift > nu - 1)
    raise(Errc::length_mismatch, "polynomial degree exceeds the window");
  return v;
}

// |sum_i v_i w_i|^2 as a Hermitian matrix: H(i,j) = conj(v_i) v_j.
Eigen::MatrixXcd rank1(const Eigen::VectorXcd& v) { return v.conjugate() * v.transpose(); }

void hermitize(Eigen::MatrixXcd& H) { H = 0.5 * (H + H.adjoint()).eval(); }

void check_epsilon(double epsilon, double hi) {
  if (!(epsilon > 0.0) || epsilon > hi)
    raise(Errc::bad_epsilon, "epsilon must lie in (0, " + std::to_string(hi) + "]");
}

}  // namespace

double HermitianFormPair::eval_qe(const Eigen::VectorXcd& w) const {
  return (w.adjoint() * qe * w)(0, 0).real();
}

double HermitianFormPair::eval_qd(const Eigen::VectorXcd& w) const {
  return (w.adjoint() * qd * w)(0, 0).real();
}

HermitianFormPair build_forms(const Poly& p, const std::vector<RootGroup>& groups,
                              double epsilon) {
  check_epsilon(epsilon, 0.25);
  int nu = 0;
  bool any_multiple = false;
  for (const RootGroup& g : groups) {
    nu += g.multiplicity;
    const double mod = std::abs(g.value);
    if (mod > 1.0 + 1e-10)
      raise(Errc::unstable_root, "root of modulus " + std::to_string(mod) + " outside the closed disk");
    if (g.multiplicity >= 2) {
      any_multiple = true;
      if (mod >= 1.0 - 1e-10)
        raise(Errc::boundary_multiple_root, "repeated root too close to the unit circle");
    }
  }
  if (nu < 1) raise(Errc::config_error, "empty root configuration");

  const LagrangeSystem sys = lagrange_and_aux(p, groups);
  HermitianFormPair out;
  out.nu = nu;
  out.regime = any_multiple ? FormRegime::multiple : FormRegime::simple;
  if (any_multiple) out.epsilon = epsilon;
  out.qe = Eigen::MatrixXcd::Zero(nu, nu);
  out.qd = Eigen::MatrixXcd::Zero(nu, nu);

  for (size_t k = 0; k < groups.size(); ++k) {
    const double mu = groups[k].multiplicity;
    const double gap = 1.0 - std::norm(groups[k].value);
    const Eigen::MatrixXcd principal = rank1(padded(sys.principal[k], nu));
    out.qe += mu * principal;
    out.qd += mu * gap * principal;
    for (size_t j = 1; j < static_cast<size_t>(groups[k].multiplicity); ++j) {
      // auxiliary weight eps^(mu-j) (1-|z|^2)^(2(mu-j))
      const double w = std::pow(epsilon, mu - double(j)) * std::pow(gap, 2.0 * (mu - double(j)));
      const Poly& q = sys.aux[k][j - 1];
      out.qe += w * rank1(padded(q, nu));
      out.qd += w * (rank1(padded(q, nu)) - rank1(padded(q, nu, 1)));
    }
  }
  hermitize(out.qe);
  hermitize(out.qd);
  return out;
}

HermitianFormPair build_forms_degree2(Complex a, Complex b, Complex c) {
  if (std::abs(a) < 1e-300) raise(Errc::hypothesis_violation, "leading coefficient vanishes");
  // root location check via the (numerically careful) quadratic formula
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  const Complex z1 = q / a;
  const Complex z2 = (std::abs(q) > 1e-300) ? c / q : Complex(0);
  for (Complex z : {z1, z2})
    if (std::abs(z) > 1.0 + 1e-10)
      raise(Errc::hypothesis_violation, "root outside the closed unit disk");
  if (std::abs(z1 - z2) <= 1e-10 && std::abs(z1) >= 1.0 - 1e-10)
    raise(Errc::hypothesis_violation, "double root too close to the unit circle");

  HermitianFormPair out;
  out.nu = 2;
  out.regime = FormRegime::degree2;
  out.qe = Eigen::MatrixXcd::Zero(2, 2);
  out.qd = Eigen::MatrixXcd::Zero(2, 2);
  const double na = std::norm(a), nc = std::norm(c);
  out.qe(0, 0) = na + nc;
  out.qe(1, 1) = 2.0 * na;
  out.qe(1, 0) = std::conj(a) * b;
  out.qe(0, 1) = std::conj(out.qe(1, 0));
  out.qd(0, 0) = na - nc;
  out.qd(1, 1) = na - nc;
  out.qd(1, 0) = std::conj(a) * b - std::conj(b) * c;
  out.qd(0, 1) = std::conj(out.qd(1, 0));
  return out;
}

bool near_crossing_admissible(const std::vector<Complex>& cluster, double epsilon) {
  const int m = static_cast<int>(cluster.size());
  if (m < 2) return false;
  if (!(epsilon > 0.0) || epsilon > 0.125) return false;
  std::vector<RootGroup> groups(m);
  for (int i = 0; i < m; ++i) groups[i] = {cluster[i], 1};
  for (int k = 0; k < m; ++k) {
    const double gap = 1.0 - std::norm(cluster[k]);
    if (gap <= 1e-6) return false;
    const std::vector<Complex> ak = hermite_expand(groups, k);
    for (int j = 1; j <= m - 1; ++j) {
      const double bound =
          std::pow(epsilon, m - j) * std::pow(gap, 2.0 * (m - j)) / (2.0 * (m - 1));
      if (std::norm(ak[j - 1]) > bound) return false;
    }
  }
  return true;
}

HermitianFormPair build_forms_near_crossing(const Poly& p, const std::vector<Complex>& roots,
                                            const std::vector<std::vector<int>>& clusters,
                                            double epsilon) {
  check_epsilon(epsilon, 0.125);
  const int nu = static_cast<int>(roots.size());
  const Complex a = Poly(p).trim(0.0).leading();
  for (Complex z : roots)
    if (std::abs(z) > 1.0 + 1e-10) raise(Errc::unstable_root, "root outside the closed disk");

  HermitianFormPair out;
  out.nu = nu;
  out.regime = FormRegime::near_crossing;
  out.epsilon = epsilon;
  out.qe = Eigen::MatrixXcd::Zero(nu, nu);
  out.qd = Eigen::MatrixXcd::Zero(nu, nu);

  // plain interpolation squares over all (distinct) roots
  for (int k = 0; k < nu; ++k) {
    std::vector<Complex> others;
    for (int j = 0; j < nu; ++j)
      if (j != k) others.push_back(roots[j]);
    const Eigen::MatrixXcd principal = rank1(padded(Poly::from_roots(a, others), nu));
    out.qe += principal;
    out.qd += (1.0 - std::norm(roots[k])) * principal;
  }

  // epsilon-weighted auxiliary terms per cluster member; these drop out of the
  // identity (telescoping) but restore uniform definiteness of q_e
  for (const std::vector<int>& cluster : clusters) {
    const int m = static_cast<int>(cluster.size());
    if (m < 2) raise(Errc::config_error, "near-crossing cluster needs at least two roots");
    std::vector<bool> inside(nu, false);
    for (int idx : cluster) inside[idx] = true;
    std::vector<Complex> outside;
    for (int j = 0; j < nu; ++j)
      if (!inside[j]) outside.push_back(roots[j]);
    for (int idx : cluster) {
      const Complex zk = roots[idx];
      const double gap = 1.0 - std::norm(zk);
      if (gap <= 1e-10)
        raise(Errc::boundary_multiple_root, "cluster member too close to the unit circle");
      for (int j = 1; j <= m - 1; ++j) {
        std::vector<Complex> rts(outside);
        rts.insert(rts.end(), j - 1, zk);
        const Poly q = Poly::from_roots(a, rts);
        const double w = std::pow(epsilon, m - j) * std::pow(gap, 2.0 * (m - j));
        out.qe += w * rank1(padded(q, nu));
        out.qd += w * (rank1(padded(q, nu)) - rank1(padded(q, nu, 1)));
      }
    }
  }
  hermitize(out.qe);
  hermitize(out.qd);
  return out;
}

double balance_residual(const Poly& p, const HermitianFormPair& pair,
                        const std::vector<Complex>& trajectory) {
  const int nu = pair.nu;
  if (static_cast<int>(trajectory.size()) < nu + 1)
    raise(Errc::length_mismatch, "trajectory too short for the balance window");
  if (Poly(p).trim(0.0).degree() != nu)
    raise(Errc::length_mismatch, "polynomial degree does not match the form window");
  const Poly dp = Poly(p).trim(0.0).derivative();

  auto apply = [&](const Poly& q, int base) {
    Complex acc(0);
    for (int i = 0; i <= q.degree(); ++i) acc += q.coeff(i) * trajectory[base + i];
    return acc;
  };
  // T P'(T) acts as sum_i c_i w^(i+1)
  Complex tpd(0);
  for (int i = 0; i <= dp.degree(); ++i) tpd += dp.coeff(i) * trajectory[i + 1];
  const Complex pv = apply(p, 0);

  Eigen::VectorXcd w0(nu), w1(nu);
  for (int i = 0; i < nu; ++i) {
    w0[i] = trajectory[i];
    w1[i] = trajectory[i + 1];
  }
  const double lhs = 2.0 * std::real(std::conj(tpd) * pv);
  const double rhs =
      double(nu) * std::norm(pv) + (pair.eval_qe(w1) - pair.eval_qe(w0)) + pair.eval_qd(w0);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

BalanceCertificate certify(const HermitianFormPair& pair) {
  BalanceCertificate cert;
  cert.regime = pair.regime;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ee(pair.qe);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ed(pair.qd);
  if (ee.info() != Eigen::Success || ed.info() != Eigen::Success)
    raise(Errc::hypothesis_violation, "eigenvalue iteration failed on a form matrix");
  cert.qe_min_eig = ee.eigenvalues().minCoeff();
  cert.qd_min_eig = ed.eigenvalues().minCoeff();
  cert.pass = cert.qe_min_eig > 0.0 && cert.qd_min_eig >= -1e-12;
  return cert;
}

}  // namespace fdstab
