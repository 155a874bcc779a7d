#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "fdstab/exec.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

// Boundary symbol values a_{l1}(z, eta) for l1 = -r1..p1, returned
// lowest offset first.  These are the coefficients of the one-step
// spatial recurrence satisfied by resolvent solutions on the half line.
std::vector<Complex> boundary_symbols(const SchemeDef& scheme, Complex z,
                                      const std::vector<double>& eta);

// Same layout for the z-derivative symbols z * d/dz a_{l1}(z, eta),
// which generate the companion matrix of the dissipation-side recurrence.
std::vector<Complex> boundary_symbols_zdz(const SchemeDef& scheme, Complex z,
                                          const std::vector<double>& eta);

// Eigenvalue split of a companion matrix relative to the unit circle.
struct SpectralSplit {
  Eigen::VectorXcd eigenvalues;
  int n_stable = 0;    // |mu| < 1 - delta
  int n_central = 0;   // within delta of the circle
  int n_unstable = 0;  // |mu| > 1 + delta
  double margin = 0.0; // min over eigenvalues of | |mu| - 1 |
  Eigen::MatrixXcd proj_stable;   // spectral projector onto the stable part
  Eigen::MatrixXcd proj_unstable; // complementary projector (incl. central)
  double eigenvector_cond = 0.0;  // ||V|| * ||V^-1|| of the eigenvector basis
  double projector_residual = 0.0; // max defect of P^2=P, sum=I, commutation
};

// Companion matrices of the boundary recurrences at a fixed (z, eta).
// L_mat propagates resolvent solutions (coefficients a_{l1}); M_mat
// propagates the derivative-symbol recurrence (coefficients z d/dz a_{l1}).
struct CompanionPair {
  Complex z;
  std::vector<double> eta;
  Eigen::MatrixXcd L_mat;
  Eigen::MatrixXcd M_mat;
  SpectralSplit L_split;
  SpectralSplit M_split;
};

// Builds both companion matrices and their spectral splits.  Requires the
// extreme symbols a_{p1} and z d/dz a_{p1} to be nonzero at (z, eta);
// otherwise raises edge_symbol_vanishes.  delta is the half-width of the
// central band used to classify eigenvalues.
CompanionPair companions(const SchemeDef& scheme, Complex z,
                         const std::vector<double>& eta, double delta = 1e-6);

// Minimum distance from the spectrum of M_mat to the unit circle over a
// family of probe points |z| >= 1.  Probes combine a deterministic ring at
// |z| = 1, a geometric approach |z| = 1 + 2^-k toward the circle, and
// n_samples random points with log-uniform modulus in (1, r0].
struct MarginScan {
  double min_margin = 0.0;
  Complex worst_z;
  std::vector<double> worst_eta;
  int samples = 0;
  double threshold = 0.0;
  bool pass = false; // min_margin > threshold
};

MarginScan central_margin_scan(const SchemeDef& scheme, int n_samples,
                               double r0, std::uint64_t seed,
                               double threshold = 1e-3, int eta_grid_n = 8,
                               Exec exec = Exec::serial);

// One evaluation of the trace-control ratio at fixed (z, eta).  w holds a
// finitely supported sequence, w[k] being the value at index origin + k.
// The numerator collects |w|^2 over the window [-r1-p1, p1_cut]; the
// denominator applies the boundary recurrences to w.  A zero window gives
// ratio 0; a vanishing denominator with a nonzero window is reported as a
// counterexample rather than raising.
struct TraceSample {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool counterexample = false;
};

TraceSample trace_ratio(const SchemeDef& scheme, Complex z,
                        const std::vector<double>& eta,
                        const std::vector<Complex>& w, int origin, int p1_cut);

// Monte Carlo sweep of trace_ratio over random (z, w) pairs: z with
// log-uniform modulus in (1, r0] and uniform argument, w complex Gaussian
// on [-r1-p1-20, p1_cut+20] normalized to unit l2 norm.  With a fixed seed
// the first n samples of a longer run coincide with a shorter run, so
// doubling n_samples can only grow max_ratio.
struct TraceScan {
  double max_ratio = 0.0;
  Complex worst_z;
  int samples = 0;
  int counterexamples = 0;
};

TraceScan trace_scan(const SchemeDef& scheme, int n_samples, int p1_cut,
                     double r0, std::uint64_t seed, Exec exec = Exec::serial);

} // namespace fdstab
