#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fdstab/exec.hpp"
#include "fdstab/grid.hpp"
#include "fdstab/poly.hpp"

namespace fdstab {

// One stencil coefficient: time level sigma in [0, s+1], spatial offset
// (length dim, axis 1 first), real value.
struct InteriorCoeff {
  int sigma = 0;
  std::vector<int> offset;
  double value = 0.0;
};

// One boundary-operator coefficient: the equation attached to boundary cell
// j1 in [1-r1, 0] couples, at time level sigma, the interior value at
// (1 + l1, j' + l') with l1 in [0, q1].
struct BoundaryCoeff {
  int sigma = 0;
  int j1 = 0;
  std::vector<int> offset;
  double value = 0.0;
};

// A multistep finite difference scheme
//   sum_sigma Q_sigma u^(n+sigma) = 0  (interior),
// boundary rows u_j + sum_sigma B_{j1,sigma} u at the trace = g.
struct SchemeDef {
  std::string name;
  int dim = 1;
  int s = 0;                     // s+2 time levels, sigma = 0..s+1
  std::vector<int> r, p;         // stencil extents per axis
  int q1 = 0;                    // boundary-operator reach into the interior
  std::vector<int> qprime;       // transverse boundary extents (dim-1 entries)
  std::vector<double> lambda;    // dt / dx_k per axis
  std::vector<InteriorCoeff> interior;
  std::vector<BoundaryCoeff> boundary;

  // Structured text loader; strict, unknown keys are rejected. Calls validate.
  static SchemeDef load(const std::string& path);
  static SchemeDef parse(const std::string& text, const std::string& origin = "<string>");

  // Shape/range checks plus the symbol hypotheses that can be decided at load
  // time (tight extents, Q_{s+1} nonvanishing on a sampled grid).
  void validate() const;

  bool is_explicit() const;            // Q_{s+1} is a multiple of the identity
  double leading_coefficient() const;  // that multiple (explicit schemes only)

  // Q^_sigma(theta) = sum_l a_{l,sigma} exp(i l . theta)
  Complex symbol(int sigma, const std::vector<double>& theta) const;
  // z |-> sum_sigma Q^_sigma(theta) z^sigma
  Poly dispersion_poly(const std::vector<double>& theta) const;
  // a_{l1}(z, eta) = sum_sigma z^sigma sum_{l'} a_{(l1,l'),sigma} exp(i l'. eta)
  Poly edge_symbol(int l1, const std::vector<double>& eta) const;

  // Companion-form amplification matrix of size (s+1); the state ordering is
  // (v^(n+s), ..., v^n). Raises CharacteristicSymbol when Q^_{s+1} ~ 0.
  Eigen::MatrixXcd amplification(const std::vector<double>& theta) const;
};

// --- frequency-side scans ------------------------------------------------

struct PowerBoundScan {
  double max_norm = 0.0;
  int argmax_index = 0;        // lattice index of the maximizing frequency
  bool capped = false;         // some power exceeded the growth cap
  std::vector<double> per_point;
};
// max over the lattice and over 1 <= n <= n_max of ||A(theta)^n||_2, with an
// early exit once a point's powers exceed 1e12 (reported via `capped`).
PowerBoundScan power_bound_scan(const SchemeDef& scheme, int grid_n, int n_max,
                                Exec exec = Exec::parallel);

struct GridPointRoots {
  std::vector<RootGroup> groups;
  double min_separation = 0.0;   // over distinct group centroids
  double max_modulus = 0.0;
  bool interior_multiple = false;
  bool boundary_cluster = false;  // cluster of size >= 2 too close to the circle
};

struct Crossing {
  std::vector<double> theta;
  std::vector<RootGroup> groups;
};

struct RootClassification {
  TorusGrid grid;
  double cluster_radius = 0.0;
  std::vector<GridPointRoots> points;
  std::vector<Crossing> crossings;   // refined locations, deduplicated
  double max_root_modulus = 0.0;
  bool pass = false;  // all roots in the closed disk, circle roots simple
};

// Classifies the dispersion roots over a frequency grid and hunts crossings:
// grid cells around separation minima are refined by interval subdivision
// until the minimizer is located to about 1e-6.
RootClassification classify_roots(const SchemeDef& scheme, int grid_n,
                                   double cluster_radius, Exec exec = Exec::parallel);

struct EdgeSymbolReport {
  std::vector<double> eta;
  // max root modulus of a_{-r1}, a_{p1} and of their z-derivatives
  double low = 0.0, high = 0.0, dlow = 0.0, dhigh = 0.0;
};

struct EdgeSymbolAudit {
  std::vector<EdgeSymbolReport> per_eta;
  double worst_modulus = 0.0;
  bool pass = false;  // all roots strictly inside the unit disk
};

// Checks that both edge symbols have z-degree >= 1 (DegenerateEdgeSymbol
// otherwise) and that their roots stay strictly inside the unit disk, for
// every eta on the transverse grid (a single empty eta in dimension 1).
EdgeSymbolAudit audit_edge_symbols(const SchemeDef& scheme, int eta_grid_n = 64);

// Roots of d/dz of the dispersion polynomial at one frequency.
std::vector<Complex> derivative_dispersion_roots(const SchemeDef& scheme,
                                                 const std::vector<double>& theta);

}  // namespace fdstab
