#pragma once

#include <array>
#include <vector>

#include "fdstab/exec.hpp"
#include "fdstab/forms.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

struct FormTableOptions {
  double epsilon = 0.125;        // auxiliary weight base
  double cluster_radius = 1e-6;  // exact-multiple detection radius
  double near_radius = 0.25;     // near-crossing linkage radius (s >= 2 only)
};

// Energy/dissipation form pair for one frequency, with the construction picked
// from the local root configuration of the dispersion polynomial:
//   s = 0   single root, plain interpolation square
//   s = 1   explicit second-order forms straight from the symbol coefficients
//   s >= 2  clustered roots (exact multiples), else near-crossing auxiliary
//           terms when a tight admissible cluster exists, else plain squares
HermitianFormPair forms_at_frequency(const SchemeDef& scheme, const std::vector<double>& theta,
                                     const FormTableOptions& opt = {});

// The same pair tabulated over a full frequency lattice with eigenvalue
// statistics. Raises the underlying hypothesis errors of the constructions.
struct FormTable {
  TorusGrid grid;
  FormTableOptions options;
  std::vector<HermitianFormPair> forms;  // one per lattice index
  std::vector<double> qe_min_per_point;  // lambda_min(q_e) per lattice index
  double qe_min = 0.0;                   // min over the lattice
  double qd_min = 0.0;
  int argmin_qe = 0;
  std::array<int, 4> regime_counts{};  // indexed by FormRegime order
};

FormTable build_form_table(const SchemeDef& scheme, int grid_n,
                           const FormTableOptions& opt = {}, Exec exec = Exec::parallel);

}  // namespace fdstab
