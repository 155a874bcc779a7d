#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fdstab/exec.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

// Solution record of a half-space run on the truncated domain [j_min, J],
// one full spatial vector per time index 0 .. s + steps. Values outside the
// domain are treated as zero by every stencil.
struct HalfSpaceRun {
  int j_min = 0;
  int J = 0;
  int steps = 0;
  double dt = 0.0;
  double dx = 0.0;
  std::vector<Eigen::VectorXcd> history;
  double truncation_activity = 0.0;  // sup over time of |u| in the closure zone
};

// Data of one initial boundary value problem:
//   f         s+1 initial levels over [1-r1, J]
//   forcing   one interior vector over [1, J] per step
//   boundary  one ghost vector over [1-r1, 0] per step
struct IbvpData {
  std::vector<Eigen::VectorXcd> f;
  std::vector<Eigen::VectorXcd> forcing;
  std::vector<Eigen::VectorXcd> boundary;
};

// gamma-weighted norms of a run and the stability ratios built from them
struct EstimateReport {
  double interior_sum = 0.0;   // gamma/(gamma dt + 1) sum_n dt e^{-2 gamma n dt} |u^n|^2_dx
  double trace_sum = 0.0;      // sum_n dt e^{-2 gamma n dt} (trace window sum of |u|^2)
  double forcing_sum = 0.0;    // (gamma dt + 1)/gamma sum dt e^{-2 gamma n dt} |F|^2_dx
  double boundary_sum = 0.0;   // sum dt e^{-2 gamma n dt} |g|^2
  double initial_sum = 0.0;    // sum_sigma |f_sigma|^2_dx
  double sup_weighted = 0.0;   // sup_n e^{-2 gamma n dt} |u^n|^2_dx
  double strong_ratio = 0.0;   // (interior+trace)/(forcing+boundary), 0 on zero data
  double semigroup_ratio = 0.0;  // sup_weighted/(initial+forcing+boundary), 0 on zero data
};

// Half-space marching engine: direct problem with its boundary operator, the
// auxiliary problem that applies the interior scheme across the boundary into
// a left buffer, and the residual evaluators used to transfer data between
// them. Explicit schemes march directly; otherwise each step solves the
// banded new-level system with a sparse LU factorization.
class IbvpEngine {
 public:
  IbvpEngine(const SchemeDef& scheme, int J, double dt, Exec exec = Exec::parallel);

  const SchemeDef& scheme() const { return scheme_; }
  int J() const { return J_; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }

  // deterministic smooth test data: gaussian initial bumps, a travelling
  // forcing bump and a smooth boundary pulse, all supported away from the
  // truncation edge
  IbvpData smooth_data(int steps, bool with_initial, bool with_forcing,
                       bool with_boundary) const;

  // direct problem on [1-r1, J]; raises TruncationBreach when enforce_truncation
  // and the closure zone activity exceeds 1e-8 times the run scale
  HalfSpaceRun run_direct(const IbvpData& data, bool enforce_truncation = false) const;

  // auxiliary problem on [1-r1-buffer, J]: scheme rows everywhere, no boundary
  // operator; consumes f and forcing only (extended by zero onto the buffer)
  HalfSpaceRun run_aux(const IbvpData& data, int buffer) const;

  // row values on an (s+2)-level window (oldest first) over [j_min, J]:
  //   interior_rows   sum_sigma (Q_sigma u^sigma)_j - dt F_j     over [1, J]
  //   boundary_rows   u_{j1}^new + (B u)_{j1} - g_{j1}           over [1-r1, 0]
  Eigen::VectorXcd interior_rows(const std::vector<Eigen::VectorXcd>& window, int j_min,
                                 const Eigen::VectorXcd& forcing) const;
  Eigen::VectorXcd boundary_rows(const std::vector<Eigen::VectorXcd>& window, int j_min,
                                 const Eigen::VectorXcd& g) const;

  // gamma-weighted estimate ratios of a recorded run
  EstimateReport measure_estimates(const HalfSpaceRun& run, const IbvpData& data,
                                   double gamma) const;

  // solves the direct problem by superposition: the auxiliary run absorbs the
  // initial data and forcing, a zero-initial-data run with corrected data
  // absorbs the boundary; returns the three runs and the largest pointwise
  // difference against run_direct over the physical domain
  struct Superposition {
    HalfSpaceRun direct, aux, bvp;
    double max_diff = 0.0;
  };
  Superposition superpose(const IbvpData& data, int buffer) const;

 private:
  void advance(std::vector<Eigen::VectorXcd>& levels, int j_min,
               const Eigen::VectorXcd& forcing, const Eigen::VectorXcd* g) const;

  SchemeDef scheme_;
  int J_ = 0;
  double dt_ = 0.0;
  double dx_ = 0.0;
  Exec exec_ = Exec::parallel;
};

}  // namespace fdstab
