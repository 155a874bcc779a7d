#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fdstab/exec.hpp"
#include "fdstab/frequency_forms.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

// Window of consecutive time levels of a periodic grid function, oldest first;
// levels[sigma] is u^(n0+sigma).
struct TorusState {
  TorusGrid grid;
  int n0 = 0;
  std::vector<Eigen::VectorXcd> levels;

  double sup_norm() const;
};

struct EnergySeriesRow {
  int step = 0;
  double energy = 0.0;
  double dissipation = 0.0;
  double sup_norm = 0.0;
  double scheme_residual = 0.0;  // residual of the step that produced this row
};

struct CauchyRun {
  std::vector<EnergySeriesRow> rows;  // one per time index, 0 .. steps
  double energy0 = 0.0;
  double drift_max = 0.0;       // max |E(n) - E(0)|
  double growth_max = 0.0;      // max E(n) - E(n-1) (positive means growth)
  double balance_max = 0.0;     // max |E(n+1) - E(n) + D(n)| / (1 + E(0))
  double residual_max = 0.0;    // max scheme residual over all steps
};

// Time stepper and spectral measurement kit for one scheme on one periodic
// lattice. Owns the DFT plans and the per-frequency form table; methods that
// loop over the lattice honor the Exec mode and reduce in index order, so the
// serial and parallel paths return identical bits.
class CauchyEngine {
 public:
  CauchyEngine(const SchemeDef& scheme, int grid_n, const FormTableOptions& opt = {},
               Exec exec = Exec::parallel);
  ~CauchyEngine();
  CauchyEngine(const CauchyEngine&) = delete;
  CauchyEngine& operator=(const CauchyEngine&) = delete;

  const SchemeDef& scheme() const { return scheme_; }
  const TorusGrid& grid() const { return grid_; }
  const FormTable& table() const { return table_; }

  // window of s+1 iid uniform complex levels, entries in the unit square
  TorusState random_state(std::uint64_t seed) const;

  // stencil application of Q_sigma with periodic wrap
  Eigen::VectorXcd apply_operator(int sigma, const Eigen::VectorXcd& u) const;
  // scheme residual sum_sigma Q_sigma u^(n+sigma) for a full (s+2)-level window
  Eigen::VectorXcd scheme_residual(const std::vector<Eigen::VectorXcd>& window) const;
  // multiplier form of the time-derivative operator applied to an (s+1)-level
  // window: sum_sigma (sigma+1) Q_(sigma+1) u^(n+sigma)
  Eigen::VectorXcd apply_derivative_operator(const std::vector<Eigen::VectorXcd>& window) const;

  // appends the unique level closing the scheme relation and drops the oldest;
  // explicit stencil when Q_(s+1) is a multiple of the identity, spectral
  // division otherwise; returns the residual of the produced step
  double advance(TorusState& state) const;

  struct Measure {
    double energy = 0.0;
    double dissipation = 0.0;
  };
  // spectral energy/dissipation of the window, weights 1/total over frequencies
  // so that sums of squares match mean squares of the physical levels
  Measure measure(const TorusState& state) const;

  struct LocalDensities {
    std::vector<double> energy, dissipation;
  };
  // two-level schemes only: per-cell densities built from stencil applications
  // whose lattice sums reproduce measure() exactly
  LocalDensities local_densities(const TorusState& state) const;

 private:
  void dft(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, int sign) const;

  SchemeDef scheme_;
  TorusGrid grid_;
  FormTableOptions options_;
  Exec exec_;
  FormTable table_;
  std::vector<Eigen::VectorXcd> symbols_;  // symbols_[sigma][kappa]
  bool explicit_ = false;
  double lead_ = 1.0;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  void* buf_in_ = nullptr;
  void* buf_out_ = nullptr;
};

CauchyRun run_cauchy(const SchemeDef& scheme, int grid_n, int steps, std::uint64_t seed,
                     const FormTableOptions& opt = {}, Exec exec = Exec::parallel);

}  // namespace fdstab
