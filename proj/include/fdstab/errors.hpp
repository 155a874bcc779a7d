#pragma once

#include <stdexcept>
#include <string>

namespace fdstab {

// Failure identities used across the library. Each value names the condition
// that was violated; the CLI maps them onto its exit codes (config problems
// versus violated numerical hypotheses).
enum class Errc {
  // polynomial / clustering
  zero_polynomial,
  cluster_ambiguity,
  degenerate_basis,
  // form construction and certification
  unstable_root,
  boundary_multiple_root,
  bad_epsilon,
  hypothesis_violation,
  length_mismatch,
  // scheme symbols
  characteristic_symbol,
  degenerate_edge_symbol,
  edge_symbol_vanishes,
  // simulation
  singular_step,
  truncation_breach,
  wrong_time_levels,
  zero_window,
  empty_run,
  // input handling
  config_error,
};

const char* errc_name(Errc c);

// True for conditions that mean "the scheme violates a quantitative
// hypothesis" rather than "the input was malformed".
bool errc_is_hypothesis(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& msg);

}  // namespace fdstab
