#include "fdstab/errors.hpp"

namespace fdstab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::zero_polynomial: return "ZeroPolynomial";
    case Errc::cluster_ambiguity: return "ClusterAmbiguity";
    case Errc::degenerate_basis: return "DegenerateBasis";
    case Errc::unstable_root: return "UnstableRoot";
    case Errc::boundary_multiple_root: return "BoundaryMultipleRoot";
    case Errc::bad_epsilon: return "BadEpsilon";
    case Errc::hypothesis_violation: return "HypothesisViolation";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::characteristic_symbol: return "CharacteristicSymbol";
    case Errc::degenerate_edge_symbol: return "DegenerateEdgeSymbol";
    case Errc::edge_symbol_vanishes: return "EdgeSymbolVanishes";
    case Errc::singular_step: return "SingularStep";
    case Errc::truncation_breach: return "TruncationBreach";
    case Errc::wrong_time_levels: return "WrongTimeLevels";
    case Errc::zero_window: return "ZeroWindow";
    case Errc::empty_run: return "EmptyRun";
    case Errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

bool errc_is_hypothesis(Errc c) {
  switch (c) {
    case Errc::config_error:
    case Errc::length_mismatch:
    case Errc::wrong_time_levels:
    case Errc::zero_window:
    case Errc::empty_run:
      return false;
    default:
      return true;
  }
}

void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace fdstab
