#pragma once

namespace fdstab {

// Execution mode for scan kernels. Every parallel kernel stores per-index
// results and reduces them in index order, so both modes produce bit-identical
// output; the serial mode doubles as the reference implementation in tests and
// benchmarks.
enum class Exec { serial, parallel };

}  // namespace fdstab
