#pragma once

namespace dfn {

// Selects the serial reference loop or the OpenMP loop for data-parallel kernels.
// Both produce bit-identical results.
enum class Execution { Serial, Parallel };

}  // namespace dfn
