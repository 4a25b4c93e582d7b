#pragma once

namespace dcesim {

/// Kernels with independent work items (mode pairs, seeds, sweep points) come
/// in two flavours: a serial reference loop and an OpenMP loop over the same
/// items. Both write each result to a fixed slot, so outputs are identical.
enum class Exec { serial, parallel };

}  // namespace dcesim
