#pragma once

namespace cvsense {

/// Selects the serial reference loop or the OpenMP loop of a kernel.
/// Both produce bit-identical results: work is split into fixed blocks
/// with their own RNG streams and reduced in block order.
enum class Execution { serial, parallel };

/// Threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads();

/// Applies the CVSENSE_THREADS environment variable, if set, to OpenMP.
void configure_threads_from_env();

}  // namespace cvsense
