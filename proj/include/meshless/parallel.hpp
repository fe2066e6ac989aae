#pragma once

namespace meshless {

/// Number of OpenMP threads kernels will use (1 when built without OpenMP).
int max_threads();

/// Caps kernel parallelism. n <= 0 leaves the runtime default.
void set_max_threads(int n);

/// Applies MESHLESS_GROWTH_THREADS when set; returns the resulting cap.
int configure_threads_from_env();

}  // namespace meshless
