#pragma once

namespace polsar {

// Caps the OpenMP worker pool used by every kernel. n < 1 restores the
// runtime default. Kernel outputs do not depend on this value.
void set_thread_count(int n);
int thread_count();

// Reads POLSAR_THREADS; returns 0 if unset or unparsable.
int thread_count_from_env();

} // namespace polsar
