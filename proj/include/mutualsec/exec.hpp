#pragma once

// Execution policy shared by the data-parallel kernels (subset enumeration,
// per-K scans, Monte Carlo replications, sweeps). Every kernel keeps a serial
// reference path; the parallel path must produce bit-identical results.

namespace mutualsec {

enum class Exec { serial, parallel };

// Number of OpenMP threads used by parallel kernels. Reads MUTUALSEC_THREADS
// on first use; falls back to the OpenMP default when unset or invalid.
int thread_count();

// Overrides the thread count for the rest of the process (0 restores the
// environment/default value).
void set_thread_count(int n);

}  // namespace mutualsec
