#pragma once

#include <functional>
#include <string>

namespace skinlab {

/// Formats a double with 12 significant digits ("%.12g"). All emitted
/// files use this so that output bytes are reproducible.
std::string fmt(double v);

/// Writes `contents` to `path` atomically (write to a sibling temp file,
/// then rename over the target). Throws skinlab::Error on I/O failure.
void atomic_write(const std::string& path, const std::string& contents);

/// Number of data-parallel workers: SKINLAB_THREADS if set and positive,
/// otherwise std::thread::hardware_concurrency().
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Work is split
/// into contiguous index ranges; results must be written to disjoint,
/// index-addressed storage so the outcome is scheduling-independent.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace skinlab
