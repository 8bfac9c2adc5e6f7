// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_PARALLEL_HPP
#define HELM_PARALLEL_HPP

#include <functional>

namespace helm {

/// Worker count: HELM_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace helm

#endif  // HELM_PARALLEL_HPP
