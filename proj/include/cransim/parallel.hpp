// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cransim {

// Every parallel kernel also runs serially; results are identical because
// each index writes only its own slot and consumes its own derived RNG stream.
enum class ExecMode { kSerial, kParallel };

template <typename F>
void parallel_for(int n, ExecMode mode, F&& fn) {
#ifdef _OPENMP
    if (mode == ExecMode::kParallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    (void)mode;
    for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace cransim
