#pragma once

namespace rfreg {

// Thread count for the OpenMP kernels. 1 selects the serial reference path,
// which is also what --strict-determinism pins.
void set_num_threads(int n);
int num_threads();
bool parallel_enabled();

}  // namespace rfreg
