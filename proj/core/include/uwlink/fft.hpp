// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "uwlink/common.hpp"

namespace uwlink::fft {

// Thin FFTW3 wrapper with per-thread plan caches. Plan creation is serialized
// internally (the FFTW planner is not thread-safe); execution is not.
//
// Conventions:
//   forward_raw:  X[k] = sum_n x[n] exp(-j 2 pi n k / N)
//   inverse_raw:  x[n] = (1/N) sum_k X[k] exp(+j 2 pi n k / N)
//   unitary variants scale both directions by 1/sqrt(N).

void forward_raw(std::span<cd> data);
void inverse_raw(std::span<cd> data);
void forward_unitary(std::span<cd> data);
void inverse_unitary(std::span<cd> data);

}  // namespace uwlink::fft
