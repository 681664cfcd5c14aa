#pragma once

#include <cstdint>

namespace fedauc {

// Per-client clean statistics: rank-weighted label sum and class counts.
struct LocalStats {
    int64_t local_sum = 0;  // sum of r_i * y_i over the client's samples
    int64_t local_p = 0;
    int64_t local_n = 0;
};

// Perturbed statistics as sent to the server. local_n is always derived as
// (client sample count) - local_p, never noised independently.
struct NoisyLocalStats {
    double local_sum = 0.0;
    double local_p = 0.0;
    double local_n = 0.0;
};

}  // namespace fedauc
