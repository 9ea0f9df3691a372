#pragma once

#include <string>
#include <vector>

#include "sdmimo/common.hpp"

namespace sdmimo {

// Outcome of one detection attempt in the real-valued domain.
struct DecodeResult {
    VecI u;                     // selector (size 0 when no selector exists, e.g. out of region)
    Vec x;                      // decoded real symbol vector
    double objective = 0.0;     // ||y - H x||^2
    std::string method;         // provenance tag
    double seconds = 0.0;       // wall-clock decode time (filled by callers that measure)
    bool out_of_region = false; // reduced-model decision left the constellation
    bool flagged = false;       // condition guard tripped or solver fallback used
    long nodes = 0;             // sphere-decoder visited nodes
    int solver_iterations = 0;
    bool solver_failed = false;
    std::vector<int> point_choice;  // per block: selected candidate, -1 = out of region
};

}  // namespace sdmimo
