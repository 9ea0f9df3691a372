#pragma once

#include "sdmimo/model.hpp"
#include "sdmimo/result.hpp"

namespace sdmimo {

// Guard on the exhaustive search: product of block sizes must stay below 2^24.
constexpr long kExhaustiveGuard = 1L << 24;

// Global minimizer of ||y - H S u||^2 over valid selectors by depth-first
// enumeration; ties resolved toward the lowest candidate indices.
DecodeResult exhaustive_ml(const Mat& channel, const Vec& received,
                           const ExpansionStructure& expansion);
inline DecodeResult exhaustive_ml(const SystemInstance& inst, const ExpansionStructure& e) {
    return exhaustive_ml(inst.channel, inst.received, e);
}

// Exact ML by Schnorr-Euchner enumeration: per-block candidate ordering by
// partial-distance increment, depth-first with radius pruning. Blocks of one
// real dimension (separable alphabets) or two rows (joint complex symbols)
// are handled uniformly. Falls back to exhaustive search when the channel is
// rank deficient.
DecodeResult sphere_decode(const Mat& channel, const Vec& received,
                           const ExpansionStructure& expansion,
                           double initial_radius = std::numeric_limits<double>::infinity());
inline DecodeResult sphere_decode(const SystemInstance& inst, const ExpansionStructure& e,
                                  double radius = std::numeric_limits<double>::infinity()) {
    return sphere_decode(inst.channel, inst.received, e, radius);
}

// Componentwise nearest candidate to the pseudo-inverse solution.
DecodeResult zero_forcing(const SystemInstance& inst, const ExpansionStructure& expansion);

}  // namespace sdmimo
