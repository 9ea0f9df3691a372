#pragma once

#include <iosfwd>

#include "sdmimo/common.hpp"

namespace sdmimo {

// A finite signal set with an explicit bit labeling. Two flavours:
//  - separable (QAM family): `points` is the one-dimensional PAM alphabet
//    used on each real axis, stored real-valued, sorted ascending. The
//    complex constellation is the Cartesian product of the axis with itself.
//  - joint (PSK and friends): `points` are the complex symbols themselves,
//    decoded one complex dimension at a time.
// Labels are bit strings of length n_bits and must form a bijection with
// {0,1}^n_bits.
struct Constellation {
    std::vector<cplx> points;
    std::vector<std::vector<int>> labels;
    bool separable = false;
    int n_bits = 0;

    int size() const { return static_cast<int>(points.size()); }
    std::vector<double> real_points() const;  // separable only
    // average energy of one complex symbol (separable: two i.i.d. axes)
    double avg_symbol_energy() const;
    // bits carried by one complex symbol
    int bits_per_complex_symbol() const { return separable ? 2 * n_bits : n_bits; }
    int point_with_label(const std::vector<int>& bits) const;

    void validate() const;  // throws std::invalid_argument on broken invariants
};

// Binary-reflected Gray code of i with `bits` digits, MSB first.
std::vector<int> gray_label(int i, int bits);

// {-(K-1), ..., -1, 1, ..., K-1} PAM with Gray labeling, K a power of two.
Constellation gray_pam(int k);
// Unit-circle K-PSK with Gray labeling over the angular index.
Constellation gray_psk(int k);

// Text format (see README): `mode qam|psk`, a `points` block of "re im"
// lines, a `labels` block of bit strings, closed by `end`.
Constellation load_constellation(std::istream& in);
Constellation load_constellation_file(const std::string& path);
void save_constellation(const Constellation& c, std::ostream& out);

}  // namespace sdmimo
