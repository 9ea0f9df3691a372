#pragma once

#include <utility>

#include "sdmimo/constellation.hpp"

namespace sdmimo {

// Zero-one expansion x = S u of a candidate vector over per-block candidate
// sets, together with the selection constraint A u = e_N. Block p contributes
// coeff-columns [offsets[p], offsets[p+1]) and exactly one of them is active.
struct ExpansionStructure {
    Mat coeff;                                 // S: rows = real dimensions, cols = total candidates
    Mat selection;                             // A: one row per block, 1 on the block's columns
    BlockLayout layout;                        // candidate counts per block
    std::vector<std::vector<int>> point_index; // per block: candidate -> constellation point (empty if not point-backed)

    int rows() const { return static_cast<int>(coeff.rows()); }
    int total() const { return layout.total(); }
    Vec symbol_vector(const VecI& u) const { return coeff * u.cast<double>(); }
};

// One detection problem in the real-valued domain. `channel` already carries
// the SNR prefactor, so downstream code sees plain y = H x + n.
struct SystemInstance {
    Mat channel;       // H, M x N
    Vec received;      // y, length M
    double snr = 0.0;  // linear SNR per receive antenna
    Constellation constellation;
    int n_complex = 0;  // transmit antennas (0 for synthetic real-only instances)
    int m_complex = 0;  // receive antennas
    double e_s_av = 0.0;
    bool qam_mode = true;  // separable expansion per real dimension

    int real_dims() const { return static_cast<int>(channel.cols()); }
};

// [ [Re H, -Im H], [Im H, Re H] ] and [Re y; Im y]: the unique block form with
// H_real * stack(x) = stack(H_complex * x) for every complex x.
std::pair<Mat, Vec> complex_to_real(const CMat& h, const CVec& y);

enum class ExpansionMode { qam, psk };

// S = I_N (x) [s_1..s_K] over real axes (qam) or stacked Re/Im of the complex
// alphabet per transmit antenna (psk); A = I_N (x) e_K^T.
ExpansionStructure build_expansion(const Constellation& c, int n_complex, ExpansionMode mode);

// Concatenated labels of the selected points.
std::vector<int> selector_to_bits(const VecI& u, const ExpansionStructure& expansion,
                                  const Constellation& c);

// Builds the real-domain instance from the complex channel model, folding
// sqrt(snr / (M Es_av)) into the channel matrix.
SystemInstance make_instance(const CMat& h_complex, const CVec& y_complex, double snr,
                             const Constellation& c, ExpansionMode mode);

// Expansion matching an instance. Instances with n_complex == 0 are synthetic
// real-domain problems: one block per channel column over the real alphabet.
ExpansionStructure instance_expansion(const SystemInstance& inst);

// Transmit-side helper used by the simulation harness: real symbol vector for
// a selector, in the layout matching build_expansion.
Vec transmitted_vector(const VecI& u, const ExpansionStructure& expansion);

}  // namespace sdmimo
