#include "sdmimo/model.hpp"

#include <cmath>

namespace sdmimo {

std::pair<Mat, Vec> complex_to_real(const CMat& h, const CVec& y) {
    if (h.rows() != y.size()) throw std::invalid_argument("complex_to_real: dimension mismatch");
    const int m = static_cast<int>(h.rows());
    const int n = static_cast<int>(h.cols());
    Mat hr(2 * m, 2 * n);
    hr.topLeftCorner(m, n) = h.real();
    hr.topRightCorner(m, n) = -h.imag();
    hr.bottomLeftCorner(m, n) = h.imag();
    hr.bottomRightCorner(m, n) = h.real();
    Vec yr(2 * m);
    yr.head(m) = y.real();
    yr.tail(m) = y.imag();
    return {hr, yr};
}

ExpansionStructure build_expansion(const Constellation& c, int n_complex, ExpansionMode mode) {
    if (n_complex < 1) throw std::invalid_argument("build_expansion: need at least one antenna");
    c.validate();
    const int k = c.size();
    ExpansionStructure e;
    if (mode == ExpansionMode::qam) {
        if (!c.separable)
            throw std::invalid_argument("build_expansion: qam mode needs a separable constellation");
        const int n = 2 * n_complex;  // one block per real axis
        e.layout = BlockLayout::uniform(k, n);
        e.coeff = Mat::Zero(n, n * k);
        auto s = c.real_points();
        for (int p = 0; p < n; ++p)
            for (int j = 0; j < k; ++j) e.coeff(p, p * k + j) = s[j];
        e.point_index.assign(n, {});
        for (int p = 0; p < n; ++p)
            for (int j = 0; j < k; ++j) e.point_index[p].push_back(j);
    } else {
        // joint complex symbols: rows 0..N-1 carry Re, rows N..2N-1 carry Im
        const int n = n_complex;
        e.layout = BlockLayout::uniform(k, n);
        e.coeff = Mat::Zero(2 * n, n * k);
        for (int p = 0; p < n; ++p) {
            for (int j = 0; j < k; ++j) {
                e.coeff(p, p * k + j) = c.points[j].real();
                e.coeff(n + p, p * k + j) = c.points[j].imag();
            }
        }
        e.point_index.assign(n, {});
        for (int p = 0; p < n; ++p)
            for (int j = 0; j < k; ++j) e.point_index[p].push_back(j);
    }
    const int blocks = e.layout.blocks();
    e.selection = Mat::Zero(blocks, e.layout.total());
    for (int p = 0; p < blocks; ++p)
        for (int i = e.layout.offsets[p]; i < e.layout.offsets[p + 1]; ++i) e.selection(p, i) = 1.0;
    return e;
}

std::vector<int> selector_to_bits(const VecI& u, const ExpansionStructure& expansion,
                                  const Constellation& c) {
    if (!valid_selector(u, expansion.layout))
        throw std::invalid_argument("selector_to_bits: invalid selector");
    auto choice = choices_from_selector(u, expansion.layout);
    std::vector<int> bits;
    bits.reserve(static_cast<size_t>(expansion.layout.blocks()) * c.n_bits);
    for (int p = 0; p < expansion.layout.blocks(); ++p) {
        int point = expansion.point_index.at(p).at(choice[p]);
        const auto& label = c.labels[point];
        bits.insert(bits.end(), label.begin(), label.end());
    }
    return bits;
}

SystemInstance make_instance(const CMat& h_complex, const CVec& y_complex, double snr,
                             const Constellation& c, ExpansionMode mode) {
    if (snr <= 0.0) throw std::invalid_argument("make_instance: snr must be positive");
    SystemInstance inst;
    inst.constellation = c;
    inst.qam_mode = (mode == ExpansionMode::qam);
    inst.n_complex = static_cast<int>(h_complex.cols());
    inst.m_complex = static_cast<int>(h_complex.rows());
    inst.snr = snr;
    inst.e_s_av = c.avg_symbol_energy();
    double scale = std::sqrt(snr / (inst.m_complex * inst.e_s_av));
    auto [hr, yr] = complex_to_real(scale * h_complex, y_complex);
    inst.channel = std::move(hr);
    inst.received = std::move(yr);
    return inst;
}

ExpansionStructure instance_expansion(const SystemInstance& inst) {
    if (inst.n_complex > 0) {
        ExpansionStructure e = build_expansion(
            inst.constellation, inst.n_complex,
            inst.qam_mode ? ExpansionMode::qam : ExpansionMode::psk);
        if (e.rows() != inst.real_dims())
            throw std::invalid_argument("instance_expansion: channel width mismatch");
        return e;
    }
    // synthetic real-only instance: one block per channel column
    if (!inst.constellation.separable)
        throw std::invalid_argument("instance_expansion: real-only instances need a separable alphabet");
    auto pts = inst.constellation.real_points();
    const int n = inst.real_dims();
    const int k = static_cast<int>(pts.size());
    ExpansionStructure e;
    e.layout = BlockLayout::uniform(k, n);
    e.coeff = Mat::Zero(n, n * k);
    e.selection = Mat::Zero(n, n * k);
    e.point_index.assign(static_cast<size_t>(n), {});
    for (int p = 0; p < n; ++p) {
        for (int j = 0; j < k; ++j) {
            e.coeff(p, p * k + j) = pts[static_cast<size_t>(j)];
            e.selection(p, p * k + j) = 1.0;
            e.point_index[static_cast<size_t>(p)].push_back(j);
        }
    }
    return e;
}

Vec transmitted_vector(const VecI& u, const ExpansionStructure& expansion) {
    if (!valid_selector(u, expansion.layout))
        throw std::invalid_argument("transmitted_vector: invalid selector");
    return expansion.symbol_vector(u);
}

}  // namespace sdmimo
