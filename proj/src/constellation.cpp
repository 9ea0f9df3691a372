#include "sdmimo/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace sdmimo {

std::vector<double> Constellation::real_points() const {
    if (!separable) throw std::logic_error("real_points: constellation is not separable");
    std::vector<double> s(points.size());
    for (size_t i = 0; i < points.size(); ++i) s[i] = points[i].real();
    return s;
}

double Constellation::avg_symbol_energy() const {
    double acc = 0.0;
    for (const auto& p : points) acc += std::norm(p);
    acc /= static_cast<double>(points.size());
    // separable alphabets are used independently on both real axes
    return separable ? 2.0 * acc : acc;
}

int Constellation::point_with_label(const std::vector<int>& bits) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == bits) return static_cast<int>(i);
    throw std::invalid_argument("no constellation point carries the requested label");
}

void Constellation::validate() const {
    const int k = size();
    if (k < 2) throw std::invalid_argument("constellation needs at least 2 points");
    if ((k & (k - 1)) != 0) throw std::invalid_argument("constellation size must be a power of two");
    if (static_cast<int>(labels.size()) != k)
        throw std::invalid_argument("labels/points count mismatch");
    int bits = 0;
    while ((1 << bits) < k) ++bits;
    if (n_bits != bits) throw std::invalid_argument("n_bits inconsistent with constellation size");
    std::set<std::vector<int>> seen;
    for (const auto& l : labels) {
        if (static_cast<int>(l.size()) != n_bits)
            throw std::invalid_argument("label length mismatch");
        for (int b : l)
            if (b != 0 && b != 1) throw std::invalid_argument("labels must be binary");
        if (!seen.insert(l).second) throw std::invalid_argument("duplicate label");
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (std::abs(points[i] - points[j]) < 1e-12)
                throw std::invalid_argument("duplicate constellation points");
    if (separable) {
        for (const auto& p : points)
            if (p.imag() != 0.0)
                throw std::invalid_argument("separable constellation must be real-valued");
        for (int i = 0; i + 1 < k; ++i)
            if (points[i].real() >= points[i + 1].real())
                throw std::invalid_argument("separable points must be sorted ascending");
    }
}

std::vector<int> gray_label(int i, int bits) {
    int g = i ^ (i >> 1);
    std::vector<int> out(bits);
    for (int b = 0; b < bits; ++b) out[b] = (g >> (bits - 1 - b)) & 1;
    return out;
}

Constellation gray_pam(int k) {
    Constellation c;
    c.separable = true;
    while ((1 << c.n_bits) < k) ++c.n_bits;
    if ((1 << c.n_bits) != k) throw std::invalid_argument("gray_pam: size must be a power of two");
    for (int i = 0; i < k; ++i) {
        c.points.emplace_back(static_cast<double>(2 * i - (k - 1)), 0.0);
        c.labels.push_back(gray_label(i, c.n_bits));
    }
    c.validate();
    return c;
}

Constellation gray_psk(int k) {
    Constellation c;
    c.separable = false;
    while ((1 << c.n_bits) < k) ++c.n_bits;
    if ((1 << c.n_bits) != k) throw std::invalid_argument("gray_psk: size must be a power of two");
    for (int i = 0; i < k; ++i) {
        double theta = 2.0 * M_PI * i / k;
        c.points.emplace_back(std::cos(theta), std::sin(theta));
        c.labels.push_back(gray_label(i, c.n_bits));
    }
    c.validate();
    return c;
}

Constellation load_constellation(std::istream& in) {
    Constellation c;
    std::string line;
    enum { none, in_points, in_labels } section = none;
    bool saw_mode = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "mode") {
            std::string m;
            if (!(ls >> m) || (m != "qam" && m != "psk"))
                throw std::invalid_argument("constellation: mode must be qam or psk");
            c.separable = (m == "qam");
            saw_mode = true;
        } else if (tok == "points") {
            section = in_points;
        } else if (tok == "labels") {
            section = in_labels;
        } else if (tok == "end") {
            section = none;
            break;
        } else if (section == in_points) {
            double re = std::stod(tok), im;
            if (!(ls >> im)) throw std::invalid_argument("constellation: point needs re and im");
            c.points.emplace_back(re, im);
        } else if (section == in_labels) {
            std::vector<int> bits;
            for (char ch : tok) {
                if (ch != '0' && ch != '1')
                    throw std::invalid_argument("constellation: labels must be bit strings");
                bits.push_back(ch - '0');
            }
            c.labels.push_back(bits);
        } else {
            throw std::invalid_argument("constellation: unexpected token '" + tok + "'");
        }
    }
    if (!saw_mode) throw std::invalid_argument("constellation: missing mode line");
    int bits = 0;
    while ((1 << bits) < static_cast<int>(c.points.size())) ++bits;
    c.n_bits = bits;
    c.validate();
    return c;
}

Constellation load_constellation_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open constellation file: " + path);
    return load_constellation(f);
}

void save_constellation(const Constellation& c, std::ostream& out) {
    out << "mode " << (c.separable ? "qam" : "psk") << "\n";
    out << "points\n";
    out.precision(17);
    for (const auto& p : c.points) out << p.real() << " " << p.imag() << "\n";
    out << "labels\n";
    for (const auto& l : c.labels) {
        for (int b : l) out << b;
        out << "\n";
    }
    out << "end\n";
}

}  // namespace sdmimo
