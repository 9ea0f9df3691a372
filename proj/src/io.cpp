#include "sdmimo/io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sdmimo {

void save_instance(const SystemInstance& inst, std::ostream& out) {
    out.precision(17);
    out << "sdmimo-instance\n";
    out << "mode " << (inst.n_complex == 0 ? "real" : (inst.qam_mode ? "qam" : "psk")) << "\n";
    out << "n_complex " << inst.n_complex << "\n";
    out << "m_complex " << inst.m_complex << "\n";
    out << "snr " << inst.snr << "\n";
    out << "e_s_av " << inst.e_s_av << "\n";
    out << "constellation\n";
    save_constellation(inst.constellation, out);
    out << "H " << inst.channel.rows() << " " << inst.channel.cols() << "\n";
    for (int i = 0; i < inst.channel.rows(); ++i)
        for (int j = 0; j < inst.channel.cols(); ++j)
            out << inst.channel(i, j) << (j + 1 < inst.channel.cols() ? " " : "\n");
    out << "y " << inst.received.size() << "\n";
    for (int i = 0; i < inst.received.size(); ++i) out << inst.received[i] << "\n";
}

SystemInstance load_instance(std::istream& in) {
    std::string tok;
    in >> tok;
    if (tok != "sdmimo-instance") throw std::invalid_argument("instance: bad magic");
    SystemInstance inst;
    std::string mode;
    while (in >> tok) {
        if (tok == "mode") {
            in >> mode;
        } else if (tok == "n_complex") {
            in >> inst.n_complex;
        } else if (tok == "m_complex") {
            in >> inst.m_complex;
        } else if (tok == "snr") {
            in >> inst.snr;
        } else if (tok == "e_s_av") {
            in >> inst.e_s_av;
        } else if (tok == "constellation") {
            std::string rest;
            std::getline(in, rest);  // consume to end of line
            inst.constellation = load_constellation(in);
        } else if (tok == "H") {
            int r = 0, c = 0;
            in >> r >> c;
            inst.channel.resize(r, c);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) in >> inst.channel(i, j);
        } else if (tok == "y") {
            int n = 0;
            in >> n;
            inst.received.resize(n);
            for (int i = 0; i < n; ++i) in >> inst.received[i];
            break;  // y is the final block
        } else {
            throw std::invalid_argument("instance: unexpected token '" + tok + "'");
        }
    }
    if (!in) throw std::invalid_argument("instance: truncated input");
    if (mode == "qam") inst.qam_mode = true;
    else if (mode == "psk") inst.qam_mode = false;
    else if (mode == "real") { inst.qam_mode = true; inst.n_complex = 0; }
    else throw std::invalid_argument("instance: bad mode");
    if (inst.snr <= 0.0) throw std::invalid_argument("instance: snr must be positive");
    if (inst.channel.rows() != inst.received.size())
        throw std::invalid_argument("instance: H and y disagree");
    return inst;
}

SystemInstance load_instance_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open instance file: " + path);
    return load_instance(f);
}

namespace {

std::vector<std::string> split_list(std::string v) {
    // strip surrounding brackets, then split on commas/whitespace
    auto strip = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\"'");
        size_t b = s.find_last_not_of(" \t\"'");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    v = strip(v);
    if (!v.empty() && v.front() == '[') v = v.substr(1);
    if (!v.empty() && v.back() == ']') v.pop_back();
    std::vector<std::string> out;
    std::string item;
    std::istringstream s(v);
    while (std::getline(s, item, ',')) {
        item = strip(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

SimPlan load_plan(std::istream& in, const std::string& base_dir) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\"'");
            size_t b = s.find_last_not_of(" \t\"'\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    SimPlan plan;
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument("plan: missing key '" + k + "'");
        return it->second;
    };
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    };

    plan.n_complex = std::stoi(need("n_tx"));
    plan.m_complex = std::stoi(need("m_rx"));
    plan.constellation_path = need("constellation");
    std::string path = plan.constellation_path;
    if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
    plan.constellation = load_constellation_file(path);
    plan.mode = plan.constellation.separable ? ExpansionMode::qam : ExpansionMode::psk;
    for (const auto& v : split_list(need("ebn0_db"))) plan.ebn0_db.push_back(std::stod(v));
    plan.trials = std::stol(need("trials"));
    for (const auto& v : split_list(need("methods"))) plan.methods.push_back(parse_method_spec(v));
    plan.min_errors = std::stol(get("min_errors", "0"));
    plan.seed = std::stoull(get("seed", "1"));
    plan.m_rand = std::stoi(get("m_rand", "50"));
    plan.lll_delta = std::stod(get("lll_delta", "0.75"));
    plan.serial = get("serial", "false") == "true";
    plan.solver.tol_gap = std::stod(get("tol_gap", "1e-7"));
    plan.solver.tol_feas = std::stod(get("tol_feas", "1e-8"));
    plan.solver.max_iter = std::stoi(get("max_iter", "100"));
    return plan;
}

SimPlan load_plan_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open plan file: " + path);
    std::string dir;
    auto slash = path.rfind('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return load_plan(f, dir);
}

}  // namespace sdmimo
