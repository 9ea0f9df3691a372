#pragma once

#include <iosfwd>

#include "sdmimo/harness.hpp"

namespace sdmimo {

// Self-contained instance file: scalar header, inline constellation, then
// plain-text row-major blocks for H and y (golden test vectors).
void save_instance(const SystemInstance& inst, std::ostream& out);
SystemInstance load_instance(std::istream& in);
SystemInstance load_instance_file(const std::string& path);

// Plan files are flat `key = value` lines (TOML-style scalars; lists either
// bracketed or bare comma-separated). Keys: n_tx, m_rx, constellation,
// ebn0_db, trials, min_errors, methods, seed, m_rand, lll_delta, serial,
// tol_gap, tol_feas, max_iter.
SimPlan load_plan(std::istream& in, const std::string& base_dir = "");
SimPlan load_plan_file(const std::string& path);

}  // namespace sdmimo
