#pragma once

#include <string>

#include "hetcache/model.hpp"

namespace hetcache {

// Flat key/value scenario document. Keys are the CLI contract:
//   lambda0 lambda1 lambda_u n0 n1 wm_hz ws_hz alpha0 alpha1 rc_m f gamma c
// plus an optional `t` holding a comma- or space-separated vector.
// One `key = value` pair per line, `#` starts a comment.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Canonical serialization (fixed key order, shortest round-trip doubles).
// parse(serialize(s)) reproduces s exactly.
std::string serialize_scenario(const Scenario& scenario);

// FNV-1a over the canonical serialization, as a 16-hex-digit string; lets
// every CSV row name the exact inputs that produced it.
std::string scenario_hash(const Scenario& scenario);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace hetcache
