#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetcache.h"

namespace hcli {

struct CliError : std::runtime_error {
  int exit_code;
  CliError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
};

inline int exit_code_for(hc_status st) {
  switch (st) {
    case HC_OK: return 0;
    case HC_ERR_VALIDATION:
    case HC_ERR_INVALID_ARGUMENT:
    case HC_ERR_IO: return 2;
    case HC_ERR_NUMERIC:
    case HC_ERR_UNKNOWN: return 3;
  }
  return 3;
}

inline void check(hc_status st, const std::string& context) {
  if (st != HC_OK) {
    throw CliError(exit_code_for(st), context + ": " + hc_status_name(st) + ": " + hc_last_error());
  }
}

// Shortest decimal form that parses back to the same double; keeps CSV and
// JSON output byte-stable across runs. Integers print plainly.
inline std::string format_double(double v) {
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw CliError(2, "cannot parse numeric list entry '" + tok + "'");
    }
  }
  return out;
}

// RAII over the opaque C handles.
struct ScenarioHandle {
  hc_scenario* ptr = nullptr;
  ScenarioHandle() = default;
  explicit ScenarioHandle(hc_scenario* p) : ptr(p) {}
  ScenarioHandle(ScenarioHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  ScenarioHandle& operator=(ScenarioHandle&& o) noexcept {
    if (this != &o) {
      hc_scenario_free(ptr);
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  ScenarioHandle(const ScenarioHandle&) = delete;
  ScenarioHandle& operator=(const ScenarioHandle&) = delete;
  ~ScenarioHandle() { hc_scenario_free(ptr); }

  static ScenarioHandle load(const std::string& path) {
    hc_scenario* p = nullptr;
    check(hc_scenario_load(path.c_str(), &p), "loading scenario '" + path + "'");
    return ScenarioHandle(p);
  }
  ScenarioHandle clone() const {
    hc_scenario* p = nullptr;
    check(hc_scenario_clone(ptr, &p), "cloning scenario");
    return ScenarioHandle(p);
  }
  void set(const std::string& key, double value) {
    check(hc_scenario_set(ptr, key.c_str(), value), "setting scenario key '" + key + "'");
  }
  double get(const std::string& key) const {
    double v = 0;
    check(hc_scenario_get(ptr, key.c_str(), &v), "reading scenario key '" + key + "'");
    return v;
  }
  std::string hash() const {
    char buf[17];
    check(hc_scenario_hash(ptr, buf), "hashing scenario");
    return buf;
  }
  std::vector<double> cache() const {
    std::size_t len = 0;
    check(hc_scenario_get_cache(ptr, nullptr, 0, &len), "reading cache vector");
    std::vector<double> t(len);
    check(hc_scenario_get_cache(ptr, t.data(), t.size(), &len), "reading cache vector");
    return t;
  }
};

struct ReportHandle {
  hc_report* ptr = nullptr;
  explicit ReportHandle(hc_report* p = nullptr) : ptr(p) {}
  ReportHandle(ReportHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  ReportHandle& operator=(ReportHandle&& o) noexcept {
    if (this != &o) {
      hc_report_free(ptr);
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  ReportHandle(const ReportHandle&) = delete;
  ReportHandle& operator=(const ReportHandle&) = delete;
  ~ReportHandle() { hc_report_free(ptr); }
};

struct OptHandle {
  hc_opt_result* ptr = nullptr;
  explicit OptHandle(hc_opt_result* p = nullptr) : ptr(p) {}
  OptHandle(OptHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  OptHandle& operator=(OptHandle&& o) noexcept {
    if (this != &o) {
      hc_opt_result_free(ptr);
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  OptHandle(const OptHandle&) = delete;
  OptHandle& operator=(const OptHandle&) = delete;
  ~OptHandle() { hc_opt_result_free(ptr); }
};

// Flat key=value documents (plan files share the scenario syntax).
inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(2, path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::string dirname_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

}  // namespace hcli
