#include "hetcache/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hetcache {

std::string format_double(double v) {
  // Integers print plainly, everything else in the shortest round-trip form.
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

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw IoError("scenario key '" + key + "' has a non-numeric value: '" + value + "'");
  }
}

std::vector<double> parse_vector(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    std::stringstream inner(item);
    std::string tok;
    while (inner >> tok) out.push_back(parse_number(key, tok));
  }
  if (out.empty()) throw IoError("scenario key '" + key + "' has an empty vector value");
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("scenario line " + std::to_string(lineno) + " is not 'key = value': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw IoError("scenario line " + std::to_string(lineno) + " has an empty key");
    if (!kv.emplace(key, value).second) throw IoError("duplicate scenario key '" + key + "'");
  }

  static const char* known[] = {"lambda0", "lambda1", "lambda_u", "n0",    "n1",
                                "wm_hz",   "ws_hz",   "alpha0",   "alpha1", "rc_m",
                                "f",       "gamma",   "c",        "t"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw IoError("unknown scenario key '" + key + "'");
  }
  auto need = [&kv](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(std::string("missing scenario key '") + key + "'");
    return it->second;
  };
  auto num = [&](const char* key) { return parse_number(key, need(key)); };
  auto integer = [&](const char* key) {
    const double v = num(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw IoError(std::string("scenario key '") + key + "' must be an integer");
    return i;
  };

  Scenario s;
  s.config.lambda0 = num("lambda0");
  s.config.lambda1 = num("lambda1");
  s.config.lambda_u = num("lambda_u");
  s.config.n0 = integer("n0");
  s.config.n1 = integer("n1");
  s.config.wm_hz = num("wm_hz");
  s.config.ws_hz = num("ws_hz");
  s.config.alpha0 = num("alpha0");
  s.config.alpha1 = num("alpha1");
  s.config.rc_m = num("rc_m");

  const int f = integer("f");
  const double gamma = num("gamma");
  if (f < 1) throw IoError("scenario key 'f' must be >= 1");
  if (gamma < 0) throw IoError("scenario key 'gamma' must be >= 0");
  s.catalog = make_zipf_catalog(f, gamma);

  const int c = integer("c");
  s.cache_capacity = c;
  if (auto it = kv.find("t"); it != kv.end()) {
    CacheDistribution cache;
    cache.capacity = c;
    cache.t = parse_vector("t", it->second);
    if (static_cast<int>(cache.t.size()) != f) {
      throw IoError("scenario key 't' must list exactly f entries");
    }
    s.cache = std::move(cache);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "lambda0 = " << format_double(s.config.lambda0) << "\n";
  out << "lambda1 = " << format_double(s.config.lambda1) << "\n";
  out << "lambda_u = " << format_double(s.config.lambda_u) << "\n";
  out << "n0 = " << s.config.n0 << "\n";
  out << "n1 = " << s.config.n1 << "\n";
  out << "wm_hz = " << format_double(s.config.wm_hz) << "\n";
  out << "ws_hz = " << format_double(s.config.ws_hz) << "\n";
  out << "alpha0 = " << format_double(s.config.alpha0) << "\n";
  out << "alpha1 = " << format_double(s.config.alpha1) << "\n";
  out << "rc_m = " << format_double(s.config.rc_m) << "\n";
  out << "f = " << s.catalog.files << "\n";
  out << "gamma = " << format_double(s.catalog.gamma) << "\n";
  out << "c = " << s.cache_capacity << "\n";
  if (s.cache) {
    out << "t = ";
    for (std::size_t i = 0; i < s.cache->t.size(); ++i) {
      if (i) out << ",";
      out << format_double(s.cache->t[i]);
    }
    out << "\n";
  }
  return out.str();
}

std::string scenario_hash(const Scenario& scenario) {
  const std::string text = serialize_scenario(scenario);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hetcache
