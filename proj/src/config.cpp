#include "nsd/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "nsd/errors.hpp"

namespace nsd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text,
                                const std::set<std::string>& known_keys) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) +
                        " is not key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key))
      throw FormatError("config line " + std::to_string(lineno) +
                        " has a malformed key");
    if (!known_keys.count(key)) throw FormatError("unknown config key: " + key);
    if (cfg.kv_.count(key)) throw FormatError("duplicate config key: " + key);
    cfg.kv_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path,
                                const std::set<std::string>& known_keys) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_text(text, known_keys);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ContractError("malformed config key: " + key);
  kv_[key] = value;
}

void RunConfig::set_double(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  set(key, buf);
}

void RunConfig::set_u64(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

void RunConfig::set_bool(const std::string& key, bool value) {
  set(key, value ? "true" : "false");
}

const std::string& RunConfig::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ContractError("missing config key: " + key);
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get_string(key);
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    throw FormatError("config key " + key + " is not a number: " + v);
  return d;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get_string(key);
  if (v.empty() || v[0] == '-')
    throw FormatError("config key " + key + " is not a non-negative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw FormatError("config key " + key + " is not a non-negative integer");
  return u;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  const std::uint64_t u = get_u64(key);
  if (u > std::numeric_limits<std::size_t>::max())
    throw FormatError("config key " + key + " is out of range");
  return static_cast<std::size_t>(u);
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw FormatError("config key " + key + " is not a boolean: " + v);
}

void RunConfig::merge(const RunConfig& other) {
  for (const auto& [k, v] : other.kv_) kv_[k] = v;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void RunConfig::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::string text = serialize();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write: " + path);
}

}  // namespace nsd
