#ifndef NSD_CONFIG_HPP
#define NSD_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace nsd {

// Flat key=value run configuration. Serialization is canonical: keys come
// out sorted, one per line, so resolved configs diff cleanly across runs.
class RunConfig {
 public:
  static RunConfig parse_text(const std::string& text,
                              const std::set<std::string>& known_keys);
  static RunConfig parse_file(const std::string& path,
                              const std::set<std::string>& known_keys);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_u64(const std::string& key, std::uint64_t value);
  void set_bool(const std::string& key, bool value);

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // Overlays every entry of `other` on top of this config.
  void merge(const RunConfig& other);

  std::string serialize() const;
  void write_file(const std::string& path) const;

  bool operator==(const RunConfig& other) const { return kv_ == other.kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace nsd

#endif  // NSD_CONFIG_HPP
