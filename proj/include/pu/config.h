#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pu {

// Flat key = value configuration for one CLI command. Precedence is
// defaults < config file < command-line overrides; unknown keys are
// rejected, and the fully resolved map is echoed into every output file.
class RunConfig {
 public:
  static RunConfig with_defaults(const std::string& command);
  static const std::map<std::string, std::string>& defaults_for(const std::string& command);

  const std::string& command() const { return command_; }

  // "key = value" lines, '#' comments, blank lines ignored
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  const std::string& get_str(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma-separated
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

}  // namespace pu
