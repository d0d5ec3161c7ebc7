#pragma once

// Flat key=value configuration with one [section] per command. Values read
// by a command are tracked so that misspelled keys surface as usage errors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvcorr::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Section {
 public:
  Section() = default;
  explicit Section(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  long long get_long(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Throws UsageError naming any key that was set but never read.
  void reject_unused() const;

 private:
  const std::string* find(const std::string& key) const;

  std::string name_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// Reads [section] blocks of key = value lines. Lines starting with # or ; are comments.
std::map<std::string, Section> load_config(const std::filesystem::path& path);

/// Applies "key=value" or "section.key=value" to `active`.
void apply_override(Section& active, const std::string& assignment);

}  // namespace mvcorr::cli
