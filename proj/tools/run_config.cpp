#include "run_config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>

#include "mvcorr/tensor_io.hpp"

namespace mvcorr::cli {

namespace {

template <typename T, typename Parse>
T parse_value(const Section& s, const std::string& key, const std::string& text, Parse parse) {
  std::size_t used = 0;
  T value{};
  try {
    value = parse(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw UsageError("[" + s.name() + "] " + key + ": cannot parse '" + text + "'");
  return value;
}

}  // namespace

const std::string* Section::find(const std::string& key) const {
  used_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string Section::get_string(const std::string& key, const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

std::string Section::require_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v || v->empty()) throw UsageError("[" + name_ + "] missing required key '" + key + "'");
  return *v;
}

int Section::get_int(const std::string& key, int fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  return parse_value<int>(*this, key, *v, [](const std::string& t, std::size_t* u) { return std::stoi(t, u); });
}

long long Section::get_long(const std::string& key, long long fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  return parse_value<long long>(*this, key, *v, [](const std::string& t, std::size_t* u) { return std::stoll(t, u); });
}

std::uint64_t Section::get_u64(const std::string& key, std::uint64_t fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  if (!v->empty() && (*v)[0] == '-') throw UsageError("[" + name_ + "] " + key + ": must be non-negative");
  return parse_value<std::uint64_t>(*this, key, *v,
                                    [](const std::string& t, std::size_t* u) { return std::stoull(t, u); });
}

double Section::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  return parse_value<double>(*this, key, *v, [](const std::string& t, std::size_t* u) { return std::stod(t, u); });
}

bool Section::get_bool(const std::string& key, bool fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  const std::string t = boost::algorithm::to_lower_copy(*v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw UsageError("[" + name_ + "] " + key + ": expected a boolean, got '" + *v + "'");
}

std::vector<std::string> Section::get_string_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<std::string> parts;
  boost::algorithm::split(parts, *v, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<int> Section::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) {
    used_.insert(key);
    return fallback;
  }
  std::vector<int> out;
  for (const std::string& p : get_string_list(key, {}))
    out.push_back(parse_value<int>(*this, key, p, [](const std::string& t, std::size_t* u) { return std::stoi(t, u); }));
  return out;
}

void Section::reject_unused() const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw UsageError("[" + name_ + "] unknown key(s): " + unknown);
}

std::map<std::string, Section> load_config(const std::filesystem::path& path) {
  if (std::ifstream probe(path); !probe) throw io::IoError(path, "cannot open config file");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError("config " + path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::map<std::string, Section> sections;
  for (const auto& [name, child] : tree) {
    if (child.empty()) throw UsageError("config " + path.string() + ": key '" + name + "' outside any [section]");
    Section s(name);
    for (const auto& [key, value] : child) s.set(key, value.data());
    sections.emplace(name, std::move(s));
  }
  return sections;
}

void apply_override(Section& active, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + assignment + "'");
  std::string key = boost::algorithm::trim_copy(assignment.substr(0, eq));
  const std::string value = boost::algorithm::trim_copy(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    if (key.substr(0, dot) != active.name())
      throw UsageError("--set " + key + ": section does not match command '" + active.name() + "'");
    key = key.substr(dot + 1);
  }
  active.set(key, value);
}

}  // namespace mvcorr::cli
