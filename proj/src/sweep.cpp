#include "hdent/sweep.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdent {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    }
    config.set(section, key, trim(line.substr(eq + 1)));
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

std::optional<std::string> Config::get(const std::string& section,
                                       const std::string& key) const {
  if (auto s = sections_.find(section); s != sections_.end()) {
    if (auto k = s->second.find(key); k != s->second.end()) return k->second;
  }
  if (!section.empty()) {
    if (auto s = sections_.find(""); s != sections_.end()) {
      if (auto k = s->second.find(key); k != s->second.end()) return k->second;
    }
  }
  return std::nullopt;
}

std::optional<double> Config::get_double(const std::string& section,
                                         const std::string& key) const {
  const auto raw = get(section, key);
  if (!raw) return std::nullopt;
  return to_double(*raw);
}

std::optional<std::int64_t> Config::get_int(const std::string& section,
                                            const std::string& key) const {
  const auto raw = get(section, key);
  if (!raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument(*raw);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config " + key + ": not an integer: '" + *raw + "'");
  }
}

std::optional<std::uint64_t> Config::get_uint(const std::string& section,
                                              const std::string& key) const {
  const auto raw = get(section, key);
  if (!raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument(*raw);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config " + key + ": not an unsigned integer: '" + *raw +
                                "'");
  }
}

std::string Config::canonical() const {
  std::ostringstream out;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, value] : entries) {
      out << section << "." << key << "=" << value << "\n";
    }
  }
  return out.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string spec = trim(text);
  if (spec.empty()) throw std::invalid_argument("empty grid specification");
  if (spec.find(':') == std::string::npos) {
    std::vector<double> values;
    for (const auto& part : split(spec, ',')) values.push_back(to_double(trim(part)));
    return values;
  }
  auto parts = split(spec, ':');
  bool log_spaced = false;
  if (parts.size() == 4 && trim(parts[0]) == "log") {
    log_spaced = true;
    parts.erase(parts.begin());
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("grid '" + text + "': expected lo:hi:n or log:lo:hi:n");
  }
  const double lo = to_double(trim(parts[0]));
  const double hi = to_double(trim(parts[1]));
  const long long n = (long long)to_double(trim(parts[2]));
  if (n < 1) throw std::invalid_argument("grid '" + text + "': need n >= 1 points");
  if (log_spaced && !(lo > 0.0 && hi > 0.0)) {
    throw std::invalid_argument("grid '" + text + "': log spacing needs positive bounds");
  }
  std::vector<double> values;
  values.reserve(n);
  if (n == 1) {
    values.push_back(lo);
    return values;
  }
  for (long long i = 0; i < n; ++i) {
    const double t = double(i) / double(n - 1);
    values.push_back(log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return values;
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> values;
  for (double v : parse_grid(text)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) {
      throw std::invalid_argument("grid '" + text + "': expected integers");
    }
    values.push_back((int)r);
  }
  return values;
}

}  // namespace hdent
