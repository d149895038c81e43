#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hdent {

// Flat key-value configuration with [section] headers; '#' and ';' start
// comments. Keys are looked up in the named section first, then in the
// unnamed top section, so common settings (seed, out, ...) can sit at the
// top of a file.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& section, const std::string& key) const;

  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& section, const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& section,
                                        const std::string& key) const;

  // Sorted "section.key=value" lines; hashed into reports for provenance.
  std::string canonical() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::uint64_t fnv1a64(std::string_view text);

// Grid notation used by config values and flags:
//   "1,2.5,7"        explicit list
//   "lo:hi:n"        n linearly spaced points, endpoints included
//   "log:lo:hi:n"    n log-spaced points, endpoints included
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_grid(const std::string& text);

// Runs fn(0..count-1) on `workers` threads and returns results in index
// order regardless of completion order. fn must be safe to call
// concurrently. workers = 0 uses the hardware concurrency.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<T> results(count);
  if (count == 0) return results;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = (unsigned)std::min<std::size_t>(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      results[i] = fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace hdent
