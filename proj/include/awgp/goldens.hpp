#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace awgp {

/// Frozen reference values keyed by example identifier. Each entry holds
/// {value, oracle, config, derived_at}.
class GoldenRegistry {
 public:
  using json = nlohmann::ordered_json;

  GoldenRegistry() = default;
  static GoldenRegistry load(const std::string& path);

  bool contains(const std::string& id) const { return data_.contains(id); }
  /// Throws ValidationError when the entry is missing.
  const json& entry(const std::string& id) const;
  double value(const std::string& id) const;
  std::string text(const std::string& id) const;

  void set(const std::string& id, json value, const std::string& oracle, json config, const std::string& derived_at);
  void save(const std::string& path) const;
  const json& data() const noexcept { return data_; }

 private:
  json data_ = json::object();
};

/// Re-derives every golden value from its oracle and writes the registry.
/// Throws NumericalError when an oracle disagrees with the library.
GoldenRegistry regenerate_goldens(const std::string& derived_at, unsigned threads, std::ostream& log);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace awgp
