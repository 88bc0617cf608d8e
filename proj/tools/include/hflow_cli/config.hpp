#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "hflow/flow.hpp"

namespace hflow::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }  // 0 when the key is absent

 private:
  std::string key_;
  int line_;
};

struct RawEntry {
  std::string value;
  int line = 0;
};
using RawConfig = std::map<std::string, RawEntry>;

struct RunConfig {
  FlowConfig flow;
  std::uint64_t seed = 0;
  RawConfig raw;
};

// "key = value" lines; '#' starts a comment. Duplicate and unknown keys are errors.
RawConfig parse_raw(const std::string& text);

// Validates types and ranges and fills the defaults of the optional keys.
RunConfig build_config(const RawConfig& raw);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

// Replaces (or adds) one key; the entry is tagged with line 0.
RawConfig with_override(RawConfig raw, const std::string& key, const std::string& value);

}  // namespace hflow::cli
