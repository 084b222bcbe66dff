#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wgc/rlapi.hpp"

namespace wgc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A side controller. `act` receives only that side's redacted view and returns
// one action index per slot; every index is mask-true.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  // Versioned name recorded in replay headers, e.g. "kai0-v1".
  virtual std::string_view version() const = 0;
  virtual std::vector<int> act(const SideView& view) = 0;
};

// kai0 (rush), kai1 (terrain ambush), random (uniform legal), idle (always stop).
// kai1 on a CMAC scenario is a ConfigError, as is an unknown name.
std::unique_ptr<Policy> make_policy(std::string_view name, const Scenario& scenario, Side side,
                                    std::uint64_t seed);

const std::vector<std::string>& policy_names();
bool policy_supports(std::string_view name, const Scenario& scenario);

}  // namespace wgc
