#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsns/config.hpp"

namespace fsns {

struct CheckItem {
  std::string name;
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();
};

struct CheckOutcome {
  std::string suite;
  bool pass = true;
  std::vector<CheckItem> items;
};

/// Suites: "identities" (projection, curl and cancellation identities on
/// random fields), "noise" (structural diffusion conditions and the noise
/// trace), "estimates" (certification of the bilinear, interpolation and
/// trilinear bounds). Optional check.* keys in `cfg` tune the suites; an
/// inadmissible (alpha, eta) request raises InadmissibleParameters.
CheckOutcome run_check_suite(const std::string& suite, const Config& cfg, std::uint64_t seed, int threads);

nlohmann::json to_json(const CheckOutcome& c);

/// Throws FormatError when `j` does not have the check report shape.
void validate_check_report(const nlohmann::json& j);

}  // namespace fsns
