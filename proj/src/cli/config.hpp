#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jampa/modes.hpp"

namespace jampa::cli {

struct DeviceConfig {
  std::string name;
  std::string notes;
  DeviceModel device;
  /// Set when the resonator was specified by its fundamental instead of d_r.
  std::optional<double> fundamental_Hz;
  /// Defaults and adjustments applied while loading, reported on stderr.
  std::vector<std::string> assumptions;
};

/// Throws Error(InvalidInput) with a JSON-pointer style location on any
/// schema violation.
DeviceConfig parse_config(const nlohmann::json& doc);
DeviceConfig load_config(const std::string& path);

}  // namespace jampa::cli
