#pragma once

#include <string>

#include <json.hpp>

#include "loophole/core.hpp"

namespace loophole {

/// Distribution document: {"scenario": {"mA", "mB", "nA", "nB"}, "table":
/// [...]} with table entries as exact rational strings in canonical order.
nlohmann::json distribution_to_json(const Distribution& p);
Distribution distribution_from_json(const nlohmann::json& j);

Distribution load_distribution(const std::string& path);
void save_distribution(const Distribution& p, const std::string& path);

}  // namespace loophole
