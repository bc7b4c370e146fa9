#pragma once

#include <string>

#include <json.hpp>

#include "popscale/scalability.hpp"
#include "popscale/sim.hpp"

namespace popscale {

// JSON fragments for the report documents; doubles keep full precision
// (nlohmann serializes shortest-round-trip decimals).
nlohmann::json to_json(const Bracket& b);
nlohmann::json to_json(const SpectralReport& r);
nlohmann::json to_json(const ScalabilityValue& v, int mu);
nlohmann::json to_json(const ScalabilityReport& r);
nlohmann::json to_json(const BridgeAnalysis& b, const Instance& inst);
nlohmann::json to_json(const RoadCheck& rc);
nlohmann::json to_json(const RoadConditionResult& r);
nlohmann::json to_json(const BlockRoadConditionResult& r);
nlohmann::json to_json(const BridgeNecessityResult& r, const Instance& inst);
nlohmann::json to_json(const SufficiencyConditions& c, const Instance& inst);
nlohmann::json to_json(const SimEstimate& e);

// Writes `text` to `path` atomically (temp file + rename); "-" writes stdout.
void write_text_output(const std::string& path, const std::string& text);

}  // namespace popscale
