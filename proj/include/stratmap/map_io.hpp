#pragma once

#include <filesystem>
#include <string>

#include "stratmap/strategy_map.hpp"

namespace stratmap {

// Persistence document, version 1:
//   {version, root, nodes: [{id, description, key_actions, deps, pitfalls,
//    guidance, stats: {n, mean_reward, m2}, attempt_notes,
//    last_diagnosed_episode}]}
// Field names are part of the contract; documents with unknown fields are
// rejected, as are documents violating any map invariant.

inline constexpr int kMapSchemaVersion = 1;

/// Canonical serialized form (keys sorted, stable float formatting). Two
/// structurally equal maps serialize to the same string.
std::string map_to_string(const StrategyMap& map);

/// Parse and validate; throws SchemaViolation on any contract violation.
StrategyMap map_from_string(const std::string& text);

void save_map(const StrategyMap& map, const std::filesystem::path& path);
StrategyMap load_map(const std::filesystem::path& path);

}  // namespace stratmap
