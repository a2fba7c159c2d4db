#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "tcbirrt/planner.hpp"
#include "tcbirrt/scene.hpp"

namespace tcbirrt {

struct PathFile {
  std::string version = "1";
  std::string scene_hash;
  std::uint64_t seed = 0;
  std::vector<PathSegment> segments;
};

nlohmann::json path_to_json(const PathFile& file);
PathFile path_from_json(const nlohmann::json& j);

void write_path_file(const std::string& out_path, const PlanResult& result,
                     const std::string& scene_hash, std::uint64_t seed);
PathFile read_path_file(const std::string& path);

/// FNV-1a of the file bytes, as a hex string.
std::string file_hash(const std::string& path);

struct ValidationIssue {
  int segment = -1;
  int state = -1;
  std::string what;
};

/// Replays a path against a scene: closed-chain adherence and pose/FK
/// agreement on transport states, collision freedom everywhere (regrasp
/// segments are checked at the scene's collision step with the object held
/// static), and boundary continuity between segments. Empty result = valid.
std::vector<ValidationIssue> validate_path(const SceneConfig& scene, const PathFile& path);

}  // namespace tcbirrt
