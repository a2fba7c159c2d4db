#include "tcbirrt/path_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tcbirrt {

namespace {

using nlohmann::json;

json joints_to_json(const std::vector<JointVector>& joints) {
  json arr = json::array();
  for (const JointVector& q : joints) {
    json row = json::array();
    for (int i = 0; i < q.size(); ++i) {
      row.push_back(q[i]);
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

json pose_to_json_array(const Pose6& pose) {
  const Vec6 v = pose.vec();
  json arr = json::array();
  for (int i = 0; i < 6; ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

}  // namespace

nlohmann::json path_to_json(const PathFile& file) {
  json segments = json::array();
  for (const PathSegment& seg : file.segments) {
    json s;
    s["kind"] = seg.kind == PathSegment::Kind::Transport ? "transport" : "regrasp";
    s["joints"] = joints_to_json(seg.joints);
    if (seg.kind == PathSegment::Kind::Transport) {
      json poses = json::array();
      for (const Pose6& pose : seg.object_poses) {
        poses.push_back(pose_to_json_array(pose));
      }
      s["object_pose"] = std::move(poses);
    } else {
      s["object_pose"] = pose_to_json_array(seg.object_poses.front());
    }
    segments.push_back(std::move(s));
  }
  return json{{"version", file.version},
              {"scene_hash", file.scene_hash},
              {"seed", file.seed},
              {"segments", std::move(segments)}};
}

PathFile path_from_json(const nlohmann::json& j) {
  PathFile file;
  file.version = j.at("version").get<std::string>();
  file.scene_hash = j.at("scene_hash").get<std::string>();
  file.seed = j.at("seed").get<std::uint64_t>();
  for (const json& s : j.at("segments")) {
    PathSegment seg;
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "transport") {
      seg.kind = PathSegment::Kind::Transport;
    } else if (kind == "regrasp") {
      seg.kind = PathSegment::Kind::Regrasp;
    } else {
      throw ValidationError("segment kind '" + kind + "' is neither transport nor regrasp");
    }
    for (const json& row : s.at("joints")) {
      JointVector q(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) {
        q[static_cast<int>(i)] = row[i].get<double>();
      }
      seg.joints.push_back(std::move(q));
    }
    const json& poses = s.at("object_pose");
    if (seg.kind == PathSegment::Kind::Transport) {
      for (const json& pose : poses) {
        Vec6 v;
        for (int i = 0; i < 6; ++i) {
          v[i] = pose[static_cast<std::size_t>(i)].get<double>();
        }
        seg.object_poses.push_back(Pose6::FromVec(v));
      }
    } else {
      Vec6 v;
      for (int i = 0; i < 6; ++i) {
        v[i] = poses[static_cast<std::size_t>(i)].get<double>();
      }
      seg.object_poses.push_back(Pose6::FromVec(v));
    }
    file.segments.push_back(std::move(seg));
  }
  return file;
}

void write_path_file(const std::string& out_path, const PlanResult& result,
                     const std::string& scene_hash, std::uint64_t seed) {
  PathFile file;
  file.scene_hash = scene_hash;
  file.seed = seed;
  file.segments = result.segments;
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error(out_path + ": cannot open for writing");
  }
  out << path_to_json(file).dump(2) << "\n";
}

PathFile read_path_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return path_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open file");
  }
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

std::vector<ValidationIssue> validate_path(const SceneConfig& scene, const PathFile& path) {
  std::vector<ValidationIssue> issues;
  const WorldModel world = scene.world();
  const ChainTolerance tol = chain_tolerance(scene.system, scene.ik);
  const double pos_tol = tol.pos;
  const double ori_tol = tol.ori;
  const double pose_tol =
      2.0 * (scene.ik.eps_p + scene.system.grasp[0].p.norm() * scene.ik.eps_o);

  if (path.segments.empty()) {
    issues.push_back({-1, -1, "path has no segments"});
    return issues;
  }

  const JointVector* prev_boundary = nullptr;
  for (std::size_t si = 0; si < path.segments.size(); ++si) {
    const PathSegment& seg = path.segments[si];
    const int seg_id = static_cast<int>(si);
    if (seg.joints.empty()) {
      issues.push_back({seg_id, -1, "segment has no states"});
      continue;
    }
    if (seg.kind == PathSegment::Kind::Transport &&
        seg.object_poses.size() != seg.joints.size()) {
      issues.push_back({seg_id, -1, "transport segment needs one object pose per state"});
      continue;
    }
    if (seg.kind == PathSegment::Kind::Regrasp && seg.object_poses.size() != 1) {
      issues.push_back({seg_id, -1, "regrasp segment needs exactly one held pose"});
      continue;
    }
    for (const JointVector& q : seg.joints) {
      if (q.size() != scene.system.dof()) {
        issues.push_back({seg_id, -1, "joint state dimension mismatch"});
        return issues;
      }
    }
    if (prev_boundary != nullptr &&
        (*prev_boundary - seg.joints.front()).lpNorm<Eigen::Infinity>() > 1e-9) {
      issues.push_back({seg_id, 0, "segment does not start at the previous segment's end"});
    }

    if (seg.kind == PathSegment::Kind::Transport) {
      for (std::size_t k = 0; k < seg.joints.size(); ++k) {
        const int state = static_cast<int>(k);
        const JointVector& q = seg.joints[k];
        const Vec6 h = closed_chain_deviation(scene.system, q);
        if (h.head<3>().norm() > pos_tol || h.tail<3>().norm() > ori_tol) {
          std::ostringstream msg;
          msg << "closed-chain constraint violated (deviation " << h.head<3>().norm() << " m, "
              << h.tail<3>().norm() << " rad)";
          issues.push_back({seg_id, state, msg.str()});
          continue;
        }
        const Transform T_o = pose_to_transform(seg.object_poses[k]);
        const Transform implied =
            forward_kinematics(scene.system.arms[0], scene.system.arm_segment(q, 0)).ee *
            scene.system.grasp[0].inverse();
        if ((implied.p - T_o.p).norm() > pose_tol ||
            rotation_angle_between(implied.R, T_o.R) > ori_tol) {
          issues.push_back({seg_id, state, "stored object pose disagrees with forward kinematics"});
          continue;
        }
        if (configuration_in_collision(world, q, T_o)) {
          issues.push_back({seg_id, state, "state is in collision"});
        }
      }
    } else {
      const Transform T_o = pose_to_transform(seg.object_poses.front());
      for (std::size_t k = 0; k + 1 < seg.joints.size(); ++k) {
        if (!joint_segment_collision_free(world, seg.joints[k], seg.joints[k + 1], T_o,
                                          scene.planner.collision_step)) {
          issues.push_back({seg_id, static_cast<int>(k), "regrasp motion is in collision"});
        }
      }
      if (seg.joints.size() == 1 &&
          configuration_in_collision(world, seg.joints.front(), T_o)) {
        issues.push_back({seg_id, 0, "state is in collision"});
      }
      // Regrasp endpoints stay on the manifold at the held pose.
      for (const std::size_t k : {std::size_t{0}, seg.joints.size() - 1}) {
        const Vec6 h = closed_chain_deviation(scene.system, seg.joints[k]);
        if (h.head<3>().norm() > pos_tol || h.tail<3>().norm() > ori_tol) {
          issues.push_back({seg_id, static_cast<int>(k),
                            "regrasp endpoint violates the closed-chain constraint"});
        }
      }
    }
    prev_boundary = &seg.joints.back();
  }
  return issues;
}

}  // namespace tcbirrt
