// Acceptance suite: runs every shipping criterion end to end against the
// bundled scenes and the command-line tool, printing one PASS/FAIL line per
// criterion. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcbirrt/bench.hpp"

using namespace tcbirrt;
namespace fs = std::filesystem;

namespace {

std::string g_scene_dir = TCBIRRT_SCENE_DIR;
std::string g_cli = TCBIRRT_CLI_PATH;
fs::path g_work;

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  g_failures += pass ? 0 : 1;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_unit(Rng& rng) {
  while (true) {
    Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) {
      return v / n;
    }
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = g_cli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

void criterion_rotation_math() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst_exp = 0.0, worst_near_pi = 0.0, worst_euler = 0.0;

  for (int k = 0; k < 10000; ++k) {
    const Mat3 R = expcoords_to_rotation(random_unit(rng) * rng.uniform(0.0, M_PI - 1e-6));
    worst_exp = std::max(worst_exp, (expcoords_to_rotation(rotation_to_expcoords(R)) - R).norm());
  }
  for (int k = 0; k < 100; ++k) {
    const Mat3 R = expcoords_to_rotation(random_unit(rng) * rng.uniform(M_PI - 1e-3, M_PI));
    worst_near_pi =
        std::max(worst_near_pi, (expcoords_to_rotation(rotation_to_expcoords(R)) - R).norm());
  }
  for (int k = 0; k < 10000; ++k) {
    Pose6 xi;
    xi.p = Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    xi.u = Vec3(rng.uniform(-M_PI + 1e-9, M_PI - 1e-9),
                rng.uniform(-M_PI / 2 + 1e-3, M_PI / 2 - 1e-3),
                rng.uniform(-M_PI + 1e-9, M_PI - 1e-9));
    const Pose6 back = transform_to_pose(pose_to_transform(xi));
    worst_euler = std::max(worst_euler, (back.vec() - xi.vec()).lpNorm<Eigen::Infinity>());
  }
  const double wall = seconds_since(t0);
  std::ostringstream detail;
  detail << "exp/log worst " << worst_exp << ", near-pi worst " << worst_near_pi
         << ", euler worst " << worst_euler << ", " << wall << " s";
  report(1, "rotation-math round trips",
         worst_exp <= 1e-9 && worst_near_pi <= 1e-9 && worst_euler <= 1e-9 && wall < 5.0,
         detail.str());
}

void criterion_jacobian(const SceneConfig& scene) {
  const auto t0 = std::chrono::steady_clock::now();
  const ManipulatorModel& arm = scene.system.arms[0];
  Rng rng(102);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd q(arm.dof());
    for (int j = 0; j < arm.dof(); ++j) {
      q[j] = rng.uniform(-2.5, 2.5);
    }
    const auto J = jacobian(arm, q);
    const double h = 1e-6;
    for (int j = 0; j < arm.dof(); ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const Transform Tp = forward_kinematics(arm, qp).ee;
      const Transform Tm = forward_kinematics(arm, qm).ee;
      Vec6 fd;
      fd.head<3>() = (Tp.p - Tm.p) / (2 * h);
      const Mat3 rel = Tp.R * Tm.R.transpose();
      const Vec3 w(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
      fd.tail<3>() = 0.5 * w / (2 * h);
      worst = std::max(worst, (J.col(j) - fd).cwiseAbs().maxCoeff());
    }
  }
  const double wall = seconds_since(t0);
  std::ostringstream detail;
  detail << "worst column deviation " << worst << ", " << wall << " s";
  report(2, "jacobian vs central finite differences", worst <= 1e-5 && wall < 5.0, detail.str());
}

void criterion_ik_oracle(const SceneConfig& scene) {
  const auto t0 = std::chrono::steady_clock::now();
  const ManipulatorModel& arm = scene.system.arms[0];
  IKParams params;  // the library defaults: eps 1e-3 m / 1e-3 rad
  Rng rng(103);
  int converged = 0;
  bool residuals_ok = true;
  const int total = 500;
  for (int k = 0; k < total; ++k) {
    Eigen::VectorXd q_target(arm.dof());
    Eigen::VectorXd q_seed(arm.dof());
    for (int j = 0; j < arm.dof(); ++j) {
      const auto& lim = arm.joint_limits[static_cast<std::size_t>(j)];
      q_target[j] = rng.uniform(lim[0] + 0.1, lim[1] - 0.1);
      q_seed[j] = q_target[j] + rng.uniform(-0.1, 0.1);
    }
    const Transform target = forward_kinematics(arm, q_target).ee;
    const auto solved = ik_single(arm, q_seed, target.p, target.R, params);
    if (!solved) {
      continue;
    }
    ++converged;
    const Transform reached = forward_kinematics(arm, *solved).ee;
    if ((reached.p - target.p).norm() >= params.eps_p ||
        rotation_angle_between(reached.R, target.R) >= params.eps_o) {
      residuals_ok = false;
    }
  }
  const double wall = seconds_since(t0);
  std::ostringstream detail;
  detail << converged << "/" << total << " converged, residuals "
         << (residuals_ok ? "all below tolerance" : "VIOLATED") << ", " << wall << " s";
  report(3, "ik oracle on fk-generated targets",
         converged >= static_cast<int>(0.95 * total) && residuals_ok && wall < 30.0,
         detail.str());
}

struct TierRun {
  SceneConfig scene;
  std::string scene_file;
  BenchRun run;
};

TierRun run_tier(const std::string& file, int tasks_count, double timeout) {
  TierRun out;
  out.scene_file = g_scene_dir + "/" + file;
  out.scene = load_scene(out.scene_file);
  Rng rng(out.scene.seed);
  const auto tasks = generate_tasks(out.scene, tasks_count, rng);
  out.run = run_benchmark(out.scene, tasks, timeout);
  return out;
}

struct ProducedPath {
  fs::path file;
  std::string scene_file;  // the scene the path must replay against
};

void criterion_manifold_and_paths(const std::vector<TierRun*>& tiers,
                                  std::vector<ProducedPath>& path_files) {
  int plans = 0;
  int violations = 0;
  double worst_pos = 0.0, worst_ori = 0.0;
  const fs::path dir = g_work / "plans";
  fs::create_directories(dir);
  for (TierRun* tier : tiers) {
    const WorldModel world = tier->scene.world();
    for (std::size_t i = 0; i < tier->run.records.size(); ++i) {
      if (!tier->run.records[i].success || plans >= 50) {
        continue;
      }
      ++plans;
      const PlanResult& result = *tier->run.outcomes[i].result;
      for (const PathSegment& seg : result.segments) {
        for (std::size_t j = 0; j < seg.joints.size(); ++j) {
          if (seg.kind == PathSegment::Kind::Transport) {
            const Vec6 h = closed_chain_deviation(tier->scene.system, seg.joints[j]);
            worst_pos = std::max(worst_pos, h.head<3>().norm());
            worst_ori = std::max(worst_ori, h.tail<3>().norm());
            if (h.head<3>().norm() > 2e-3 || h.tail<3>().norm() > 2e-3) {
              ++violations;
            }
            if (configuration_in_collision(world, seg.joints[j],
                                           pose_to_transform(seg.object_poses[j]))) {
              ++violations;
            }
          } else if (configuration_in_collision(
                         world, seg.joints[j], pose_to_transform(seg.object_poses.front()))) {
            ++violations;
          }
        }
      }
      const fs::path pf = dir / ("plan_" + std::to_string(plans) + ".json");
      write_path_file(pf.string(), result, "acceptance", tier->run.records[i].task_id);
      path_files.push_back({pf, tier->scene_file});
    }
  }
  std::ostringstream detail;
  detail << plans << " plans, worst |h| " << worst_pos << " m / " << worst_ori << " rad, "
         << violations << " violations";
  report(4, "manifold adherence and collision freedom over seeded plans",
         plans >= 50 && violations == 0, detail.str());
}

void criterion_success_rates(const TierRun& tier1, const TierRun& tier3) {
  const auto rate = [](const BenchRun& run) {
    int s = 0;
    for (const auto& r : run.records) {
      s += r.success ? 1 : 0;
    }
    return static_cast<double>(s) / static_cast<double>(run.records.size());
  };
  const double r1 = rate(tier1.run);
  const double r3 = rate(tier3.run);
  std::ostringstream detail;
  detail << "tier1 " << 100 * r1 << "%, tier3 " << 100 * r3 << "% within 60 s over 50 tasks";
  report(5, "planner success at desk scale", r1 >= 0.95 && r3 >= 0.80, detail.str());
}

void criterion_planning_speed(const TierRun& tier1) {
  std::vector<double> times;
  for (const auto& r : tier1.run.records) {
    if (r.success) {
      times.push_back(r.time_s);
    }
  }
  std::sort(times.begin(), times.end());
  const double median = times.empty() ? 1e9 : times[times.size() / 2];
  std::ostringstream detail;
  detail << "tier1 median " << median << " s over " << times.size() << " successes";
  report(6, "planner speed at desk scale", median <= 10.0, detail.str());
}

void criterion_regrasp(std::vector<ProducedPath>& path_files) {
  SceneConfig scene = load_scene(g_scene_dir + "/desk_tier1.json");
  // A slender beam leaves room for both elbow branches of each arm.
  scene.robot_geometry.object_half_extents = Vec3(1.0, 0.12, 0.12);
  const std::string beam_scene_file = (g_work / "beam_scene.json").string();
  save_scene(scene, beam_scene_file);
  const WorldModel world = scene.world();
  const Transform T_o = pose_to_transform(scene.nominal_start);
  const auto targets = object_to_ee_targets(T_o, scene.system);

  // Alternate same-pose IK branch, found by a position-first sweep over a
  // coarse seed grid.
  IKParams pos_only;
  pos_only.gain << 1, 1, 1, 0, 0, 0;
  pos_only.eps_p = 1e-4;
  pos_only.eps_o = 1e9;
  pos_only.max_iters = 400;
  JointVector branch_b = scene.nominal_q;
  bool found = false;
  for (int arm = 0; arm < 2 && !found; ++arm) {
    const Eigen::VectorXd nominal_arm = scene.system.arm_segment(scene.nominal_q, arm);
    for (double s1 = -1.5; s1 <= 1.51 && !found; s1 += 0.75) {
      for (double s2 : {-1.0, 0.0, 1.0}) {
        for (double s4 : {-1.0, 1.0}) {
          if (found) {
            break;
          }
          Eigen::VectorXd grid_seed(7);
          grid_seed << s1, s2, 0, s4, 0, 0, 0;
          const auto& model = scene.system.arms[static_cast<std::size_t>(arm)];
          auto p = ik_single(model, grid_seed, targets[static_cast<std::size_t>(arm)].p,
                             targets[static_cast<std::size_t>(arm)].R, pos_only);
          if (!p) {
            continue;
          }
          auto sol = ik_single(model, *p, targets[static_cast<std::size_t>(arm)].p,
                               targets[static_cast<std::size_t>(arm)].R, scene.ik);
          if (!sol || (*sol - nominal_arm).lpNorm<Eigen::Infinity>() < 0.5) {
            continue;
          }
          JointVector candidate = scene.nominal_q;
          if (arm == 0) {
            candidate.head(7) = *sol;
          } else {
            candidate.tail(7) = *sol;
          }
          const ChainTolerance tol = chain_tolerance(scene.system, scene.ik);
          const Vec6 h = closed_chain_deviation(scene.system, candidate);
          if (h.head<3>().norm() > tol.pos || h.tail<3>().norm() > tol.ori ||
              configuration_in_collision(world, candidate, T_o)) {
            continue;
          }
          branch_b = candidate;
          found = true;
        }
      }
    }
  }
  if (!found) {
    report(7, "regrasp correctness", false, "no alternate same-pose branch found");
    return;
  }

  PlannerParams params = scene.planner;
  params.seed = 5;
  Planner planner(world, scene.ik, params);
  const PlanOutcome two_branch =
      planner.plan(scene.nominal_q, scene.nominal_start, branch_b, scene.nominal_start);

  bool regrasp_ok = two_branch.success();
  int regrasp_segments = 0;
  std::string note;
  if (two_branch.success()) {
    for (const PathSegment& seg : two_branch.result->segments) {
      if (seg.kind != PathSegment::Kind::Regrasp) {
        continue;
      }
      ++regrasp_segments;
      if (seg.object_poses.size() != 1) {
        regrasp_ok = false;
        note += " non-constant pose;";
      }
      const Transform held = pose_to_transform(seg.object_poses.front());
      for (std::size_t j = 0; j + 1 < seg.joints.size(); ++j) {
        if (!joint_segment_collision_free(world, seg.joints[j], seg.joints[j + 1], held, 0.2)) {
          regrasp_ok = false;
          note += " regrasp motion collides;";
        }
      }
    }
    regrasp_ok = regrasp_ok && regrasp_segments >= 1;
    const fs::path pf = g_work / "plans" / "plan_regrasp.json";
    write_path_file(pf.string(), *two_branch.result, "acceptance", 7);
    path_files.push_back({pf, beam_scene_file});
  } else {
    note = " two-branch plan failed: " + two_branch.diagnostic;
  }

  // Same-branch counterpart: with tight IK tolerances the junction solutions
  // coincide and no regrasp segment is emitted.
  SceneConfig tight = scene;
  tight.ik.eps_p = 1e-9;
  tight.ik.eps_o = 1e-9;
  tight.ik.max_iters = 500;
  const std::string tight_scene_file = (g_work / "tight_scene.json").string();
  save_scene(tight, tight_scene_file);
  const auto q_start = ik_dual(tight.system, scene.nominal_q, T_o, tight.ik);
  Pose6 near_goal = tight.nominal_start;
  near_goal.p += Vec3(-0.3, 0.0, 0.1);
  const auto q_goal =
      q_start ? ik_dual(tight.system, *q_start, pose_to_transform(near_goal), tight.ik)
              : std::nullopt;
  bool weld_ok = false;
  if (q_start && q_goal) {
    PlannerParams tight_params = tight.planner;
    tight_params.seed = 5;
    Planner tight_planner(world, tight.ik, tight_params);
    const PlanOutcome same_branch =
        tight_planner.plan(*q_start, tight.nominal_start, *q_goal, near_goal);
    if (same_branch.success()) {
      weld_ok = true;
      for (const PathSegment& seg : same_branch.result->segments) {
        weld_ok = weld_ok && seg.kind != PathSegment::Kind::Regrasp;
      }
      const fs::path pf = g_work / "plans" / "plan_weld.json";
      write_path_file(pf.string(), *same_branch.result, "acceptance", 8);
      path_files.push_back({pf, tight_scene_file});
    } else {
      note += " same-branch plan failed: " + same_branch.diagnostic;
    }
  } else {
    note += " tight-tolerance endpoint ik failed;";
  }

  std::ostringstream detail;
  detail << regrasp_segments << " regrasp segment(s) on the two-branch task, "
         << (weld_ok ? "no regrasp on the coinciding-branch task" : "weld case FAILED") << note;
  report(7, "regrasp correctness", regrasp_ok && weld_ok, detail.str());
}

void criterion_metrics_oracle() {
  Rng rng(108);
  bool exact = true;
  for (int trial = 0; trial < 1000 && exact; ++trial) {
    std::vector<TrialRecord> records;
    const int n = 1 + rng.uniform_int(60);
    for (int i = 0; i < n; ++i) {
      records.push_back({i, rng.canonical() < 0.6, rng.uniform(0.01, 100.0), 0, 0.0, false});
    }
    // success-rate values against a direct count
    for (int probe = 0; probe < 5; ++probe) {
      const double t = rng.uniform(0.0, 120.0);
      int count = 0;
      for (const auto& r : records) {
        count += (r.success && r.time_s <= t) ? 1 : 0;
      }
      if (success_rate_curve(records, {t})[0].p != static_cast<double>(count) / n) {
        exact = false;
      }
    }
    // trimmed stats against sort-and-slice
    const int k = 1 + rng.uniform_int(15);
    std::vector<double> succ;
    for (const auto& r : records) {
      if (r.success) {
        succ.push_back(r.time_s);
      }
    }
    std::sort(succ.begin(), succ.end());
    const auto stats = trimmed_time_stats(records, k);
    if (static_cast<int>(succ.size()) < k) {
      exact = exact && !stats.has_value();
      continue;
    }
    double mean = 0.0;
    for (int i = 0; i < k; ++i) {
      mean += succ[static_cast<std::size_t>(i)];
    }
    mean /= k;
    double var = 0.0;
    for (int i = 0; i < k; ++i) {
      var += (succ[static_cast<std::size_t>(i)] - mean) * (succ[static_cast<std::size_t>(i)] - mean);
    }
    const double sd = k > 1 ? std::sqrt(var / (k - 1)) : 0.0;
    exact = exact && stats.has_value() && stats->mean == mean && stats->stddev == sd;
  }
  report(8, "metrics match the brute-force oracle", exact, "1000 random record sets, exact");
}

void criterion_determinism() {
  const fs::path a = g_work / "det_a";
  const fs::path b = g_work / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string scene = g_scene_dir + "/desk_tier1.json";
  const std::string common = "bench --scene " + scene + " --tasks 8 --seed 21 --timeout 30";
  const int rc_a = run_cli(common + " --out " + a.string(), g_work / "det_a.log");
  const int rc_b = run_cli(common + " --out " + b.string(), g_work / "det_b.log");
  bool identical = rc_a == 0 && rc_b == 0;
  std::string mismatch;
  if (identical) {
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
        identical = false;
        mismatch = entry.path().filename().string();
      }
    }
  }
  std::ostringstream detail;
  detail << "two bench runs, exit codes " << rc_a << "/" << rc_b
         << (identical ? ", all files byte-identical" : ", mismatch at " + mismatch);
  report(9, "bench determinism", identical, detail.str());
}

void criterion_replay_validation(const std::vector<ProducedPath>& path_files) {
  int accepted = 0;
  int checked = 0;
  bool all_ok = true;
  for (const ProducedPath& produced : path_files) {
    ++checked;
    const int rc = run_cli(
        "validate --path " + produced.file.string() + " --scene " + produced.scene_file,
        g_work / "validate.log");
    if (rc == 0) {
      ++accepted;
    } else {
      all_ok = false;
    }
  }

  // Corrupt one joint of one transport state by 0.5 rad.
  bool rejected = false;
  bool diagnostic_ok = false;
  if (!path_files.empty()) {
    const fs::path source = path_files.front().file;
    const std::string corrupt_scene = path_files.front().scene_file;
    nlohmann::json j = nlohmann::json::parse(read_file(source));
    for (auto& seg : j["segments"]) {
      if (seg["kind"] == "transport" && seg["joints"].size() > 1) {
        auto& joints = seg["joints"];
        const std::size_t mid = joints.size() / 2;
        joints[mid][3] = joints[mid][3].get<double>() + 0.5;
        break;
      }
    }
    const fs::path corrupted = g_work / "corrupted.json";
    std::ofstream(corrupted) << j.dump(2) << "\n";
    const fs::path log = g_work / "validate_corrupt.log";
    const int rc =
        run_cli("validate --path " + corrupted.string() + " --scene " + corrupt_scene, log);
    rejected = rc == 2;
    const std::string output = read_file(log);
    diagnostic_ok = output.find("constraint") != std::string::npos ||
                    output.find("collision") != std::string::npos;
  }

  std::ostringstream detail;
  detail << accepted << "/" << checked << " produced paths accepted, corrupted file "
         << (rejected ? "rejected" : "NOT rejected") << " with "
         << (diagnostic_ok ? "a constraint/collision diagnostic" : "NO usable diagnostic");
  report(10, "replay validation", all_ok && checked > 0 && rejected && diagnostic_ok,
         detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_scene_dir = argv[1];
  }
  if (argc > 2) {
    g_cli = argv[2];
  }
  g_work = argc > 3 ? fs::path(argv[3]) : fs::temp_directory_path() / "tcbirrt_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const SceneConfig tier1_scene = load_scene(g_scene_dir + "/desk_tier1.json");

  criterion_rotation_math();
  criterion_jacobian(tier1_scene);
  criterion_ik_oracle(tier1_scene);

  TierRun tier1 = run_tier("desk_tier1.json", 50, 60.0);
  TierRun tier2 = run_tier("desk_tier2.json", 10, 60.0);
  TierRun tier3 = run_tier("desk_tier3.json", 50, 60.0);

  std::vector<ProducedPath> path_files;
  std::vector<TierRun*> tiers{&tier1, &tier2, &tier3};
  criterion_manifold_and_paths(tiers, path_files);
  criterion_success_rates(tier1, tier3);
  criterion_planning_speed(tier1);
  criterion_regrasp(path_files);
  criterion_metrics_oracle();
  criterion_determinism();
  criterion_replay_validation(path_files);

  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
