#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "lievio/sim.hpp"

namespace lievio {

/// EuRoC ASL records. Timestamps are kept in nanoseconds; t() converts.
struct EurocImuRecord {
  int64_t t_ns = 0;
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  double t() const { return 1e-9 * static_cast<double>(t_ns); }
};

struct EurocGtRecord {
  int64_t t_ns = 0;
  Vec3 p = Vec3::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();  // body-to-world
  Vec3 v = Vec3::Zero();
  double t() const { return 1e-9 * static_cast<double>(t_ns); }
};

struct EurocRecords {
  std::vector<EurocImuRecord> imu;
  std::vector<EurocGtRecord> gt;
  std::string sequence_name;
};

namespace detail {

inline std::vector<double> parse_csv_row(const std::string& line, const std::string& path,
                                         int line_no, size_t min_fields) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= line.size()) {
    size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const char* first = line.data() + pos;
    const char* last = line.data() + comma;
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(path, line_no, "malformed numeric field");
    }
    out.push_back(value);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  if (out.size() < min_fields) {
    throw ParseError(path, line_no, "too few fields");
  }
  return out;
}

inline bool skippable_line(const std::string& line) {
  if (line.empty()) return true;
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

/// `timestamp [ns], w_x, w_y, w_z, a_x, a_y, a_z`; '#' header skipped.
inline std::vector<EurocImuRecord> parse_imu_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<EurocImuRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::skippable_line(line)) continue;
    const auto f = detail::parse_csv_row(line, path, line_no, 7);
    EurocImuRecord r;
    r.t_ns = static_cast<int64_t>(f[0]);
    r.omega = Vec3(f[1], f[2], f[3]);
    r.accel = Vec3(f[4], f[5], f[6]);
    if (!out.empty() && r.t_ns <= out.back().t_ns) {
      throw ParseError(path, line_no, "timestamps not strictly increasing");
    }
    out.push_back(r);
  }
  return out;
}

/// `state_groundtruth_estimate0` format: timestamp [ns], p (3), q w-x-y-z,
/// v (3), then bias columns (ignored).
inline std::vector<EurocGtRecord> parse_groundtruth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<EurocGtRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::skippable_line(line)) continue;
    const auto f = detail::parse_csv_row(line, path, line_no, 11);
    EurocGtRecord r;
    r.t_ns = static_cast<int64_t>(f[0]);
    r.p = Vec3(f[1], f[2], f[3]);
    r.q = Eigen::Quaterniond(f[4], f[5], f[6], f[7]);  // w, x, y, z
    if (std::abs(r.q.norm() - 1.0) > 1e-6) {
      throw ParseError(path, line_no, "quaternion not unit norm");
    }
    r.q.normalize();
    r.v = Vec3(f[8], f[9], f[10]);
    if (!out.empty() && r.t_ns <= out.back().t_ns) {
      throw ParseError(path, line_no, "timestamps not strictly increasing");
    }
    out.push_back(r);
  }
  return out;
}

inline EurocRecords load_euroc(const std::string& dataset_dir) {
  namespace fs = std::filesystem;
  EurocRecords rec;
  rec.imu = parse_imu_csv((fs::path(dataset_dir) / "mav0/imu0/data.csv").string());
  rec.gt = parse_groundtruth_csv(
      (fs::path(dataset_dir) / "mav0/state_groundtruth_estimate0/data.csv").string());
  rec.sequence_name = fs::path(dataset_dir).filename().string();
  if (rec.sequence_name.empty()) {
    rec.sequence_name = fs::path(dataset_dir).parent_path().filename().string();
  }
  return rec;
}

inline constexpr double kGtGapLimit = 0.5;  // s

struct InterpolatedPose {
  Rotation rot;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// Linear position/velocity and shortest-arc orientation interpolation.
/// Empty optional when t is outside the record or spans a gap > 0.5 s.
inline std::optional<InterpolatedPose> interpolate_gt(
    const std::vector<EurocGtRecord>& gt, double t) {
  if (gt.size() < 2 || t < gt.front().t() - 1e-12 || t > gt.back().t() + 1e-12) {
    return std::nullopt;
  }
  auto it = std::lower_bound(gt.begin(), gt.end(), t,
                             [](const EurocGtRecord& r, double tt) { return r.t() < tt; });
  if (it == gt.begin()) ++it;
  if (it == gt.end()) --it;
  const EurocGtRecord& b = *it;
  const EurocGtRecord& a = *(it - 1);
  if (b.t() - a.t() > kGtGapLimit) return std::nullopt;
  const double s = std::clamp((t - a.t()) / (b.t() - a.t()), 0.0, 1.0);
  InterpolatedPose out;
  out.p = (1.0 - s) * a.p + s * b.p;
  out.v = (1.0 - s) * a.v + s * b.v;
  out.rot = Rotation::from_matrix(a.q.slerp(s, b.q).toRotationMatrix());
  return out;
}

/// Virtual landmark world for dataset runs: points on the four vertical
/// walls of the ground-truth bounding box inflated by 2 m, at the same
/// areal density as the default simulated world.
inline Mat3X euroc_virtual_landmarks(const std::vector<EurocGtRecord>& gt,
                                     std::mt19937_64& rng, double inflate = 2.0) {
  Vec3 lo = gt.front().p, hi = gt.front().p;
  for (const auto& r : gt) {
    lo = lo.cwiseMin(r.p);
    hi = hi.cwiseMax(r.p);
  }
  lo.array() -= inflate;
  hi.array() += inflate;
  const double lx = hi.x() - lo.x(), ly = hi.y() - lo.y(), lz = hi.z() - lo.z();
  const double density = 1000.0 / (4.0 * 12.0 * 12.0);  // default-world walls
  const double area = 2.0 * (lx + ly) * lz;
  const int count = std::max(50, static_cast<int>(std::round(density * area)));

  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()),
      uz(lo.z(), hi.z()), upick(0.0, 2.0 * (lx + ly));
  Mat3X out(3, count);
  for (int i = 0; i < count; ++i) {
    const double pick = upick(rng);  // wall chosen by perimeter fraction
    const double z = uz(rng);
    if (pick < lx) out.col(i) = Vec3(ux(rng), lo.y(), z);
    else if (pick < 2.0 * lx) out.col(i) = Vec3(ux(rng), hi.y(), z);
    else if (pick < 2.0 * lx + ly) out.col(i) = Vec3(lo.x(), uy(rng), z);
    else out.col(i) = Vec3(hi.x(), uy(rng), z);
  }
  return out;
}

/// Synthesized camera-rate observations at time t from interpolated ground
/// truth. Returns nullopt when ground truth is unavailable at t.
inline std::optional<std::vector<LandmarkObservation>> synthesize_measurements(
    const EurocRecords& records, const Mat3X& landmarks, const ScenarioConfig& cfg,
    const SensorRig& rig, std::mt19937_64& rng, double t) {
  const auto pose = interpolate_gt(records.gt, t);
  if (!pose) return std::nullopt;
  RigidBodyState st;
  st.rot = pose->rot;
  st.p = pose->p;
  st.v = pose->v;
  st.t = t;
  st.landmarks = landmarks;
  std::vector<LandmarkObservation> out;
  for (int i : select_visible(st, landmarks, cfg, rig)) {
    LandmarkObservation obs = measure(st, i, cfg.modality, rig);
    out.push_back(corrupt(obs, cfg, rng));
  }
  return out;
}

/// 4-DOF alignment (yaw about gravity + translation) fit on the first
/// fit_window seconds, then whole-trajectory RMS position error.
inline double align_and_rms(const std::vector<double>& t, const std::vector<Vec3>& est,
                            const std::vector<Vec3>& gt, double fit_window = 1.0) {
  if (t.size() != est.size() || t.size() != gt.size() || t.empty()) {
    throw DimensionMismatch("align_and_rms: series lengths");
  }
  size_t m = 0;
  while (m < t.size() && t[m] <= t.front() + fit_window + 1e-12) ++m;
  if (m < 2) throw InsufficientHistory("align_and_rms: fit window too short");

  Vec3 mean_e = Vec3::Zero(), mean_g = Vec3::Zero();
  for (size_t i = 0; i < m; ++i) {
    mean_e += est[i];
    mean_g += gt[i];
  }
  mean_e /= static_cast<double>(m);
  mean_g /= static_cast<double>(m);
  double num = 0.0, den = 0.0;  // yaw Procrustes on centered xy
  for (size_t i = 0; i < m; ++i) {
    const Vec3 e = est[i] - mean_e, g = gt[i] - mean_g;
    num += e.x() * g.y() - e.y() * g.x();
    den += e.x() * g.x() + e.y() * g.y();
  }
  const double yaw = (num == 0.0 && den == 0.0) ? 0.0 : std::atan2(num, den);
  const Mat3 rz = angle_axis(yaw, Vec3::UnitZ()).matrix();
  const Vec3 c = mean_g - rz * mean_e;

  double sq = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    sq += (gt[i] - (rz * est[i] + c)).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(t.size()));
}

struct EurocEvalResult {
  std::string sequence_name;
  double rms_position = 0.0;   // m, 4-DOF aligned
  double runtime_seconds = 0.0;
  std::vector<double> t;
  std::vector<Vec3> est_p, gt_p;
};

/// Dataset pipeline: real IMU drives prediction, synthesized camera-rate
/// measurements drive updates. enable_updates = false gives the IMU-only
/// dead-reckoning baseline.
inline EurocEvalResult run_euroc(const EurocRecords& records, const ScenarioConfig& cfg,
                                 const ObserverConfig& ocfg, const SensorRig& rig,
                                 bool enable_updates = true) {
  if (records.imu.size() < 2 || records.gt.size() < 2) {
    throw InsufficientHistory("run_euroc: empty dataset");
  }
  const auto wall0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  const Mat3X world = euroc_virtual_landmarks(records.gt, rng);
  const int n = cfg.max_visible;
  const double t_begin = records.gt.front().t();
  const double t_end = std::min(records.gt.back().t(), records.imu.back().t());
  const double cam_dt = 1.0 / cfg.cam_rate;

  // Initial estimate from the first ground-truth sample, perturbed.
  const auto pose0 = interpolate_gt(records.gt, t_begin);
  const double d2r = std::numbers::pi / 180.0;
  const Rotation rhat0 =
      exp_so3(cfg.init_att_err_deg * d2r * detail::random_unit(rng)) * pose0->rot;
  const Vec3 g0 = gravity_vector();
  const Vec3 ghat0 = exp_so3(cfg.init_grav_err_deg * d2r *
                             detail::random_unit_orthogonal(g0, rng)).matrix() * g0;
  ObserverState os = make_observer(
      n, ocfg, cfg.modality, rhat0,
      pose0->p + cfg.init_pos_err_m * detail::random_unit(rng),
      pose0->v + cfg.init_vel_err_mps * detail::random_unit(rng), ghat0);

  std::vector<int> slot_id(n, -1);
  EurocEvalResult res;
  res.sequence_name = records.sequence_name;

  // ZOH index: latest IMU sample at or before the current time.
  size_t iu = 0;
  while (iu + 1 < records.imu.size() && records.imu[iu + 1].t() <= t_begin + 1e-12) ++iu;
  double t = t_begin;
  Vec3 last_omega = records.imu[iu].omega;
  for (double t_cam = t_begin; t_cam <= t_end + 1e-9; t_cam += cam_dt) {
    while (t < t_cam - 1e-9) {
      while (iu + 1 < records.imu.size() && records.imu[iu + 1].t() <= t + 1e-12) ++iu;
      const double t_next = iu + 1 < records.imu.size()
                                ? std::min(records.imu[iu + 1].t(), t_cam)
                                : t_cam;
      if (t_next > t + 1e-12) {
        predict(os, ImuSample{records.imu[iu].omega, records.imu[iu].accel, t},
                t_next - t, /*propagate_p=*/false);
        last_omega = records.imu[iu].omega;
      }
      t = t_next;
    }
    if (t_cam > t_begin) {
      os.riccati = predict_P_imu(os.riccati, last_omega, cam_dt);
    }
    {
      const auto pose = interpolate_gt(records.gt, t_cam);
      if (pose) {
        // Rebind slots exactly as in the simulation harness.
        RigidBodyState st;
        st.rot = pose->rot;
        st.p = pose->p;
        st.v = pose->v;
        st.t = t_cam;
        st.landmarks = world;
        const std::vector<int> visible = select_visible(st, world, cfg, rig);
        std::vector<bool> still_visible(n, false);
        for (int id : visible) {
          for (int s = 0; s < n; ++s) {
            if (slot_id[s] == id) still_visible[s] = true;
          }
        }
        RigidBodyState st_slots = st;
        st_slots.landmarks = Mat3X::Zero(3, n);
        for (int s = 0; s < n; ++s) {
          if (slot_id[s] >= 0) st_slots.landmarks.col(s) = world.col(slot_id[s]);
        }
        std::vector<LandmarkObservation> observations;
        int next_slot = 0;
        for (int id : visible) {
          int s = -1;
          for (int k = 0; k < n; ++k) {
            if (slot_id[k] == id) { s = k; break; }
          }
          const bool fresh = s < 0;
          if (fresh) {
            while (next_slot < n &&
                   (slot_id[next_slot] >= 0 && still_visible[next_slot])) {
              ++next_slot;
            }
            if (next_slot >= n) continue;
            s = next_slot++;
            if (slot_id[s] >= 0) reset_landmark(os, s, ocfg.p0_l);
            slot_id[s] = id;
            st_slots.landmarks.col(s) = world.col(id);
          }
          LandmarkObservation obs = measure(st_slots, s, cfg.modality, rig);
          obs = corrupt(obs, cfg, rng);
          obs.landmark_id = s;
          if (fresh) init_landmark(os, obs, rig, ocfg.init_depth);
          observations.push_back(obs);
        }
        if (enable_updates) update(os, observations, rig);
        res.t.push_back(t_cam - t_begin);
        res.est_p.push_back(os.xhat.x1);
        res.gt_p.push_back(pose->p);
      }
    }
  }

  res.rms_position = align_and_rms(res.t, res.est_p, res.gt_p);
  res.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

}  // namespace lievio
