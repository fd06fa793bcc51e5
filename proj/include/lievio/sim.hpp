#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "lievio/observability.hpp"

namespace lievio {

/// Noise levels of the synthetic sensor suite.
struct NoiseConfig {
  double gyro_std = 0.0035;    // rad/s
  double accel_std = 0.095;    // m/s^2
  double bearing_std = 0.5;    // deg
  double relpos_std = 0.05;    // m
};

/// Full description of a simulated experiment: circular trajectory with
/// vertical/roll/pitch oscillations inside a cubic landmark world.
struct ScenarioConfig {
  double radius = 3.0;         // m
  double v_forward = 1.0;      // m/s
  double vert_amp = 1.5;       // m
  double vert_freq = 0.1;      // Hz
  double roll_amp = 5.0;       // deg
  double roll_freq = 0.08;     // Hz
  double pitch_amp = 3.0;      // deg
  double pitch_freq = 0.06;    // Hz
  double duration = 50.0;      // s
  double imu_rate = 200.0;     // Hz
  double cam_rate = 20.0;      // Hz
  int n_world_landmarks = 1000;
  double cube_side = 12.0;     // m
  int max_visible = 50;
  double fov_deg = 120.0;      // horizontal field of view
  bool sample_floor_ceiling = false;
  NoiseConfig noise;
  uint64_t seed = 1;
  Modality modality = Modality::RelativePosition;

  // Initial estimate perturbation (angles applied about seed-random axes).
  double init_att_err_deg = 10.0;
  double init_pos_err_m = 0.3;
  double init_vel_err_mps = 0.1;
  double init_grav_err_deg = 10.0;

  // Gauge transform applied to the whole world (yaw about gravity plus
  // translation); the estimator's unobservable directions.
  double gauge_yaw = 0.0;      // rad
  Vec3 gauge_translation = Vec3::Zero();

  void validate() const {
    if (imu_rate <= 0 || cam_rate <= 0) throw DegenerateInput("scenario: rates must be positive");
    if (fov_deg <= 0 || fov_deg >= 360) throw DegenerateInput("scenario: fov must be in (0, 360)");
    if (radius <= 0 || duration <= 0) throw DegenerateInput("scenario: radius/duration must be positive");
    if (max_visible < 1 || n_world_landmarks < 1) throw DegenerateInput("scenario: landmark counts");
  }
};

inline ScenarioConfig default_scenario() { return ScenarioConfig{}; }

inline Vec3 gravity_vector() { return Vec3(0.0, 0.0, -9.81); }

/// Analytic truth at time t: pose, velocity and the exactly consistent
/// body-frame IMU signals.
struct TruthSample {
  RigidBodyState state;  // landmarks left empty
  ImuSample imu;
};

inline TruthSample truth_at(const ScenarioConfig& cfg, double t) {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  const double w = cfg.v_forward / cfg.radius;
  const double ang = w * t;
  const double wz = 2.0 * pi * cfg.vert_freq;

  const Vec3 p(cfg.radius * cos(ang), cfg.radius * sin(ang), cfg.vert_amp * sin(wz * t));
  const Vec3 v(-cfg.radius * w * sin(ang), cfg.radius * w * cos(ang),
               cfg.vert_amp * wz * cos(wz * t));
  const Vec3 acc(-cfg.radius * w * w * cos(ang), -cfg.radius * w * w * sin(ang),
                 -cfg.vert_amp * wz * wz * sin(wz * t));

  const double d2r = pi / 180.0;
  const double wr = 2.0 * pi * cfg.roll_freq;
  const double wp = 2.0 * pi * cfg.pitch_freq;
  const double phi = cfg.roll_amp * d2r * sin(wr * t);
  const double phid = cfg.roll_amp * d2r * wr * cos(wr * t);
  const double th = cfg.pitch_amp * d2r * sin(wp * t);
  const double thd = cfg.pitch_amp * d2r * wp * cos(wp * t);
  const double psi = ang + pi / 2.0;  // body x tangent to the circle
  const double psid = w;

  const Rotation rot = angle_axis(psi, Vec3::UnitZ()) *
                       angle_axis(th, Vec3::UnitY()) *
                       angle_axis(phi, Vec3::UnitX());
  // ZYX Euler-rate to body-rate map.
  const Vec3 omega(phid - psid * sin(th),
                   thd * cos(phi) + psid * cos(th) * sin(phi),
                   -thd * sin(phi) + psid * cos(th) * cos(phi));

  TruthSample s;
  s.state.rot = rot;
  s.state.p = p;
  s.state.v = v;
  s.state.g = gravity_vector();
  s.state.t = t;
  s.imu.omega = omega;
  s.imu.accel = rot.matrix().transpose() * (acc - gravity_vector());
  s.imu.t = t;
  return s;
}

inline RigidBodyState generate_truth(const ScenarioConfig& cfg, double t) {
  return truth_at(cfg, t).state;
}

/// N points uniform on the vertical walls of the cube (optionally also
/// floor/ceiling), centered on the trajectory.
inline Mat3X generate_landmarks(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  const double h = 0.5 * cfg.cube_side;
  std::uniform_int_distribution<int> wall(0, cfg.sample_floor_ceiling ? 5 : 3);
  std::uniform_real_distribution<double> coord(-h, h);
  Mat3X out(3, cfg.n_world_landmarks);
  for (int i = 0; i < cfg.n_world_landmarks; ++i) {
    const int f = wall(rng);
    const double a = coord(rng), b = coord(rng);
    switch (f) {
      case 0: out.col(i) = Vec3(h, a, b); break;
      case 1: out.col(i) = Vec3(-h, a, b); break;
      case 2: out.col(i) = Vec3(a, h, b); break;
      case 3: out.col(i) = Vec3(a, -h, b); break;
      case 4: out.col(i) = Vec3(a, b, h); break;
      default: out.col(i) = Vec3(a, b, -h); break;
    }
  }
  return out;
}

/// Indices of landmarks inside the camera FOV cone, nearest-first,
/// truncated to max_visible.
inline std::vector<int> select_visible(const RigidBodyState& state,
                                       const Mat3X& landmarks,
                                       const ScenarioConfig& cfg,
                                       const SensorRig& rig) {
  const double cos_half = std::cos(0.5 * cfg.fov_deg * std::numbers::pi / 180.0);
  const Mat3 rt = state.rot.matrix().transpose();
  const Mat3 rct = rig.cam1.r_c.matrix().transpose();
  std::vector<std::pair<double, int>> in_cone;
  for (int i = 0; i < landmarks.cols(); ++i) {
    const Vec3 rel = rct * (rt * (landmarks.col(i) - state.p) - rig.cam1.p_c);
    const double d = rel.norm();
    if (d <= kCameraCoincidenceEps) continue;
    if (rel.z() / d >= cos_half) in_cone.emplace_back(d, i);
  }
  std::sort(in_cone.begin(), in_cone.end());
  std::vector<int> out;
  const int m = std::min<int>(cfg.max_visible, static_cast<int>(in_cone.size()));
  out.reserve(m);
  for (int k = 0; k < m; ++k) out.push_back(in_cone[k].second);
  return out;
}

namespace detail {

/// Rotates a unit ray by angle ~ N(0, sigma) about a uniformly random
/// orthogonal axis, then renormalizes.
inline Vec3 corrupt_bearing(const Vec3& ray, double sigma_rad, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, sigma_rad);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
  const double angle = gauss(rng);
  const double az = uni(rng);
  Vec3 u = ray.cross(std::abs(ray.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX());
  u.normalize();
  const Vec3 w = ray.cross(u);
  const Vec3 axis = std::cos(az) * u + std::sin(az) * w;
  Vec3 out = exp_so3(angle * axis).matrix() * ray;
  return out / out.norm();
}

}  // namespace detail

/// Additive/rotational Gaussian corruption of one observation.
inline LandmarkObservation corrupt(const LandmarkObservation& obs,
                                   const ScenarioConfig& cfg, std::mt19937_64& rng) {
  LandmarkObservation out = obs;
  if (!obs.visible) return out;
  const double bear_rad = cfg.noise.bearing_std * std::numbers::pi / 180.0;
  switch (obs.modality) {
    case Modality::RelativePosition: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      if (cfg.noise.relpos_std > 0.0) {
        out.y += cfg.noise.relpos_std * Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
      break;
    }
    case Modality::MonoBearing:
      if (bear_rad > 0.0) out.y = detail::corrupt_bearing(obs.y, bear_rad, rng);
      break;
    case Modality::StereoBearing:
      if (bear_rad > 0.0) {
        out.y = detail::corrupt_bearing(obs.y, bear_rad, rng);
        out.y2 = detail::corrupt_bearing(*obs.y2, bear_rad, rng);
      }
      break;
  }
  return out;
}

/// Per-camera-epoch record of one run.
struct RunResult {
  std::vector<double> t;
  std::vector<double> att_err_deg;
  std::vector<Vec3> pos_err;    // inertial p - phat
  std::vector<Vec3> vel_err;    // body-frame, x head
  std::vector<Vec3> grav_err;   // body-frame, x second block
  std::vector<double> x_norm;
  std::vector<VecX> sigma_p;
  std::vector<double> p_eig_min, p_eig_max;
  std::vector<Vec3> truth_p, est_p;
  std::vector<Eigen::Vector4d> truth_q, est_q;  // w x y z
  double wall_seconds = 0.0;
};

struct RunOptions {
  bool track_p_eigs = false;
  bool track_sigma_p = false;
  // Bind fresh landmark slots with the true body-frame relative position
  // placed through the estimate's own pose (exact-range bootstrap) instead
  // of the modality's measurement bootstrap. Used by convergence studies
  // that randomize the vehicle initialization only: the mono assumed-depth
  // error would otherwise dominate x and decay only at the (slow)
  // persistency-of-excitation rate. Binding at the estimate's pose keeps
  // fresh slots consistent with the estimator's unobservable gauge offset.
  bool init_landmarks_at_truth = false;
};

namespace detail {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-6) v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  return v.normalized();
}

inline Vec3 random_unit_orthogonal(const Vec3& ref, std::mt19937_64& rng) {
  Vec3 v = random_unit(rng);
  v -= v.dot(ref.normalized()) * ref.normalized();
  while (v.norm() < 1e-6) {
    v = random_unit(rng);
    v -= v.dot(ref.normalized()) * ref.normalized();
  }
  return v.normalized();
}

inline Eigen::Vector4d quat_wxyz(const Rotation& r) {
  const Eigen::Quaterniond q(r.matrix());
  return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
}

}  // namespace detail

/// Applies the scenario gauge transform (yaw about gravity, translation)
/// to an inertial pose. IMU signals are invariant under it.
struct GaugeTransform {
  Mat3 rot = Mat3::Identity();
  Vec3 trans = Vec3::Zero();

  static GaugeTransform from_config(const ScenarioConfig& cfg) {
    GaugeTransform g;
    g.rot = angle_axis(cfg.gauge_yaw, Vec3::UnitZ()).matrix();
    g.trans = cfg.gauge_translation;
    return g;
  }
  RigidBodyState apply(const RigidBodyState& s) const {
    RigidBodyState out = s;
    out.rot = Rotation::from_matrix(rot * s.rot.matrix());
    out.p = rot * s.p + trans;
    out.v = rot * s.v;
    if (s.landmarks.cols() > 0) {
      out.landmarks = rot * s.landmarks;
      out.landmarks.colwise() += trans;
    }
    return out;
  }
};

/// One full closed-loop run: IMU-rate prediction, camera-rate updates with
/// landmark slot management (max_visible slots, rebinding on dropout).
inline RunResult run_single(const ScenarioConfig& cfg, const ObserverConfig& ocfg,
                            const SensorRig& rig, uint64_t seed,
                            const RunOptions& opt = RunOptions{}) {
  cfg.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const GaugeTransform gauge = GaugeTransform::from_config(cfg);

  Mat3X world = generate_landmarks(cfg, rng);
  world = gauge.rot * world;
  world.colwise() += gauge.trans;

  const int n = cfg.max_visible;
  const int imu_per_cam =
      std::max(1, static_cast<int>(std::round(cfg.imu_rate / cfg.cam_rate)));
  const double imu_dt = 1.0 / cfg.imu_rate;
  const double cam_dt = imu_per_cam * imu_dt;
  const int epochs = static_cast<int>(std::round(cfg.duration * cfg.cam_rate));

  // Initial estimate: truth perturbed by seed-random directions. The
  // directions live in the (gauged) world frame, so a gauged run is the
  // exact gauge image of the corresponding baseline run.
  const RigidBodyState truth0 = gauge.apply(truth_at(cfg, 0.0).state);
  const double d2r = std::numbers::pi / 180.0;
  const Rotation rhat0 =
      exp_so3(cfg.init_att_err_deg * d2r * (gauge.rot * detail::random_unit(rng))) *
      truth0.rot;
  const Vec3 phat0 = truth0.p + cfg.init_pos_err_m * (gauge.rot * detail::random_unit(rng));
  const Vec3 vhat0 = truth0.v + cfg.init_vel_err_mps * (gauge.rot * detail::random_unit(rng));
  const Vec3 ghat0 =
      exp_so3(cfg.init_grav_err_deg * d2r *
              (gauge.rot * detail::random_unit_orthogonal(truth0.g, rng))).matrix() *
      truth0.g;

  ObserverState os = make_observer(n, ocfg, cfg.modality, rhat0, phat0, vhat0, ghat0);

  std::vector<int> slot_id(n, -1);  // world landmark bound to each slot
  RunResult res;
  res.t.reserve(epochs);

  RigidBodyState truth = truth0;
  double t = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    ImuSample imu_mid;  // midpoint-of-interval sample for P propagation
    if (epoch > 0) {
      for (int k = 0; k < imu_per_cam; ++k) {
        // Sample at the interval midpoint; noise in the body frame.
        TruthSample ts = truth_at(cfg, t + 0.5 * imu_dt);
        ImuSample imu = ts.imu;
        if (cfg.noise.gyro_std > 0.0) {
          imu.omega += cfg.noise.gyro_std * Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
        if (cfg.noise.accel_std > 0.0) {
          imu.accel += cfg.noise.accel_std * Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
        if (k == imu_per_cam / 2) imu_mid = imu;
        predict(os, imu, imu_dt, /*propagate_p=*/false);
        t += imu_dt;
      }
      os.riccati = predict_P_imu(os.riccati, imu_mid.omega, cam_dt);
      truth = gauge.apply(truth_at(cfg, t).state);
    }

    // Visibility and slot management.
    const std::vector<int> visible = select_visible(truth, world, cfg, rig);
    std::vector<bool> still_visible(n, false);
    for (int id : visible) {
      for (int s = 0; s < n; ++s) {
        if (slot_id[s] == id) {
          still_visible[s] = true;
          break;
        }
      }
    }
    std::vector<LandmarkObservation> observations;
    RigidBodyState truth_slots = truth;
    truth_slots.landmarks = Mat3X::Zero(3, n);
    for (int s = 0; s < n; ++s) {
      if (slot_id[s] >= 0) truth_slots.landmarks.col(s) = world.col(slot_id[s]);
    }
    int next_slot = 0;
    for (int id : visible) {
      int s = -1;
      for (int k = 0; k < n; ++k) {
        if (slot_id[k] == id) {
          s = k;
          break;
        }
      }
      const bool fresh = s < 0;
      if (fresh) {
        while (next_slot < n && (slot_id[next_slot] >= 0 && still_visible[next_slot])) {
          ++next_slot;
        }
        if (next_slot >= n) continue;  // no free slot
        s = next_slot++;
        if (slot_id[s] >= 0) reset_landmark(os, s, ocfg.p0_l);
        slot_id[s] = id;
        truth_slots.landmarks.col(s) = world.col(id);
      }
      LandmarkObservation obs = measure(truth_slots, s, cfg.modality, rig);
      obs = corrupt(obs, cfg, rng);
      if (fresh) {
        if (opt.init_landmarks_at_truth) {
          const Vec3 y_body =
              truth.rot.matrix().transpose() * (world.col(id) - truth.p);
          os.xhat.xl.col(s) = os.xhat.x1 + os.xhat.rot.matrix() * y_body;
          os.initialized[s] = true;
        } else {
          init_landmark(os, obs, rig, ocfg.init_depth);
        }
      }
      observations.push_back(obs);
    }

    if (opt.track_sigma_p) {
      res.sigma_p.push_back(assemble_innovations(os, observations, rig).first);
    }
    update(os, observations, rig);

    // Diagnostics; unbound slots contribute zero error.
    ErrorDiagnostics diag = compute_error_diagnostics(truth_slots, os);
    for (int s = 0; s < n; ++s) {
      if (slot_id[s] < 0) diag.x.segment<3>(6 + 3 * s).setZero();
    }
    res.t.push_back(t);
    const Mat3 rtilde = truth.rot.matrix() * os.xhat.rot.matrix().transpose();
    res.att_err_deg.push_back(
        std::acos(std::clamp(0.5 * (rtilde.trace() - 1.0), -1.0, 1.0)) / d2r);
    res.pos_err.push_back(truth.p - os.xhat.x1);
    res.vel_err.push_back(diag.x.head<3>());
    res.grav_err.push_back(diag.x.segment<3>(3));
    res.x_norm.push_back(diag.x.norm());
    res.truth_p.push_back(truth.p);
    res.est_p.push_back(os.xhat.x1);
    res.truth_q.push_back(detail::quat_wxyz(truth.rot));
    res.est_q.push_back(detail::quat_wxyz(os.xhat.rot));
    if (opt.track_p_eigs) {
      Eigen::SelfAdjointEigenSolver<MatX> es(os.riccati.p, Eigen::EigenvaluesOnly);
      res.p_eig_min.push_back(es.eigenvalues().minCoeff());
      res.p_eig_max.push_back(es.eigenvalues().maxCoeff());
    }
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

/// Aggregated per-epoch RMSE over independent-seed runs.
struct MonteCarloResult {
  std::vector<double> t;
  std::vector<double> rmse_att_deg, rmse_pos_m, rmse_vel_mps, rmse_grav_mps2;
  int n_runs = 0;
  double wall_seconds = 0.0;
};

inline MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg,
                                        const ObserverConfig& ocfg,
                                        const SensorRig& rig, int n_runs) {
  if (n_runs < 1) throw DegenerateInput("run_monte_carlo: n_runs >= 1 required");
  MonteCarloResult mc;
  mc.n_runs = n_runs;
  std::vector<double> sq_att, sq_pos, sq_vel, sq_grav;
  for (int k = 0; k < n_runs; ++k) {
    const RunResult r = run_single(cfg, ocfg, rig, cfg.seed + k);
    if (k == 0) {
      mc.t = r.t;
      sq_att.assign(r.t.size(), 0.0);
      sq_pos.assign(r.t.size(), 0.0);
      sq_vel.assign(r.t.size(), 0.0);
      sq_grav.assign(r.t.size(), 0.0);
    }
    for (size_t i = 0; i < r.t.size(); ++i) {
      sq_att[i] += r.att_err_deg[i] * r.att_err_deg[i];
      sq_pos[i] += r.pos_err[i].squaredNorm();
      sq_vel[i] += r.vel_err[i].squaredNorm();
      sq_grav[i] += r.grav_err[i].squaredNorm();
    }
    mc.wall_seconds += r.wall_seconds;
  }
  const auto rms = [n_runs](double s) { return std::sqrt(s / n_runs); };
  mc.rmse_att_deg.reserve(mc.t.size());
  for (size_t i = 0; i < mc.t.size(); ++i) {
    mc.rmse_att_deg.push_back(rms(sq_att[i]));
    mc.rmse_pos_m.push_back(rms(sq_pos[i]));
    mc.rmse_vel_mps.push_back(rms(sq_vel[i]));
    mc.rmse_grav_mps2.push_back(rms(sq_grav[i]));
  }
  return mc;
}

/// Observability Gramian windows along the scenario: landmark bindings are
/// frozen at each window start; C(tau) tracks their visibility/projectors.
inline std::vector<GramianReport> scenario_gramians(const ScenarioConfig& cfg,
                                                    const SensorRig& rig,
                                                    double delta = 2.0,
                                                    bool stationary = false,
                                                    double mu = kGramianMuDefault) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const Mat3X world = generate_landmarks(cfg, rng);
  auto state_at = [&](double tau) { return truth_at(cfg, stationary ? 0.0 : tau).state; };
  auto omega_at = [&](double tau) -> Vec3 {
    return stationary ? Vec3::Zero() : truth_at(cfg, tau).imu.omega;
  };

  std::vector<GramianReport> reports;
  for (double t0 = 0.0; t0 + delta <= cfg.duration + 1e-9; t0 += delta) {
    const std::vector<int> ids = select_visible(state_at(t0), world, cfg, rig);
    const int n = static_cast<int>(ids.size());
    if (n == 0) continue;
    RigidBodyState bound = state_at(t0);
    bound.landmarks = Mat3X(3, n);
    for (int s = 0; s < n; ++s) bound.landmarks.col(s) = world.col(ids[s]);

    auto a_of_t = [&](double tau) { return build_A(omega_at(tau), n); };
    auto c_of_t = [&](double tau) -> MatX {
      RigidBodyState st = state_at(tau);
      st.landmarks = bound.landmarks;
      const std::vector<int> vis = select_visible(st, world, cfg, rig);
      std::vector<LandmarkObservation> obs;
      for (int s = 0; s < n; ++s) {
        const bool in_view = std::find(vis.begin(), vis.end(), ids[s]) != vis.end();
        if (in_view) obs.push_back(measure(st, s, cfg.modality, rig));
      }
      return build_C(obs, rig, n).c;
    };
    reports.push_back(gramian(a_of_t, c_of_t, t0, delta, 1.0 / cfg.cam_rate, mu));
  }
  return reports;
}

/// Inertial bearing history of one world landmark (for the monocular
/// persistent-excitation certificate).
inline std::vector<BearingSample> bearing_history(const ScenarioConfig& cfg,
                                                  const SensorRig& rig,
                                                  const Vec3& landmark) {
  std::vector<BearingSample> hist;
  const double dt = 1.0 / cfg.cam_rate;
  for (double t = 0.0; t <= cfg.duration + 1e-9; t += dt) {
    const RigidBodyState st = truth_at(cfg, t).state;
    RigidBodyState one = st;
    one.landmarks = landmark;
    const LandmarkObservation obs = measure(one, 0, Modality::MonoBearing, rig);
    BearingSample b;
    b.t = t;
    b.dir_world = st.rot.matrix() * (rig.cam1.r_c.matrix() * obs.y);
    hist.push_back(b);
  }
  return hist;
}

/// CSV emitters (one-line headers naming units).
inline void write_rmse_csv(std::ostream& out, const MonteCarloResult& mc) {
  out << "t,att_deg,pos_m,vel_mps,grav_mps2\n";
  for (size_t i = 0; i < mc.t.size(); ++i) {
    out << mc.t[i] << ',' << mc.rmse_att_deg[i] << ',' << mc.rmse_pos_m[i] << ','
        << mc.rmse_vel_mps[i] << ',' << mc.rmse_grav_mps2[i] << '\n';
  }
}

inline void write_traj_csv(std::ostream& out, const std::vector<double>& t,
                           const std::vector<Vec3>& p,
                           const std::vector<Eigen::Vector4d>& q) {
  out << "t_s,px_m,py_m,pz_m,qw,qx,qy,qz\n";
  for (size_t i = 0; i < t.size(); ++i) {
    out << t[i] << ',' << p[i].x() << ',' << p[i].y() << ',' << p[i].z() << ','
        << q[i](0) << ',' << q[i](1) << ',' << q[i](2) << ',' << q[i](3) << '\n';
  }
}

}  // namespace lievio
