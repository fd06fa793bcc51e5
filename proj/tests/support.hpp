#pragma once

#include <filesystem>
#include <fstream>
#include <random>

#include "lievio/lievio.hpp"

namespace testsupport {

using namespace lievio;

inline Vec3 rand_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return Vec3(g(rng), g(rng), g(rng));
}

inline Rotation rand_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 3.0);
  Vec3 axis = rand_vec3(rng);
  while (axis.norm() < 1e-6) axis = rand_vec3(rng);
  return angle_axis(angle(rng), Vec3(axis.normalized()));
}

inline GroupElement rand_group(std::mt19937_64& rng, int n, double scale = 2.0) {
  Mat3X xl(3, n);
  for (int i = 0; i < n; ++i) xl.col(i) = rand_vec3(rng, scale);
  return GroupElement(rand_rotation(rng), rand_vec3(rng, scale),
                      rand_vec3(rng, scale), rand_vec3(rng, scale), xl);
}

inline RigidBodyState rand_state(std::mt19937_64& rng, int n, double scale = 2.0) {
  RigidBodyState s;
  s.rot = rand_rotation(rng);
  s.p = rand_vec3(rng, scale);
  s.v = rand_vec3(rng, scale);
  s.g = rand_vec3(rng, scale);
  s.landmarks = Mat3X(3, n);
  for (int i = 0; i < n; ++i) s.landmarks.col(i) = s.p + rand_vec3(rng, 3.0 * scale);
  return s;
}

inline MatX rand_spd(std::mt19937_64& rng, int d, double shift = 0.1) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatX m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  }
  return m * m.transpose() + shift * MatX::Identity(d, d);
}

/// The group-form measurement vector r_i in R^{6+n}:
/// [0_3; 1; 0; 0; -e_i].
inline VecX group_r(int i, int n) {
  VecX r = VecX::Zero(6 + n);
  r(3) = 1.0;
  r(6 + i) = -1.0;
  return r;
}

/// p_c padded to R^{6+n} with the same tail as r_i.
inline VecX group_pc(const Vec3& p_c, int i, int n) {
  VecX out = group_r(i, n);
  out.head<3>() = p_c;
  return out;
}

/// Dense embedding of the camera element M(R_c, 0, 0, 0, 0).
inline MatX embed_cam(const Rotation& r_c, int n) {
  GroupElement xc = GroupElement::identity(n);
  xc.rot = r_c;
  return xc.embed();
}

/// Writes a minimal EuRoC ASL layout (imu0 + ground truth CSVs) generated
/// from the analytic scenario, with an optional time offset in ns.
inline void write_asl_sequence(const std::filesystem::path& dir,
                               const ScenarioConfig& cfg,
                               int64_t t0_ns = 1403636579758555392LL,
                               double gt_rate = 200.0,
                               bool imu_noise = true) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "mav0/imu0");
  fs::create_directories(dir / "mav0/state_groundtruth_estimate0");
  std::mt19937_64 rng(cfg.seed + 12345);
  std::normal_distribution<double> gauss(0.0, 1.0);

  {
    std::ofstream f(dir / "mav0/imu0/data.csv");
    f << "#timestamp [ns],w_RS_S_x [rad s^-1],w_RS_S_y [rad s^-1],w_RS_S_z [rad s^-1],"
         "a_RS_S_x [m s^-2],a_RS_S_y [m s^-2],a_RS_S_z [m s^-2]\n";
    f.precision(15);
    const double dt = 1.0 / cfg.imu_rate;
    for (double t = 0.0; t <= cfg.duration + 1e-9; t += dt) {
      ImuSample imu = truth_at(cfg, t).imu;
      if (imu_noise) {
        imu.omega += cfg.noise.gyro_std * Vec3(gauss(rng), gauss(rng), gauss(rng));
        imu.accel += cfg.noise.accel_std * Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
      f << t0_ns + static_cast<int64_t>(std::llround(t * 1e9)) << ','
        << imu.omega.x() << ',' << imu.omega.y() << ',' << imu.omega.z() << ','
        << imu.accel.x() << ',' << imu.accel.y() << ',' << imu.accel.z() << '\n';
    }
  }
  {
    std::ofstream f(dir / "mav0/state_groundtruth_estimate0/data.csv");
    f << "#timestamp,p_RS_R_x [m],p_RS_R_y [m],p_RS_R_z [m],q_RS_w [],q_RS_x [],"
         "q_RS_y [],q_RS_z [],v_RS_R_x [m s^-1],v_RS_R_y [m s^-1],v_RS_R_z [m s^-1],"
         "b_w_RS_S_x [rad s^-1],b_w_RS_S_y [rad s^-1],b_w_RS_S_z [rad s^-1],"
         "b_a_RS_S_x [m s^-2],b_a_RS_S_y [m s^-2],b_a_RS_S_z [m s^-2]\n";
    f.precision(15);
    const double dt = 1.0 / gt_rate;
    for (double t = 0.0; t <= cfg.duration + 1e-9; t += dt) {
      const RigidBodyState s = truth_at(cfg, t).state;
      const Eigen::Quaterniond q(s.rot.matrix());
      f << t0_ns + static_cast<int64_t>(std::llround(t * 1e9)) << ','
        << s.p.x() << ',' << s.p.y() << ',' << s.p.z() << ','
        << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z() << ','
        << s.v.x() << ',' << s.v.y() << ',' << s.v.z() << ",0,0,0,0,0,0\n";
    }
  }
}

}  // namespace testsupport
