#pragma once

#include <vector>

#include "lievio/riccati.hpp"

namespace lievio {

/// Tuning for the cascaded observer. Gains for the translational part
/// come from the Riccati equation; k_r is the constant attitude gain.
struct ObserverConfig {
  // The attitude innovation ghat x g scales with |g|^2 ~ 96; k_r = 0.05
  // gives a ~0.2 s attitude time constant, well inside the stable region
  // of the 200 Hz discrete loop.
  double k_r = 0.05;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  // P(0) = diag(p0_v I3, p0_g I3, p0_l I3n)
  double p0_v = 1.0;
  double p0_g = 0.1;
  double p0_l = 1.0;

  // V = diag(v_v I3, v_g I3, v_l I3n)
  double v_v = 0.01;
  double v_g = 1e-5;
  double v_l = 1e-4;

  // Q = q_std^2 I_{3n}; bearing residuals are metric after the projector,
  // so the bearing weight is expressed through a nominal scene depth.
  double relpos_std = 0.05;        // m
  double bearing_std_m = 0.05;     // m (angular std x nominal depth)

  double init_depth = 5.0;         // m, monocular landmark bootstrap
};

/// Full observer state: group-valued estimate, Riccati state, attitude
/// gain and the known inertial gravity.
struct ObserverState {
  GroupElement xhat;
  RiccatiState riccati;
  double k_r;
  Vec3 g_true;
  std::vector<bool> initialized;

  int n() const { return xhat.n(); }
};

inline RiccatiState make_riccati(int n, const ObserverConfig& cfg, Modality modality) {
  const int d = 3 * (n + 2);
  MatX p0 = MatX::Zero(d, d);
  p0.topLeftCorner<3, 3>() = cfg.p0_v * Mat3::Identity();
  p0.block<3, 3>(3, 3) = cfg.p0_g * Mat3::Identity();
  p0.bottomRightCorner(3 * n, 3 * n) =
      cfg.p0_l * MatX::Identity(3 * n, 3 * n);

  MatX v = MatX::Zero(d, d);
  v.topLeftCorner<3, 3>() = cfg.v_v * Mat3::Identity();
  v.block<3, 3>(3, 3) = cfg.v_g * Mat3::Identity();
  v.bottomRightCorner(3 * n, 3 * n) = cfg.v_l * MatX::Identity(3 * n, 3 * n);

  const double q_std = modality == Modality::RelativePosition
                           ? cfg.relpos_std
                           : cfg.bearing_std_m;
  MatX q = q_std * q_std * MatX::Identity(3 * n, 3 * n);
  return RiccatiState(p0, v, q);
}

inline ObserverState make_observer(int n, const ObserverConfig& cfg, Modality modality,
                                   const Rotation& rot0, const Vec3& p0,
                                   const Vec3& v0, const Vec3& g0) {
  if (cfg.k_r <= 0.0) throw DegenerateInput("make_observer: k_r must be positive");
  ObserverState os{GroupElement(rot0, p0, v0, g0, Mat3X::Zero(3, n)),
                   make_riccati(n, cfg, modality), cfg.k_r, cfg.gravity,
                   std::vector<bool>(n, false)};
  return os;
}

/// Attitude innovation ghat x g.
inline Vec3 sigma_R(const Vec3& ghat, const Vec3& g_true) {
  return ghat.cross(g_true);
}

/// Stationary-start gravity bootstrap: the accelerometer reads -R^T g at
/// rest, so ghat(0) = -|g| Rhat a / |a|.
inline Vec3 init_gravity_from_accel(const Rotation& rhat, const Vec3& accel,
                                    double g_mag = 9.81) {
  if (accel.norm() < 1e-9) throw DegenerateInput("init_gravity_from_accel: zero accel");
  return -g_mag * (rhat.matrix() * accel).normalized();
}

/// Error-system matrix A(t) of the translational subsystem, 3(n+2) square.
inline MatX build_A(const Vec3& omega, int n) {
  const int d = 3 * (n + 2);
  MatX a = MatX::Zero(d, d);
  const Mat3 nw = -skew(omega);
  a.topLeftCorner<3, 3>() = nw;
  a.block<3, 3>(0, 3) = Mat3::Identity();
  a.block<3, 3>(3, 3) = nw;
  for (int i = 0; i < n; ++i) {
    a.block<3, 3>(6 + 3 * i, 0) = Mat3::Identity();
    a.block<3, 3>(6 + 3 * i, 6 + 3 * i) = nw;
  }
  return a;
}

inline MatX build_A(const ImuSample& imu, int n) { return build_A(imu.omega, n); }

namespace detail {

/// A(omega) * m without materializing A.
inline MatX a_product(const Vec3& omega, const MatX& m) {
  const int n = static_cast<int>(m.rows()) / 3 - 2;
  const Mat3 w = skew(omega);
  MatX out(m.rows(), m.cols());
  out.topRows<3>() = -w * m.topRows<3>() + m.middleRows<3>(3);
  out.middleRows<3>(3) = -w * m.middleRows<3>(3);
  for (int i = 0; i < n; ++i) {
    out.middleRows<3>(6 + 3 * i) = m.topRows<3>() - w * m.middleRows<3>(6 + 3 * i);
  }
  return out;
}

}  // namespace detail

/// predict_P specialized to A(omega); same RK4, structured products.
inline RiccatiState predict_P_imu(const RiccatiState& rs, const Vec3& omega, double dt) {
  if (dt <= 0.0) throw DegenerateInput("predict_P_imu: dt must be positive");
  RiccatiState out = rs;
  out.p = detail::rk4_matrix(rs.p, dt, [&](const MatX& p) -> MatX {
    const MatX ap = detail::a_product(omega, p);
    return ap + ap.transpose() + rs.v_noise;
  });
  detail::symmetrize(out.p);
  detail::check_finite(out.p);
  return out;
}

/// Gains selected from the Riccati gain L(t). The estimate jumps apply
/// Rhat * (gain) * sigma blockwise, so selecting the raw blocks of L
/// (K_v = L top, K_g = L middle, Gamma = -L bottom, K_p = 0) realizes the
/// error contraction x+ = (I - L C) x exactly.
struct GainSet {
  MatX k_p;       // 3 x 3n
  MatX k_v;       // 3 x 3n
  MatX k_g;       // 3 x 3n
  MatX gamma;     // 3n x 3n
  VecX sigma_p;   // 3n
  Vec3 sigma_r = Vec3::Zero();
};

inline GainSet extract_gains(const MatX& l, int n) {
  if (l.rows() != 3 * (n + 2) || l.cols() != 3 * n) {
    throw DimensionMismatch("extract_gains: L dimensions");
  }
  GainSet gs;
  gs.k_v = l.topRows<3>();
  gs.k_g = l.middleRows<3>(3);
  gs.k_p = MatX::Zero(3, 3 * n);
  gs.gamma = -l.bottomRows(3 * n);
  gs.sigma_p = VecX::Zero(3 * n);
  return gs;
}

/// Continuous prediction between camera frames (Algorithm lines 5-10):
/// Rhatdot = Rhat[w + Rhat^T sigma_R]_x and the sigma_R-rotated
/// translational kinematics. The gravity estimate is rotated exactly, so
/// its norm is conserved. Set propagate_p = false when the caller
/// propagates P on a coarser grid.
inline void predict(ObserverState& os, const ImuSample& imu, double dt,
                    bool propagate_p = true) {
  if (dt <= 0.0) throw DegenerateInput("predict: dt must be positive");
  const Vec3 sr = os.k_r * sigma_R(os.xhat.x3, os.g_true);
  const Mat3 rhat0 = os.xhat.rot.matrix();
  const Vec3 omega_eff = imu.omega + rhat0.transpose() * sr;

  // Substitution q = Theta(tau)^T phat keeps the sigma_R rotation exact:
  // qdot = w, wdot = ghat(0) + Theta^T Rhat(tau) a.
  const Vec3 ghat0 = os.xhat.x3;
  Vec3 q = os.xhat.x1;
  Vec3 w = os.xhat.x2;
  detail::rk4_pv(q, w, dt, [&](double tau) -> Vec3 {
    const Mat3 theta_t = exp_so3(tau * sr).matrix().transpose();
    return ghat0 + theta_t * (rhat0 * exp_so3(tau * omega_eff).matrix()) * imu.accel;
  });

  const Mat3 theta = exp_so3(dt * sr).matrix();
  os.xhat.x1 = theta * q;
  os.xhat.x2 = theta * w;
  os.xhat.x3 = theta * ghat0;
  os.xhat.xl = theta * os.xhat.xl;
  os.xhat.rot = os.xhat.rot * exp_so3(dt * omega_eff);

  if (!os.xhat.x1.allFinite() || !os.xhat.x2.allFinite()) {
    throw PropagationError("predict: non-finite state");
  }
  if (propagate_p) {
    os.riccati = predict_P_imu(os.riccati, imu.omega, dt);
  }
}

/// Stacks per-landmark innovations into sigma^p and the output matrix,
/// masking invisible or uninitialized landmarks with zero rows.
inline std::pair<VecX, OutputMatrix> assemble_innovations(
    const ObserverState& os, const std::vector<LandmarkObservation>& observations,
    const SensorRig& rig) {
  const int n = os.n();
  VecX sigma_p = VecX::Zero(3 * n);
  std::vector<LandmarkObservation> usable;
  usable.reserve(observations.size());
  for (const auto& obs : observations) {
    if (!obs.visible) continue;
    if (obs.landmark_id < 0 || obs.landmark_id >= n) {
      throw DimensionMismatch("assemble_innovations: landmark index");
    }
    if (!os.initialized[obs.landmark_id]) continue;
    usable.push_back(obs);
    sigma_p.segment<3>(3 * obs.landmark_id) = innovation(obs, os.xhat, rig).sigma_p;
  }
  return {sigma_p, build_C(usable, rig, n)};
}

/// Intermittent measurement update (Algorithm lines 12-20). No-op when no
/// visible initialized landmark exists. Rhat is not jumped.
inline void update(ObserverState& os, const std::vector<LandmarkObservation>& observations,
                   const SensorRig& rig) {
  bool any = false;
  for (const auto& obs : observations) {
    if (obs.visible && obs.landmark_id >= 0 && obs.landmark_id < os.n() &&
        os.initialized[obs.landmark_id]) {
      any = true;
      break;
    }
  }
  if (!any) return;

  auto [sigma_p, c] = assemble_innovations(os, observations, rig);
  const MatX l = gain_L(os.riccati, c);
  GainSet gs = extract_gains(l, os.n());
  gs.sigma_p = sigma_p;

  const Mat3& rhat = os.xhat.rot.matrix();
  os.xhat.x1 += rhat * (gs.k_p * sigma_p);
  os.xhat.x2 += rhat * (gs.k_v * sigma_p);
  os.xhat.x3 += rhat * (gs.k_g * sigma_p);
  const VecX dl = gs.gamma * sigma_p;
  for (int i = 0; i < os.n(); ++i) {
    os.xhat.xl.col(i) += rhat * dl.segment<3>(3 * i);
  }
  os.riccati = correct_P(os.riccati, l, c);
}

/// Bootstrap a landmark estimate from its first observation. Bearings use
/// the configured depth (mono) or two-ray triangulation (stereo).
inline void init_landmark(ObserverState& os, const LandmarkObservation& obs,
                          const SensorRig& rig, double assumed_depth) {
  const int i = obs.landmark_id;
  if (i < 0 || i >= os.n()) throw DimensionMismatch("init_landmark: index");
  if (os.initialized[i]) throw DegenerateInput("init_landmark: already initialized");
  Vec3 y_body;
  switch (obs.modality) {
    case Modality::RelativePosition:
      y_body = obs.y;
      break;
    case Modality::MonoBearing:
      y_body = rig.cam1.p_c + assumed_depth * (rig.cam1.r_c.matrix() * obs.y);
      break;
    case Modality::StereoBearing: {
      if (!obs.y2) throw DegenerateInput("init_landmark: stereo obs missing second ray");
      const Vec3 d1 = rig.cam1.r_c.matrix() * obs.y;
      const Vec3 d2 = rig.cam2.r_c.matrix() * (*obs.y2);
      const Mat3 m = project3(d1) + project3(d2);
      const Vec3 rhs = project3(d1) * rig.cam1.p_c + project3(d2) * rig.cam2.p_c;
      // Near-parallel rays leave m ill-conditioned; fall back to the
      // mono-style bootstrap in that case.
      Eigen::FullPivLU<Mat3> lu(m);
      if (lu.isInvertible()) {
        y_body = lu.solve(rhs);
      } else {
        y_body = rig.cam1.p_c + assumed_depth * d1;
      }
      break;
    }
  }
  os.xhat.xl.col(i) = os.xhat.x1 + os.xhat.rot.matrix() * y_body;
  os.initialized[i] = true;
}

/// Frees a landmark slot for rebinding: clears the flag and resets the
/// corresponding P rows/columns to the prior.
inline void reset_landmark(ObserverState& os, int i, double p0_l) {
  if (i < 0 || i >= os.n()) throw DimensionMismatch("reset_landmark: index");
  os.initialized[i] = false;
  const int k = 6 + 3 * i;
  os.riccati.p.middleRows<3>(k).setZero();
  os.riccati.p.middleCols<3>(k).setZero();
  os.riccati.p.block<3, 3>(k, k) = p0_l * Mat3::Identity();
}

/// Translational error state, reduced attitude and Lyapunov diagnostics.
struct ErrorDiagnostics {
  VecX x;                       // 3(n+2)
  Vec3 breve_g = Vec3::Zero();  // R~^T g, on the sphere |g|
  double lyap_vp = 0.0;         // x^T P^-1 x
  double lyap_l1 = 0.0;         // 1/2 |g - breve_g|^2
};

inline ErrorDiagnostics compute_error_diagnostics(const RigidBodyState& truth,
                                                  const ObserverState& os) {
  if (truth.n() != os.n()) throw DimensionMismatch("diagnostics: landmark counts");
  const int n = os.n();
  const Mat3 rtilde = truth.rot.matrix() * os.xhat.rot.matrix().transpose();
  const Vec3 ptilde = truth.p - rtilde * os.xhat.x1;
  const Vec3 vtilde = truth.v - rtilde * os.xhat.x2;
  const Vec3 gtilde = truth.g - rtilde * os.xhat.x3;
  const Mat3 rt = truth.rot.matrix().transpose();

  ErrorDiagnostics d;
  d.x = VecX::Zero(3 * (n + 2));
  d.x.head<3>() = rt * vtilde;
  d.x.segment<3>(3) = rt * gtilde;
  for (int i = 0; i < n; ++i) {
    const Vec3 ptilde_i = truth.landmarks.col(i) - rtilde * os.xhat.xl.col(i);
    d.x.segment<3>(6 + 3 * i) = rt * (ptilde - ptilde_i);
  }
  d.breve_g = rtilde.transpose() * truth.g;
  d.lyap_vp = d.x.dot(os.riccati.p.ldlt().solve(d.x));
  d.lyap_l1 = 0.5 * (truth.g - d.breve_g).squaredNorm();
  return d;
}

/// Continuous-mode step: measurements treated as continuously available,
/// gains L = P C^T Q^{-1} from the CRE. Used for Lyapunov diagnostics and
/// continuous-mode simulation; Rhat and the gains are held over the step
/// while the translational estimates are integrated with RK4.
inline void step_continuous(ObserverState& os, const ImuSample& imu,
                            const std::vector<LandmarkObservation>& observations,
                            const SensorRig& rig, double dt) {
  auto [sigma_unused, c] = assemble_innovations(os, observations, rig);
  (void)sigma_unused;
  const MatX qinv_ct = os.riccati.q_noise.ldlt().solve(c.c).transpose();
  const MatX l = os.riccati.p * qinv_ct;  // P C^T Q^-1
  const GainSet gs = extract_gains(l, os.n());

  const Vec3 sr = os.k_r * sigma_R(os.xhat.x3, os.g_true);
  const Mat3 srx = skew(sr);
  const Mat3& rhat = os.xhat.rot.matrix();
  const int n = os.n();

  struct Est {
    Vec3 p, v, g;
    Mat3X pl;
  };
  auto deriv = [&](const Est& e) -> Est {
    GroupElement xh = os.xhat;
    xh.x1 = e.p;
    xh.x2 = e.v;
    xh.x3 = e.g;
    xh.xl = e.pl;
    VecX sp = VecX::Zero(3 * n);
    for (const auto& obs : observations) {
      if (!obs.visible || !os.initialized[obs.landmark_id]) continue;
      sp.segment<3>(3 * obs.landmark_id) = innovation(obs, xh, rig).sigma_p;
    }
    Est d;
    d.p = srx * e.p + e.v + rhat * (gs.k_p * sp);
    d.v = srx * e.v + e.g + rhat * imu.accel + rhat * (gs.k_v * sp);
    d.g = srx * e.g + rhat * (gs.k_g * sp);
    const VecX dl = gs.gamma * sp;
    d.pl = srx * e.pl;
    for (int i = 0; i < n; ++i) d.pl.col(i) += rhat * dl.segment<3>(3 * i);
    return d;
  };
  auto axpy = [](const Est& e, double h, const Est& k) -> Est {
    return Est{e.p + h * k.p, e.v + h * k.v, e.g + h * k.g, Mat3X(e.pl + h * k.pl)};
  };

  Est e0{os.xhat.x1, os.xhat.x2, os.xhat.x3, os.xhat.xl};
  const Est k1 = deriv(e0);
  const Est k2 = deriv(axpy(e0, 0.5 * dt, k1));
  const Est k3 = deriv(axpy(e0, 0.5 * dt, k2));
  const Est k4 = deriv(axpy(e0, dt, k3));
  os.xhat.x1 = e0.p + dt / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
  os.xhat.x2 = e0.v + dt / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  os.xhat.x3 = e0.g + dt / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g);
  os.xhat.xl = e0.pl + dt / 6.0 * (k1.pl + 2 * k2.pl + 2 * k3.pl + k4.pl);

  const Vec3 omega_eff = imu.omega + rhat.transpose() * sr;
  os.xhat.rot = os.xhat.rot * exp_so3(dt * omega_eff);
  os.riccati = propagate_CRE_continuous(os.riccati, build_A(imu.omega, n), c.c, dt);
}

}  // namespace lievio
