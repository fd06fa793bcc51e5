#pragma once

#include <optional>
#include <vector>

#include "lievio/dynamics.hpp"
#include "lievio/lie_group.hpp"

namespace lievio {

enum class Modality { RelativePosition, StereoBearing, MonoBearing };

/// Camera mounting. r_c is the paper's R_c: it maps camera-frame vectors
/// to the body frame (EuRoC T_BS rotation); p_c is the camera origin in
/// the body frame.
struct CameraExtrinsics {
  Rotation r_c;
  Vec3 p_c = Vec3::Zero();
};

struct CameraIntrinsics {
  Mat3 k = Mat3::Identity();
};

/// Stereo rig; cam1 is the right camera (also used for monocular).
struct SensorRig {
  CameraExtrinsics cam1;
  CameraExtrinsics cam2;

  static SensorRig identity() { return SensorRig{}; }

  /// Stereo extrinsics of the EuRoC MAV rig (cam0/cam1 T_BS).
  static SensorRig euroc() {
    SensorRig rig;
    Mat3 r0, r1;
    r0 << 0.0148655429818, -0.999880929698, 0.00414029679422,
          0.999557249008, 0.0149672133247, 0.025715529948,
         -0.0257744366974, 0.00375618835797, 0.999660727178;
    r1 << 0.0125552670891, -0.999755099723, 0.0182237714554,
          0.999598781151, 0.0130119051815, 0.0251588363115,
         -0.0253898008918, 0.0179005838253, 0.999517347078;
    rig.cam1.r_c = Rotation::from_matrix(r0);
    rig.cam1.p_c = Vec3(-0.0216401454975, -0.064676986768, 0.00981073058949);
    rig.cam2.r_c = Rotation::from_matrix(r1);
    rig.cam2.p_c = Vec3(-0.0198435579556, 0.0453689425024, 0.00786212447038);
    return rig;
  }
};

inline CameraIntrinsics euroc_cam0_intrinsics() {
  CameraIntrinsics intr;
  intr.k << 458.654, 0.0, 367.215,
            0.0, 457.296, 248.375,
            0.0, 0.0, 1.0;
  return intr;
}

/// One landmark observation. For StereoBearing y is the right-camera ray
/// and y2 the left-camera ray; for RelativePosition y is in meters.
struct LandmarkObservation {
  int landmark_id = -1;
  Modality modality = Modality::RelativePosition;
  Vec3 y = Vec3::Zero();
  std::optional<Vec3> y2;
  bool visible = false;
  double t = 0.0;

  static LandmarkObservation invisible(int id, Modality m, double t) {
    LandmarkObservation o;
    o.landmark_id = id;
    o.modality = m;
    o.t = t;
    return o;
  }
};

inline constexpr double kCameraCoincidenceEps = 1e-6;  // meters

namespace detail {

inline Vec3 camera_ray(const RigidBodyState& s, const Vec3& p_i,
                       const CameraExtrinsics& cam) {
  const Vec3 rel = s.rot.matrix().transpose() * (p_i - s.p) - cam.p_c;
  if (rel.norm() <= kCameraCoincidenceEps) {
    throw SingularMeasurement("landmark at camera center");
  }
  const Vec3 in_cam = cam.r_c.matrix().transpose() * rel;
  return in_cam / in_cam.norm();
}

}  // namespace detail

/// Ideal (noiseless) measurement of landmark i in the given modality.
inline LandmarkObservation measure(const RigidBodyState& s, int i,
                                   Modality modality, const SensorRig& rig) {
  if (i < 0 || i >= s.n()) throw DimensionMismatch("measure: landmark index");
  LandmarkObservation o;
  o.landmark_id = i;
  o.modality = modality;
  o.visible = true;
  o.t = s.t;
  const Vec3 p_i = s.landmarks.col(i);
  switch (modality) {
    case Modality::RelativePosition:
      o.y = s.rot.matrix().transpose() * (p_i - s.p);
      break;
    case Modality::MonoBearing:
      o.y = detail::camera_ray(s, p_i, rig.cam1);
      break;
    case Modality::StereoBearing:
      o.y = detail::camera_ray(s, p_i, rig.cam1);
      o.y2 = detail::camera_ray(s, p_i, rig.cam2);
      break;
  }
  return o;
}

/// Unit bearing from pixel coordinates: normalize(K^-1 [u, v, 1]).
inline Vec3 pixel_to_bearing(const CameraIntrinsics& intr, double u, double v) {
  const Vec3 ray = intr.k.inverse() * Vec3(u, v, 1.0);
  return ray / ray.norm();
}

/// Pixel coordinates of a camera-frame ray (used by tests and synthesis).
inline Eigen::Vector2d bearing_to_pixel(const CameraIntrinsics& intr,
                                        const Vec3& ray) {
  const Vec3 z = intr.k * (ray / ray.z());
  return Eigen::Vector2d(z.x(), z.y());
}

/// Per-landmark innovation sigma^p_i and its projector block Pi_i.
struct LandmarkInnovation {
  Vec3 sigma_p = Vec3::Zero();
  Mat3 pi = Mat3::Zero();
};

/// sigma^p_i = Q ytilde_i for the three measurement models, with
/// yhat_i = Rhat^T (phat_i - phat).
inline LandmarkInnovation innovation(const LandmarkObservation& obs,
                                     const GroupElement& xhat,
                                     const SensorRig& rig) {
  if (!obs.visible) throw DegenerateInput("innovation: observation not visible");
  const int i = obs.landmark_id;
  if (i < 0 || i >= xhat.n()) throw DimensionMismatch("innovation: landmark index");
  const Vec3 yhat =
      xhat.rot.matrix().transpose() * (xhat.xl.col(i) - xhat.x1);

  LandmarkInnovation out;
  switch (obs.modality) {
    case Modality::RelativePosition:
      out.pi = Mat3::Identity();
      out.sigma_p = yhat - obs.y;
      break;
    case Modality::MonoBearing: {
      out.pi = project3(rig.cam1.r_c.matrix() * obs.y);
      out.sigma_p = out.pi * (yhat - rig.cam1.p_c);
      break;
    }
    case Modality::StereoBearing: {
      if (!obs.y2) throw DegenerateInput("innovation: stereo obs missing second ray");
      const Mat3 pi1 = project3(rig.cam1.r_c.matrix() * obs.y);
      const Mat3 pi2 = project3(rig.cam2.r_c.matrix() * (*obs.y2));
      out.pi = pi1 + pi2;
      out.sigma_p = pi1 * (yhat - rig.cam1.p_c) + pi2 * (yhat - rig.cam2.p_c);
      break;
    }
  }
  return out;
}

/// The 3n x 3(n+2) output matrix C(t): block row i carries Pi_i in block
/// column i+2. Rows of invisible landmarks are zero.
struct OutputMatrix {
  MatX c;
  std::vector<Mat3> pi_blocks;
  int n = 0;
};

inline OutputMatrix build_C(const std::vector<LandmarkObservation>& observations,
                            const SensorRig& rig, int n) {
  OutputMatrix out;
  out.n = n;
  out.pi_blocks.assign(n, Mat3::Zero());
  for (const auto& obs : observations) {
    if (!obs.visible) continue;
    if (obs.landmark_id < 0 || obs.landmark_id >= n) {
      throw DimensionMismatch("build_C: landmark index out of range");
    }
    Mat3 pi;
    switch (obs.modality) {
      case Modality::RelativePosition:
        pi = Mat3::Identity();
        break;
      case Modality::MonoBearing:
        pi = project3(rig.cam1.r_c.matrix() * obs.y);
        break;
      case Modality::StereoBearing:
        if (!obs.y2) throw DegenerateInput("build_C: stereo obs missing second ray");
        pi = project3(rig.cam1.r_c.matrix() * obs.y) +
             project3(rig.cam2.r_c.matrix() * (*obs.y2));
        break;
    }
    out.pi_blocks[obs.landmark_id] = pi;
  }
  out.c = MatX::Zero(3 * n, 3 * (n + 2));
  for (int i = 0; i < n; ++i) {
    out.c.block<3, 3>(3 * i, 3 * (i + 2)) = out.pi_blocks[i];
  }
  return out;
}

}  // namespace lievio
