#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "lievio/errors.hpp"

namespace lievio {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3X = Eigen::Matrix3Xd;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

inline constexpr double kOrthoTol = 1e-9;

/// [x]_x, the skew map so3: skew(v) * w == v x w.
inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

inline Vec3 unskew(const Mat3& m) {
  if ((m + m.transpose()).norm() > kOrthoTol) {
    throw DegenerateInput("unskew: matrix is not skew-symmetric");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

/// Rotation matrix in SO(3). Construction re-orthonormalizes (polar
/// factor) whenever drift exceeds 1e-9 and rejects non-rotations.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation from_matrix(const Mat3& m) {
    Mat3 r = m;
    if (ortho_drift(r) > kOrthoTol) {
      Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
      r = svd.matrixU() * svd.matrixV().transpose();
    }
    if (ortho_drift(r) > kOrthoTol || std::abs(r.determinant() - 1.0) > 1e-6) {
      throw DegenerateInput("Rotation: matrix is not close to SO(3)");
    }
    Rotation out;
    out.m_ = r;
    return out;
  }

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }

  Rotation transposed() const {
    Rotation out;
    out.m_ = m_.transpose();
    return out;
  }

  Rotation operator*(const Rotation& o) const { return from_matrix(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  static double ortho_drift(const Mat3& m) {
    return (m.transpose() * m - Mat3::Identity()).norm();
  }

 private:
  Mat3 m_;
};

/// Angle-axis rotation I + sin(t)[v]_x + (1-cos(t))[v]_x^2; the axis must
/// be unit norm.
inline Rotation angle_axis(double theta, const Vec3& axis) {
  if (std::abs(axis.norm() - 1.0) > kOrthoTol) {
    throw DegenerateInput("angle_axis: axis is not unit norm");
  }
  const Mat3 k = skew(axis);
  return Rotation::from_matrix(Mat3::Identity() + std::sin(theta) * k +
                               (1.0 - std::cos(theta)) * k * k);
}

/// Rotation by the vector w*dt (exact exponential of skew(w)*dt).
inline Rotation exp_so3(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-14) return Rotation::identity();
  return angle_axis(theta, Vec3(w / theta));
}

/// Element of SE_{3+n}(3): rotation plus 3+n translational columns.
/// Stored structurally; embed() materializes the (6+n)x(6+n) matrix.
struct GroupElement {
  Rotation rot;
  Vec3 x1 = Vec3::Zero();
  Vec3 x2 = Vec3::Zero();
  Vec3 x3 = Vec3::Zero();
  Mat3X xl;

  GroupElement() : xl(3, 0) {}
  GroupElement(const Rotation& r, const Vec3& a, const Vec3& b, const Vec3& c,
               const Mat3X& l)
      : rot(r), x1(a), x2(b), x3(c), xl(l) {}

  int n() const { return static_cast<int>(xl.cols()); }

  static GroupElement identity(int n) {
    GroupElement e;
    e.xl = Mat3X::Zero(3, n);
    return e;
  }

  MatX embed() const {
    const int d = 6 + n();
    MatX m = MatX::Identity(d, d);
    m.topLeftCorner<3, 3>() = rot.matrix();
    m.block<3, 1>(0, 3) = x1;
    m.block<3, 1>(0, 4) = x2;
    m.block<3, 1>(0, 5) = x3;
    if (n() > 0) m.block(0, 6, 3, n()) = xl;
    return m;
  }

  static GroupElement from_embedding(const MatX& m) {
    const int d = static_cast<int>(m.rows());
    if (m.cols() != d || d < 6) throw DimensionMismatch("from_embedding: bad shape");
    const int n = d - 6;
    if (m.bottomLeftCorner(3 + n, 3).norm() > 1e-9 ||
        (m.bottomRightCorner(3 + n, 3 + n) - MatX::Identity(3 + n, 3 + n)).norm() > 1e-9) {
      throw DegenerateInput("from_embedding: not an SE_{3+n}(3) element");
    }
    GroupElement e;
    e.rot = Rotation::from_matrix(m.topLeftCorner<3, 3>());
    e.x1 = m.block<3, 1>(0, 3);
    e.x2 = m.block<3, 1>(0, 4);
    e.x3 = m.block<3, 1>(0, 5);
    e.xl = m.block(0, 6, 3, n);
    return e;
  }
};

inline GroupElement compose(const GroupElement& a, const GroupElement& b) {
  if (a.n() != b.n()) throw DimensionMismatch("compose: landmark counts differ");
  const Mat3& r = a.rot.matrix();
  return GroupElement(a.rot * b.rot, r * b.x1 + a.x1, r * b.x2 + a.x2,
                      r * b.x3 + a.x3, Mat3X(r * b.xl + a.xl));
}

inline GroupElement inverse(const GroupElement& a) {
  const Mat3 rt = a.rot.matrix().transpose();
  return GroupElement(a.rot.transposed(), -rt * a.x1, -rt * a.x2, -rt * a.x3,
                      Mat3X(-rt * a.xl));
}

/// Element of the Lie algebra se_{3+n}(3).
struct TangentElement {
  Mat3 omega = Mat3::Zero();  // skew-symmetric by construction
  Vec3 x1 = Vec3::Zero();
  Vec3 x2 = Vec3::Zero();
  Vec3 x3 = Vec3::Zero();
  Mat3X xl;

  TangentElement() : xl(3, 0) {}
  TangentElement(const Vec3& w, const Vec3& a, const Vec3& b, const Vec3& c,
                 const Mat3X& l)
      : omega(skew(w)), x1(a), x2(b), x3(c), xl(l) {}

  int n() const { return static_cast<int>(xl.cols()); }

  static TangentElement zero(int n) {
    TangentElement v;
    v.xl = Mat3X::Zero(3, n);
    return v;
  }

  MatX embed() const {
    const int d = 6 + n();
    MatX m = MatX::Zero(d, d);
    m.topLeftCorner<3, 3>() = omega;
    m.block<3, 1>(0, 3) = x1;
    m.block<3, 1>(0, 4) = x2;
    m.block<3, 1>(0, 5) = x3;
    if (n() > 0) m.block(0, 6, 3, n()) = xl;
    return m;
  }
};

/// Column-major stacking of a 3xn matrix into R^{3n}.
inline VecX vectorize(const Mat3X& m) {
  return Eigen::Map<const VecX>(m.data(), m.size());
}

inline Mat3X unvectorize(const VecX& v) {
  if (v.size() % 3 != 0) throw DimensionMismatch("unvectorize: length not divisible by 3");
  return Eigen::Map<const Mat3X>(v.data(), 3, v.size() / 3);
}

inline constexpr double kProjectionEps = 1e-9;

/// Orthogonal projector I - x x^T / |x|^2 onto the complement of x.
inline MatX project(const VecX& x) {
  const double n2 = x.squaredNorm();
  if (std::sqrt(n2) <= kProjectionEps) {
    throw DegenerateInput("project: near-zero input");
  }
  const int d = static_cast<int>(x.size());
  return MatX::Identity(d, d) - (x * x.transpose()) / n2;
}

inline Mat3 project3(const Vec3& x) {
  const double n2 = x.squaredNorm();
  if (std::sqrt(n2) <= kProjectionEps) {
    throw DegenerateInput("project: near-zero input");
  }
  return Mat3::Identity() - (x * x.transpose()) / n2;
}

}  // namespace lievio
