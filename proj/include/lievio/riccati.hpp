#pragma once

#include <Eigen/Eigenvalues>

#include "lievio/measurements.hpp"

namespace lievio {

/// Covariance-like matrix P of the translational error state, with the
/// design weights V (process) and Q (measurement).
struct RiccatiState {
  MatX p;        // 3(n+2) x 3(n+2), symmetric positive definite
  MatX v_noise;  // same dimension as p
  MatX q_noise;  // 3n x 3n

  RiccatiState(const MatX& p0, const MatX& v, const MatX& q)
      : p(p0), v_noise(v), q_noise(q) {
    check_sym_pd(p, "P(0)");
    check_sym_pd(v_noise, "V");
    check_sym_pd(q_noise, "Q");
  }

  int dim() const { return static_cast<int>(p.rows()); }
  int n() const { return static_cast<int>(q_noise.rows()) / 3; }

  static void check_sym_pd(const MatX& m, const char* name) {
    if (m.rows() != m.cols() || (m - m.transpose()).norm() > 1e-9) {
      throw DimensionMismatch(std::string(name) + " must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw DegenerateInput(std::string(name) + " must be positive definite");
    }
  }
};

namespace detail {

inline void symmetrize(MatX& m) { m = 0.5 * (m + m.transpose()).eval(); }

inline void check_finite(const MatX& m) {
  if (!m.allFinite()) throw PropagationError("covariance has non-finite entries");
}

/// Generic RK4 on Pdot = f(P) over one step.
template <typename F>
MatX rk4_matrix(const MatX& p0, double dt, F&& f) {
  const MatX k1 = f(p0);
  const MatX k2 = f(MatX(p0 + 0.5 * dt * k1));
  const MatX k3 = f(MatX(p0 + 0.5 * dt * k2));
  const MatX k4 = f(MatX(p0 + dt * k3));
  return p0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Open-loop covariance prediction Pdot = A P + P A^T + V over dt (RK4),
/// then re-symmetrized.
inline RiccatiState predict_P(const RiccatiState& rs, const MatX& a, double dt) {
  if (dt <= 0.0) throw DegenerateInput("predict_P: dt must be positive");
  if (a.rows() != rs.dim()) throw DimensionMismatch("predict_P: A dimension");
  RiccatiState out = rs;
  out.p = detail::rk4_matrix(rs.p, dt, [&](const MatX& p) -> MatX {
    return a * p + p * a.transpose() + rs.v_noise;
  });
  detail::symmetrize(out.p);
  detail::check_finite(out.p);
  return out;
}

/// L = P C^T (C P C^T + Q)^{-1}. Sets *ill_conditioned when the innovation
/// covariance condition number exceeds 1e12.
inline MatX gain_L(const RiccatiState& rs, const MatX& c,
                   bool* ill_conditioned = nullptr) {
  const MatX pct = rs.p * c.transpose();
  MatX s = c * pct + rs.q_noise;
  detail::symmetrize(s);
  if (ill_conditioned) {
    Eigen::SelfAdjointEigenSolver<MatX> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    *ill_conditioned = !(lo > 0.0) || hi / lo > 1e12;
  }
  return s.ldlt().solve(pct.transpose()).transpose();
}

inline MatX gain_L(const RiccatiState& rs, const OutputMatrix& c,
                   bool* ill_conditioned = nullptr) {
  // Exploits the block structure of C: only the landmark columns of P
  // enter, scaled by the projector blocks.
  const int n = c.n;
  const int d = rs.dim();
  MatX pct(d, 3 * n);
  for (int i = 0; i < n; ++i) {
    pct.middleCols<3>(3 * i) = rs.p.middleCols<3>(6 + 3 * i) * c.pi_blocks[i];
  }
  MatX s = rs.q_noise;
  for (int i = 0; i < n; ++i) {
    s.middleRows<3>(3 * i) += c.pi_blocks[i] * pct.middleRows<3>(6 + 3 * i);
  }
  detail::symmetrize(s);
  if (ill_conditioned) {
    Eigen::SelfAdjointEigenSolver<MatX> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    *ill_conditioned = !(lo > 0.0) || hi / lo > 1e12;
  }
  return s.ldlt().solve(pct.transpose()).transpose();
}

/// Measurement update P <- (I - L C) P, re-symmetrized. Throws on loss of
/// positive semi-definiteness.
inline RiccatiState correct_P(const RiccatiState& rs, const MatX& l, const MatX& c) {
  if (l.rows() != rs.dim() || c.cols() != rs.dim() || l.cols() != c.rows()) {
    throw DimensionMismatch("correct_P: gain/output dimensions");
  }
  RiccatiState out = rs;
  out.p = rs.p - l * (c * rs.p);
  detail::symmetrize(out.p);
  detail::check_finite(out.p);
  Eigen::SelfAdjointEigenSolver<MatX> es(out.p, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw CovarianceCollapse("correct_P: P lost positive definiteness");
  }
  return out;
}

inline RiccatiState correct_P(const RiccatiState& rs, const MatX& l,
                              const OutputMatrix& c) {
  const int n = c.n;
  MatX cp(3 * n, rs.dim());
  for (int i = 0; i < n; ++i) {
    cp.middleRows<3>(3 * i) = c.pi_blocks[i] * rs.p.middleRows<3>(6 + 3 * i);
  }
  RiccatiState out = rs;
  out.p = rs.p - l * cp;
  detail::symmetrize(out.p);
  detail::check_finite(out.p);
  // LDLT pivots give a cheap definiteness guard on the hot path.
  Eigen::LDLT<MatX> ldlt(out.p);
  if (ldlt.vectorD().minCoeff() < -1e-9) {
    throw CovarianceCollapse("correct_P: P lost positive definiteness");
  }
  return out;
}

/// Full continuous Riccati equation
/// Pdot = A P + P A^T - P C^T Q^{-1} C P + V, integrated over dt.
inline RiccatiState propagate_CRE_continuous(const RiccatiState& rs, const MatX& a,
                                             const MatX& c, double dt) {
  if (dt <= 0.0) throw DegenerateInput("propagate_CRE_continuous: dt must be positive");
  const auto qinv_c = rs.q_noise.ldlt().solve(c).eval();
  RiccatiState out = rs;
  out.p = detail::rk4_matrix(rs.p, dt, [&](const MatX& p) -> MatX {
    const MatX cp = c * p;
    return a * p + p * a.transpose() - cp.transpose() * (qinv_c * p) + rs.v_noise;
  });
  detail::symmetrize(out.p);
  detail::check_finite(out.p);
  return out;
}

}  // namespace lievio
