#pragma once

#include <functional>
#include <ostream>

#include "lievio/observer.hpp"

namespace lievio {

/// Phi(t0 -> t1) for dPhi/dt = A(t) Phi, Phi(t0,t0) = I, fixed-step RK4.
inline MatX transition_matrix(const std::function<MatX(double)>& a_of_t,
                              double t0, double t1, double dt = 1e-3) {
  if (t1 < t0) throw DegenerateInput("transition_matrix: t1 < t0");
  const int d = static_cast<int>(a_of_t(t0).rows());
  MatX phi = MatX::Identity(d, d);
  if (t1 == t0) return phi;
  const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
  const double h = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const MatX a0 = a_of_t(t);
    const MatX am = a_of_t(t + 0.5 * h);
    const MatX a1 = a_of_t(t + h);
    const MatX k1 = a0 * phi;
    const MatX k2 = am * (phi + 0.5 * h * k1);
    const MatX k3 = am * (phi + 0.5 * h * k2);
    const MatX k4 = a1 * (phi + h * k3);
    phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

/// One observability Gramian window W(t, t+delta) with its spectrum.
struct GramianReport {
  double window_start = 0.0;
  double delta = 0.0;
  MatX w;
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool uniformly_observable_flag = false;
};

inline constexpr double kGramianMuDefault = 1e-4;

/// W(t, t+delta) = (1/delta) int Phi^T C^T C Phi dtau, trapezoidal
/// quadrature on the measurement grid (default 20 Hz).
inline GramianReport gramian(const std::function<MatX(double)>& a_of_t,
                             const std::function<MatX(double)>& c_of_t,
                             double t, double delta, double grid_dt = 0.05,
                             double mu = kGramianMuDefault) {
  if (delta <= 0.0) throw DegenerateInput("gramian: delta must be positive");
  const int d = static_cast<int>(a_of_t(t).rows());
  const int steps = std::max(1, static_cast<int>(std::round(delta / grid_dt)));
  const double h = delta / steps;

  MatX w = MatX::Zero(d, d);
  MatX phi = MatX::Identity(d, d);
  auto integrand = [&](double tau, const MatX& phi_tau) -> MatX {
    const MatX cphi = c_of_t(tau) * phi_tau;
    return cphi.transpose() * cphi;
  };
  MatX f_prev = integrand(t, phi);
  for (int k = 0; k < steps; ++k) {
    const double tau0 = t + k * h;
    phi = transition_matrix(a_of_t, tau0, tau0 + h, h) * phi;
    const MatX f_next = integrand(tau0 + h, phi);
    w += 0.5 * h * (f_prev + f_next);
    f_prev = f_next;
  }
  w /= delta;
  detail::symmetrize(w);

  GramianReport rep;
  rep.window_start = t;
  rep.delta = delta;
  rep.w = w;
  Eigen::SelfAdjointEigenSolver<MatX> es(w, Eigen::EigenvaluesOnly);
  rep.min_eig = es.eigenvalues().minCoeff();
  rep.max_eig = es.eigenvalues().maxCoeff();
  rep.uniformly_observable_flag = rep.min_eig >= mu;
  return rep;
}

/// Constant rotated-frame pair: Abar has vbar -> gbar and lbar_i -> vbar
/// couplings only (what build_A(0, n) produces).
inline MatX build_Abar(int n) { return build_A(Vec3::Zero(), n); }

/// exp(Abar t) in closed form: Abar is nilpotent of index 3.
inline MatX exp_Abar(int n, double t) {
  const MatX abar = build_Abar(n);
  const int d = 3 * (n + 2);
  return MatX::Identity(d, d) + t * abar + 0.5 * t * t * (abar * abar);
}

/// Kalman observability matrix of the constant pair (Abar, Cbar) with all
/// projectors identity, written landmarks-first:
///   [[I_n, 0], [0, B_n], [0, Bbar_n], [0, 0], ...] (x) I_3,
/// B_n = [1_n | 0], Bbar_n = [0 | 1_n]. Full stacked height 3n(n+2).
inline MatX kalman_observability_matrix(int n) {
  if (n < 1) throw DegenerateInput("kalman_observability_matrix: n >= 1 required");
  const int d = 3 * (n + 2);
  MatX o = MatX::Zero(3 * n * (n + 2), d);
  // block row 0: landmark columns get I_{3n}
  o.block(0, 0, 3 * n, 3 * n) = MatX::Identity(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    o.block<3, 3>(3 * n + 3 * i, 3 * n) = Mat3::Identity();          // v column
    o.block<3, 3>(6 * n + 3 * i, 3 * n + 3) = Mat3::Identity();      // g column
  }
  return o;
}

/// Permutation taking the (v, g, landmarks) error ordering to the
/// landmarks-first ordering used by kalman_observability_matrix.
inline MatX landmarks_first_permutation(int n) {
  const int d = 3 * (n + 2);
  MatX perm = MatX::Zero(d, d);
  perm.block(0, 3 * n, 6, 6).setIdentity();        // v, g go last
  perm.block(6, 0, 3 * n, 3 * n).setIdentity();    // landmarks go first
  return perm.transpose();
}

/// || Phi_numeric(t0 -> t1) - T(t1) exp(Abar (t1-t0)) T(t0)^T ||_F for the
/// factorization Phi = T Phibar T^T, T(t) = I_{n+2} (x) R^T(t).
inline double verify_phi_factorization(const std::function<Vec3(double)>& omega_of_t,
                                       const std::function<Mat3(double)>& r_of_t,
                                       int n, double t0, double t1,
                                       double dt = 1e-3) {
  auto a_of_t = [&](double t) { return build_A(omega_of_t(t), n); };
  const MatX phi_numeric = transition_matrix(a_of_t, t0, t1, dt);

  auto big_t = [&](double t) -> MatX {
    const Mat3 rt = r_of_t(t).transpose();
    MatX out = MatX::Zero(3 * (n + 2), 3 * (n + 2));
    for (int j = 0; j < n + 2; ++j) out.block<3, 3>(3 * j, 3 * j) = rt;
    return out;
  };
  const MatX phi_factored = big_t(t1) * exp_Abar(n, t1 - t0) * big_t(t0).transpose();
  return (phi_numeric - phi_factored).norm();
}

/// One inertial-frame bearing direction R(t) R_c y(t) at time t.
struct BearingSample {
  double t = 0.0;
  Vec3 dir_world = Vec3::UnitZ();
};

/// Persistent-excitation certificate for a monocular landmark:
/// (1/delta*) int pi(dir(tau)) dtau >= mu* I over every window of length
/// delta* in the history (trapezoidal quadrature, windows anchored at
/// each sample). Throws InsufficientHistory when the span is too short.
inline bool mono_pe_certificate(const std::vector<BearingSample>& history,
                                double delta_star, double mu_star) {
  if (delta_star <= 0.0) throw DegenerateInput("mono_pe_certificate: delta* > 0 required");
  if (history.size() < 2 || history.back().t - history.front().t < delta_star) {
    throw InsufficientHistory("mono_pe_certificate: history shorter than delta*");
  }
  const double t_end = history.back().t;
  for (size_t start = 0; start < history.size(); ++start) {
    const double w0 = history[start].t;
    if (w0 + delta_star > t_end + 1e-12) break;
    Mat3 acc = Mat3::Zero();
    double covered = 0.0;
    for (size_t k = start; k + 1 < history.size() && covered < delta_star - 1e-12; ++k) {
      const double seg = std::min(history[k + 1].t - history[k].t,
                                  delta_star - covered);
      acc += 0.5 * seg * (project3(history[k].dir_world) +
                          project3(history[k + 1].dir_world));
      covered += seg;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(acc / delta_star, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < mu_star) return false;
  }
  return true;
}

/// Per-window CSV: window_start, min_eig, max_eig, flag.
inline void write_gramian_csv(std::ostream& out,
                              const std::vector<GramianReport>& reports) {
  out << "window_start_s,min_eig,max_eig,flag\n";
  for (const auto& r : reports) {
    out << r.window_start << ',' << r.min_eig << ',' << r.max_eig << ','
        << (r.uniformly_observable_flag ? 1 : 0) << '\n';
  }
}

}  // namespace lievio
