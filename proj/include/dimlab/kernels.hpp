#pragma once

#include <cmath>

namespace dimlab {

/// Parameters (s, t, r, theta) of the capacity kernels.
/// Valid when 0 <= s <= t, t > 0, 0 < r < 1 and 0 < theta <= 1.
template <typename Scalar>
struct BasicKernelParams {
  Scalar s;
  Scalar t;
  Scalar r;
  Scalar theta;

  bool valid() const {
    return s >= Scalar(0) && t > Scalar(0) && s <= t && r > Scalar(0) &&
           r < Scalar(1) && theta > Scalar(0) && theta <= Scalar(1);
  }
};

using KernelParams = BasicKernelParams<double>;

/// phi^{s,t}_{r,theta}(|x|): 1 below r, (r/|x|)^s up to r^theta, then
/// r^{theta(t-s)+s} / |x|^t. Continuous and non-increasing.
template <typename Scalar>
Scalar kernel_phi(const BasicKernelParams<Scalar>& p, Scalar dist) {
  using std::pow;
  if (dist < p.r) return Scalar(1);
  const Scalar outer = pow(p.r, p.theta);
  if (dist <= outer) return pow(p.r / dist, p.s);
  return pow(p.r, p.theta * (p.t - p.s) + p.s) / pow(dist, p.t);
}

/// Truncated kernel: 1 below r, (r/|x|)^s on [r, r^theta), 0 from r^theta on.
template <typename Scalar>
Scalar kernel_phi_trunc(Scalar s, Scalar r, Scalar theta, Scalar dist) {
  using std::pow;
  if (dist < r) return Scalar(1);
  if (dist < pow(r, theta)) return pow(r / dist, s);
  return Scalar(0);
}

/// Same values as kernel_phi, evaluated from log|x|; used when filling
/// matrices whose log-distances are cached across parameter values.
template <typename Scalar>
Scalar kernel_phi_from_log(const BasicKernelParams<Scalar>& p, Scalar log_r,
                           Scalar log_dist) {
  using std::exp;
  if (log_dist < log_r) return Scalar(1);
  if (log_dist <= p.theta * log_r) return exp(p.s * (log_r - log_dist));
  return exp((p.theta * (p.t - p.s) + p.s) * log_r - p.t * log_dist);
}

}  // namespace dimlab
