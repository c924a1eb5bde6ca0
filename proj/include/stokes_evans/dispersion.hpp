#pragma once

// Linear dispersion relation (sigma - k)^2 = mu0 k tanh k and its branch roots.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace stokes_evans {

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct WaveParams {
  double kappa = 1.0;
  double mu0 = 1.0;
  double s = 0.0;  // sinh(kappa)
  double c = 1.0;  // cosh(kappa)
  double period = 2.0 * std::numbers::pi;
};

inline WaveParams make_wave_params(double kappa) {
  if (!(kappa > 0.0)) throw domain_error("kappa must be positive");
  WaveParams wp;
  wp.kappa = kappa;
  wp.s = std::sinh(kappa);
  wp.c = std::cosh(kappa);
  wp.mu0 = kappa < 1e-8 ? 1.0 + kappa * kappa / 3.0 : kappa * wp.c / wp.s;
  wp.period = 2.0 * std::numbers::pi / kappa;
  return wp;
}

namespace detail {

// k tanh k and its derivative, nonnegative for all real k
inline double ktanh(double k) { return k * std::tanh(k); }
inline double ktanh_d(double k) {
  const double ch = std::cosh(k);
  return std::tanh(k) + k / (ch * ch);
}

template <class F>
double bracket_root(F f, double a, double b) {
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

// (sigma_+(k), sigma_-(k))
inline std::pair<double, double> sigma_branches(const WaveParams& wp, double k) {
  const double r = std::sqrt(wp.mu0 * detail::ktanh(k));
  return {k + r, k - r};
}

// derivatives (d sigma_+/dk, d sigma_-/dk); k = 0 excluded
inline std::pair<double, double> sigma_branches_d(const WaveParams& wp, double k) {
  const double g = detail::ktanh(k);
  const double t = wp.mu0 * detail::ktanh_d(k) / (2.0 * std::sqrt(wp.mu0 * g));
  return {1.0 + t, 1.0 - t};
}

struct CriticalPoint {
  double k_c;
  double sigma_c;
};

inline CriticalPoint critical_point(const WaveParams& wp) {
  auto f = [&](double k) { return sigma_branches_d(wp, k).first; };
  double lo = -1.0, hi = -1e-8;
  if (f(hi) >= 0.0) throw std::logic_error("critical_point: no descent near 0");
  int guard = 0;
  while (f(lo) <= 0.0) {
    hi = lo;
    lo *= 2.0;
    if (++guard > 200) throw std::logic_error("critical_point: bracket failure");
  }
  const double kc = detail::bracket_root(f, lo, hi);
  return {kc, sigma_branches(wp, kc).first};
}

enum class Regime { AtZero, BelowCritical, AtCritical, AboveCritical };

struct DispersionPoint {
  double sigma = 0.0;
  Regime regime = Regime::AtZero;
  std::optional<double> k1, k3;
  double k2 = 0.0, k4 = 0.0;
  double sigma_c = 0.0, k_c = 0.0;
};

inline DispersionPoint roots_k(const WaveParams& wp, double sigma) {
  if (sigma < 0.0) throw domain_error("sigma must be nonnegative");
  const CriticalPoint cp = critical_point(wp);
  DispersionPoint d;
  d.sigma = sigma;
  d.sigma_c = cp.sigma_c;
  d.k_c = cp.k_c;
  if (sigma == 0.0) {
    d.regime = Regime::AtZero;
    d.k1 = -wp.kappa;
    d.k2 = wp.kappa;
    d.k3 = 0.0;
    d.k4 = 0.0;
    return d;
  }
  auto fp = [&](double k) { return sigma_branches(wp, k).first - sigma; };
  auto fm = [&](double k) { return sigma_branches(wp, k).second - sigma; };

  // k2 > kappa on the increasing part of sigma_-
  double hi = wp.kappa + sigma + 1.0;
  while (fm(hi) <= 0.0) hi = 2.0 * hi;
  d.k2 = detail::bracket_root(fm, wp.kappa, hi);
  // 0 < k4 <= sigma since sigma_+(k) >= k
  d.k4 = detail::bracket_root(fp, 0.0, sigma);

  if (std::abs(sigma - cp.sigma_c) < 1e-12) {
    d.regime = Regime::AtCritical;
    d.k1 = d.k3 = cp.k_c;
  } else if (sigma < cp.sigma_c) {
    d.regime = Regime::BelowCritical;
    double lo = 2.0 * cp.k_c - 1.0;
    while (fp(lo) >= 0.0) lo *= 2.0;
    d.k1 = detail::bracket_root(fp, lo, cp.k_c);
    d.k3 = detail::bracket_root(fp, cp.k_c, 0.0);
  } else {
    d.regime = Regime::AboveCritical;
  }
  return d;
}

struct Resonance {
  int order = 2;
  double sigma_N = 0.0;
};

inline Resonance resonance_sigma(const WaveParams& wp, int N) {
  if (N < 2) throw domain_error("resonance order must be at least 2");
  const CriticalPoint cp = critical_point(wp);
  const double target = N * wp.kappa;
  auto gap = [&](double sg) {
    const DispersionPoint d = roots_k(wp, sg);
    return d.k2 - d.k4 - target;
  };
  double lo = cp.sigma_c * (1.0 + 1e-9) + 1e-12;
  if (gap(lo) >= 0.0) throw std::logic_error("resonance_sigma: gap already exceeds target at sigma_c");
  double hi = lo + 1.0;
  while (gap(hi) <= 0.0) hi = lo + 2.0 * (hi - lo);
  Resonance r;
  r.order = N;
  r.sigma_N = detail::bracket_root(gap, lo, hi);
  return r;
}

}  // namespace stokes_evans
