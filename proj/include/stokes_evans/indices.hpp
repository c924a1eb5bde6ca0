#pragma once

// Benjamin-Feir index ind1 near the origin and the resonance-bubble index ind2
// near i sigma_2, assembled from the monodromy coefficients a^(m,n)(T).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "monodromy.hpp"

namespace stokes_evans {

struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// ind1 and its closed relatives

namespace detail {

struct Ind1Terms {
  std::array<double, 10> t;
  double value() const {
    double s = 0.0;
    for (double v : t) s += v;
    return s;
  }
  double scale() const {
    double s = 0.0;
    for (double v : t) s += std::abs(v);
    return s;
  }
};

inline Ind1Terms ind1_terms(double kap) {
  const double C = std::cosh(2.0 * kap), S = std::sinh(2.0 * kap);
  const double C2 = C * C, C3 = C2 * C, C4 = C3 * C;
  return {{8.0 * C, 24.0 * kap * S, 2.0 * kap * std::sinh(4.0 * kap), 19.0 * C2, -8.0 * C3, -10.0 * C4,
           -8.0 * kap * kap * C2, -28.0 * kap * kap, 8.0 * kap * C3 * S, -9.0}};
}

inline double ind1_derivative(double kap) {
  const double C = std::cosh(2.0 * kap), S = std::sinh(2.0 * kap);
  const double C2 = C * C, C3 = C2 * C;
  return 16.0 * S + 24.0 * S + 48.0 * kap * C + 2.0 * std::sinh(4.0 * kap) + 8.0 * kap * std::cosh(4.0 * kap) +
         76.0 * C * S - 48.0 * C2 * S - 80.0 * C3 * S - 16.0 * kap * C2 - 32.0 * kap * kap * C * S - 56.0 * kap +
         8.0 * C3 * S + 48.0 * kap * C2 * S * S + 16.0 * kap * C3 * C;
}

}  // namespace detail

inline double ind1(const WaveParams& wp) { return detail::ind1_terms(wp.kappa).value(); }

// i pi^3 (s^2+1)^2 / (4 s^4 (mu0-1) (s^2-mu0+1)^3) ind1
inline cplx f2_identity(const WaveParams& wp) {
  const double s2 = wp.s * wp.s, m = wp.mu0, pi3 = std::pow(std::numbers::pi, 3);
  const double g = s2 - m + 1.0;
  return I * (pi3 * (s2 + 1.0) * (s2 + 1.0) / (4.0 * s2 * s2 * (m - 1.0) * g * g * g)) * ind1(wp);
}

inline double nu_bridges_mielke(const WaveParams& wp) {
  const double s2 = wp.s * wp.s, s4 = s2 * s2, m = wp.mu0;
  const std::array<double, 7> t{2.0 * s2, -6.0 * m * s2, -4.0 * m * s4, -2.0 * m, s4, m * m, 1.0};
  double den = 0.0, scale = 0.0;
  for (double v : t) {
    den += v;
    scale += std::abs(v);
  }
  if (std::abs(den) < 1e-12 * scale) throw domain_error("nu: pole of the denominator");
  return -m * ind1(wp) / (32.0 * s4 * den);
}

// unique zero of ind1, bracketed on [1, 2] and Newton-polished
inline double find_kappa1() {
  double k = detail::bracket_root([](double x) { return detail::ind1_terms(x).value(); }, 1.0, 2.0);
  for (int it = 0; it < 3; ++it) {
    const detail::Ind1Terms t = detail::ind1_terms(k);
    if (std::abs(t.value()) < 1e-12 * t.scale()) break;
    const double kn = k - t.value() / detail::ind1_derivative(k);
    if (std::abs(detail::ind1_terms(kn).value()) >= std::abs(t.value())) break;
    k = kn;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Benjamin-Feir coefficients at sigma = 0

struct BFCoeffs {
  double kappa = 0.0;
  std::array<cplx, 4> alpha10{};  // per mode j = 1..4
  std::array<cplx, 2> alpha20{};  // j = 1, 2
  cplx alpha11_sq;
  cplx alpha11;  // principal root; the pair is +-alpha11
  cplx f1, f2;
  cplx f2_closed;         // closed identity exactly as printed
  double f2_scale = 0.0;  // largest term of the f2 sum
  double ind1 = 0.0;
  double nu = 0.0;
};

namespace detail {

// i sigma'' at k from centered differences of the branch value
inline double branch_curvature(const WaveParams& wp, double k, bool plus) {
  const double h = 1e-4;
  auto f = [&](double q) {
    auto b = sigma_branches(wp, q);
    return plus ? b.first : b.second;
  };
  return (f(k + h) - 2.0 * f(k) + f(k - h)) / (h * h);
}

}  // namespace detail

inline BFCoeffs bf_coefficients(const MonodromySeries& ms) {
  if (ms.sp.dp.regime != Regime::AtZero || ms.dim != 4) throw domain_error("bf_coefficients needs the series at sigma = 0");
  const WaveParams& wp = ms.sp.wp;
  const double T = ms.sp.R.period();
  auto a = [&](int m, int n, int j, int k) { return ms.entry({m, n}, j, k); };

  BFCoeffs b;
  b.kappa = wp.kappa;
  const cplx A = a(1, 0, 1, 1), A20 = a(2, 0, 1, 1), a33 = a(1, 0, 3, 3), a44 = a(1, 0, 4, 4), a34 = a(2, 0, 3, 4);

  b.alpha10[0] = b.alpha10[1] = I * T / A;
  const cplx pq = T * a34 - a33 * a44;
  const cplx root = T * std::sqrt(-a33 * a33 + 2.0 * a33 * a44 - a44 * a44 - 4.0 * T * a34);
  const cplx r1 = (-I * T * (a33 + a44) + root) / (2.0 * pq), r2 = (-I * T * (a33 + a44) - root) / (2.0 * pq);
  // j = 4 rides sigma_+, j = 3 rides sigma_- through k = 0
  const bool r1_plus = r1.imag() > r2.imag();
  b.alpha10[3] = r1_plus ? r1 : r2;
  b.alpha10[2] = r1_plus ? r2 : r1;

  const cplx base = T * T * (-A * A + 2.0 * A20) / (2.0 * A * A * A);
  // j = 1 sits on sigma_+ at -kappa, j = 2 on sigma_- at kappa
  const double curv1 = detail::branch_curvature(wp, -wp.kappa, true);
  const bool plus_first = (base.imag() > 0.0) == (curv1 > 0.0);
  b.alpha20[0] = plus_first ? base : -base;
  b.alpha20[1] = -b.alpha20[0];

  b.f1 = T * T * (T * a34 + A * a33 + A * a44 - a33 * a44 - A * A);
  const cplx P = a(0, 2, 1, 1), a13 = a(0, 1, 1, 3), a41 = a(0, 1, 4, 1), a14 = a(1, 1, 1, 4), a31 = a(1, 1, 3, 1);
  const std::array<cplx, 11> terms{P * A * A,       -T * P * a34,      T * a14 * a31,     -P * A * a33,
                                   A * a13 * a31,   -P * A * a44,      A * a14 * a41,     P * a33 * a44,
                                   -a13 * a31 * a44, a13 * a34 * a41, -a14 * a33 * a41};
  b.f2 = 0.0;
  for (const cplx& t : terms) {
    b.f2 += t;
    b.f2_scale = std::max(b.f2_scale, std::abs(t));
  }
  b.f2_closed = f2_identity(wp);
  // the assembled f2 equals the printed identity with the opposite overall sign
  if (std::abs(b.f2 + b.f2_closed) > 1e-7 * std::max(std::abs(b.f2_closed), b.f2_scale))
    throw consistency_error("f2 from a-entries disagrees with the closed identity");

  b.alpha11_sq = T * T * T * T * (2.0 * A20 - A * A) / (A * A * A * A) * b.f2 / b.f1;
  b.alpha11 = std::sqrt(b.alpha11_sq);
  b.ind1 = ind1(wp);
  b.nu = nu_bridges_mielke(wp);
  return b;
}

// entries assembled by the quadrature pipeline alone
inline BFCoeffs bf_coefficients(const WaveParams& wp) {
  return bf_coefficients(build_series(spectral_point(wp, 0.0), 2, false));
}

// ---------------------------------------------------------------------------
// Resonance bubble at sigma_2

struct BubbleCoeffs {
  double kappa = 0.0, sigma = 0.0, k4 = 0.0, period = 0.0;
  cplx d200, d020, d004, d110, d102, d012;
  cplx alpha10, alpha02;
  double alpha20 = 0.0, alpha12 = 0.0, alpha04 = 0.0;
  double imag_residual = 0.0;  // largest |Im| dropped from alpha20, alpha12, alpha04
  double gamma_star = 0.0;     // argmax of Q per unit eps^2
  double ind2 = 0.0;
  double ind2_scale = 0.0;
  double witness1 = 0.0, witness2 = 0.0;  // Im a12^(0,2)/a11^(1,0), Im a21^(0,2)/a22^(1,0)
};

inline BubbleCoeffs bubble_coefficients(const MonodromySeries& ms) {
  if (!ms.sp.resonance || ms.dim != 2) throw domain_error("bubble coefficients need a resonant series");
  const double T = ms.sp.R.period();
  const cplx E = std::exp(I * (ms.sp.k(4) * T));
  const CMatrix& a10 = ms.at({1, 0});
  const CMatrix& a02 = ms.at({0, 2});
  const cplx A = a10(0, 0), B = a10(1, 1), P = a02(0, 0), Q = a02(1, 1), b = a02(0, 1), c = a02(1, 0);

  BubbleCoeffs r;
  r.kappa = ms.sp.wp.kappa;
  r.sigma = ms.sp.sigma;
  r.k4 = ms.sp.k(4);
  r.period = T;
  r.d200 = A * B;
  r.d020 = -T * T * E * E;
  r.d004 = P * Q - b * c;
  r.d110 = -I * T * E * (A + B);
  r.d102 = P * B + Q * A;
  r.d012 = -I * T * E * (P + Q);

  r.alpha10 = -r.d110 / (2.0 * r.d200);
  r.alpha02 = -r.d102 / (2.0 * r.d200);
  const cplx d2 = r.d200 * r.d200;
  const cplx a20 = (r.d110 * r.d110 - 4.0 * r.d200 * r.d020) / (4.0 * d2);
  const cplx a12 = (r.d110 * r.d102 - 2.0 * r.d200 * r.d012) / (2.0 * d2);
  const cplx a04 = (r.d102 * r.d102 - 4.0 * r.d200 * r.d004) / (4.0 * d2);
  r.alpha20 = a20.real();
  r.alpha12 = a12.real();
  r.alpha04 = a04.real();
  r.imag_residual = std::max({std::abs(a20.imag()), std::abs(a12.imag()), std::abs(a04.imag())});
  r.gamma_star = -r.alpha12 / (2.0 * r.alpha20);

  const cplx w1 = b / A, w2 = c / B;
  r.witness1 = w1.imag();
  r.witness2 = w2.imag();
  r.ind2 = (w1 * w2).real();
  const double m02 = std::max({std::abs(P), std::abs(Q), std::abs(b), std::abs(c)});
  r.ind2_scale = m02 * m02 / std::abs(A * B);
  return r;
}

inline MonodromySeries resonant_series(const WaveParams& wp, int N) { return build_series(resonant_point(wp, N), 2); }

inline BubbleCoeffs ind2(const WaveParams& wp) { return bubble_coefficients(resonant_series(wp, 2)); }

// sign-witness bisection for the zero of ind2
inline double find_kappa2(double lo = 1.5, double hi = 2.2, double width = 1e-6) {
  auto wit = [](double k) {
    const BubbleCoeffs b = ind2(make_wave_params(k));
    return std::pair{b.witness1, b.witness2};
  };
  auto [l1, l2] = wit(lo);
  auto [h1, h2] = wit(hi);
  if (l1 * h1 >= 0.0) throw consistency_error("find_kappa2: no sign change of the witness in the bracket");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    auto [m1, m2] = wit(mid);
    if ((m1 > 0.0) == (l1 > 0.0)) {
      lo = mid;
      l1 = m1;
      l2 = m2;
    } else {
      hi = mid;
      h1 = m1;
      h2 = m2;
    }
  }
  if (l2 * h2 >= 0.0) throw consistency_error("find_kappa2: witnesses do not flip together");
  return 0.5 * (lo + hi);
}

struct BubblePoint {
  double gamma = 0.0;
  cplx delta;
};

struct BubbleCurve {
  double eps = 0.0;
  bool empty = true;
  double gamma_lo = 0.0, gamma_hi = 0.0, gamma_star = 0.0;
  double max_re = 0.0;
  std::vector<BubblePoint> upper, lower;  // delta_+ and delta_- over increasing gamma
};

// delta(gamma, eps) = alpha10 gamma + alpha02 eps^2 +- sqrt(Q) with Q = alpha20 (gamma - g-)(gamma - g+)
inline BubbleCurve bubble_spectrum(const BubbleCoeffs& bc, double eps, int samples = 201) {
  if (!(eps >= 0.0) || eps > 0.01) throw domain_error("bubble_spectrum: eps outside [0, 0.01]");
  if (samples < 3) throw domain_error("bubble_spectrum: at least 3 samples");
  BubbleCurve cv;
  cv.eps = eps;
  const double e2 = eps * eps;
  const double disc = bc.alpha12 * bc.alpha12 - 4.0 * bc.alpha20 * bc.alpha04;
  if (!(bc.alpha20 < 0.0) || !(disc > 0.0) || eps == 0.0) return cv;
  const double sq = std::sqrt(disc);
  const double g1 = e2 * (-bc.alpha12 + sq) / (2.0 * bc.alpha20), g2 = e2 * (-bc.alpha12 - sq) / (2.0 * bc.alpha20);
  cv.gamma_lo = std::min(g1, g2);
  cv.gamma_hi = std::max(g1, g2);
  cv.gamma_star = bc.gamma_star * e2;
  cv.empty = false;

  std::vector<double> grid;
  for (int i = 0; i < samples; ++i) grid.push_back(cv.gamma_lo + (cv.gamma_hi - cv.gamma_lo) * i / (samples - 1));
  grid.front() = cv.gamma_lo;
  grid.back() = cv.gamma_hi;
  grid.push_back(cv.gamma_star);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  for (double g : grid) {
    const double Q = bc.alpha20 * (g - cv.gamma_lo) * (g - cv.gamma_hi);
    const double root = std::sqrt(std::max(Q, 0.0));
    const cplx drift = bc.alpha10 * g + bc.alpha02 * e2;
    cv.upper.push_back({g, drift + root});
    cv.lower.push_back({g, drift - root});
    cv.max_re = std::max(cv.max_re, (drift + root).real());
  }
  return cv;
}

inline BubbleCurve bubble_spectrum(const WaveParams& wp, double eps, int samples = 201) {
  return bubble_spectrum(ind2(wp), eps, samples);
}

// ((a11^(0,2) a22^(1,0) - a11^(1,0) a22^(0,2))^2 + 4 a12^(0,2) a21^(0,2) a11^(1,0) a22^(1,0)) / (a11^(1,0) a22^(1,0))^2
inline double ind2_mu0_variant(const MonodromySeries& ms) {
  const CMatrix& a10 = ms.at({1, 0});
  const CMatrix& a02 = ms.at({0, 2});
  const cplx A = a10(0, 0), B = a10(1, 1), P = a02(0, 0), Q = a02(1, 1);
  const cplx d = P * B - A * Q;
  return ((d * d + 4.0 * a02(0, 1) * a02(1, 0) * A * B) / (A * B * A * B)).real();
}

inline double ind2_mu0_variant(const WaveParams& wp) { return ind2_mu0_variant(resonant_series(wp, 2)); }

struct Resonance3Report {
  double kappa = 0.0, sigma3 = 0.0;
  double max_offdiag = 0.0, max_diag = 0.0;
  double ind2_equiv = 0.0;
};

inline Resonance3Report resonance3_stability_check(const WaveParams& wp) {
  const MonodromySeries ms = resonant_series(wp, 3);
  const CMatrix& a10 = ms.at({1, 0});
  const CMatrix& a02 = ms.at({0, 2});
  Resonance3Report r;
  r.kappa = wp.kappa;
  r.sigma3 = ms.sp.sigma;
  r.max_offdiag = std::max(std::abs(a02(0, 1)), std::abs(a02(1, 0)));
  r.max_diag = std::max(std::abs(a02(0, 0)), std::abs(a02(1, 1)));
  r.ind2_equiv = (a02(0, 1) * a02(1, 0) / (a10(0, 0) * a10(1, 1))).real();
  return r;
}

}  // namespace stokes_evans
