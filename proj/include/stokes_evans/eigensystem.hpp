#pragma once

// The operator L(lambda), its eigenfunctions and adjoint eigenfunctions at
// lambda = i sigma, and the spectral projection onto Y(sigma).

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "dispersion.hpp"
#include "funcspace.hpp"

namespace stokes_evans {

// sigma together with the lattice realization of its Floquet exponents
struct SpectralPoint {
  WaveParams wp;
  double sigma = 0.0;
  DispersionPoint dp;
  Realization R;
  std::optional<int> resonance;
  std::vector<int> modes;  // indices j present at sigma

  Freq freq(int j) const {
    if (dp.regime == Regime::AtZero) {
      if (j == 1) return Freq::of(KAPPA, -1);
      if (j == 2) return Freq::of(KAPPA);
      return Freq{};
    }
    if (j == 2 && resonance) return Freq::of(K4) + Freq::of(KAPPA, *resonance);
    return Freq::of(static_cast<Basis>(K1 + (j - 1)));
  }
  double k(int j) const { return R.eval(freq(j)); }
  bool has(int j) const { return std::find(modes.begin(), modes.end(), j) != modes.end(); }
  int index_of(int j) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i] == j) return static_cast<int>(i);
    throw domain_error("mode not present at this sigma");
  }
};

inline SpectralPoint spectral_point(const WaveParams& wp, double sigma, std::optional<int> resonance = {}) {
  SpectralPoint sp;
  sp.wp = wp;
  sp.sigma = sigma;
  sp.dp = roots_k(wp, sigma);
  sp.resonance = resonance;
  sp.R.value = {1.0, wp.kappa, sp.dp.k1.value_or(0.0), sp.dp.k2, sp.dp.k3.value_or(0.0), sp.dp.k4};
  switch (sp.dp.regime) {
    case Regime::AtZero:
    case Regime::BelowCritical:
      sp.modes = {1, 2, 3, 4};
      break;
    case Regime::AboveCritical:
      sp.modes = {2, 4};
      break;
    case Regime::AtCritical:
      throw domain_error("projection at sigma_c is not supported");
  }
  if (resonance && sp.dp.regime != Regime::AboveCritical) throw domain_error("resonance requires sigma > sigma_c");
  return sp;
}

inline SpectralPoint resonant_point(const WaveParams& wp, int N) {
  return spectral_point(wp, resonance_sigma(wp, N).sigma_N, N);
}

// L(lambda) u
inline StateVec apply_L(const WaveParams& wp, cplx lambda, const StateVec& u, const Realization& R) {
  const double m = wp.mu0;
  const TermFunction pyy = dy(dy(u.phi, R), R);
  StateVec r;
  r.phi = u.phi * lambda + u.ups * m;
  r.ups = (pyy + u.phi * (lambda * lambda) + u.ups * (m * lambda)) * (-1.0 / m);
  r.eta = u.eta * lambda - trace1(dy(u.phi, R), R);
  return r;
}

inline void require_dom_L(const StateVec& u, const Realization& R, double tol = 1e-10) {
  if (dom_defect(u, R) > tol * std::max(1.0, u.phi.max_abs_coeff() + u.ups.max_abs_coeff()))
    throw std::invalid_argument("state vector violates dom(L)");
}

// phi_p'' - phi_p = mu0^{-1} (1 + conj(lambda)^2) ups, phi_p'(0) = phi_p'(1) = 0
inline TermFunction adjoint_correction(const WaveParams& wp, cplx lambda, const TermFunction& ups,
                                       const Realization& R) {
  if (ups.has_x()) throw std::invalid_argument("adjoint_correction: x dependence present");
  const cplx lc = std::conj(lambda);
  const Freq one = Freq::of(ONE);
  TermFunction P = particular_solution(ups * ((1.0 + lc * lc) / wp.mu0), one, R);
  const TermFunction Py = dy(P, R);
  const cplx B = -eval(Py, 0.0, 0.0, R);
  const cplx A = -(eval(Py, 0.0, 1.0, R) + B * std::cosh(1.0)) / std::sinh(1.0);
  return P + TermFunction::cosh_y(A, one) + TermFunction::sinh_y(B, one);
}

// L(lambda)^dagger u for u in dom(L^dagger)
inline StateVec apply_Ladj(const WaveParams& wp, cplx lambda, const StateVec& u, const Realization& R) {
  const double m = wp.mu0;
  const cplx lc = std::conj(lambda);
  StateVec r;
  r.phi = u.phi * lc + u.ups * (1.0 / m) + adjoint_correction(wp, lambda, u.ups, R);
  r.ups = u.phi * m - dy(dy(u.phi, R), R) * m - u.ups * lc;
  r.eta = trace1(dy(u.phi, R), R) * m + u.eta * lc;
  return r;
}

struct ModePair {
  int j = 0;
  double k = 0.0;
  Freq kf;
  StateVec phi, psi;
  cplx p1{}, p2{};  // normalization constants
};

struct Projector {
  SpectralPoint sp;
  std::vector<ModePair> modes;
  const ModePair& mode(int j) const { return modes.at(sp.index_of(j)); }
};

namespace detail {

inline StateVec eigenfunction(const SpectralPoint& sp, int j) {
  const double m = sp.wp.mu0;
  if (sp.dp.regime == Regime::AtZero && (j == 3 || j == 4)) {
    if (j == 3) return {TermFunction{}, TermFunction(1.0), TermFunction(1.0)};
    return {TermFunction(m), TermFunction{}, TermFunction{}};
  }
  const Freq f = sp.freq(j);
  const double k = sp.R.eval(f);
  const cplx a = I * (k - sp.sigma);
  return {TermFunction::cosh_y(m, f), TermFunction::cosh_y(a, f), TermFunction(a * std::cosh(k))};
}

// adjoint eigenfunction from the general eigen-relation, unnormalized
inline StateVec adjoint_generic(const SpectralPoint& sp, int j) {
  const double m = sp.wp.mu0, s = sp.sigma;
  const Freq f = sp.freq(j);
  const double k = sp.R.eval(f);
  const cplx g = -I * k;
  const double ch = std::cosh(k);
  const cplx g21 = g * g + 1.0;
  StateVec p;
  p.phi = TermFunction::cosh_y(-(1.0 - s * s) * (g + I * s) / (m * m * g21) * ch / std::sinh(1.0), Freq::of(ONE)) +
          TermFunction::cosh_y((g - I * s) / (m * g21), f);
  p.ups = TermFunction::cosh_y(1.0, f);
  p.eta = TermFunction(-ch / m);
  return p;
}

inline StateVec adjoint_zero(const SpectralPoint& sp, int j, cplx& pj) {
  const double m = sp.wp.mu0, kap = sp.wp.kappa;
  const Freq one = Freq::of(ONE);
  if (j == 3) return {TermFunction{}, TermFunction(m / (m - 1.0)), TermFunction(-1.0 / (m - 1.0))};
  if (j == 4)
    return {TermFunction(1.0 / (m - 1.0)) + TermFunction::cosh_y(-1.0 / ((m - 1.0) * m * std::sinh(1.0)), one),
            TermFunction{}, TermFunction{}};
  const Freq f = sp.freq(j);
  const double k = sp.R.eval(f), ck = std::cosh(k), sk = std::sinh(k);
  pj = -I * ck / (ck * ck * sk - m * sk);
  StateVec p;
  if (std::abs(kap - 1.0) < 1e-6) {
    // removable singularity at kappa = 1
    const double c1 = std::cosh(1.0), s1 = std::sinh(1.0);
    const cplx pre = I * k * pj / (m * m * (1.0 + kap)) * (c1 / (s1 * s1));
    p.phi = TermFunction::cosh_y(pre * (s1 - c1), one) + TermFunction::sinh_y(pre * s1, one, 1);
  } else {
    const cplx pre = I * k * pj / (m * m * (1.0 - k * k));
    p.phi = TermFunction::cosh_y(pre * ck / std::sinh(1.0), one) + TermFunction::cosh_y(-pre * m, f);
  }
  p.ups = TermFunction::cosh_y(pj, f);
  p.eta = TermFunction(-pj / m * ck);
  return p;
}

inline StateVec adjoint_high(const SpectralPoint& sp, int j, cplx& p1, cplx& p2) {
  const double m = sp.wp.mu0, s = sp.sigma;
  const Freq f = sp.freq(j);
  const double k = sp.R.eval(f), ck = std::cosh(k), s2k = std::sinh(2.0 * k);
  const double den = (k * k - 1.0) * (k * s2k + s * s2k + 2.0 * k * s - 2.0 * k * k);
  p1 = 2.0 * ck * (s * s - 1.0) * (k - s) * (k - s) / (m * m * std::sinh(1.0) * den);
  p2 = (2.0 * k * k - 2.0 * s * s) / (m * den);
  const cplx b = I * p2 * (k * k - 1.0) / (k + s);
  StateVec p;
  p.phi = TermFunction::cosh_y(p1, Freq::of(ONE)) + TermFunction::cosh_y(p2, f);
  p.ups = TermFunction::cosh_y(-m * b, f);
  p.eta = TermFunction(b * ck);
  return p;
}

}  // namespace detail

inline Projector modes_at(const SpectralPoint& sp) {
  Projector pr;
  pr.sp = sp;
  for (int j : sp.modes) {
    ModePair mp;
    mp.j = j;
    mp.kf = sp.freq(j);
    mp.k = sp.R.eval(mp.kf);
    mp.phi = detail::eigenfunction(sp, j);
    switch (sp.dp.regime) {
      case Regime::AtZero:
        mp.psi = detail::adjoint_zero(sp, j, mp.p1);
        break;
      case Regime::AboveCritical:
        mp.psi = detail::adjoint_high(sp, j, mp.p1, mp.p2);
        break;
      default: {
        const StateVec p = detail::adjoint_generic(sp, j);
        const cplx n = 1.0 / std::conj(inner_value(mp.phi, p, sp.R));
        mp.psi = n * p;
        mp.p1 = n;
        break;
      }
    }
    pr.modes.push_back(mp);
  }
  if (sp.dp.regime == Regime::BelowCritical) {
    double worst = 0.0;
    for (auto& a : pr.modes)
      for (auto& b : pr.modes)
        worst = std::max(worst, std::abs(inner_value(a.phi, b.psi, sp.R) - (a.j == b.j ? 1.0 : 0.0)));
    if (worst > 1e-8) throw std::logic_error("modes_at: adjoint basis fails biorthogonality");
  }
  return pr;
}

inline Projector modes_at(const WaveParams& wp, double sigma) { return modes_at(spectral_point(wp, sigma)); }

// mode coefficients <u, psi_j>, as functions of x
inline std::vector<TermFunction> project_x(const Projector& pr, const StateVec& u) {
  std::vector<TermFunction> c;
  for (auto& m : pr.modes) c.push_back(inner(u, m.psi, pr.sp.R));
  return c;
}

inline std::vector<cplx> project(const Projector& pr, const StateVec& u) {
  std::vector<cplx> c;
  for (auto& m : pr.modes) c.push_back(inner_value(u, m.psi, pr.sp.R));
  return c;
}

inline StateVec reconstruct(const Projector& pr, const std::vector<cplx>& c) {
  StateVec v;
  for (std::size_t i = 0; i < c.size(); ++i) v += c[i] * pr.modes[i].phi;
  return v;
}

inline double state_norm(const StateVec& u, const Realization& R) {
  return std::sqrt(std::abs(inner_value(u, u, R)));
}

// || (L(i sigma) - i k_j) phi_j ||
inline double eigen_residual(const Projector& pr, int j) {
  const ModePair& m = pr.mode(j);
  const StateVec r = apply_L(pr.sp.wp, I * pr.sp.sigma, m.phi, pr.sp.R) - (I * m.k) * m.phi;
  return state_norm(r, pr.sp.R);
}

// random x-independent state vector in dom(L) built from the rates present at sp
inline StateVec random_dom_vector(const SpectralPoint& sp, std::mt19937& g) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto rc = [&] { return cplx(d(g), d(g)); };
  std::vector<Freq> rates{Freq::of(ONE), Freq::of(KAPPA)};
  for (int j : sp.modes)
    if (!sp.freq(j).is_zero()) rates.push_back(sp.freq(j));
  StateVec u;
  u.phi = TermFunction(rc()) + TermFunction::y_pow(rc(), 2);
  u.ups = TermFunction(rc()) + TermFunction::y_pow(rc(), 1);
  for (const Freq& f : rates) {
    u.phi += TermFunction::cosh_y(rc(), f) + TermFunction::sinh_y(rc(), f, 1);
    u.ups += TermFunction::cosh_y(rc(), f) + TermFunction::sinh_y(rc(), f);
  }
  u.phi -= TermFunction::y_pow(eval(dy(u.phi, sp.R), 0.0, 0.0, sp.R), 1);
  u.eta = trace1(u.ups, sp.R);
  return u;
}

// max |<(L(i sigma) - i k_j) u, psi_j>| over random u in dom(L)
inline double adjoint_eigen_residual(const Projector& pr, int j, int samples = 8, unsigned seed = 7) {
  const ModePair& m = pr.mode(j);
  std::mt19937 g(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const StateVec u = random_dom_vector(pr.sp, g);
    const StateVec r = apply_L(pr.sp.wp, I * pr.sp.sigma, u, pr.sp.R) - (I * m.k) * u;
    worst = std::max(worst, std::abs(inner_value(r, m.psi, pr.sp.R)));
  }
  return worst;
}

}  // namespace stokes_evans
