#pragma once

// Small-amplitude Stokes wave expansion through third order.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dispersion.hpp"
#include "funcspace.hpp"
#include "series.hpp"

namespace stokes_evans {

inline Realization realization_for(const WaveParams& wp) {
  Realization R;
  R.value[ONE] = 1.0;
  R.value[KAPPA] = wp.kappa;
  return R;
}

// sin(j kappa x) * profile and cos(j kappa x) * profile
inline TermFunction sin_x(int j, const TermFunction& prof) {
  const Freq w = Freq::of(KAPPA, j);
  return (shift_x(prof, w) - shift_x(prof, -w)) * (-0.5 * I);
}
inline TermFunction cos_x(int j, const TermFunction& prof) {
  const Freq w = Freq::of(KAPPA, j);
  return (shift_x(prof, w) + shift_x(prof, -w)) * 0.5;
}

struct StokesExpansion {
  WaveParams wp;
  Realization R;
  std::array<double, 4> phibar{};       // index = order
  std::array<double, 4> mu{};           // mu0..mu3
  std::array<TermFunction, 4> phi{};    // periodic part of the potential
  std::array<TermFunction, 4> eta{};
  std::array<TermFunction, 4> u{};
};

// potential (with the phibar x terms), surface and mu as eps-series
struct StokesFields {
  Series Phi, H, mu;
};

inline StokesFields stokes_fields(const StokesExpansion& se, Trunc t, int max_order) {
  StokesFields f{Series(t), Series(t), Series(t)};
  f.mu.set(0, 0, TermFunction(se.mu[0]));
  for (int n = 1; n <= max_order && n <= 3; ++n) {
    TermFunction p = se.phi[n];
    if (se.phibar[n] != 0.0) p += TermFunction::term(se.phibar[n], {Freq{}, 1, 0, YKind::Const, Freq{}});
    f.Phi.set(0, n, p);
    f.H.set(0, n, se.eta[n]);
    if (se.mu[n] != 0.0) f.mu.set(0, n, TermFunction(se.mu[n]));
  }
  return f;
}

// horizontal velocity u = Phi_x - y H_x Phi_y / (1 + H)
inline Series stokes_velocity(const StokesFields& f, const Realization& R) {
  const Series invD = (Series(f.H.trunc(), TermFunction(1.0)) + f.H).reciprocal();
  return dx(f.Phi, R) - mul_y(dx(f.H, R) * dy(f.Phi, R) * invD);
}

struct StokesEquations {
  Series interior, bed, kinematic, dynamic;
};

inline StokesEquations stokes_equations(const StokesFields& f, const Realization& R) {
  const Trunc t = f.Phi.trunc();
  const Series one(t, TermFunction(1.0));
  const Series invD = (one + f.H).reciprocal();
  const Series Hx = dx(f.H, R);
  const Series U = stokes_velocity(f, R);
  const Series Phiy = dy(f.Phi, R);
  StokesEquations e;
  e.interior = dx(U, R) - mul_y(Hx * invD * dy(U, R)) + dy(Phiy, R) * invD * invD;
  e.bed = at_y(Phiy, 0.0, R);
  const Series U1 = trace1(U, R), Py1 = trace1(Phiy, R);
  e.kinematic = (U1 - one) * Hx - Py1 * invD;
  e.dynamic = U1 - 0.5 * U1 * U1 - 0.5 * Py1 * Py1 * invD * invD - f.mu * f.H;
  return e;
}

inline void fill_velocity(StokesExpansion& se) {
  const Trunc t{0, 3, 3};
  const Series U = stokes_velocity(stokes_fields(se, t, 3), se.R);
  for (int n = 1; n <= 3; ++n) se.u[n] = U.at(0, n);
}

// closed-form coefficients
inline StokesExpansion build_stokes(const WaveParams& wp) {
  StokesExpansion se;
  se.wp = wp;
  se.R = realization_for(wp);
  const double m = wp.mu0, s = wp.s, c = wp.c, s2 = std::sinh(2.0 * wp.kappa);
  const Freq k1 = Freq::of(KAPPA), k2 = Freq::of(KAPPA, 2), k3 = Freq::of(KAPPA, 3);
  using TF = TermFunction;

  se.mu[0] = m;
  se.phi[1] = sin_x(1, TF::cosh_y(1.0, k1));
  se.eta[1] = cos_x(1, TF(s));

  se.phibar[2] = m * m / 4.0 * std::pow(std::tanh(wp.kappa), 2);
  se.phi[2] = sin_x(2, TF::cosh_y(3.0 * m / (8.0 * s * c), k2) + TF::sinh_y(m * s * s / (2.0 * c), k1, 1));
  se.eta[2] = cos_x(2, TF(m / 4.0 * (2.0 * s * s + 3.0)));
  se.mu[1] = 0.0;

  const double m2 = m * m, sp1 = s * s + 1.0;
  se.phi[3] = sin_x(3, TF::cosh_y(-m2 * (4.0 * s * s - 9.0) / (16.0 * s2 * s2), k3) +
                           TF::sinh_y(3.0 * m2 * s / (8.0 * sp1), k2, 1) +
                           TF::sinh_y(m2 * s * (2.0 * s * s + 3.0) / (8.0 * c), k1, 1) +
                           TF::cosh_y(m2 * std::pow(s, 4) / (8.0 * sp1), k1, 2)) +
              sin_x(1, TF::sinh_y(3.0 * m2 * s / (8.0 * sp1), k2, 1) -
                           TF::sinh_y(m2 * s * (2.0 * s * s + 3.0) / (8.0 * c), k1, 1) +
                           TF::cosh_y(m2 * std::pow(s, 4) / (8.0 * sp1), k1, 2));
  const double s4 = std::pow(s, 4), s6 = std::pow(s, 6);
  se.eta[3] = cos_x(3, TF(m2 * (24.0 * s6 + 72.0 * s4 + 72.0 * s * s + 27.0) / (64.0 * (s * s * s + s)))) +
              cos_x(1, TF(m2 * s * (5.0 * s4 + 13.0 * s * s + 6.0) / (8.0 * sp1)));
  se.mu[2] = -m * m2 * (8.0 * s4 + 12.0 * s * s + 9.0) / (8.0 * sp1);
  se.phibar[3] = 0.0;
  se.mu[3] = 0.0;  // mu is even in eps
  fill_velocity(se);
  return se;
}

// Order-by-order solution by undetermined coefficients, normalized so that
// phi_n (n >= 2) carries no sin(kappa x) cosh(kappa y) component.
inline StokesExpansion derive_stokes(const WaveParams& wp, int max_order = 3) {
  StokesExpansion se;
  se.wp = wp;
  se.R = realization_for(wp);
  const Realization& R = se.R;
  se.mu[0] = wp.mu0;
  se.phi[1] = sin_x(1, TermFunction::cosh_y(1.0, Freq::of(KAPPA)));
  se.eta[1] = cos_x(1, TermFunction(wp.s));
  const Trunc t{0, 3, 3};

  for (int n = 2; n <= max_order; ++n) {
    const StokesEquations eq = stokes_equations(stokes_fields(se, t, n - 1), R);
    const TermFunction Ri = eq.interior.at(0, n), Rk = eq.kinematic.at(0, n), Rd = eq.dynamic.at(0, n);
    if (Ri.max_x_power() > 0 || Rk.max_x_power() > 0 || Rd.max_x_power() > 0)
      throw std::logic_error("derive_stokes: secular forcing");
    auto bi = x_blocks(Ri), bk = x_blocks(Rk), bd = x_blocks(Rd);
    std::vector<int> js;
    auto collect = [&](auto& b) {
      for (auto& [key, f] : b) {
        const int j = key.first.n[KAPPA];
        if (std::find(js.begin(), js.end(), j) == js.end()) js.push_back(j);
      }
    };
    collect(bi);
    collect(bk);
    collect(bd);
    for (int j : {1, -1})
      if (std::find(js.begin(), js.end(), j) == js.end()) js.push_back(j);
    auto get = [](auto& b, int j) {
      auto it = b.find({Freq::of(KAPPA, j), 0});
      return it == b.end() ? TermFunction{} : it->second;
    };

    TermFunction phin, etan;
    double mu_prev = 0.0;
    for (int j : js) {
      const TermFunction ri = get(bi, j);
      const cplx rk = get(bk, j).constant(), rd = get(bd, j).constant();
      if (j == 0) {
        if (ri.max_abs_coeff() > 1e-12 || std::abs(rk) > 1e-12)
          throw std::logic_error("derive_stokes: mean-flow forcing does not vanish");
        se.phibar[n] = -rd.real();
        continue;
      }
      const Freq w = Freq::of(KAPPA, j);
      const double wv = R.eval(w);
      TermFunction Q = particular_solution(-ri, w, R);
      const cplx Qp0 = eval(dy(Q, R), 0.0, 0.0, R);
      Q += TermFunction::sinh_y(-Qp0 / wv, w);
      const cplx Q1 = eval(Q, 0.0, 1.0, R), Qp1 = eval(dy(Q, R), 0.0, 1.0, R);
      cplx E, A;
      if (std::abs(j) == 1) {
        A = -Q.coefficient({Freq{}, 0, 0, YKind::Cosh, Freq::of(KAPPA)});
        E = (-rk + Qp1 + A * wv * std::sinh(wv)) / (-I * wv);
        const cplx m = (rd - wp.mu0 * E + I * wv * (Q1 + A * std::cosh(wv))) / (wp.s / 2.0);
        if (j == 1) mu_prev = m.real();
        if (std::abs(m.imag()) > 1e-10 * std::max(1.0, std::abs(m)))
          throw std::logic_error("derive_stokes: complex mu correction");
      } else {
        Eigen::Matrix2cd M;
        M << -I * wv, -wv * std::sinh(wv), -wp.mu0, I * wv * std::cosh(wv);
        Eigen::Vector2cd b(-rk + Qp1, -rd - I * wv * Q1);
        const Eigen::Vector2cd x = M.partialPivLu().solve(b);
        E = x(0);
        A = x(1);
      }
      const TermFunction Phi = Q + TermFunction::cosh_y(A, w);
      phin += shift_x(Phi, w);
      etan += TermFunction::expx(E, w);
    }
    se.phi[n] = phin;
    se.eta[n] = etan;
    se.mu[n - 1] = mu_prev;
  }
  se.mu[3] = 0.0;
  fill_velocity(se);
  return se;
}

struct CollocationGrid {
  int ny = 16;
  int nx = 24;
};

// max residual of the order-n equations on a Chebyshev(y) x uniform(x) grid
inline double stokes_residual(const StokesExpansion& se, int order, CollocationGrid g = {}) {
  if (order < 1 || order > 3) throw domain_error("residual order must be 1..3");
  const Trunc t{0, 3, 3};
  const StokesEquations eq = stokes_equations(stokes_fields(se, t, order), se.R);
  const TermFunction Ri = eq.interior.at(0, order), Rb = eq.bed.at(0, order), Rk = eq.kinematic.at(0, order),
                     Rd = eq.dynamic.at(0, order);
  double m = 0.0;
  const double T = se.wp.period;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double x = T * ix / g.nx;
    m = std::max({m, std::abs(eval(Rb, x, 0.0, se.R)), std::abs(eval(Rk, x, 0.0, se.R)),
                  std::abs(eval(Rd, x, 0.0, se.R))});
    for (int iy = 0; iy < g.ny; ++iy) {
      const double y = 0.5 - 0.5 * std::cos(std::numbers::pi * (iy + 0.5) / g.ny);
      m = std::max(m, std::abs(eval(Ri, x, y, se.R)));
    }
  }
  return m;
}

struct WaveSample {
  double phi, u, eta, mu;
};

inline WaveSample eval_wave(const StokesExpansion& se, double eps, double x, double y) {
  WaveSample w{0.0, 0.0, 0.0, se.mu[0]};
  double e = 1.0;
  for (int n = 1; n <= 3; ++n) {
    e *= eps;
    w.phi += e * (eval(se.phi[n], x, y, se.R).real() + se.phibar[n] * x);
    w.u += e * eval(se.u[n], x, y, se.R).real();
    w.eta += e * eval(se.eta[n], x, y, se.R).real();
    w.mu += e * se.mu[n];
  }
  return w;
}

// max relative coefficient discrepancy between two expansions
inline double stokes_discrepancy(const StokesExpansion& a, const StokesExpansion& b, int max_order = 3) {
  double m = 0.0;
  auto cmp = [&](const TermFunction& f, const TermFunction& g) {
    const TermFunction d = f - g;
    const double scale = std::max(1.0, f.max_abs_coeff());
    m = std::max(m, d.max_abs_coeff() / scale);
  };
  for (int n = 1; n <= max_order; ++n) {
    cmp(a.phi[n], b.phi[n]);
    cmp(a.eta[n], b.eta[n]);
    m = std::max(m, std::abs(a.phibar[n] - b.phibar[n]) / std::max(1.0, std::abs(a.phibar[n])));
    m = std::max(m, std::abs(a.mu[n - 1] - b.mu[n - 1]) / std::max(1.0, std::abs(a.mu[n - 1])));
  }
  return m;
}

}  // namespace stokes_evans
