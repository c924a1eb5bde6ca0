#pragma once

// Center-manifold corrections w_k^(m,n)(x; sigma): the forcing f_k^(m,n)
// assembled from B and lower orders, and the solver for
//   w_x = L(i sigma) w + (1 - Pi) f,   Pi w = 0.

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eigensystem.hpp"
#include "operator_b.hpp"

namespace stokes_evans {

struct sequencing_error : std::logic_error {
  using std::logic_error::logic_error;
};

struct WCorrection {
  int k = 0;
  int m = 0, n = 0;
  StateVec w;
  StateVec forcing;
};

// Pi f with x-dependent mode coefficients
inline StateVec project_state(const Projector& pr, const StateVec& f) {
  const std::vector<TermFunction> c = project_x(pr, f);
  StateVec r;
  for (std::size_t i = 0; i < c.size(); ++i) r += c[i] * pr.modes[i].phi;
  return r;
}

inline StateVec complement(const Projector& pr, const StateVec& f) { return f - project_state(pr, f); }

// x-independent profiles of a state vector grouped by x-block
inline std::map<std::pair<Freq, int>, StateVec> state_blocks(const StateVec& u) {
  std::map<std::pair<Freq, int>, StateVec> out;
  for (auto& [key, prof] : x_blocks(u.phi)) out[key].phi = prof;
  for (auto& [key, prof] : x_blocks(u.ups)) out[key].ups = prof;
  for (auto& [key, prof] : x_blocks(u.eta)) out[key].eta = prof;
  return out;
}

inline StateVec state_from_block(const Freq& w, int q, const StateVec& p) {
  return {from_block(w, q, p.phi), from_block(w, q, p.ups), from_block(w, q, p.eta)};
}

namespace detail {

// mode whose eigenfunction spans ker(L(i sigma) - i omega), if any
inline const ModePair* kernel_mode(const Projector& pr, const Freq& omega) {
  const bool at_zero = pr.sp.dp.regime == Regime::AtZero;
  for (const ModePair& m : pr.modes) {
    if (at_zero && m.j == 3) continue;
    if (m.kf == omega) return &m;
  }
  return nullptr;
}

inline double max_abs(std::initializer_list<cplx> v) {
  double m = 0.0;
  for (cplx c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace detail

// Solves (L(i sigma) - i omega) W = h for x-independent profiles W in dom(L)
// with Pi W = 0.
inline StateVec solve_block(const Projector& pr, const Freq& omega, const StateVec& h) {
  const SpectralPoint& sp = pr.sp;
  const Realization& R = sp.R;
  const double m = sp.wp.mu0, s = sp.sigma, w = R.eval(omega);
  const cplx isw = I * (s - w);

  // phi'' - w^2 phi = -mu0 h2 - i (sigma + w) h1
  const TermFunction rhs = h.ups * (-m) + h.phi * (-I * (s + w));
  TermFunction P = particular_solution(rhs, omega, R);
  const TermFunction hc = TermFunction::cosh_y(1.0, omega);
  const TermFunction hs = omega.is_zero() ? TermFunction::y_pow(1.0, 1) : TermFunction::sinh_y(1.0, omega);

  auto dy_at = [&](const TermFunction& f, double y) { return eval(dy(f, R), 0.0, y, R); };
  auto val_at = [&](const TermFunction& f, double y) { return eval(f, 0.0, y, R); };

  // phi_y(0) = 0
  P += hs * (-dy_at(P, 0.0) / dy_at(hs, 0.0));

  // phi_y(1) - (sigma - w)^2 / mu0 phi(1) = i (sigma - w) h1(1) / mu0 - h3
  const double rob = (s - w) * (s - w) / m;
  auto robin = [&](const TermFunction& f) { return dy_at(f, 1.0) - rob * val_at(f, 1.0); };
  const cplx target = isw * val_at(h.phi, 1.0) / m - h.eta.constant();
  const cplx rc = robin(hc);
  const double scale = std::max({1.0, std::abs(w), std::abs(w) * std::abs(std::sinh(w))});

  const ModePair* km = detail::kernel_mode(pr, omega);
  auto assemble = [&](const TermFunction& phi) {
    StateVec W;
    W.phi = phi;
    W.ups = (h.phi - phi * isw) * (1.0 / m);
    W.eta = trace1(W.ups, R);
    return W;
  };

  if (!km) {
    if (std::abs(rc) < 1e-10 * scale) throw std::runtime_error("solve_block: near-singular block off the lattice");
    P += hc * ((target - robin(P)) / rc);
    return assemble(P);
  }
  const cplx defect = target - robin(P);
  const double mag = std::max({1.0, detail::max_abs({target, robin(P)}), h.phi.max_abs_coeff(), h.ups.max_abs_coeff()});
  if (std::abs(defect) > 1e-8 * mag) throw std::logic_error("solve_block: forcing not in the complement");
  StateVec W = assemble(P);
  const cplx c = inner_value(W, km->psi, R);
  W -= c * km->phi;
  return W;
}

// w with w_x = L(i sigma) w + g, Pi w = 0, for g in the complement
inline StateVec solve_w_forced(const Projector& pr, const StateVec& g) {
  std::map<Freq, std::map<int, StateVec>> by_freq;
  for (auto& [key, prof] : state_blocks(g)) by_freq[key.first][key.second] = prof;
  StateVec w;
  for (auto& [omega, levels] : by_freq) {
    const int qmax = levels.rbegin()->first;
    StateVec above;
    for (int q = qmax; q >= 0; --q) {
      StateVec h = double(q + 1) * above;
      auto it = levels.find(q);
      if (it != levels.end()) h -= it->second;
      const StateVec Wq = solve_block(pr, omega, h);
      w += state_from_block(omega, q, Wq);
      above = Wq;
    }
  }
  return w;
}

// Orders of the (delta, eps) expansion through total degree 2
inline const std::vector<BOrder>& expansion_orders() {
  static const std::vector<BOrder> v{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  return v;
}

// Lower-order data of the recursion: a-coefficient columns and corrections.
struct CenterManifold {
  Projector pr;
  BContext ctx;
  // (m,n) -> column k -> a_{jk}(x) for each mode position j
  std::map<BOrder, std::vector<std::vector<TermFunction>>> a;
  std::map<BOrder, std::vector<WCorrection>> w;

  int dim() const { return static_cast<int>(pr.modes.size()); }
  bool at_zero() const { return pr.sp.dp.regime == Regime::AtZero; }

  const std::vector<TermFunction>& a_col(BOrder o, int k) const {
    auto it = a.find(o);
    if (it == a.end() || k >= static_cast<int>(it->second.size()) || it->second[k].empty())
      throw sequencing_error("a-coefficients missing for requested order");
    return it->second[k];
  }
  const StateVec& w_of(BOrder o, int k) const {
    static const StateVec zero;
    if (o.m == 0 && o.n == 0) return zero;
    auto it = w.find(o);
    if (it == w.end() || k >= static_cast<int>(it->second.size()) || it->second[k].k == 0)
      throw sequencing_error("correction missing for requested order");
    return it->second[k].w;
  }
};

inline CenterManifold make_center_manifold(const SpectralPoint& sp) {
  CenterManifold cm{modes_at(sp), make_b_context(sp.wp, sp.sigma, sp.R), {}, {}};
  const int d = cm.dim();
  std::vector<std::vector<TermFunction>> a0(d, std::vector<TermFunction>(d));
  for (int k = 0; k < d; ++k) a0[k][k] = TermFunction::expx(1.0, cm.pr.modes[k].kf);
  if (cm.at_zero()) a0[sp.index_of(3)][sp.index_of(4)] = TermFunction::term(1.0, TermKey{Freq{}, 1});
  cm.a[{0, 0}] = a0;
  return cm;
}

// sum_j a_{jk}(x) phi_j
inline StateVec mode_state(const CenterManifold& cm, BOrder o, int k) {
  const std::vector<TermFunction>& col = cm.a_col(o, k);
  StateVec v;
  for (std::size_t j = 0; j < col.size(); ++j)
    if (!col[j].empty()) v += col[j] * cm.pr.modes[j].phi;
  return v;
}

// f_k^(m,n) = sum B^(m',n') (w_k^(m-m',n-n') + sum_j a_{jk}^(m-m',n-n') phi_j)
inline StateVec build_forcing(const CenterManifold& cm, int k, int m, int n) {
  StateVec f;
  for (int mp = 0; mp <= m; ++mp)
    for (int np = 0; np <= n; ++np) {
      if (mp == 0 && np == 0) continue;
      const BOrder lo{m - mp, n - np};
      const StateVec u = cm.w_of(lo, k) + mode_state(cm, lo, k);
      if (u.empty()) continue;
      f += apply_B({mp, np}, cm.ctx, u);
    }
  return f;
}

inline WCorrection solve_w(const CenterManifold& cm, int k, int m, int n, const StateVec& forcing) {
  WCorrection wc;
  wc.k = cm.pr.modes[k].j;
  wc.m = m;
  wc.n = n;
  wc.forcing = forcing;
  wc.w = solve_w_forced(cm.pr, complement(cm.pr, forcing));
  return wc;
}

// residual of w_x = L w + (1 - Pi) f on a collocation grid, relative to the forcing size
inline double w_residual(const Projector& pr, const WCorrection& wc, CollocationGrid grid = {}) {
  const Realization& R = pr.sp.R;
  const StateVec g = complement(pr, wc.forcing);
  const StateVec Lw = apply_L(pr.sp.wp, I * pr.sp.sigma, wc.w, R);
  const StateVec r{dx(wc.w.phi, R) - Lw.phi - g.phi, dx(wc.w.ups, R) - Lw.ups - g.ups,
                   dx(wc.w.eta, R) - Lw.eta - g.eta};
  const TermFunction dom1 = wc.w.eta - trace1(wc.w.ups, R);
  const TermFunction dom2 = at_y(dy(wc.w.phi, R), 0.0, R);
  double worst = 0.0, scale = 1e-300;
  const double T = R.period();
  for (int i = 0; i < grid.nx; ++i) {
    const double x = T * i / grid.nx;
    for (int jy = 0; jy < grid.ny; ++jy) {
      const double y = 0.5 - 0.5 * std::cos(std::numbers::pi * (jy + 0.5) / grid.ny);
      worst = std::max({worst, std::abs(eval(r.phi, x, y, R)), std::abs(eval(r.ups, x, y, R))});
      scale = std::max({scale, std::abs(eval(g.phi, x, y, R)), std::abs(eval(g.ups, x, y, R))});
    }
    worst = std::max({worst, std::abs(eval(r.phi, x, 1.0, R)), std::abs(eval(r.eta, x, 0.0, R)), std::abs(eval(dom1, x, 0.0, R)),
                      std::abs(eval(dom2, x, 0.0, R))});
    scale = std::max(scale, std::abs(eval(g.eta, x, 0.0, R)));
  }
  return worst / std::max(1.0, scale);
}

// max |<w(x), psi_j>| over sample x, relative to the size of w
inline double complement_defect(const Projector& pr, const StateVec& w) {
  const Realization& R = pr.sp.R;
  const std::vector<TermFunction> c = project_x(pr, w);
  double worst = 0.0;
  for (const TermFunction& f : c)
    for (double x : {0.0, 0.7, 1.9, 3.1})
      worst = std::max(worst, std::abs(eval(f, x, 0.0, R)));
  const double size = std::max({1.0, w.phi.max_abs_coeff(), w.ups.max_abs_coeff()});
  return worst / size;
}

}  // namespace stokes_evans
