#pragma once

// Expansion coefficients B^(m,n)(x; sigma) of the perturbation operator,
// applied to state vectors.

#include <map>
#include <utility>

#include "dispersion.hpp"
#include "funcspace.hpp"
#include "series.hpp"
#include "stokes.hpp"

namespace stokes_evans {

struct BOrder {
  int m = 0;  // delta order
  int n = 0;  // eps order
  auto operator<=>(const BOrder&) const = default;
};

inline bool supported(BOrder o) {
  return (o.m == 1 && o.n == 0) || (o.m == 2 && o.n == 0) || (o.m == 0 && o.n == 1) || (o.m == 1 && o.n == 1) ||
         (o.m == 0 && o.n == 2);
}

// Stokes data entering B, as functions of x (traces) and of (x, y)
struct BContext {
  WaveParams wp;
  double sigma = 0.0;
  Realization R;
  StokesExpansion se;
  // first order
  TermFunction a, b, axx, axy;       // phi1_x(1), phi1_y(1), phi1_xx(1), phi1_xy(1)
  TermFunction e, ex, exx;           // eta1 and x derivatives
  TermFunction Py, Pyy, Pxy;         // phi1_y, phi1_yy, phi1_xy
  // second order
  TermFunction p2x, p2y, p2xx, p2xy;  // traces at y = 1
  TermFunction e2, e2x;
  TermFunction Q2y, Q2yy, Q2xy;
  double pb = 0.0, m2 = 0.0;  // phibar_2, mu_2
  TermFunction Y;             // y
};

inline BContext make_b_context(const WaveParams& wp, double sigma, const Realization& R) {
  BContext c;
  c.wp = wp;
  c.sigma = sigma;
  c.R = R;
  c.se = build_stokes(wp);
  const TermFunction& p1 = c.se.phi[1];
  const TermFunction& p2 = c.se.phi[2];
  c.Py = dy(p1, R);
  c.Pyy = dy(c.Py, R);
  c.Pxy = dx(c.Py, R);
  c.a = trace1(dx(p1, R), R);
  c.b = trace1(c.Py, R);
  c.axx = trace1(dx(dx(p1, R), R), R);
  c.axy = trace1(c.Pxy, R);
  c.e = c.se.eta[1];
  c.ex = dx(c.e, R);
  c.exx = dx(c.ex, R);
  c.Q2y = dy(p2, R);
  c.Q2yy = dy(c.Q2y, R);
  c.Q2xy = dx(c.Q2y, R);
  c.p2x = trace1(dx(p2, R), R);
  c.p2y = trace1(c.Q2y, R);
  c.p2xx = trace1(dx(dx(p2, R), R), R);
  c.p2xy = trace1(c.Q2xy, R);
  c.e2 = c.se.eta[2];
  c.e2x = dx(c.e2, R);
  c.pb = c.se.phibar[2];
  c.m2 = c.se.mu[2];
  c.Y = TermFunction::y_pow(1.0, 1);
  return c;
}

// the unknown and its derivatives and traces
struct BAtoms {
  TermFunction phi, phiy, phiyy, ups, upsy, phi1, phiy1, ups1, eta;
};

inline BAtoms atoms_of(const StateVec& u, const Realization& R) {
  BAtoms t;
  t.phi = u.phi;
  t.phiy = dy(u.phi, R);
  t.phiyy = dy(t.phiy, R);
  t.ups = u.ups;
  t.upsy = dy(u.ups, R);
  t.phi1 = trace1(u.phi, R);
  t.phiy1 = trace1(t.phiy, R);
  t.ups1 = trace1(u.ups, R);
  t.eta = u.eta;
  return t;
}

namespace detail {

inline StateVec apply_B10(const BContext& c, const BAtoms& t) {
  return {t.phi, -t.ups - t.phi * (2.0 * I * c.sigma / c.wp.mu0), t.eta};
}

inline StateVec apply_B20(const BContext& c, const BAtoms& t) {
  return {TermFunction{}, t.phi * (-1.0 / c.wp.mu0), TermFunction{}};
}

inline StateVec apply_B01(const BContext& c, const BAtoms& t) {
  const double m = c.wp.mu0, s = c.sigma;
  const cplx is = I * s;
  const TermFunction &a = c.a, &b = c.b, &Y = c.Y;
  StateVec r;
  r.phi = a * is * t.phi + (Y * c.ex + b) * t.phiy - Y * c.Py * t.phiy1 + (a * m - b * is) * t.ups +
          Y * c.Py * is * t.eta;
  r.ups = (b * (is * s * s) + a * (m * s * s) - c.axx * (is * m)) * (1.0 / (m * m)) * t.phi -
          (c.axy + b * (2.0 * is)) * (1.0 / m) * t.phiy +
          (a * m + c.e * (2.0 * m) - b * is) * (1.0 / (m * m)) * t.phiyy +
          (Y * c.Py * is - Y * c.Pxy) * (1.0 / m) * t.phiy1 +
          (c.axy * is - c.axx * m - a * (is * m)) * (1.0 / m) * t.ups + (Y * c.ex - b) * t.upsy +
          (c.Pyy * 2.0 + Y * c.Py * (s * s) + Y * c.Pxy * is) * (1.0 / m) * t.eta;
  r.eta = c.ex * is * t.phi1 + (c.e - a) * t.phiy1 + c.ex * m * t.ups1 + (b + a * is) * t.eta;
  return r;
}

inline StateVec apply_B11(const BContext& c, const BAtoms& t) {
  const double m = c.wp.mu0, s = c.sigma;
  const cplx is = I * s;
  const TermFunction &a = c.a, &b = c.b, &Y = c.Y;
  StateVec r;
  r.phi = a * t.phi - b * t.ups + Y * c.Py * t.eta;
  r.ups = (b * (3.0 * s * s) - c.axx * m - a * (2.0 * is * m)) * (1.0 / (m * m)) * t.phi -
          b * (2.0 / m) * t.phiy - b * (1.0 / (m * m)) * t.phiyy + Y * c.Py * (1.0 / m) * t.phiy1 +
          (c.axy - a * m) * (1.0 / m) * t.ups + (Y * c.Pxy - Y * c.Py * (2.0 * is)) * (1.0 / m) * t.eta;
  r.eta = c.ex * t.phi1 + a * t.eta;
  return r;
}

inline StateVec apply_B02(const BContext& c, const BAtoms& t) {
  const double m = c.wp.mu0, s = c.sigma, s2 = s * s, m2 = m * m;
  const cplx is = I * s;
  const TermFunction &a = c.a, &b = c.b, &e = c.e, &ex = c.ex, &exx = c.exx, &axx = c.axx, &axy = c.axy;
  const TermFunction &p2x = c.p2x, &p2y = c.p2y, &p2xx = c.p2xx, &p2xy = c.p2xy, &e2 = c.e2, &e2x = c.e2x;
  const TermFunction &Py = c.Py, &Pyy = c.Pyy, &Pxy = c.Pxy, &Q2y = c.Q2y, &Q2yy = c.Q2yy, &Q2xy = c.Q2xy;
  const TermFunction &Y = c.Y;
  const TermFunction Y2 = Y * Y;
  const TermFunction pb(c.pb), mu2(c.m2);
  StateVec r;

  r.phi = (a * a + pb + p2x - b * ex) * is * t.phi +
          (p2y + a * b - b * e * 2.0 + Y * e2x - Y * e * ex) * t.phiy + Y * Py * ex * is * t.phi1 +
          (Y * e * Py * 2.0 - Y * a * Py - Y * Q2y) * t.phiy1 +
          (mu2 + a * a * m + pb * m - b * b + p2x * m - p2y * is - b * ex * m - a * b * is + b * e * is) * t.ups +
          Y * Py * ex * m * t.ups1 +
          (Y * Q2y * is - Y * Py * ex + Y * b * Py + Y * a * Py * is - Y * e * Py * is) * t.eta;

  r.ups = (a * a * (m2 * s2) - mu2 * (m * s2) - b * b * (s2 * s2) + pb * (m2 * s2) - p2xx * (I * m2 * s) +
           p2y * (I * m * s * s2) + b * b * (m * s2) + p2x * (m2 * s2) + axy * ex * (I * m2 * s) -
           a * axx * (I * m2 * s) + b * axx * (m * s2) + a * b * (I * m * s * s2) - b * e * (I * m * s * s2) -
           b * ex * (m2 * s2) + b * exx * (I * m2 * s)) *
              (1.0 / (m2 * m)) * t.phi +
          (b * b * (2.0 * s2) - p2xy * m - p2y * (2.0 * I * m * s) - b * axx * m + b * ex * m + e * axy * (2.0 * m) -
           b * axy * is - a * b * (2.0 * I * m * s) + b * e * (4.0 * I * m * s)) *
              (1.0 / m2) * t.phiy +
          (Y * Py * ex * s2 + Y * ex * Pxy * is) * (1.0 / m) * t.phi1 +
          (p2x * m2 - b * b * m + e2 * (2.0 * m2) + mu2 * m - b * b * m2 - e * e * (3.0 * m2) + b * b * s2 + pb * m2 -
           p2y * (I * m * s) - b * ex * m2 - a * e * (2.0 * m2) + a * b * (I * m * s) + b * e * (3.0 * I * m * s)) *
              (1.0 / (m2 * m)) * t.phiyy +
          (b * Py * m - Y * Q2xy * m + Y2 * ex * Pyy * m + Y * Py * ex * m - Y * b * Py * s2 + Y * e * Pxy * (2.0 * m) +
           Y * b * Pyy * m - Y * b * Pxy * is + Y * Q2y * (I * m * s) + Y * a * Py * (I * m * s) -
           Y * e * Py * (2.0 * I * m * s)) *
              (1.0 / m2) * t.phiy1 +
          (b * exx * m2 - p2xx * m2 + b * axy * (2.0 * m) - p2x * (I * m2 * s) + axy * ex * m2 - a * axx * m2 -
           b * axy * s2 - a * a * (I * m2 * s) - pb * (I * m2 * s) + p2xy * (I * m * s) + b * ex * (I * m2 * s) -
           b * ex * (I * m * s) - e * axy * (I * m * s)) *
              (1.0 / m2) * t.ups +
          (b * e * 2.0 - a * b - p2y + Y * e2x - Y * e * ex) * t.upsy + (Y * ex * Pxy - Y * Py * ex * is) * t.ups1 +
          (Q2yy * (2.0 * m) - a * Pyy * (2.0 * m) - e * Pyy * (6.0 * m) + b * Pyy * (2.0 * is) - Y * b * Pxy * s2 +
           Y * Q2y * (m * s2) - b * Py * (I * m * s) + Y * Q2xy * (I * m * s) - Y * ex * Pxy * m +
           Y * b * Py * (I * s * s2) + Y * b * Pxy * m + Y * a * Py * (m * s2) - Y * e * Py * (m * s2) -
           Y * e * Pxy * (I * m * s) - Y * b * Pyy * (I * m * s) - Y2 * ex * Pyy * (I * m * s) -
           Y * b * Py * (I * m * s)) *
              (1.0 / m2) * t.eta;

  r.eta = (e2x + a * ex * 2.0) * is * t.phi1 + (e2 - p2x - pb + a * e - a * a - e * e + b * ex * 2.0) * t.phiy1 +
          (e2x * m + a * ex * (2.0 * m) - b * ex * is) * t.ups1 +
          (a * a * is + p2y + a * b - b * e * 2.0 + pb * is + p2x * is - b * ex * is) * t.eta;
  return r;
}

}  // namespace detail

// transcribed coefficient operators
inline StateVec apply_B(BOrder o, const BContext& c, const StateVec& u) {
  if (!supported(o)) throw domain_error("unsupported B order");
  const BAtoms t = atoms_of(u, c.R);
  if (o.m == 1 && o.n == 0) return detail::apply_B10(c, t);
  if (o.m == 2 && o.n == 0) return detail::apply_B20(c, t);
  if (o.m == 0 && o.n == 1) return detail::apply_B01(c, t);
  if (o.m == 1 && o.n == 1) return detail::apply_B11(c, t);
  return detail::apply_B02(c, t);
}

// Right side of u_x = (L + B) u as (delta, eps) series, derived directly from
// the linearized equations about the Stokes wave.
struct BSeries {
  Series phi, ups, eta;
};

inline BSeries derive_rhs_series(const BContext& c, const StateVec& u, Trunc t = {2, 2, 2}) {
  const Realization& R = c.R;
  const BAtoms a = atoms_of(u, R);
  const StokesFields F = stokes_fields(c.se, t, t.max_e);
  const Series one(t, TermFunction(1.0));
  const Series lam = Series(t, TermFunction(I * c.sigma)) + Series::delta(t);
  const Series Y(t, c.Y);

  const Series invD = (one + F.H).reciprocal();
  const Series Hx = dx(F.H, R);
  const Series Phy = dy(F.Phi, R), Phyy = dy(Phy, R);
  const Series U = dx(F.Phi, R) - Y * Hx * Phy * invD;
  const Series Uy = dy(U, R);
  const Series U1 = trace1(U, R), U1x = dx(U1, R);
  const Series P1 = trace1(Phy, R);
  const Series Rr = (one - U1).reciprocal();
  const Series invD2 = invD * invD, invD3 = invD2 * invD;
  const Series M = F.mu - lam * P1 * invD - P1 * P1 * invD3;
  const Series Q = P1 * invD2;
  const Series Mx = dx(M, R), Qx = dx(Q, R);

  const Series uu = (M * a.ups + lam * a.phi + Q * a.phiy) * Rr;
  const Series u1 = (M * a.ups1 + lam * a.phi1 + Q * a.phiy1) * Rr;
  const Series uy = (M * a.upsy + lam * a.phiy + Q * a.phiyy) * Rr;
  const Series etax = (lam * a.eta + Hx * u1 - invD * a.phiy1 + Q * a.eta) * Rr;
  const Series phix = Y * Hx * invD * a.phiy + Y * Phy * invD * etax - Y * Hx * Phy * invD2 * a.eta + uu;
  const Series PhyYPhyy = Phy + Y * Phyy;
  const Series phixy = Hx * invD * a.phiy + Y * Hx * invD * a.phiyy + PhyYPhyy * invD * etax -
                       Hx * PhyYPhyy * invD2 * a.eta + uy;
  const Series ux = Y * Hx * invD * uy + Y * Uy * invD * etax - invD2 * a.phiyy -
                    (Y * Hx * Uy * invD2 - 2.0 * Phyy * invD3) * a.eta;
  const Series upsx =
      (ux * (one - U1) - U1x * uu - Mx * a.ups - lam * phix - Qx * a.phiy - Q * phixy) * M.reciprocal();
  return {phix, upsx, etax};
}

inline StateVec apply_B_derived(BOrder o, const BContext& c, const StateVec& u) {
  if (!supported(o)) throw domain_error("unsupported B order");
  const BSeries s = derive_rhs_series(c, u);
  return {s.phi.at(o.m, o.n), s.ups.at(o.m, o.n), s.eta.at(o.m, o.n)};
}

}  // namespace stokes_evans
