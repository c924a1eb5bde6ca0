#pragma once

// Expansion coefficients a^(m,n)(T) of the monodromy matrix, closed forms,
// and the truncated periodic Evans function.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "reduction.hpp"

namespace stokes_evans {

using CMatrix = Eigen::MatrixXcd;

struct absent_entry : std::out_of_range {
  using std::out_of_range::out_of_range;
};

enum class EntrySource { Closed, Pipeline };

// a_{jk}^(m,n)(x) = e^{i k_j x} int_0^x e^{-i k_j x'} (F_j + Jordan coupling) dx'
inline std::vector<TermFunction> solve_a_column(const CenterManifold& cm, const StateVec& f) {
  const Realization& R = cm.pr.sp.R;
  const std::vector<TermFunction> F = project_x(cm.pr, f);
  const int d = cm.dim();
  std::vector<TermFunction> col(d);
  for (int j = 0; j < d; ++j) {
    const ModePair& mp = cm.pr.modes[j];
    TermFunction rhs = F[j];
    if (cm.at_zero() && mp.j == 4) rhs += col[cm.pr.sp.index_of(3)];
    col[j] = shift_x(integrate_x(shift_x(rhs, -mp.kf), R), mp.kf);
  }
  return col;
}

// advances the recursion by one order for every column
inline void advance(CenterManifold& cm, BOrder o) {
  const int d = cm.dim();
  std::vector<std::vector<TermFunction>> cols(d);
  std::vector<WCorrection> ws(d);
  for (int k = 0; k < d; ++k) {
    const StateVec f = build_forcing(cm, k, o.m, o.n);
    cols[k] = solve_a_column(cm, f);
    ws[k] = solve_w(cm, k, o.m, o.n, f);
  }
  cm.a[o] = cols;
  cm.w[o] = ws;
}

inline CenterManifold run_recursion(const SpectralPoint& sp, int max_order = 2) {
  if (max_order < 0 || max_order > 2) throw domain_error("monodromy order must be 0..2");
  CenterManifold cm = make_center_manifold(sp);
  for (BOrder o : expansion_orders())
    if (o.m + o.n <= max_order) advance(cm, o);
  return cm;
}

inline CMatrix a_at_period(const CenterManifold& cm, BOrder o) {
  const int d = cm.dim();
  CMatrix A(d, d);
  for (int k = 0; k < d; ++k) {
    const std::vector<TermFunction>& col = cm.a_col(o, k);
    for (int j = 0; j < d; ++j) A(j, k) = value_at_period(col[j], cm.pr.sp.R);
  }
  return A;
}

// Gauss-Legendre evaluation of a_{jk}(T) from the forcing, independent of
// the term-algebra x-integration and y-inner products
inline CMatrix a_quadrature(const CenterManifold& cm, BOrder o) {
  constexpr int NX = 128, NY = 64;
  const SpectralPoint& sp = cm.pr.sp;
  const Realization& R = sp.R;
  const double T = R.period();
  const int d = cm.dim();
  const auto& gx = boost::math::quadrature::gauss<double, NX>::abscissa();
  const auto& wx = boost::math::quadrature::gauss<double, NX>::weights();
  std::vector<std::pair<double, double>> xn;  // nodes and weights on [0, T]
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double a = gx[i], w = wx[i];
    if (a == 0.0) {
      xn.push_back({0.5 * T, 0.5 * T * w});
    } else {
      xn.push_back({0.5 * T * (1.0 + a), 0.5 * T * w});
      xn.push_back({0.5 * T * (1.0 - a), 0.5 * T * w});
    }
  }
  CMatrix A = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const StateVec f = build_forcing(cm, k, o.m, o.n);
    const std::vector<TermFunction>& col = cm.a_col(o, k);
    std::vector<cplx> acc(d);
    for (auto [x, w] : xn) {
      std::vector<cplx> F(d);
      for (int j = 0; j < d; ++j) F[j] = quad_oracle_inner<NY>(f, cm.pr.modes[j].psi, R, x);
      for (int j = 0; j < d; ++j) {
        const ModePair& mp = cm.pr.modes[j];
        cplx g = F[j];
        if (cm.at_zero() && mp.j == 4) g += eval(col[sp.index_of(3)], x, 0.0, R);
        acc[j] += w * std::exp(-I * (mp.k * x)) * g;
      }
    }
    for (int j = 0; j < d; ++j) A(j, k) = std::exp(I * (cm.pr.modes[j].k * T)) * acc[j];
  }
  return A;
}

// ---------------------------------------------------------------------------
// transcribed closed forms

struct ClosedMatrix {
  CMatrix value;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present;

  explicit ClosedMatrix(int d) : value(CMatrix::Zero(d, d)), present(d, d) { present.setConstant(false); }
  void put(int j, int k, cplx v) {  // 1-based
    value(j - 1, k - 1) = v;
    present(j - 1, k - 1) = true;
  }
  cplx entry(int j, int k) const {
    if (!present(j - 1, k - 1))
      throw absent_entry("entry (" + std::to_string(j) + "," + std::to_string(k) +
                         ") is not printed in closed form; use a_quadrature");
    return value(j - 1, k - 1);
  }
};

namespace detail {

inline ClosedMatrix closed_zero(const WaveParams& wp, BOrder o) {
  const double pi = std::numbers::pi, s = wp.s, c = wp.c, m = wp.mu0, k = wp.kappa, T = wp.period;
  const double s2 = s * s, c2 = c * c;
  ClosedMatrix A(4);
  auto fill = [&](std::initializer_list<std::pair<int, int>> zeros) {
    for (auto [j, kk] : zeros) A.put(j, kk, 0.0);
  };
  if (o.m == 0 && o.n == 0) {
    for (int j = 1; j <= 4; ++j)
      for (int kk = 1; kk <= 4; ++kk) A.put(j, kk, j == kk ? 1.0 : 0.0);
    A.put(4, 3, T);
  } else if (o.m == 1 && o.n == 0) {
    for (int j = 1; j <= 4; ++j)
      for (int kk = 1; kk <= 4; ++kk) A.put(j, kk, 0.0);
    const double d11 = 4.0 * pi * c * c2 / (m * s * (s2 - m + 1.0));
    A.put(1, 1, d11);
    A.put(2, 2, d11);
    A.put(3, 3, 2.0 * pi * c * (m + 1.0) / (m * s * (1.0 - m)));
    const double r4 = 4.0 * pi * (s2 + 1.0) / (m * (m - 1.0) * s);
    A.put(4, 1, r4);
    A.put(4, 2, r4);
    A.put(4, 3, 4.0 * pi * pi * (s2 + 1.0) / (m * m * s2 * (1.0 - m)));
    A.put(4, 4, 2.0 * pi / k);
  } else if (o.m == 0 && o.n == 1) {
    for (int j = 1; j <= 4; ++j)
      for (int kk = 1; kk <= 4; ++kk) A.put(j, kk, 0.0);
    const double d13 = pi * (2.0 * s2 + 3.0) / (s2 - m + 1.0);
    A.put(1, 3, d13);
    A.put(2, 3, d13);
    const double e2 = std::exp(2.0 * k), e4 = std::exp(4.0 * k);
    const cplx r41 = 4.0 * pi * e2 * (m - 4.0 * c2) * (c2 - 1.0) * I / ((e4 - 1.0) * (m - 1.0));
    A.put(4, 1, r41);
    A.put(4, 2, -r41);
    A.put(4, 3, 2.0 * pi * c * (m * m + m + 1.0) / (m * (m - 1.0)));
  } else if (o.m == 2 && o.n == 0) {
    const double mc = m - c2;
    const cplx a11 = 8.0 * pi * pi * c2 * c2 * c2 / (m * m * mc * mc * (c2 - 1.0)) +
                     2.0 * pi * c2 * c2 * (c2 * c2 + 4.0 * m * m * c2 - 3.0 * m * m - 2.0 * m * c2) * I /
                         (m * m * mc * mc * mc * (c2 - 1.0));
    A.put(1, 1, a11);
    A.put(2, 2, std::conj(a11));
    fill({{1, 2}, {1, 4}, {2, 1}, {2, 4}});
    const double a31 = 4.0 * pi * (s2 + 1.0) * (s2 - 3.0 * m * s2 - 2.0 * m + m * m + 1.0) /
                       (m * s * (m - 1.0) * (m - 1.0) * (s2 - m + 1.0));
    A.put(3, 1, a31);
    A.put(3, 2, a31);
    A.put(3, 4, 2.0 * pi * c * (c + s) / (m + c * s + c2 - m * c2 - m * c * s - 1.0));
    A.put(4, 4, -2.0 * pi * pi * (s2 + 1.0) / (m * m * s2 * (m - 1.0)));
  } else if (o.m == 1 && o.n == 1) {
    const double a11 = -2.0 * pi * (c + 2.0 * c * c2) / ((m - c2) * (m - 1.0));
    const double a14 = 2.0 * pi * (s2 + 1.0) / (s2 - m + 1.0);
    for (int j : {1, 2}) {
      A.put(j, 1, a11);
      A.put(j, 2, a11);
      A.put(j, 4, a14);
    }
    const double c4 = c2 * c2;
    const cplx a31 = -2.0 * pi * I * (4.0 * c4 + 4.0 * s * c2 * c - 5.0 * c2 - 3.0 * s * c + 1.0) *
                     (-2.0 * c4 * m * m - 4.0 * c4 * m + 2.0 * c4 + 3.0 * c2 * m * m + 2.0 * c2 * m - m * m * m) /
                     (c * (m - 1.0) * (m - 1.0) * (-c2 + m) * (-4.0 * c2 * c - 4.0 * s * c2 + 3.0 * c + s));
    A.put(3, 1, a31);
    A.put(3, 4, 0.0);
  } else if (o.m == 0 && o.n == 2) {
    const double s4 = s2 * s2, s6 = s4 * s2;
    const cplx a11 = -I * m * pi *
                     (24.0 * s2 - 21.0 * m * s2 - 20.0 * m * s4 - 8.0 * m * s6 - 9.0 * m + 40.0 * s4 + 16.0 * s6 +
                      15.0 * m * m * s2 + 16.0 * m * m * s4 + 8.0 * m * m * s6 + 9.0 * m * m) /
                     (4.0 * (s2 + 1.0) * (m - 1.0) * (s2 - m + 1.0));
    A.put(1, 1, a11);
    for (int j = 1; j <= 4; ++j) A.put(j, 4, 0.0);
  } else {
    throw domain_error("no closed form at this order");
  }
  return A;
}

inline ClosedMatrix closed_resonant(const SpectralPoint& sp, BOrder o) {
  const double T = sp.R.period(), s = sp.sigma, k2 = sp.k(2), k4 = sp.k(4);
  const cplx ph = std::exp(I * (k4 * T));
  ClosedMatrix A(2);
  if (o.m == 0 && o.n == 0) {
    A.put(1, 1, ph);
    A.put(2, 2, ph);
    A.put(1, 2, 0.0);
    A.put(2, 1, 0.0);
  } else if (o.m == 1 && o.n == 0) {
    auto diag = [&](double k) {
      const double s2k = std::sinh(2.0 * k);
      return 2.0 * k * s2k / (k * s2k + s * s2k + 2.0 * k * s - 2.0 * k * k) * T * ph;
    };
    A.put(1, 1, diag(k2));
    A.put(2, 2, diag(k4));
    A.put(1, 2, 0.0);
    A.put(2, 1, 0.0);
  } else if (o.m == 0 && o.n == 1) {
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k) A.put(j, k, 0.0);
  } else {
    throw domain_error("no closed form at this order");
  }
  return A;
}

}  // namespace detail

// Closed-form a^(m,n)(T); entries not printed are flagged absent.
inline ClosedMatrix a_closed(const SpectralPoint& sp, BOrder o) {
  if (sp.dp.regime == Regime::AtZero) return detail::closed_zero(sp.wp, o);
  if (sp.resonance) return detail::closed_resonant(sp, o);
  throw domain_error("closed forms exist only at sigma = 0 and at resonance");
}

// a^(1,0)_{12}(x) and a^(1,0)_{21}(x) off resonance, evaluated at x;
// the printed factor kappa is replaced by (k2 - k4)/2
inline std::pair<cplx, cplx> a10_offdiag_closed(const SpectralPoint& sp, double x) {
  const double s = sp.sigma, k2 = sp.k(2), k4 = sp.k(4);
  const double c2 = std::cosh(k2), s2 = std::sinh(k2), c4 = std::cosh(k4), s4 = std::sinh(k4);
  const double kap = 0.5 * (k2 - k4);
  const double d2 = k2 * std::sinh(2.0 * k2) + s * std::sinh(2.0 * k2) + 2.0 * k2 * s - 2.0 * k2 * k2;
  const double d4 = k4 * std::sinh(2.0 * k4) + s * std::sinh(2.0 * k4) + 2.0 * k4 * s - 2.0 * k4 * k4;
  const cplx c12 = -(k2 * k4 * k4 * c4 * s2 + k2 * k2 * k4 * c2 * s4 + 2.0 * k2 * k2 * k4 * c4 * s2 -
                     k2 * s * s * c4 * s2 + k4 * s * s * c2 * s4 - 2.0 * k2 * k4 * s * c2 * s4 -
                     2.0 * k2 * k4 * s * c4 * s2) /
                   (kap * (k2 + k4) * (k2 - s) * d2) * I;
  const cplx c21 = (2.0 * k2 * k4 * k4 * c2 * s4 + k2 * k4 * k4 * c4 * s2 + k2 * k2 * k4 * c2 * s4 +
                    k2 * s * s * c4 * s2 - k4 * s * s * c2 * s4 - 2.0 * k2 * k4 * s * c2 * s4 -
                    2.0 * k2 * k4 * s * c4 * s2) /
                   (kap * (k2 + k4) * (k4 - s) * d4) * I;
  const cplx e2 = std::exp(I * (k2 * x)), e4 = std::exp(I * (k4 * x));
  return {c12 * (e2 - e4), c21 * (e4 - e2)};
}

// ---------------------------------------------------------------------------

struct MonodromySeries {
  SpectralPoint sp;
  int dim = 0;
  std::map<BOrder, CMatrix> coeffs;
  std::map<BOrder, Eigen::Matrix<EntrySource, Eigen::Dynamic, Eigen::Dynamic>> source;

  const CMatrix& at(BOrder o) const {
    auto it = coeffs.find(o);
    if (it == coeffs.end()) throw sequencing_error("monodromy order not computed");
    return it->second;
  }
  cplx entry(BOrder o, int j, int k) const { return at(o)(j - 1, k - 1); }  // 1-based
};

// Prefers printed closed forms; the pipeline fills all remaining entries.
inline MonodromySeries build_series(const SpectralPoint& sp, int max_order = 2, bool prefer_closed = true) {
  const CenterManifold cm = run_recursion(sp, max_order);
  MonodromySeries ms;
  ms.sp = sp;
  ms.dim = cm.dim();
  std::vector<BOrder> orders{{0, 0}};
  for (BOrder o : expansion_orders())
    if (o.m + o.n <= max_order) orders.push_back(o);
  const bool has_closed = sp.dp.regime == Regime::AtZero || sp.resonance.has_value();
  for (BOrder o : orders) {
    CMatrix A = a_at_period(cm, o);
    Eigen::Matrix<EntrySource, Eigen::Dynamic, Eigen::Dynamic> src(ms.dim, ms.dim);
    src.setConstant(EntrySource::Pipeline);
    if (prefer_closed && has_closed) {
      std::optional<ClosedMatrix> C;
      try {
        C = a_closed(sp, o);
      } catch (const domain_error&) {
      }
      if (C)
        for (int j = 0; j < ms.dim; ++j)
          for (int k = 0; k < ms.dim; ++k)
            if (C->present(j, k)) {
              A(j, k) = C->value(j, k);
              src(j, k) = EntrySource::Closed;
            }
    }
    ms.coeffs[o] = A;
    ms.source[o] = src;
  }
  return ms;
}

inline MonodromySeries build_series(const WaveParams& wp, double sigma, int max_order = 2) {
  return build_series(spectral_point(wp, sigma), max_order);
}

// X(T; sigma, delta, eps) from the truncated series
inline CMatrix monodromy_matrix(const MonodromySeries& ms, cplx delta, cplx eps) {
  CMatrix X = CMatrix::Zero(ms.dim, ms.dim);
  auto ipow = [](cplx z, int p) {
    cplx r = 1.0;
    for (int i = 0; i < p; ++i) r *= z;
    return r;
  };
  for (auto& [o, A] : ms.coeffs) X += A * (ipow(delta, o.m) * ipow(eps, o.n));
  return X;
}

// exact cofactor determinant for dimensions 2 and 4
inline cplx det_exact(const CMatrix& M) {
  if (M.rows() == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (M.rows() != 4) throw domain_error("det_exact supports 2x2 and 4x4");
  auto d3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
    return M(r0, c0) * (M(r1, c1) * M(r2, c2) - M(r1, c2) * M(r2, c1)) -
           M(r0, c1) * (M(r1, c0) * M(r2, c2) - M(r1, c2) * M(r2, c0)) +
           M(r0, c2) * (M(r1, c0) * M(r2, c1) - M(r1, c1) * M(r2, c0));
  };
  return M(0, 0) * d3(1, 2, 3, 1, 2, 3) - M(0, 1) * d3(1, 2, 3, 0, 2, 3) + M(0, 2) * d3(1, 2, 3, 0, 1, 3) -
         M(0, 3) * d3(1, 2, 3, 0, 1, 2);
}

// det(e^{ikT} I - X(T; sigma, delta, eps)) continued to complex k and eps
inline cplx evans_delta(const MonodromySeries& ms, cplx delta, cplx k, cplx eps) {
  const double T = ms.sp.R.period();
  const CMatrix X = monodromy_matrix(ms, delta, eps);
  const CMatrix M = std::exp(I * (k * T)) * CMatrix::Identity(ms.dim, ms.dim) - X;
  return det_exact(M);
}

// Delta(lambda, k; eps) = det(e^{ikT} I - X(T)) with lambda = i sigma + delta
inline cplx evans_value(const MonodromySeries& ms, cplx lambda, double k, double eps) {
  return evans_delta(ms, lambda - I * ms.sp.sigma, k, eps);
}

}  // namespace stokes_evans
