#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "stokes_evans/monodromy.hpp"
#include "w01_high_closed.hpp"

using namespace stokes_evans;

namespace {

using Tri = std::array<cplx, 3>;

const double kXs[] = {0.0, 0.37, 1.3, 2.9, 4.4};
const double kYs[] = {0.0, 0.2, 0.55, 0.8, 1.0};

// max gap between w and a closed form on a sample grid, relative to the closed form
double gap(const StateVec& w, const std::function<Tri(double, double)>& f, const Realization& R) {
  double m = 0.0, s = 0.0;
  for (double x : kXs)
    for (double y : kYs) {
      const Tri c = f(x, y);
      const cplx p[3] = {eval(w.phi, x, y, R), eval(w.ups, x, y, R), eval(w.eta, x, y, R)};
      for (int i = 0; i < 3; ++i) {
        m = std::max(m, std::abs(p[i] - c[i]));
        s = std::max(s, std::abs(c[i]));
      }
    }
  return m / std::max(1.0, s);
}

double sup(const StateVec& w, const Realization& R) {
  return gap(w, [](double, double) { return Tri{}; }, R);
}

const StateVec& w_of(const CenterManifold& cm, BOrder o, int j) { return cm.w.at(o)[cm.pr.sp.index_of(j)].w; }

struct AppendixF {
  double K, c, s, th;
  explicit AppendixF(const WaveParams& wp) : K(wp.kappa), c(wp.c), s(wp.s), th(std::tanh(wp.kappa)) {}

  cplx b10(double y) const {
    const cplx b11 = -2.0 * I * K * c * c / (K - c * s);
    const cplx b12 = -2.0 * I * c * c / (s - K * c);
    const cplx b13 = -I * (2.0 * K * std::pow(c, 4) + c * c * c * s - 3.0 * K * c * c) / std::pow(K - c * s, 2);
    return b11 * y * std::sinh(K * y) + b12 + b13 * std::cosh(K * y);
  }
  Tri w1_10(double x, double y) const {
    const cplx e = std::exp(-I * K * x);
    return {e * b10(y), -I * th * e * b10(y), -I * th * e * b10(1.0)};
  }
  Tri w2_10(double x, double y) const {
    const cplx e = std::exp(I * K * x);
    return {-e * b10(y), -I * th * e * b10(y), -I * th * e * b10(1.0)};
  }
  Tri w3_10(double, double y) const {
    const double v = -K * c / (s - K * c) * y * y + K * c * (3.0 * s - K * c) / (3.0 * std::pow(s - K * c, 2)) +
                     4.0 * c / (K * (K - c * s)) * std::cosh(K * y);
    return {v, 0.0, 0.0};
  }

  cplx phi01(double y) const {
    const double b1 = K * K * c, b2 = -K * (4.0 * c * c * s - K * c) / (4.0 * s - 4.0 * K * c);
    const double b3 = (2.0 * K * K * c * c * c + K * K * c + K * c * c * s) / (2.0 * (K - c * s));
    const double b4 = 3.0 * K * K * c / (4.0 * s * s * s);
    return b1 * y * std::sinh(K * y) + b2 + b3 * std::cosh(K * y) + b4 * std::cosh(2.0 * K * y);
  }
  cplx ups01(double x, double y) const {
    const double c3 = c * c * c, c4 = c3 * c;
    const cplx b21 = -I * K * K * s;
    const cplx b22 = I * K * (K * c - K * c3 + 2.0 * c * s - 2.0 * c3 * s) / (2.0 * K * c * s - 2.0 * c * c + 2.0);
    const cplx b23 = I * K * (4.0 * K - 3.0 * K * c4 - K * c * c + c * s - c3 * s) / (2.0 * s * (K - c * s));
    const cplx b24 = -3.0 * I * K * K / (2.0 * s * s);
    const cplx b25 =
        I * K * (K * c * c + K * c3 - K - K * c + 2.0 * c * s - 2.0 * c3 * s) / (2.0 * K * c * s - 2.0 * c * c + 2.0);
    const cplx b26 = I * K * (2.0 * K * s + c - c3 - K * c * c * s) / (2.0 * K - 2.0 * c * s);
    return std::exp(-2.0 * I * K * x) *
               (b21 * (y + 0.5) * std::sinh(K * y) + b22 + b23 * std::cosh(K * y) + b24 * std::cosh(2.0 * K * y)) +
           b21 * (y - 0.5) * std::sinh(K * y) + b25 + b26 * std::cosh(K * y);
  }
  Tri w1_01(double x, double y) const {
    return {std::exp(-2.0 * I * K * x) * phi01(y), ups01(x, y), ups01(x, 1.0)};
  }
  // mirror image of w1_01 in x
  Tri w2_01(double x, double y) const {
    return {std::exp(2.0 * I * K * x) * phi01(y), -ups01(-x, y), -ups01(-x, 1.0)};
  }
  cplx r3(double y) const {
    const double c2 = c * c, c4 = c2 * c2;
    const double b1 = (-2.0 * K * K * c2 - K * c * s) / (K - c * s), b2 = -c * (s + 2.0 * K * c) / (s - K * c);
    const double b3 = (c2 - c4 + 6.0 * K * K * c2 - 4.0 * K * K * c4 + 3.0 * K * c * s - 4.0 * K * c2 * c * s) /
                      (2.0 * K * K + 2.0 * c2 * s * s - 4.0 * K * c * s);
    return b1 * y * std::sinh(K * y) + b2 + b3 * std::cosh(K * y);
  }
  Tri w3_01(double x, double y) const {
    return {std::sin(K * x) * r3(y), th * std::cos(K * x) * r3(y), th * std::cos(K * x) * r3(1.0)};
  }
};

}  // namespace

TEST(Reduction, AppendixFOrderOneZero) {
  for (double kap : {0.8, 1.0, 1.5, 2.0}) {
    const WaveParams wp = make_wave_params(kap);
    const SpectralPoint sp = spectral_point(wp, 0.0);
    const CenterManifold cm = run_recursion(sp, 1);
    const AppendixF F(wp);
    using namespace std::placeholders;
    EXPECT_LT(gap(w_of(cm, {1, 0}, 1), std::bind(&AppendixF::w1_10, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(gap(w_of(cm, {1, 0}, 2), std::bind(&AppendixF::w2_10, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(gap(w_of(cm, {1, 0}, 3), std::bind(&AppendixF::w3_10, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(sup(w_of(cm, {1, 0}, 4), sp.R), 1e-12) << kap;
    EXPECT_LT(gap(w_of(cm, {0, 1}, 1), std::bind(&AppendixF::w1_01, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(gap(w_of(cm, {0, 1}, 2), std::bind(&AppendixF::w2_01, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(gap(w_of(cm, {0, 1}, 3), std::bind(&AppendixF::w3_01, &F, _1, _2), sp.R), 1e-10) << kap;
    EXPECT_LT(sup(w_of(cm, {0, 1}, 4), sp.R), 1e-12) << kap;
  }
}

TEST(Reduction, ForcingExamples) {
  const SpectralPoint sp = spectral_point(make_wave_params(1.2), 0.0);
  const CenterManifold cm = run_recursion(sp, 1);
  const int j4 = sp.index_of(4), j1 = sp.index_of(1);
  EXPECT_LT(sup(build_forcing(cm, j4, 0, 1), sp.R), 1e-13);
  const StateVec f = build_forcing(cm, j1, 1, 0);
  const StateVec direct = apply_B({1, 0}, cm.ctx, mode_state(cm, {0, 0}, j1));
  EXPECT_LT(sup(f - direct, sp.R), 1e-14);
}

TEST(Reduction, SequencingError) {
  const SpectralPoint sp = spectral_point(make_wave_params(1.2), 0.0);
  CenterManifold cm = make_center_manifold(sp);
  EXPECT_THROW(build_forcing(cm, 0, 1, 1), sequencing_error);
  EXPECT_THROW(build_forcing(cm, 0, 2, 0), sequencing_error);
  EXPECT_NO_THROW(build_forcing(cm, 0, 1, 0));
}

TEST(Reduction, ResidualAndComplement) {
  const WaveParams wp = make_wave_params(1.3);
  for (const SpectralPoint& sp : {spectral_point(wp, 0.0), resonant_point(wp, 2), resonant_point(wp, 3)}) {
    const CenterManifold cm = run_recursion(sp, 2);
    for (auto& [o, col] : cm.w)
      for (const WCorrection& wc : col) {
        EXPECT_LT(w_residual(cm.pr, wc), 1e-9) << sp.sigma << " (" << o.m << "," << o.n << ") k=" << wc.k;
        EXPECT_LT(complement_defect(cm.pr, wc.w), 1e-10) << sp.sigma << " (" << o.m << "," << o.n << ") k=" << wc.k;
      }
  }
}

TEST(Reduction, BelowCriticalResidual) {
  const WaveParams wp = make_wave_params(1.1);
  const SpectralPoint sp = spectral_point(wp, 0.5 * critical_point(wp).sigma_c);
  const CenterManifold cm = run_recursion(sp, 1);
  for (auto& [o, col] : cm.w)
    for (const WCorrection& wc : col) {
      EXPECT_LT(w_residual(cm.pr, wc), 1e-9);
      EXPECT_LT(complement_defect(cm.pr, wc.w), 1e-10);
    }
}

TEST(Reduction, FiniteDifferenceOracle) {
  const WaveParams wp = make_wave_params(1.5);
  const SpectralPoint sp = spectral_point(wp, 0.0);
  const CenterManifold cm = run_recursion(sp, 1);
  const WCorrection& wc = cm.w.at({0, 1})[sp.index_of(1)];
  const Freq om = Freq::of(KAPPA, -2);
  const StateVec h = -1.0 * state_blocks(complement(cm.pr, wc.forcing)).at({om, 0});
  const TermFunction phi = state_blocks(wc.w).at({om, 0}).phi;
  const double w = sp.R.eval(om), m = wp.mu0, s = sp.sigma;

  // phi'' - w^2 phi = -mu0 h2 - i(sigma + w) h1, phi'(0) = 0, phi'(1) - (sigma - w)^2/mu0 phi(1) = target
  auto fd = [&](int n) {
    const double dy = 1.0 / (n - 1);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i) {
      const double y = i * dy;
      b(i) = -m * eval(h.ups, 0.0, y, sp.R) - I * (s + w) * eval(h.phi, 0.0, y, sp.R);
      A(i, i) = -2.0 / (dy * dy) - w * w;
      if (i > 0) A(i, i - 1) = 1.0 / (dy * dy);
      if (i < n - 1) A(i, i + 1) = 1.0 / (dy * dy);
    }
    A(0, 1) = 2.0 / (dy * dy);
    const double rob = (s - w) * (s - w) / m;
    const cplx target = I * (s - w) * eval(h.phi, 0.0, 1.0, sp.R) / m - h.eta.constant();
    A(n - 1, n - 2) = 2.0 / (dy * dy);
    A(n - 1, n - 1) += 2.0 * rob / dy;
    b(n - 1) -= 2.0 * target / dy;
    return Eigen::VectorXcd(A.partialPivLu().solve(b));
  };
  const int n = 200;
  const Eigen::VectorXcd u = fd(n), u2 = fd(2 * n - 1);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx exact = eval(phi, 0.0, double(i) / (n - 1), sp.R);
    const cplx rich = (4.0 * u2(2 * i) - u(i)) / 3.0;
    worst = std::max(worst, std::abs(rich - exact));
    scale = std::max(scale, std::abs(exact));
  }
  EXPECT_LT(worst / scale, 1e-6);
}

TEST(Reduction, ResonantW01AgainstClosedForm) {
  for (double kap : {1.0, 1.5})
    for (int N : {2, 3}) {
      const WaveParams wp = make_wave_params(kap);
      const SpectralPoint sp = resonant_point(wp, N);
      const CenterManifold cm = run_recursion(sp, 1);
      const double K = kap, S = sp.sigma, k2 = sp.k(2), k4 = sp.k(4), c = wp.c, s = wp.s, m = wp.mu0;
      const w01_high::Consts C = w01_high::consts(K, S, k2, k4, m);
      const StateVec& w = w_of(cm, {0, 1}, 2);

      auto phi = [&](double x, double y) {
        const double sx = std::sin(K * x), cx = std::cos(K * x);
        return std::exp(I * k2 * x) *
               ((C.b1 * sx + C.b2 * cx) * std::cosh(k2 * y) + C.b3 * sx * y * std::sinh(K * y) +
                k2 * K * c * cx * y * std::sinh(k2 * y) + (C.b4 * sx + C.b5 * cx) * std::cosh(k4 * y) +
                C.b6 * std::exp(I * K * x) * std::cosh((k2 + K) * y) +
                C.b7 * std::exp(-I * K * x) * std::cosh((k2 - K) * y));
      };
      // upsilon without the undefined b_{1,12} term, and that term's basis function
      auto ups = [&](double x, double y) {
        const double sx = std::sin(K * x), cx = std::cos(K * x);
        return std::exp(I * k2 * x) *
               ((C.b8 * sx + C.b9 * cx) * std::cosh(k2 * y) + (C.b10 * sx + C.b11 * cx) * std::cosh(k4 * y) +
                std::tanh(K) * C.b3 * cx * y * std::sinh(K * y) - k2 * K * s * sx * std::sinh(k2 * y) +
                I * k2 * s * (k2 - S) * cx * y * std::sinh(k2 * y) +
                I * C.b6 * (k2 + K - S) / m * std::exp(I * K * x) * std::cosh((k2 + K) * y) +
                I * C.b7 * (k2 - K - S) / m * std::exp(-I * K * x) * std::cosh((k2 - K) * y));
      };
      auto b12_basis = [&](double x, double y) { return std::exp(I * k2 * x) * std::sin(K * x) * y * std::sinh(K * y); };

      double mp = 0.0, sp_ = 0.0;
      cplx num = 0.0;
      double den = 0.0;
      for (double x : kXs)
        for (double y : kYs) {
          mp = std::max(mp, std::abs(eval(w.phi, x, y, sp.R) - phi(x, y)));
          sp_ = std::max(sp_, std::abs(phi(x, y)));
          const cplx bb = b12_basis(x, y);
          num += std::conj(bb) * (eval(w.ups, x, y, sp.R) - ups(x, y));
          den += std::norm(bb);
        }
      EXPECT_LT(mp / sp_, 1e-8) << "kappa=" << kap << " N=" << N;

      const cplx b12 = num / den;
      double mu = 0.0, su = 0.0;
      for (double x : kXs)
        for (double y : kYs) {
          const cplx full = ups(x, y) + b12 * b12_basis(x, y);
          mu = std::max(mu, std::abs(eval(w.ups, x, y, sp.R) - full));
          su = std::max(su, std::abs(full));
        }
      EXPECT_LT(mu / su, 1e-8) << "kappa=" << kap << " N=" << N;

      for (double x : kXs) EXPECT_LT(std::abs(eval(w.eta, x, 0.0, sp.R) - eval(w.ups, x, 1.0, sp.R)) / su, 1e-12);
      EXPECT_LT(complement_defect(cm.pr, w), 1e-10);
    }
}
