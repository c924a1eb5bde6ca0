#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "random_terms.hpp"
#include "stokes_evans/indices.hpp"

using namespace stokes_evans;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Outcome kappa1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double k = find_kappa1();
  const double dt = seconds_since(t0);
  const WaveParams wp = make_wave_params(k);
  const double F = 1.0 / std::sqrt(wp.mu0);
  const double ek = std::abs(k - 1.362782756726421), em = std::abs(wp.mu0 - 1.553848798953821),
               eF = std::abs(F - 0.802223946850146);
  return {ek < 1e-9 && em < 1e-8 && eF < 1e-8 && dt < 1.0,
          fmt("kappa1=%.15f |dk|=%.1e mu0=%.15f |dmu0|=%.1e F=%.15f |dF|=%.1e time=%.3fs", k, ek, wp.mu0, em, F, eF,
              dt)};
}

Outcome kappa2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double k = find_kappa2();
  const double dt = seconds_since(t0);
  const double e = std::abs(k - 1.849404083750);
  return {e < 1e-5 && dt < 300.0, fmt("kappa2=%.10f |dk|=%.1e time=%.2fs", k, e, dt)};
}

Outcome f2_identity_check() {
  bool ok = true;
  std::string d;
  for (double kap : {0.8, 1.0, 1.2, 1.362783, 1.5, 2.0}) {
    const BFCoeffs b = bf_coefficients(make_wave_params(kap));
    const double r = std::abs(b.f2 - b.f2_closed) / std::abs(b.f2_closed);
    const cplx ratio = b.f2 / b.f2_closed;
    ok = ok && r < 1e-7;
    d += fmt(" k=%g:ratio=%.12f%+.1ei", kap, ratio.real(), ratio.imag());
  }
  return {ok, "f2(a-entries)/f2(printed identity):" + d};
}

Outcome closed_vs_pipeline() {
  double worst = 0.0, worst_q = 0.0;
  int count = 0;
  auto compare = [&](const SpectralPoint& sp, const CenterManifold& cm, BOrder o) {
    const ClosedMatrix C = a_closed(sp, o);
    const CMatrix A = a_at_period(cm, o);
    const CMatrix Q = o.m + o.n == 0 ? A : a_quadrature(cm, o);
    for (int j = 0; j < C.value.rows(); ++j)
      for (int k = 0; k < C.value.cols(); ++k)
        if (C.present(j, k)) {
          worst = std::max(worst, rel(A(j, k), C.value(j, k)));
          worst_q = std::max(worst_q, rel(Q(j, k), C.value(j, k)));
          ++count;
        }
  };
  for (double kap : {1.0, 1.5}) {
    const WaveParams wp = make_wave_params(kap);
    const SpectralPoint s0 = spectral_point(wp, 0.0);
    const CenterManifold c0 = run_recursion(s0, 2);
    for (BOrder o : {BOrder{0, 0}, BOrder{1, 0}, BOrder{0, 1}, BOrder{2, 0}, BOrder{1, 1}, BOrder{0, 2}})
      compare(s0, c0, o);
    for (int N : {2, 3}) {
      const SpectralPoint sr = resonant_point(wp, N);
      const CenterManifold cr = run_recursion(sr, 1);
      for (BOrder o : {BOrder{0, 0}, BOrder{1, 0}, BOrder{0, 1}}) compare(sr, cr, o);
      const auto [c12, c21] = a10_offdiag_closed(sr, sr.R.period());
      const CMatrix A = a_at_period(cr, {1, 0});
      worst = std::max({worst, rel(A(0, 1), c12), rel(A(1, 0), c21)});
      count += 2;
    }
  }
  return {worst < 1e-8 && worst_q < 1e-8,
          fmt("%d printed entries; max rel err term-algebra=%.1e quadrature=%.1e", count, worst, worst_q)};
}

Outcome resonance_structure() {
  const MonodromySeries m2 = build_series(resonant_point(make_wave_params(1.5), 2), 2, false);
  const double a01 = m2.at({0, 1}).cwiseAbs().maxCoeff();
  const MonodromySeries m3 = build_series(resonant_point(make_wave_params(1.0), 3), 2, false);
  const double off = std::max(std::abs(m3.entry({0, 2}, 1, 2)), std::abs(m3.entry({0, 2}, 2, 1)));
  const WaveParams wp = make_wave_params(1.5);
  const double sig = 0.5 * (resonance_sigma(wp, 2).sigma_N + resonance_sigma(wp, 3).sigma_N);
  const MonodromySeries mo = build_series(spectral_point(wp, sig), 1, false);
  const double o12 = std::abs(mo.entry({0, 1}, 1, 2)), o21 = std::abs(mo.entry({0, 1}, 2, 1));
  return {a01 < 1e-10 && off < 1e-9 && o12 > 1e-6 && o21 > 1e-6,
          fmt("max|a^(0,1)| at sigma2(1.5)=%.1e; max offdiag|a^(0,2)| at sigma3(1.0)=%.1e; off resonance "
              "|a12^(0,1)|=%.3e |a21^(0,1)|=%.3e",
              a01, off, o12, o21)};
}

Outcome stokes_residuals() {
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const StokesExpansion se = build_stokes(make_wave_params(0.5 + 0.1 * i));
    for (int n = 1; n <= 3; ++n) worst = std::max(worst, stokes_residual(se, n));
  }
  return {worst < 1e-9, fmt("kappa in [0.5,2.5] step 0.1, orders 1..3: max residual=%.1e", worst)};
}

Outcome biorthogonality() {
  double bio = 0.0, res = 0.0;
  for (double kap : {0.8, 1.0, 1.5, 2.2}) {
    const WaveParams wp = make_wave_params(kap);
    for (const SpectralPoint& sp : {spectral_point(wp, 0.0), resonant_point(wp, 2), resonant_point(wp, 3)}) {
      const Projector pr = modes_at(sp);
      for (const ModePair& a : pr.modes) {
        for (const ModePair& b : pr.modes)
          bio = std::max(bio, std::abs(inner_value(a.phi, b.psi, sp.R) - (a.j == b.j ? 1.0 : 0.0)));
        if (!(sp.sigma == 0.0 && a.j == 3)) res = std::max(res, eigen_residual(pr, a.j));
      }
    }
  }
  return {bio < 1e-10 && res < 1e-10,
          fmt("kappa in {0.8,1(limit branch),1.5,2.2}, sigma in {0,sigma2,sigma3}: max biorth err=%.1e max eigen "
              "residual=%.1e",
              bio, res)};
}

Outcome bubble() {
  const BubbleCoeffs bc = ind2(make_wave_params(1.5));
  const double eps = 1e-3, e2 = eps * eps;
  const BubbleCurve cv = bubble_spectrum(bc, eps);
  if (cv.empty) return {false, "bubble is empty"};
  const double want = std::sqrt(bc.ind2) * e2;
  const double em = std::abs(cv.max_re - want) / want;
  const double gs = -bc.alpha12 / (2.0 * bc.alpha20) * e2;
  const double eg = std::abs(cv.gamma_star - gs) / std::abs(gs);
  double at_star = 0.0;
  for (const BubblePoint& p : cv.upper)
    if (p.gamma == cv.gamma_star) at_star = p.delta.real();
  const double es = std::abs(at_star - want) / want;
  const double end_lo = std::abs(cv.upper.front().delta.real()), end_hi = std::abs(cv.upper.back().delta.real());
  const bool closed = cv.upper.front().delta == cv.lower.front().delta && cv.upper.back().delta == cv.lower.back().delta;
  const bool ends = end_lo < 1e-12 * want && end_hi < 1e-12 * want;
  return {em < 1e-8 && eg < 1e-8 && es < 1e-8 && ends && closed,
          fmt("ind2=%.12f max Re delta=%.6e rel err=%.1e; gamma*=%.6e rel err=%.1e; Re delta(gamma*) rel err=%.1e; "
              "|Re delta| at endpoints=%.1e,%.1e; closed=%d",
              bc.ind2, cv.max_re, em, cv.gamma_star, eg, es, end_lo, end_hi, int(closed))};
}

Outcome variant_window() {
  auto f = [](double k) { return ind2_mu0_variant(make_wave_params(k)); };
  const double lo = detail::bracket_root(f, 0.84, 0.88), hi = detail::bracket_root(f, 0.99, 1.03);
  const double el = std::abs(lo - 0.86430), eh = std::abs(hi - 1.00804);
  return {el < 5e-4 && eh < 5e-4 && f(0.95) > 0.0,
          fmt("sign changes at kappa=%.6f (|d|=%.1e) and kappa=%.6f (|d|=%.1e); variant(0.95)=%.4f", lo, el, hi, eh,
              f(0.95))};
}

Outcome property_suites() {
  // function space: closure of products, x-integration inverse of dx, y-integration against Gauss-Legendre
  std::mt19937 g(5);
  const Realization R = se_test::sample_realization();
  double fs = 0.0;
  for (int t = 0; t < 40; ++t) {
    const TermFunction f = se_test::random_tf(g, 5, true), h = se_test::random_tf(g, 5, true);
    const TermFunction back = dx(integrate_x(f, R), R);
    for (double x : {0.3, 1.1})
      for (double y : {0.2, 0.9}) {
        fs = std::max(fs, rel(eval(f * h, x, y, R), eval(f, x, y, R) * eval(h, x, y, R)));
        fs = std::max(fs, rel(eval(back, x, y, R), eval(f, x, y, R)));
      }
    const TermFunction u = se_test::random_tf(g, 5, false);
    const double gl = boost::math::quadrature::gauss<double, 64>::integrate(
        [&](double y) { return eval(u, 0.0, y, R).real(); }, 0.0, 1.0);
    fs = std::max(fs, std::abs(integrate_y01_value(u, R).real() - gl) / std::max(1.0, std::abs(gl)));
  }

  // translation invariance Delta(0, K kappa; eps) = 0
  double tr = 0.0;
  for (double kap : {0.8, 1.5}) {
    const MonodromySeries ms = build_series(make_wave_params(kap), 0.0, 2);
    for (int K : {-2, 0, 1, 3})
      for (double e : {0.0, 0.005, 0.01}) tr = std::max(tr, std::abs(evans_delta(ms, 0.0, K * kap, e)));
  }

  // symmetry quadruples: bubble pairs delta_+ = -conj(delta_-) about the drift, conjugation of BF roots
  const BubbleCoeffs bc = ind2(make_wave_params(1.5));
  const BubbleCurve cv = bubble_spectrum(bc, 4e-3, 41);
  double sy = 0.0;
  for (std::size_t i = 0; i < cv.upper.size(); ++i) {
    const cplx drift = bc.alpha10 * cv.upper[i].gamma + bc.alpha02 * 16e-6;
    sy = std::max(sy, std::abs(-std::conj(cv.upper[i].delta - drift) - (cv.lower[i].delta - drift)) / 16e-6);
  }
  const MonodromySeries m0 = build_series(spectral_point(make_wave_params(1.0), 0.0), 2, false);
  const BFCoeffs b = bf_coefficients(m0);
  const double gm = 0.01, ep = 0.005;
  auto F = [&](cplx l) {
    const cplx h = 1e-7 * std::max(1e-3, std::abs(l));
    return std::pair<cplx, cplx>(evans_delta(m0, l, gm, ep),
                                 (evans_delta(m0, l + h, gm, ep) - evans_delta(m0, l - h, gm, ep)) / (2.0 * h));
  };
  const cplx l = boost::math::tools::complex_newton(F, b.alpha10[0] * gm + b.alpha20[0] * gm * gm + b.alpha11 * gm * ep);
  const double sc = std::abs(F(l).second) * std::abs(l);
  const double cj = std::abs(evans_delta(m0, std::conj(l), -gm, ep)) / sc;

  return {fs < 1e-10 && tr < 1e-12 && sy < 1e-10 && cj < 1e-10,
          fmt("funcspace max rel err=%.1e; max|Delta(0,K kappa;eps)|=%.1e; bubble quadruple err=%.1e; BF conjugate "
              "root defect=%.1e",
              fs, tr, sy, cj)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"kappa1 reproduction", kappa1},
      {"kappa2 reproduction", kappa2},
      {"f2 identity", f2_identity_check},
      {"closed-form vs pipeline monodromy", closed_vs_pipeline},
      {"resonance structure", resonance_structure},
      {"Stokes residuals", stokes_residuals},
      {"biorthogonality and eigen-residuals", biorthogonality},
      {"bubble reproduction", bubble},
      {"index-variant window", variant_window},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
