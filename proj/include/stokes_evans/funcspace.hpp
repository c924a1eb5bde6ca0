#pragma once

// Closed term algebra for functions of the form
//   c * x^q * exp(i w x) * y^p * {1, cosh(a y), sinh(a y)}
// with w and a integer combinations of a fixed set of wave numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

namespace stokes_evans {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

enum Basis : int { ONE = 0, KAPPA = 1, K1 = 2, K2 = 3, K3 = 4, K4 = 5 };
inline constexpr int kBasisDim = 6;
inline constexpr int kMaxYPower = 6;

struct unsupported_degree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer lattice vector over {1, kappa, k1, k2, k3, k4}.
struct Freq {
  std::array<int, kBasisDim> n{};

  static Freq of(Basis b, int m = 1) {
    Freq f;
    f.n[b] = m;
    return f;
  }
  bool is_zero() const {
    return std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
  }
  // first nonzero component positive
  bool is_canonical_sign() const {
    for (int v : n)
      if (v != 0) return v > 0;
    return true;
  }
  Freq operator-() const {
    Freq r;
    for (int i = 0; i < kBasisDim; ++i) r.n[i] = -n[i];
    return r;
  }
  Freq operator+(const Freq& o) const {
    Freq r;
    for (int i = 0; i < kBasisDim; ++i) r.n[i] = n[i] + o.n[i];
    return r;
  }
  Freq operator-(const Freq& o) const { return *this + (-o); }
  Freq operator*(int m) const {
    Freq r;
    for (int i = 0; i < kBasisDim; ++i) r.n[i] = n[i] * m;
    return r;
  }
  auto operator<=>(const Freq&) const = default;
};

inline Freq abs_canonical(const Freq& f) { return f.is_canonical_sign() ? f : -f; }

// Eliminates k2 under the constraint k2 = k4 + N kappa.
inline Freq resonant_canonical(const Freq& f, int N) {
  Freq r = f;
  r.n[KAPPA] += N * f.n[K2];
  r.n[K4] += f.n[K2];
  r.n[K2] = 0;
  return r;
}

// Numerical values attached to the lattice basis.
struct Realization {
  std::array<double, kBasisDim> value{1.0, 1.0, 0.0, 0.0, 0.0, 0.0};

  double kappa() const { return value[KAPPA]; }
  double period() const { return 2.0 * std::numbers::pi / value[KAPPA]; }
  double eval(const Freq& f) const {
    double s = 0.0;
    for (int i = 0; i < kBasisDim; ++i)
      if (f.n[i] != 0) s += f.n[i] * value[i];
    return s;
  }
  // exp(i w T); integer multiples of kappa contribute exactly 1
  cplx phase_at_period(const Freq& f) const {
    double s = 0.0;
    for (int i = 0; i < kBasisDim; ++i)
      if (i != KAPPA && f.n[i] != 0) s += f.n[i] * value[i];
    return std::exp(I * (s * period()));
  }
};

enum class YKind : int { Const = 0, Cosh = 1, Sinh = 2 };

struct TermKey {
  Freq xf;
  int xp = 0;
  int yp = 0;
  YKind kind = YKind::Const;
  Freq yr;
  auto operator<=>(const TermKey&) const = default;
};

struct Term {
  cplx coeff;
  TermKey key;
};

class TermFunction {
 public:
  using Map = std::map<TermKey, cplx>;

  TermFunction() = default;
  TermFunction(cplx c) {  // NOLINT: implicit constant
    if (c != 0.0) add(TermKey{}, c);
  }
  static TermFunction term(cplx c, const TermKey& k) {
    TermFunction f;
    f.add(k, c);
    f.canonicalize();
    return f;
  }
  // c * y^p * cosh(a y)
  static TermFunction cosh_y(cplx c, const Freq& a, int p = 0) {
    return term(c, TermKey{Freq{}, 0, p, YKind::Cosh, a});
  }
  static TermFunction sinh_y(cplx c, const Freq& a, int p = 0) {
    return term(c, TermKey{Freq{}, 0, p, YKind::Sinh, a});
  }
  static TermFunction y_pow(cplx c, int p) { return term(c, TermKey{Freq{}, 0, p, YKind::Const, Freq{}}); }
  // c * x^q * exp(i w x)
  static TermFunction expx(cplx c, const Freq& w, int q = 0) {
    return term(c, TermKey{w, q, 0, YKind::Const, Freq{}});
  }

  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add(TermKey k, cplx c) {
    if (k.yp > kMaxYPower)
      throw unsupported_degree("y power " + std::to_string(k.yp) + " exceeds cap");
    if (k.kind == YKind::Const) {
      k.yr = Freq{};
    } else if (k.yr.is_zero()) {
      if (k.kind == YKind::Sinh) return;
      k.kind = YKind::Const;
    } else if (!k.yr.is_canonical_sign()) {
      k.yr = -k.yr;
      if (k.kind == YKind::Sinh) c = -c;
    }
    terms_[k] += c;
  }

  TermFunction& canonicalize(double rel = 1e-14) {
    double mx = 0.0;
    for (auto& [k, c] : terms_) mx = std::max(mx, std::abs(c));
    const double cut = rel * mx;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= cut || it->second == 0.0)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  TermFunction& operator+=(const TermFunction& o) {
    for (auto& [k, c] : o.terms_) terms_[k] += c;
    return canonicalize();
  }
  TermFunction& operator-=(const TermFunction& o) {
    for (auto& [k, c] : o.terms_) terms_[k] -= c;
    return canonicalize();
  }
  TermFunction& operator*=(cplx s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend TermFunction operator+(TermFunction a, const TermFunction& b) { return a += b; }
  friend TermFunction operator-(TermFunction a, const TermFunction& b) { return a -= b; }
  friend TermFunction operator*(TermFunction a, cplx s) { return a *= s; }
  friend TermFunction operator*(cplx s, TermFunction a) { return a *= s; }
  friend TermFunction operator*(TermFunction a, double s) { return a *= cplx(s); }
  friend TermFunction operator*(double s, TermFunction a) { return a *= cplx(s); }
  TermFunction operator-() const { return *this * cplx(-1.0); }

  friend TermFunction operator*(const TermFunction& a, const TermFunction& b) {
    TermFunction r;
    for (auto& [ka, ca] : a.terms_)
      for (auto& [kb, cb] : b.terms_) r.add_product(ka, kb, ca * cb);
    return r.canonicalize();
  }

  bool has_x() const {
    for (auto& [k, c] : terms_)
      if (!k.xf.is_zero() || k.xp != 0) return true;
    return false;
  }
  bool has_y() const {
    for (auto& [k, c] : terms_)
      if (k.yp != 0 || k.kind != YKind::Const) return true;
    return false;
  }
  int max_y_power() const {
    int m = 0;
    for (auto& [k, c] : terms_) m = std::max(m, k.yp);
    return m;
  }
  int max_x_power() const {
    int m = 0;
    for (auto& [k, c] : terms_) m = std::max(m, k.xp);
    return m;
  }
  // coefficient of the x- and y-free part
  cplx constant() const {
    auto it = terms_.find(TermKey{});
    return it == terms_.end() ? cplx{} : it->second;
  }
  cplx coefficient(const TermKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? cplx{} : it->second;
  }
  double max_abs_coeff() const {
    double m = 0.0;
    for (auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  void add_product(const TermKey& a, const TermKey& b, cplx c) {
    TermKey base;
    base.xf = a.xf + b.xf;
    base.xp = a.xp + b.xp;
    base.yp = a.yp + b.yp;
    if (a.kind == YKind::Const || b.kind == YKind::Const) {
      const TermKey& h = a.kind == YKind::Const ? b : a;
      base.kind = h.kind;
      base.yr = h.yr;
      add(base, c);
      return;
    }
    TermKey s = base, d = base;
    s.yr = a.yr + b.yr;
    d.yr = a.yr - b.yr;
    const bool ca = a.kind == YKind::Cosh, cb = b.kind == YKind::Cosh;
    if (ca && cb) {
      s.kind = d.kind = YKind::Cosh;
      add(s, 0.5 * c);
      add(d, 0.5 * c);
    } else if (!ca && !cb) {
      s.kind = d.kind = YKind::Cosh;
      add(s, 0.5 * c);
      add(d, -0.5 * c);
    } else if (!ca && cb) {  // sinh(a) cosh(b)
      s.kind = d.kind = YKind::Sinh;
      add(s, 0.5 * c);
      add(d, 0.5 * c);
    } else {  // cosh(a) sinh(b)
      s.kind = d.kind = YKind::Sinh;
      add(s, 0.5 * c);
      add(d, -0.5 * c);
    }
  }

  Map terms_;
};

// ---------------------------------------------------------------------------
// evaluation and calculus

inline double y_part(const TermKey& k, double y, const Realization& R) {
  double v = k.yp == 0 ? 1.0 : std::pow(y, k.yp);
  switch (k.kind) {
    case YKind::Const: return v;
    case YKind::Cosh: return v * std::cosh(R.eval(k.yr) * y);
    case YKind::Sinh: return v * std::sinh(R.eval(k.yr) * y);
  }
  return v;
}

inline cplx x_part(const TermKey& k, double x, const Realization& R) {
  cplx v = std::exp(I * (R.eval(k.xf) * x));
  if (k.xp != 0) v *= std::pow(x, k.xp);
  return v;
}

inline cplx eval(const TermFunction& f, double x, double y, const Realization& R) {
  cplx s{};
  for (auto& [k, c] : f.terms()) s += c * x_part(k, x, R) * y_part(k, y, R);
  return s;
}

inline TermFunction conj(const TermFunction& f) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q = k;
    q.xf = -k.xf;
    r.add(q, std::conj(c));
  }
  return r;
}

inline TermFunction dx(const TermFunction& f, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    const double w = R.eval(k.xf);
    if (!k.xf.is_zero()) r.add(k, c * I * w);
    if (k.xp > 0) {
      TermKey q = k;
      q.xp -= 1;
      r.add(q, c * double(k.xp));
    }
  }
  return r.canonicalize();
}

inline TermFunction dy(const TermFunction& f, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    if (k.yp > 0) {
      TermKey q = k;
      q.yp -= 1;
      r.add(q, c * double(k.yp));
    }
    if (k.kind != YKind::Const) {
      TermKey q = k;
      q.kind = k.kind == YKind::Cosh ? YKind::Sinh : YKind::Cosh;
      r.add(q, c * R.eval(k.yr));
    }
  }
  return r.canonicalize();
}

// f(x, y0) as a function of x alone
inline TermFunction at_y(const TermFunction& f, double y0, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q{k.xf, k.xp, 0, YKind::Const, Freq{}};
    r.add(q, c * y_part(k, y0, R));
  }
  return r.canonicalize();
}
inline TermFunction trace1(const TermFunction& f, const Realization& R) { return at_y(f, 1.0, R); }

inline TermFunction mul_y(const TermFunction& f, int p = 1) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q = k;
    q.yp += p;
    r.add(q, c);
  }
  return r;
}

inline TermFunction shift_x(const TermFunction& f, const Freq& w) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q = k;
    q.xf = k.xf + w;
    r.add(q, c);
  }
  return r;
}

// \int_0^1 y^p cosh(a y) dy  (cosh=true) or sinh
inline double y_moment(int p, YKind kind, double a) {
  if (kind == YKind::Const) return 1.0 / (p + 1);
  const bool ch = kind == YKind::Cosh;
  if (std::abs(a) < 2.0) {
    // power series in a
    double s = 0.0, t = ch ? 1.0 : a;  // a^m / m!
    int m = ch ? 0 : 1;
    for (int it = 0; it < 60; ++it) {
      const double d = t / (p + m + 1);
      s += d;
      if (std::abs(d) < 1e-18 * std::abs(s)) break;
      t *= a * a / ((m + 1.0) * (m + 2.0));
      m += 2;
    }
    return s;
  }
  const double sh = std::sinh(a), co = std::cosh(a);
  double Ic = sh / a, Is = (co - 1.0) / a;
  for (int q = 1; q <= p; ++q) {
    const double nc = sh / a - q / a * Is;
    const double ns = co / a - q / a * Ic;
    Ic = nc;
    Is = ns;
  }
  return ch ? Ic : Is;
}

// \int_0^1 f dy, keeping the x dependence
inline TermFunction integrate_y01(const TermFunction& f, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q{k.xf, k.xp, 0, YKind::Const, Freq{}};
    r.add(q, c * y_moment(k.yp, k.kind, R.eval(k.yr)));
  }
  return r.canonicalize();
}

inline cplx integrate_y01_value(const TermFunction& f, const Realization& R) {
  if (f.has_x()) throw std::invalid_argument("integrate_y01_value: x dependence present");
  cplx s{};
  for (auto& [k, c] : f.terms()) s += c * y_moment(k.yp, k.kind, R.eval(k.yr));
  return s;
}

// \int_0^x f(x', y) dx'; a zero lattice frequency yields a secular power of x
inline TermFunction integrate_x(const TermFunction& f, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    if (k.xf.is_zero()) {
      TermKey q = k;
      q.xp += 1;
      r.add(q, c / double(k.xp + 1));
      continue;
    }
    const cplx iw = I * R.eval(k.xf);
    // x^q e^{iwx} = (e^{iwx} P)' with P' + iw P = x^q
    std::vector<cplx> P(k.xp + 1);
    P[k.xp] = 1.0 / iw;
    for (int j = k.xp - 1; j >= 0; --j) P[j] = -double(j + 1) * P[j + 1] / iw;
    for (int j = 0; j <= k.xp; ++j) {
      TermKey q = k;
      q.xp = j;
      r.add(q, c * P[j]);
    }
    TermKey q0 = k;
    q0.xf = Freq{};
    q0.xp = 0;
    r.add(q0, -c * P[0]);
  }
  return r.canonicalize();
}

// f(x0, y) as a function of y alone
inline TermFunction at_x(const TermFunction& f, double x0, const Realization& R) {
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q{Freq{}, 0, k.yp, k.kind, k.yr};
    r.add(q, c * x_part(k, x0, R));
  }
  return r.canonicalize();
}

// f(T, y) with exp(i n kappa T) = 1 taken exactly
inline TermFunction at_period(const TermFunction& f, const Realization& R) {
  const double T = R.period();
  TermFunction r;
  for (auto& [k, c] : f.terms()) {
    TermKey q{Freq{}, 0, k.yp, k.kind, k.yr};
    r.add(q, c * R.phase_at_period(k.xf) * std::pow(T, k.xp));
  }
  return r.canonicalize();
}

inline cplx value_at_period(const TermFunction& f, const Realization& R) {
  if (f.has_y()) throw std::invalid_argument("value_at_period: y dependence present");
  return at_period(f, R).constant();
}

// split by x-block (frequency, power) into y-profiles
inline std::map<std::pair<Freq, int>, TermFunction> x_blocks(const TermFunction& f) {
  std::map<std::pair<Freq, int>, TermFunction> out;
  for (auto& [k, c] : f.terms()) {
    TermKey q{Freq{}, 0, k.yp, k.kind, k.yr};
    out[{k.xf, k.xp}].add(q, c);
  }
  return out;
}

inline TermFunction from_block(const Freq& w, int q, const TermFunction& prof) {
  TermFunction r;
  for (auto& [k, c] : prof.terms()) {
    TermKey t = k;
    t.xf = w;
    t.xp = q;
    r.add(t, c);
  }
  return r;
}

// ---------------------------------------------------------------------------
// state vectors (phi, upsilon, eta); eta carries no y dependence

struct StateVec {
  TermFunction phi, ups, eta;

  StateVec& operator+=(const StateVec& o) {
    phi += o.phi;
    ups += o.ups;
    eta += o.eta;
    return *this;
  }
  StateVec& operator-=(const StateVec& o) {
    phi -= o.phi;
    ups -= o.ups;
    eta -= o.eta;
    return *this;
  }
  friend StateVec operator+(StateVec a, const StateVec& b) { return a += b; }
  friend StateVec operator-(StateVec a, const StateVec& b) { return a -= b; }
  friend StateVec operator*(const TermFunction& s, const StateVec& u) { return {s * u.phi, s * u.ups, s * u.eta}; }
  friend StateVec operator*(cplx s, const StateVec& u) { return {u.phi * s, u.ups * s, u.eta * s}; }
  bool empty() const { return phi.empty() && ups.empty() && eta.empty(); }
};

inline StateVec shift_x(const StateVec& u, const Freq& w) {
  return {shift_x(u.phi, w), shift_x(u.ups, w), shift_x(u.eta, w)};
}

// max |eta - upsilon(1)| and |phi_y(0)| on sample points in x
inline double dom_defect(const StateVec& u, const Realization& R) {
  const TermFunction a = u.eta - trace1(u.ups, R);
  const TermFunction b = at_y(dy(u.phi, R), 0.0, R);
  double m = 0.0;
  for (double x : {0.0, 0.37, 1.1, 2.9})
    m = std::max({m, std::abs(eval(a, x, 0.0, R)), std::abs(eval(b, x, 0.0, R))});
  return m;
}

// <u, v> integrated over y; result depends on x only
inline TermFunction inner(const StateVec& u, const StateVec& v, const Realization& R) {
  TermFunction g = u.phi * conj(v.phi);
  g += dy(u.phi, R) * conj(dy(v.phi, R));
  g += u.ups * conj(v.ups);
  TermFunction r = integrate_y01(g, R);
  r += u.eta * conj(v.eta);
  return r;
}

inline cplx inner_value(const StateVec& u, const StateVec& v, const Realization& R) {
  const TermFunction r = inner(u, v, R);
  if (r.has_x()) throw std::invalid_argument("inner_value: x dependence present");
  return r.constant();
}

// Gauss-Legendre evaluation of <u, v> at fixed x
template <int N>
cplx quad_oracle_inner(const StateVec& u, const StateVec& v, const Realization& R, double x = 0.0) {
  static_assert(N >= 16);
  const TermFunction upy = dy(u.phi, R), vpy = dy(v.phi, R);
  auto f = [&](double y) {
    return eval(u.phi, x, y, R) * std::conj(eval(v.phi, x, y, R)) +
           eval(upy, x, y, R) * std::conj(eval(vpy, x, y, R)) +
           eval(u.ups, x, y, R) * std::conj(eval(v.ups, x, y, R));
  };
  const auto& a = boost::math::quadrature::gauss<double, N>::abscissa();
  const auto& w = boost::math::quadrature::gauss<double, N>::weights();
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]), wi = static_cast<double>(w[i]);
    if (ai == 0.0) {
      s += wi * f(0.5);
    } else {
      s += wi * (f(0.5 + 0.5 * ai) + f(0.5 - 0.5 * ai));
    }
  }
  return 0.5 * s + eval(u.eta, x, 0.0, R) * std::conj(eval(v.eta, x, 0.0, R));
}

// ---------------------------------------------------------------------------
// particular solution of P'' - w^2 P = g(y) by undetermined coefficients

namespace detail {

inline TermFunction particular_one(const TermKey& src, cplx c, const Freq& w, const Realization& R) {
  const Freq b = src.yr;  // canonical sign already
  const Freq wc = abs_canonical(w);
  const double bv = R.eval(b), wv = R.eval(w);
  const int p = src.yp;
  const bool hyper = src.kind != YKind::Const;
  const bool res = hyper ? (b == wc) : w.is_zero();

  // ansatz elements (power, kind)
  std::vector<std::pair<int, YKind>> ans;
  if (!hyper) {
    for (int j = res ? 2 : 0; j <= p + (res ? 2 : 0); ++j) ans.push_back({j, YKind::Const});
  } else {
    for (int j = res ? 1 : 0; j <= p + (res ? 1 : 0); ++j) {
      ans.push_back({j, YKind::Cosh});
      ans.push_back({j, YKind::Sinh});
    }
  }
  // target rows: (power, kind) with power 0..p
  std::vector<std::pair<int, YKind>> rows;
  for (int j = 0; j <= p; ++j) {
    if (hyper) {
      rows.push_back({j, YKind::Cosh});
      rows.push_back({j, YKind::Sinh});
    } else {
      rows.push_back({j, YKind::Const});
    }
  }
  auto row_of = [&](int j, YKind k) -> int {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r].first == j && rows[r].second == k) return int(r);
    return -1;
  };
  const int n = int(ans.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const int j = ans[col].first;
    const YKind k = ans[col].second;
    auto put = [&](int jj, YKind kk, double v) {
      if (jj < 0 || v == 0.0) return;
      const int r = row_of(jj, kk);
      if (r < 0) throw std::logic_error("particular: ansatz leaves target space");
      A(r, col) += v;
    };
    const YKind other = k == YKind::Cosh ? YKind::Sinh : YKind::Cosh;
    if (k == YKind::Const) {
      put(j - 2, k, double(j) * (j - 1));
      if (!res) put(j, k, -wv * wv);
    } else {
      put(j - 2, k, double(j) * (j - 1));
      put(j - 1, other, 2.0 * j * bv);
      if (!res) put(j, k, bv * bv - wv * wv);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(row_of(p, src.kind)) = 1.0;
  const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
  TermFunction out;
  for (int col = 0; col < n; ++col) {
    TermKey q{Freq{}, 0, ans[col].first, ans[col].second, hyper ? b : Freq{}};
    out.add(q, c * sol(col));
  }
  return out.canonicalize();
}

}  // namespace detail

inline TermFunction particular_solution(const TermFunction& g, const Freq& w, const Realization& R) {
  if (g.has_x()) throw std::invalid_argument("particular_solution: x dependence present");
  TermFunction out;
  for (auto& [k, c] : g.terms()) out += detail::particular_one(k, c, w, R);
  return out;
}

}  // namespace stokes_evans
