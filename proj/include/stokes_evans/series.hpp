#pragma once

// Truncated power series in (delta, eps) with TermFunction coefficients.

#include <map>
#include <stdexcept>
#include <utility>

#include "funcspace.hpp"

namespace stokes_evans {

struct Trunc {
  int max_d = 0;
  int max_e = 0;
  int max_total = 0;
  bool keeps(int a, int b) const { return a <= max_d && b <= max_e && a + b <= max_total; }
};

class Series {
 public:
  using Index = std::pair<int, int>;

  explicit Series(Trunc t = {}) : t_(t) {}
  Series(Trunc t, const TermFunction& c0) : t_(t) { set(0, 0, c0); }
  static Series delta(Trunc t) {
    Series s(t);
    s.set(1, 0, TermFunction(1.0));
    return s;
  }

  const Trunc& trunc() const { return t_; }
  const std::map<Index, TermFunction>& coeffs() const { return c_; }

  void set(int a, int b, const TermFunction& f) {
    if (!t_.keeps(a, b)) return;
    if (f.empty())
      c_.erase({a, b});
    else
      c_[{a, b}] = f;
  }
  void add(int a, int b, const TermFunction& f) {
    if (!t_.keeps(a, b) || f.empty()) return;
    auto& slot = c_[{a, b}];
    slot += f;
    if (slot.empty()) c_.erase({a, b});
  }
  TermFunction at(int a, int b) const {
    auto it = c_.find({a, b});
    return it == c_.end() ? TermFunction{} : it->second;
  }

  Series& operator+=(const Series& o) {
    for (auto& [k, f] : o.c_) add(k.first, k.second, f);
    return *this;
  }
  Series& operator-=(const Series& o) {
    for (auto& [k, f] : o.c_) add(k.first, k.second, -f);
    return *this;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  Series operator-() const {
    Series r(t_);
    for (auto& [k, f] : c_) r.c_[k] = -f;
    return r;
  }
  friend Series operator*(const Series& a, const Series& b) {
    Series r(a.t_);
    for (auto& [ka, fa] : a.c_)
      for (auto& [kb, fb] : b.c_) {
        const int p = ka.first + kb.first, q = ka.second + kb.second;
        if (r.t_.keeps(p, q)) r.add(p, q, fa * fb);
      }
    return r;
  }
  friend Series operator*(const Series& a, const TermFunction& g) {
    Series r(a.t_);
    for (auto& [k, f] : a.c_) r.set(k.first, k.second, f * g);
    return r;
  }
  friend Series operator*(const TermFunction& g, const Series& a) { return a * g; }
  friend Series operator*(const Series& a, cplx s) {
    Series r(a.t_);
    for (auto& [k, f] : a.c_) r.set(k.first, k.second, f * s);
    return r;
  }
  friend Series operator*(cplx s, const Series& a) { return a * s; }
  friend Series operator*(const Series& a, double s) { return a * cplx(s); }
  friend Series operator*(double s, const Series& a) { return a * cplx(s); }

  template <class Op>
  Series map(Op op) const {
    Series r(t_);
    for (auto& [k, f] : c_) r.set(k.first, k.second, op(f));
    return r;
  }

  // 1 / s for s with a nonzero constant leading coefficient
  Series reciprocal() const {
    const TermFunction lead = at(0, 0);
    if (lead.has_x() || lead.has_y() || lead.constant() == 0.0)
      throw std::invalid_argument("reciprocal: leading coefficient must be a nonzero constant");
    const cplx c0 = lead.constant();
    Series rest = *this;
    rest.set(0, 0, TermFunction{});
    rest = rest * (-1.0 / c0);
    Series r(t_, TermFunction(1.0));
    Series pw(t_, TermFunction(1.0));
    for (int k = 1; k <= t_.max_total; ++k) {
      pw = pw * rest;
      r += pw;
    }
    return r * (1.0 / c0);
  }

 private:
  Trunc t_;
  std::map<Index, TermFunction> c_;
};

inline Series dx(const Series& s, const Realization& R) {
  return s.map([&](const TermFunction& f) { return dx(f, R); });
}
inline Series dy(const Series& s, const Realization& R) {
  return s.map([&](const TermFunction& f) { return dy(f, R); });
}
inline Series trace1(const Series& s, const Realization& R) {
  return s.map([&](const TermFunction& f) { return trace1(f, R); });
}
inline Series at_y(const Series& s, double y0, const Realization& R) {
  return s.map([&](const TermFunction& f) { return at_y(f, y0, R); });
}
inline Series mul_y(const Series& s, int p = 1) {
  return s.map([&](const TermFunction& f) { return mul_y(f, p); });
}

}  // namespace stokes_evans
