#pragma once

#include <random>

#include "stokes_evans/funcspace.hpp"

namespace se_test {

using namespace stokes_evans;

inline Realization sample_realization(double kappa = 1.3) {
  Realization R;
  R.value = {1.0, kappa, -1.9, 2.7, -0.4, 0.6};
  return R;
}

inline Freq random_freq(std::mt19937& g, int lo = -2, int hi = 2) {
  std::uniform_int_distribution<int> d(lo, hi);
  Freq f;
  for (int i = 1; i < kBasisDim; ++i) f.n[i] = d(g);
  return f;
}

// random in-class function; y rates bounded so that |a| stays moderate
inline TermFunction random_tf(std::mt19937& g, int nterms, bool with_x, int maxp = 3) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_int_distribution<int> p(0, maxp), kind(0, 2), small(-1, 1), q(0, 1);
  TermFunction f;
  for (int i = 0; i < nterms; ++i) {
    TermKey k;
    k.yp = p(g);
    k.kind = static_cast<YKind>(kind(g));
    if (k.kind != YKind::Const) {
      k.yr.n[ONE] = small(g);
      k.yr.n[KAPPA] = small(g);
      k.yr.n[K2] = q(g);
    }
    if (with_x) {
      k.xf.n[KAPPA] = small(g);
      k.xf.n[K4] = small(g);
      k.xp = q(g);
    }
    f.add(k, {c(g), c(g)});
  }
  return f.canonicalize();
}

}  // namespace se_test
