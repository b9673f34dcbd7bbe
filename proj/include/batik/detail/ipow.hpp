#pragma once

namespace batik::detail {

// Square-and-multiply. Every evaluation backend must use this exact multiply
// sequence so that all of them round identically.
template <class T, class Mul>
inline T ipow(T base, unsigned n, T one, Mul mul) {
  T result = one;
  while (n != 0) {
    if (n & 1u) result = mul(result, base);
    n >>= 1u;
    if (n != 0) base = mul(base, base);
  }
  return result;
}

inline double ipow(double base, unsigned n) {
  return ipow(base, n, 1.0, [](double a, double b) { return a * b; });
}

}  // namespace batik::detail
