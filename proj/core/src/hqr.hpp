#pragma once

// Dense nonsymmetric eigenvalues: radix-2 balancing, Householder reduction to
// upper Hessenberg form and the Francis double-shift QR iteration. Templated
// on the scalar so the same algorithm runs in double and in MPFR.

#include <cmath>
#include <cstddef>
#include <vector>

namespace spectral_cascade::detail {

template <class Real>
class SquareArray {
 public:
  explicit SquareArray(std::size_t n) : n_(n), a_(n * n, Real(0.0)) {}
  std::size_t size() const { return n_; }
  Real& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<Real> a_;
};

template <class Real>
Real sign_of(const Real& a, const Real& b) {
  using std::abs;
  return b >= Real(0.0) ? abs(a) : -abs(a);
}

// Similarity scaling by powers of two so that row and column norms are comparable.
inline void balance(SquareArray<double>& a) {
  const std::size_t n = a.size();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / 2.0;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

template <class Real>
void hessenberg(SquareArray<Real>& a) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.size();
  if (n < 3) return;
  std::vector<Real> v(n, Real(0.0));
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Real scale(0.0);
    for (std::size_t i = k + 1; i < n; ++i) scale += abs(a(i, k));
    if (scale == Real(0.0)) continue;
    Real h(0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      h += v[i] * v[i];
    }
    const Real g = -sign_of(sqrt(h), v[k + 1]);
    h -= v[k + 1] * g;  // h = v^T v / 2 after the update below
    v[k + 1] -= g;
    // Left: rows k+1.., columns k..
    for (std::size_t j = k; j < n; ++j) {
      Real f(0.0);
      for (std::size_t i = k + 1; i < n; ++i) f += v[i] * a(i, j);
      f /= h;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    // Right: all rows, columns k+1..
    for (std::size_t i = 0; i < n; ++i) {
      Real f(0.0);
      for (std::size_t j = k + 1; j < n; ++j) f += a(i, j) * v[j];
      f /= h;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    a(k + 1, k) = scale * g;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = Real(0.0);
  }
}

// Eigenvalues of an upper Hessenberg matrix, destroying it. Returns false when
// some eigenvalue needs more than max_its iterations. `eps` is the unit
// roundoff of Real and drives the deflation tests.
template <class Real>
bool hqr(SquareArray<Real>& a, std::vector<Real>& wr, std::vector<Real>& wi, int max_its,
         const Real& eps) {
  using std::abs;
  using std::sqrt;
  const int n = static_cast<int>(a.size());
  wr.assign(n, Real(0.0));
  wi.assign(n, Real(0.0));
  Real anorm(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = (i > 0 ? i - 1 : 0); j < n; ++j) anorm += abs(a(i, j));

  int nn = n - 1;
  Real t(0.0);
  Real p(0.0), q(0.0), r(0.0), s(0.0), w(0.0), x(0.0), y(0.0), z(0.0);
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        s = abs(a(l - 1, l - 1)) + abs(a(l, l));
        if (s == Real(0.0)) s = anorm;
        if (abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = Real(0.0);
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = Real(0.0);
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = Real(0.5) * (y - x);
          q = p * p + w;
          z = sqrt(abs(q));
          x += t;
          if (q >= Real(0.0)) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != Real(0.0)) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = Real(0.0);
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
        } else {
          if (its == max_its) return false;
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = abs(a(nn, nn - 1)) + abs(a(nn - 1, nn - 2));
            x = Real(0.75) * s;
            y = x;
            w = Real(-0.4375) * s * s;
          }
          ++its;
          int m;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = abs(p) + abs(q) + abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const Real u = abs(a(m, m - 1)) * (abs(q) + abs(r));
            const Real v = abs(p) * (abs(a(m - 1, m - 1)) + abs(z) + abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = Real(0.0);
            if (i != m + 2) a(i, i - 3) = Real(0.0);
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = Real(0.0);
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = abs(p) + abs(q) + abs(r);
              if (x != Real(0.0)) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(sqrt(p * p + q * q + r * r), p);
            if (s != Real(0.0)) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (nn >= 0 && l < nn - 1);
  }
  return true;
}

}  // namespace spectral_cascade::detail
