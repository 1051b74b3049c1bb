#pragma once

// Test-side oracles built on Eigen, independent of the library's routines.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "spectral_cascade/matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const spectral_cascade::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline spectral_cascade::Matrix from_eigen(const Eigen::MatrixXd& e) {
  spectral_cascade::Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline std::vector<std::complex<double>> eigenvalues(const spectral_cascade::Matrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

inline std::vector<double> singular_values(const spectral_cascade::Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double norm2(const spectral_cascade::Matrix& m) { return singular_values(m).front(); }

inline spectral_cascade::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c,
                                              double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  spectral_cascade::Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline double max_abs_diff(const spectral_cascade::Matrix& a, const spectral_cascade::Matrix& b) {
  return (to_eigen(a) - to_eigen(b)).cwiseAbs().maxCoeff();
}

}  // namespace oracle
