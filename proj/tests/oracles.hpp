#pragma once

// Test-only reference implementations. They share nothing with the library
// beyond the Matrix typedef: plain loops over explicit multi-indices and a
// cyclic Jacobi eigensolver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Cyclic Jacobi on a real symmetric matrix; eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][i];
  std::sort(out.begin(), out.end());
  return out;
}

/// Eigenvalues of a Hermitian matrix from its real 2n x 2n embedding
/// [[Re, -Im], [Im, Re]], whose spectrum is the original one doubled.
inline std::vector<double> hermitian_eigenvalues(const Mat& h) {
  const auto n = static_cast<std::size_t>(h.rows());
  std::vector<std::vector<double>> e(2 * n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Cd z = 0.5 * (h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                          std::conj(h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))));
      e[i][j] = z.real();
      e[i + n][j + n] = z.real();
      e[i][j + n] = -z.imag();
      e[i + n][j] = z.imag();
    }
  }
  const auto doubled = jacobi_eigenvalues(e);
  std::vector<double> out;
  for (std::size_t i = 0; i < doubled.size(); i += 2) out.push_back(0.5 * (doubled[i] + doubled[i + 1]));
  return out;
}

inline double entropy_bits(const Mat& rho) {
  double s = 0.0;
  for (double x : hermitian_eigenvalues(rho)) {
    if (x > 1e-14) s -= x * std::log2(x);
  }
  return s;
}

/// Kronecker product by four nested loops.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
      }
    }
  }
  return out;
}

/// Digits of a row-major index, most significant system first.
inline std::vector<int> digits(std::size_t index, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % static_cast<std::size_t>(dims[k]));
    index /= static_cast<std::size_t>(dims[k]);
  }
  return out;
}

inline std::size_t index_of(const std::vector<int>& d, const std::vector<int>& dims) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) out = out * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(d[k]);
  return out;
}

/// Partial trace by summing matrix entries whose traced digits agree.
/// `traced[k]` marks system k.
inline Mat partial_trace(const Mat& a, const std::vector<int>& dims, const std::vector<bool>& traced) {
  std::vector<int> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!traced[k]) kept_dims.push_back(dims[k]);
  }
  std::size_t kept_total = 1;
  for (int d : kept_dims) kept_total *= static_cast<std::size_t>(d);
  Mat out = Mat::Zero(static_cast<Eigen::Index>(kept_total), static_cast<Eigen::Index>(kept_total));
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const auto dr = digits(static_cast<std::size_t>(r), dims);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      const auto dc = digits(static_cast<std::size_t>(c), dims);
      bool match = true;
      std::vector<int> kr;
      std::vector<int> kc;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (traced[k]) {
          match = match && dr[k] == dc[k];
        } else {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        }
      }
      if (!match) continue;
      out(static_cast<Eigen::Index>(index_of(kr, kept_dims)), static_cast<Eigen::Index>(index_of(kc, kept_dims))) +=
          a(r, c);
    }
  }
  return out;
}

/// sum_k K rho K^dagger.
inline Mat kraus_apply(const std::vector<Mat>& kraus, const Mat& rho) {
  Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

/// Coherent information S(target) - S(all) from loops and Jacobi.
inline double coherent_information(const Mat& rho, const std::vector<int>& dims, const std::vector<bool>& target) {
  std::vector<bool> traced(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) traced[k] = !target[k];
  return entropy_bits(partial_trace(rho, dims, traced)) - entropy_bits(rho);
}

}  // namespace oracle
