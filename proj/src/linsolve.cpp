#include "wedgeframe/linsolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <SuiteSparseQR.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "wedgeframe/error.hpp"

namespace wedgeframe {

namespace {

using MatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using MatCRow = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VecC = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

constexpr Eigen::Index kJacobiLimit = 400;

Eigen::VectorXd singular_values(const MatC& A) {
  if (A.cols() <= kJacobiLimit) return Eigen::JacobiSVD<MatC>(A).singularValues();
  return Eigen::BDCSVD<MatC>(A).singularValues();
}

VecC smallest_right_singular_vector(const MatC& A) {
  if (A.cols() <= kJacobiLimit) {
    Eigen::JacobiSVD<MatC> svd(A, Eigen::ComputeThinV);
    return svd.matrixV().col(A.cols() - 1);
  }
  Eigen::BDCSVD<MatC> svd(A, Eigen::ComputeThinV);
  return svd.matrixV().col(A.cols() - 1);
}

}  // namespace

void normalize_kernel(std::span<cplx> x, double p) {
  double norm = 0.0;
  if (std::isinf(p)) {
    for (const cplx& v : x) norm = std::max(norm, std::abs(v));
  } else {
    CompensatedSum acc;
    for (const cplx& v : x) acc.add(std::pow(std::abs(v), p));
    norm = std::pow(acc.value(), 1.0 / p);
  }
  if (norm == 0.0) {
    if (!x.empty()) x[0] = 1.0;
    return;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[best]) * (1.0 + 1e-12)) best = i;
  const cplx phase = std::conj(x[best]) / std::abs(x[best]);
  for (cplx& v : x) v *= phase / norm;
}

double sigma_max_estimate(std::span<const cplx> a, std::size_t rows, std::size_t cols) {
  double best = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += std::norm(a[r * cols + c]);
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

double apply_norm(std::span<const cplx> a, std::size_t rows, std::size_t cols, std::span<const cplx> x) {
  Eigen::Map<const MatCRow> A(a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::Map<const VecC> v(x.data(), static_cast<Eigen::Index>(cols));
  return (A * v).norm();
}

KernelResult kernel_vector_inplace(DenseBlock&& block, double p1) {
  const auto m = static_cast<Eigen::Index>(block.rows());
  const auto n = static_cast<Eigen::Index>(block.cols());
  VecC x;
  if (m < n) {
    // Row-major A is column-major A^T; conjugating gives A^*, whose QR holds
    // an orthonormal basis of range(A^*) in its first m columns of Q.
    Eigen::Map<MatC> At(block.values.data(), n, m);
    At = At.conjugate();
    Eigen::HouseholderQR<Eigen::Ref<MatC>> qr(At);
    x = qr.householderQ() * VecC::Unit(n, n - 1);
  } else {
    Eigen::Map<const MatCRow> A(block.values.data(), m, n);
    x = smallest_right_singular_vector(MatC(A));
  }
  block.values.clear();
  block.values.shrink_to_fit();
  std::vector<cplx> v(x.data(), x.data() + x.size());
  normalize_kernel(v, p1);
  return {FiniteVector(block.d, block.N, std::move(v)), std::numeric_limits<double>::quiet_NaN()};
}

KernelResult kernel_vector_sparse(const SparseBlock& block, double p1) {
  const std::size_t m = block.rows();
  const std::size_t n = block.cols();
  if (m >= n) throw Error(ErrorCode::Config, "sparse kernel needs fewer rows than columns");
  cholmod_common cc;
  cholmod_l_start(&cc);
  struct Finish {
    cholmod_common* c;
    ~Finish() { cholmod_l_finish(c); }
  } finish{&cc};
  cholmod_triplet* T = cholmod_l_allocate_triplet(m, n, block.values.size(), 0, CHOLMOD_COMPLEX, &cc);
  if (!T) throw Error(ErrorCode::NoKernel, "sparse kernel: allocation failed");
  auto* ti = static_cast<SuiteSparse_long*>(T->i);
  auto* tj = static_cast<SuiteSparse_long*>(T->j);
  auto* tx = static_cast<cplx*>(T->x);
  std::size_t k = 0;
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t q = block.row_start[r]; q < block.row_start[r + 1]; ++q, ++k) {
      ti[k] = static_cast<SuiteSparse_long>(r);
      tj[k] = static_cast<SuiteSparse_long>(block.col[q]);
      tx[k] = block.values[q];
    }
  T->nnz = k;
  cholmod_sparse* A = cholmod_l_triplet_to_sparse(T, k, &cc);
  cholmod_l_free_triplet(&T, &cc);
  if (!A) throw Error(ErrorCode::NoKernel, "sparse kernel: conversion failed");

  // x = v - A^+ (A v) for a fixed pseudo-random v: the projection of v onto
  // the kernel, which has dimension at least n - m.
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> n01;
  cholmod_dense* v = cholmod_l_allocate_dense(n, 1, n, CHOLMOD_COMPLEX, &cc);
  auto* vx = static_cast<cplx*>(v->x);
  for (std::size_t i = 0; i < n; ++i) vx[i] = {n01(rng), n01(rng)};
  cholmod_dense* b = cholmod_l_zeros(m, 1, CHOLMOD_COMPLEX, &cc);
  double one[2] = {1.0, 0.0}, zero[2] = {0.0, 0.0};
  cholmod_l_sdmult(A, 0, one, zero, v, b, &cc);
  cholmod_dense* x0 = SuiteSparseQR_min2norm<cplx>(SPQR_ORDERING_DEFAULT, SPQR_DEFAULT_TOL, A, b, &cc);
  std::vector<cplx> out(n);
  bool ok = x0 != nullptr && cc.status == CHOLMOD_OK;
  if (ok) {
    const auto* xx = static_cast<const cplx*>(x0->x);
    for (std::size_t i = 0; i < n; ++i) out[i] = vx[i] - xx[i];
  }
  cholmod_l_free_dense(&x0, &cc);
  cholmod_l_free_dense(&b, &cc);
  cholmod_l_free_dense(&v, &cc);
  cholmod_l_free_sparse(&A, &cc);
  if (!ok) throw Error(ErrorCode::NoKernel, "sparse QR failed");
  normalize_kernel(out, p1);
  return {FiniteVector(block.d, block.N, std::move(out)), std::numeric_limits<double>::quiet_NaN()};
}

KernelResult kernel_vector(const DenseBlock& block, double p1, double kernel_tol) {
  DenseBlock work = block;
  KernelResult res = kernel_vector_inplace(std::move(work), p1);
  const double smax = sigma_max_estimate(block.values, block.rows(), block.cols());
  // The residual is scale-free in x, so measure it on the unit 2-norm vector.
  std::vector<cplx> unit(res.x.values().begin(), res.x.values().end());
  normalize_kernel(unit, 2.0);
  res.residual = apply_norm(block.values, block.rows(), block.cols(), unit) / std::max(1.0, smax);
  if (!(res.residual <= kernel_tol))
    throw Error(ErrorCode::NoKernel, "no vector meets the kernel tolerance (residual " +
                                         std::to_string(res.residual) + ")");
  return res;
}

double sigma_min(std::span<const cplx> a, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) return 0.0;
  if (rows < cols) return 0.0;
  Eigen::Map<const MatCRow> A(a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const auto n = static_cast<Eigen::Index>(cols);
  if (rows == cols) return singular_values(MatC(A)).minCoeff();
  MatC work(A);
  Eigen::HouseholderQR<Eigen::Ref<MatC>> qr(work);
  MatC R = work.topRows(n).triangularView<Eigen::Upper>();
  return singular_values(R).minCoeff();
}

double sigma_min(const DenseBlock& block) { return sigma_min(block.values, block.rows(), block.cols()); }

}  // namespace wedgeframe
