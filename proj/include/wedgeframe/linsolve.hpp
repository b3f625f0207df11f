#pragma once

#include <span>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/wedge.hpp"

namespace wedgeframe {

inline constexpr double kDefaultKernelTol = 1e-10;

struct KernelResult {
  FiniteVector x;          // over the column box, ||x||_{p1} = 1
  double residual = 0.0;   // ||Ax||_2 / max(1, sigma_max estimate); NaN if not evaluated
};

/// Null vector of a block with fewer rows than columns via Householder QR of
/// A^*; blocks with rows >= cols fall back to the smallest right singular
/// vector. Throws NO_KERNEL if the residual exceeds kernel_tol.
KernelResult kernel_vector(const DenseBlock& block, double p1, double kernel_tol = kDefaultKernelTol);

/// Same, but factors in the block's own storage (the block is consumed) and
/// leaves residual as NaN for the caller to evaluate from the generator.
KernelResult kernel_vector_inplace(DenseBlock&& block, double p1);

/// Null vector of a wide sparse block: a fixed pseudo-random vector minus its
/// minimum-norm least-squares fit, by sparse QR. Residual is left as NaN.
KernelResult kernel_vector_sparse(const SparseBlock& block, double p1);

/// Smallest singular value; 0 for blocks with fewer rows than columns.
double sigma_min(const DenseBlock& block);
double sigma_min(std::span<const cplx> row_major, std::size_t rows, std::size_t cols);

/// Largest row 2-norm, a lower bound for sigma_max.
double sigma_max_estimate(std::span<const cplx> row_major, std::size_t rows, std::size_t cols);

/// ||Ax||_2 for a row-major matrix.
double apply_norm(std::span<const cplx> row_major, std::size_t rows, std::size_t cols, std::span<const cplx> x);

/// Scales x to unit p-norm and fixes the phase of its first largest entry to
/// be real positive, so that the result does not depend on solver phase.
void normalize_kernel(std::span<cplx> x, double p);

}  // namespace wedgeframe
