#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "wedgeframe/error.hpp"
#include "wedgeframe/linsolve.hpp"

using namespace wedgeframe;

namespace {

// Block with the given shape; Ntilde/N are only labels here, values are raw.
struct Raw {
  std::size_t rows, cols;
  std::vector<cplx> v;
};

Raw random_raw(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Raw r{rows, cols, std::vector<cplx>(rows * cols)};
  for (auto& x : r.v) x = cplx(n(rng), n(rng));
  return r;
}

// d = 1 block with (2 Nt + 1) x (2 N + 1) random entries.
DenseBlock random_block(int Nt, int N, unsigned seed) {
  DenseBlock b(1, Nt, N);
  b.values = random_raw(b.rows(), b.cols(), seed).v;
  return b;
}

double eigen_sigma_min(const Raw& a) {
  Eigen::MatrixXcd A(a.rows, a.cols);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) A(r, c) = a.v[r * a.cols + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.adjoint() * A);
  return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

double probe_min(const Raw& a, int probes, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  double best = kInf;
  std::vector<cplx> x(a.cols);
  for (int t = 0; t < probes; ++t) {
    double nn = 0.0;
    for (auto& v : x) {
      v = cplx(n(rng), n(rng));
      nn += std::norm(v);
    }
    for (auto& v : x) v /= std::sqrt(nn);
    best = std::min(best, apply_norm(a.v, a.rows, a.cols, x));
  }
  return best;
}

}  // namespace

TEST_CASE("kernel of the row [1, 1] padded by a zero column") {
  DenseBlock wide(1, 0, 1);
  wide.values = {1.0, 1.0, 0.0};
  const auto k = kernel_vector(wide, 2.0);
  const auto x = k.x.values();
  CHECK(std::abs(x[0] + x[1]) < 1e-14);
  CHECK(weighted_norm(k.x, SpaceSpec(2.0, 0.0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("zero block accepts any unit vector") {
  DenseBlock z(1, 1, 2);
  const auto k = kernel_vector(z, 2.0);
  CHECK(k.residual == 0.0);
  CHECK(weighted_norm(k.x, SpaceSpec(2.0, 0.0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("random wide blocks have tiny residuals") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const DenseBlock b = random_block(19, 29, seed);  // 39 x 59
    for (double p1 : {1.0, 2.0, kInf}) {
      const auto k = kernel_vector(b, p1);
      const double direct = apply_norm(b.values, b.rows(), b.cols(), k.x.values());
      CHECK(direct <= 1e-10);
      CHECK(weighted_norm(k.x, SpaceSpec(p1, 0.0, 1)) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("in-place kernel matches the checked path") {
  const DenseBlock b = random_block(10, 15, 8);
  const auto a = kernel_vector(b, 2.0);
  auto copy = b;
  const auto c = kernel_vector_inplace(std::move(copy), 2.0);
  CHECK(std::isnan(c.residual));
  CHECK(apply_norm(b.values, b.rows(), b.cols(), c.x.values()) <= 1e-10);
  for (std::size_t i = 0; i < a.x.values().size(); ++i) CHECK(std::abs(a.x.values()[i] - c.x.values()[i]) < 1e-8);
}

TEST_CASE("sigma_min examples") {
  DenseBlock I(1, 2, 2);
  for (std::size_t i = 0; i < 5; ++i) I(i, i) = 1.0;
  CHECK(sigma_min(I) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<cplx> D(9, 0.0);
  D[0] = 3.0;
  D[4] = 2.0;
  D[8] = 1e-7;
  CHECK(std::abs(sigma_min(D, 3, 3) - 1e-7) <= 1e-15);

  const DenseBlock w = random_block(1, 2, 3);
  CHECK(sigma_min(w) == 0.0);
  const Raw wr{3, 5, w.values};
  CHECK(sigma_min(w) <= probe_min(wr, 100000, 4));
}

TEST_CASE("sigma_min against an eigenvalue oracle and probes") {
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const Raw a = random_raw(60, 40, seed);
    const double s = sigma_min(a.v, a.rows, a.cols);
    CHECK(s == doctest::Approx(eigen_sigma_min(a)).epsilon(1e-8));
    CHECK(s <= probe_min(a, 2000, seed + 10) * (1 + 1e-12));
  }
}

TEST_CASE("sigma_min is invariant under permutations") {
  const Raw a = random_raw(30, 20, 21);
  std::vector<std::size_t> rp(a.rows), cp(a.cols);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  std::mt19937 rng(5);
  std::shuffle(rp.begin(), rp.end(), rng);
  std::shuffle(cp.begin(), cp.end(), rng);
  std::vector<cplx> b(a.v.size());
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) b[r * a.cols + c] = a.v[rp[r] * a.cols + cp[c]];
  CHECK(sigma_min(b, a.rows, a.cols) == doctest::Approx(sigma_min(a.v, a.rows, a.cols)).epsilon(1e-12));
}

TEST_CASE("zero-column extension") {
  const Raw a = random_raw(7, 5, 30);
  // 7 x 5 padded to a 7 x 9 block (d = 1, Ntilde = 3, N = 4)
  DenseBlock b(1, 3, 4);
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 5; ++c) b(r, c) = a.v[r * 5 + c];
  CHECK(sigma_min(b) == 0.0);
  const auto k = kernel_vector(b, 2.0);
  CHECK(apply_norm(b.values, b.rows(), b.cols(), k.x.values()) <= 1e-12);
}

TEST_CASE("normalization fixes the phase") {
  std::vector<cplx> x{cplx(0, 2), cplx(1, 0), cplx(0, -2)};
  normalize_kernel(x, 2.0);
  CHECK(x[0].imag() == doctest::Approx(0.0));
  CHECK(x[0].real() > 0.0);
  CHECK(std::abs(x[0]) * std::abs(x[0]) * 2 + std::abs(x[1]) * std::abs(x[1]) == doctest::Approx(1.0));
}

TEST_CASE("sparse kernel on a banded block") {
  // Gaussian-decaying entries in |i - 1.02 c|, 61 x 81 (d = 1, Ntilde = 30, N = 40)
  MatrixSpec spec;
  spec.d = 1;
  spec.entry = [](std::span<const int> r, std::span<const int> c) -> cplx {
    const double t = r[0] - 1.02 * c[0];
    return std::polar(std::exp(-std::numbers::pi * t * t / 2.0), 0.3 * r[0] + 0.1 * c[0]);
  };
  const SparseBlock s = truncate_sparse(spec, 30, 40, 1e-18);
  CHECK(s.values.size() < s.rows() * s.cols() / 2);
  const DenseBlock d = truncate(spec, 30, 40);
  const auto k = kernel_vector_sparse(s, 1.0);
  double l1 = 0.0;
  for (const cplx& v : k.x.values()) l1 += std::abs(v);
  CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(apply_norm(d.values, d.rows(), d.cols(), k.x.values()) <= 1e-12);
  CHECK(kernel_vector_sparse(s, 1.0).x.values()[5] == k.x.values()[5]);
  CHECK_THROWS_AS(kernel_vector_sparse(truncate_sparse(spec, 4, 3, 0.0), 2.0), Error);
}
