#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wedgeframe/error.hpp"
#include "wedgeframe/linsolve.hpp"
#include "wedgeframe/tf.hpp"

using namespace wedgeframe;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent trapezoid for int g0(x) g0(x - y) exp(-2 pi i (x - y) xi) dx.
cplx brute_stft(double y, double xi) {
  const double h = 1.0 / 256.0;
  cplx acc = 0.0;
  for (double x = -14.0; x <= 14.0 + 1e-12; x += h) {
    const double g = std::pow(2.0, 0.25) * std::exp(-kPi * x * x);
    const double gs = std::pow(2.0, 0.25) * std::exp(-kPi * (x - y) * (x - y));
    acc += g * gs * std::polar(1.0, -2.0 * kPi * (x - y) * xi);
  }
  return h * acc;
}

std::vector<TFPoint> random_points(int n, double radius, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TFPoint> out;
  while (static_cast<int>(out.size()) < n) {
    const double y = radius * u(rng), xi = radius * u(rng);
    if (y * y + xi * xi <= radius * radius) out.emplace_back(std::vector<double>{y}, std::vector<double>{xi});
  }
  return out;
}

Window odd_window() {
  const double c = std::pow(32.0, 0.25) * std::sqrt(kPi);
  auto f = sample_function([c](double x) { return cplx(c * x * std::exp(-kPi * x * x)); }, 12.0, 1.0 / 32.0);
  return Window::sampled(f, Envelope{2.0, 0.0, kPi / 2.0, kInf});
}

}  // namespace

TEST_CASE("tf shift") {
  const SampledFunction g = sample(Window::gaussian(1));
  const SampledFunction same = tf_shift(g, TFPoint::zero(1));
  CHECK(same.x0 == g.x0);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(same.v[k] == g.v[k]);

  const SampledFunction moved = tf_shift(g, TFPoint({0.5}, {0.0}));
  for (std::size_t k = 0; k < moved.size(); ++k) {
    const double x = moved.x(k);
    CHECK(std::abs(moved.v[k] - gaussian_1d(x - 0.5)) < 1e-14);
  }
  for (const auto& z : random_points(10, 3.0, 2)) {
    CHECK(tf_shift(g, z).l2_norm() == doctest::Approx(g.l2_norm()).epsilon(1e-10));
  }
  CHECK(g.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed-form Gaussian STFT") {
  CHECK(stft_gauss_gauss(TFPoint::zero(1)) == doctest::Approx(1.0));
  CHECK(stft_gauss_gauss(TFPoint({1.0}, {0.0})) == doctest::Approx(std::exp(-kPi / 2)).epsilon(1e-14));
  CHECK(std::abs(std::abs(brute_stft(1.0, 0.0)) - 0.20788) < 1e-5);
  CHECK(std::abs(std::abs(brute_stft(1.0, 0.0)) - std::exp(-kPi / 2)) < 1e-10);
  for (const auto& z : random_points(10, 3.0, 3)) {
    CHECK(stft_gauss_gauss(z) == doctest::Approx(stft_gauss_gauss(z.scaled(-1.0))));
    CHECK(std::abs(stft_gauss_gauss(z) - std::abs(brute_stft(z.y[0], z.xi[0]))) < 1e-10);
  }
}

TEST_CASE("quadrature matches the closed form and the inner product") {
  const Window g = Window::gaussian(1);
  for (const auto& z : random_points(24, 3.0, 4)) {
    const QuadratureResult q = stft_quadrature(g, g, z);
    CHECK(std::abs(std::abs(q.value) - stft_gauss_gauss(z)) < 1e-8);
    if (kStftIsInnerProduct) CHECK(std::abs(q.value - gauss_inner(TFPoint::zero(1), z)) < 1e-8);
    CHECK(std::abs(q.value - brute_stft(z.y[0], z.xi[0])) < 1e-9);
  }
}

TEST_CASE("sampled windows") {
  const Window odd = odd_window();
  const Window even = Window::sampled(sample(Window::gaussian(1)), Envelope{std::pow(2.0, 0.25), 0.0, kPi, kInf});
  CHECK(odd.samples.l2_norm() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(stft_quadrature(odd, even, TFPoint::zero(1)).value) < 1e-10);
  // two sampled windows share nodes only for shifts on their grid
  for (auto z : random_points(20, 3.0, 5)) {
    z.y[0] = std::round(z.y[0] * 32.0) / 32.0;
    CHECK(std::abs(stft_quadrature(odd, even, z).value) <= 1.0 + 1e-10);
    CHECK(std::abs(stft_quadrature(even, even, z).value) <= 1.0 + 1e-10);
  }
  CHECK_THROWS_WITH_AS(stft_quadrature(odd, even, TFPoint({0.01}, {0.0})), doctest::Contains("GRID_RANGE"), Error);
  SampledFunction bad = sample(Window::gaussian(1));
  CHECK_THROWS_WITH_AS(Window::sampled(bad, Envelope{0.5, 0.0, kPi, kInf}), doctest::Contains("ENVELOPE"), Error);
}

TEST_CASE("coarse grids are rejected") {
  QuadratureOptions q;
  q.step = 0.2;
  const Window g = Window::gaussian(1);
  CHECK_THROWS_WITH_AS(stft_quadrature(g, g, TFPoint({0.0}, {2.0}), q), doctest::Contains("UNRESOLVED_GRID"), Error);
}

TEST_CASE("Gabor composition entries") {
  const double mup = 1.25, mu = 1.1;
  const auto gamma = PointSequence::lattice(mup, 1, 20);
  const MatrixSpec s = gabor_analysis_synthesis_matrix(Window::gaussian(1), gamma, mu, TFPoint::zero(1));
  CHECK(s.d == 2);
  CHECK(std::abs(s.entry(std::vector<int>{0, 0}, std::vector<int>{0, 0})) == doctest::Approx(1.0));
  const auto rows = box_indexing(2, 3);
  const auto cols = box_indexing(2, 4);
  double worst = 0.0;
  for (std::size_t r = 0; r < rows->size(); ++r)
    for (std::size_t c = 0; c < cols->size(); ++c) {
      const auto jp = rows->coords(r);
      const auto j = cols->coords(c);
      const double dy = mup * jp[0] - mu * j[0], dx = mup * jp[1] - mu * j[1];
      worst = std::max(worst, std::abs(std::abs(s.entry(jp, j)) - std::exp(-kPi * (dy * dy + dx * dx) / 2)));
    }
  CHECK(worst < 1e-12);

  const DenseBlock b = truncate(s, 3, 4);
  CHECK(b.rows() == 49);
  CHECK(b.cols() == 81);
  double mx = 0.0;
  for (const auto& v : b.values) mx = std::max(mx, std::abs(v));
  CHECK(mx == doctest::Approx(std::abs(b(0, 0))));
  CHECK(std::abs(b(0, 0)) == doctest::Approx(stft_gauss_gauss(TFPoint::zero(1))));
}

TEST_CASE("entry magnitudes are covariant under a common shift") {
  const Window g = Window::gaussian(1);
  const TFPoint u({0.3}, {-0.7});
  for (const auto& z : random_points(6, 2.0, 8)) {
    const TFPoint a = z, b({0.4}, {0.1});
    const double m1 = std::abs(gauss_inner(b, a));
    const double m2 = std::abs(gauss_inner(b + u, a + u));
    CHECK(std::abs(m1 - m2) < 1e-10);
  }
}

TEST_CASE("synthesis Gram is bounded below for mu > 1") {
  const double mu = 1.1;
  const auto box = box_indexing(2, 5);
  const auto n = static_cast<Eigen::Index>(box->size());
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto ja = box->coords(a), jb = box->coords(b);
      G(a, b) = gauss_inner(TFPoint({mu * jb[0]}, {mu * jb[1]}), TFPoint({mu * ja[0]}, {mu * ja[1]}));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  CHECK(es.eigenvalues().minCoeff() > 1e-3);
}

TEST_CASE("molecule check") {
  const auto gamma = PointSequence::lattice(1.25, 1, 4);
  const auto probes = random_points(60, 6.0, 9);
  const auto ok = molecule_check(gaussian_molecules(gamma, Envelope::gaussian(1.1, kPi / 8.0)), probes);
  CHECK(ok.pass);
  const auto half = molecule_check(gaussian_molecules(gamma, Envelope::gaussian(1.1, kPi / 8.0), 0.5), probes);
  CHECK(half.worst_ratio == doctest::Approx(ok.worst_ratio / 2.0));
  Envelope zero = Envelope::zero_beyond(0.0);
  const auto bad = molecule_check(gaussian_molecules(gamma, zero), probes);
  CHECK_FALSE(bad.pass);
  CHECK(std::isinf(bad.worst_ratio));
}

TEST_CASE("frame diagnostic") {
  const PointSequence empty(1, {});
  const auto e = frame_lower_diagnostic(Window::gaussian(1), empty, 1.1, {4});
  REQUIRE(e.size() == 1);
  CHECK(e[0].sigma_min == 0.0);

  double prev = kInf;
  for (double mup : {0.8, 1.0, 1.25}) {
    const auto gamma = PointSequence::lattice(mup, 1, static_cast<int>(std::ceil(26.0 / mup)) + 2);
    const double s = frame_lower_diagnostic(Window::gaussian(1), gamma, 1.1, {16}).front().sigma_min;
    CHECK(s <= prev * (1 + 1e-9));
    prev = s;
  }
}

TEST_CASE("window csv round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "wf_window_test.csv").string();
  const Window w = odd_window();
  write_window_csv(w, path);
  const Window r = read_window_csv(path);
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t k = 0; k < r.samples.size(); ++k) CHECK(r.samples.v[k] == w.samples.v[k]);
  CHECK(r.envelope.C == w.envelope.C);
  CHECK(r.envelope.beta == w.envelope.beta);
  std::filesystem::remove(path);
}
