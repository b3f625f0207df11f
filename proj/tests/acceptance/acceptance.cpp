// Acceptance run: one PASS/FAIL line per criterion, with the measured values.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "wedgeframe/density.hpp"
#include "wedgeframe/error.hpp"
#include "wedgeframe/ident.hpp"
#include "wedgeframe/linsolve.hpp"
#include "wedgeframe/tf.hpp"
#include "wedgeframe/wedge.hpp"
#include "wedgeframe/witness.hpp"

using namespace wedgeframe;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, double secs, double budget, const std::string& detail) {
  const bool ok = pass && secs < budget;
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  (%.1f s, budget %.0f s)  %s\n", id, ok ? "PASS" : "FAIL", secs, budget,
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs one criterion body, turning an exception into a failed line.
void run(int id, double budget, const std::function<bool(std::string&)>& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" error: ") + e.what();
  }
  report(id, pass, seconds_since(t0), budget, detail);
}

MatrixSpec gauss_gabor(double p1, double p2) {
  const auto gamma = PointSequence::lattice(1.25, 1, 150);
  GaborOptions opt;
  opt.p = p1;
  MatrixSpec spec = gabor_analysis_synthesis_matrix(Window::gaussian(1), gamma, 1.1, TFPoint::zero(1), opt);
  spec.domain.p = p1;
  spec.codomain.p = p2;
  return spec;
}

// Certifies one witness and checks norm, bound and the direct re-verification.
bool witness_case(double eps, double p1, double p2, std::string& detail) {
  const MatrixSpec spec = gauss_gabor(p1, p2);
  const Witness w = build_witness(spec, WitnessParams::from_spec(spec, eps));
  const double xn = weighted_norm(w.x, spec.domain);
  const bool ok = std::abs(xn - 1.0) <= 1e-12 && w.total_bound <= 1.05 * eps && w.verified_norm <= w.total_bound &&
                  w.explicit_tail <= w.tail_certificate * (1.0 + 1e-12) + 1e-300;
  detail += fmt(" [eps=%g p=(%g,%g) K1=%ld N=%d |x|=%.15g total=%.3g verified(2Jmax=%d)=%.3g]", eps, p1, p2, w.K1,
                w.N, xn, w.total_bound, 2 * w.Jmax, w.verified_norm);
  return ok;
}

double max_singular(const DenseBlock& b) {
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
      b.values.data(), static_cast<Eigen::Index>(b.rows()), static_cast<Eigen::Index>(b.cols()));
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(Eigen::MatrixXcd(A)).singularValues()(0);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WEDGEFRAME_TOOL) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Concatenation of every output file in a directory, in name order.
std::string dir_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
  return all;
}

}  // namespace

int main() {
  const double pi = std::numbers::pi;

  run(1, 5, [&](std::string& detail) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Window g = Window::gaussian(1);
    double worst = 0.0;
    int probes = 0;
    while (probes < 24) {
      const double y = 3.0 * u(rng), xi = 3.0 * u(rng);
      if (y * y + xi * xi > 9.0) continue;
      const TFPoint z({y}, {xi});
      const double q = std::abs(stft_quadrature(g, g, z).value);
      worst = std::max(worst, std::abs(q - std::exp(-pi * (y * y + xi * xi) / 2.0)));
      ++probes;
    }
    detail = fmt("probes=%d max|quad-closed|=%.3g tol=1e-8", probes, worst);
    return worst <= 1e-8;
  });

  for (double eps : {1e-1, 1e-2, 1e-3})
    run(2, 300, [&](std::string& detail) { return witness_case(eps, 2.0, 2.0, detail); });

  for (auto [p1, p2] : {std::pair{1.0, 2.0}, std::pair{2.0, kInf}, std::pair{1.0, kInf}})
    run(3, 300, [&](std::string& detail) { return witness_case(1e-2, p1, p2, detail); });

  run(4, 600, [&](std::string& detail) {
    bool ok = true;
    for (double mp : {1.25, 0.8}) {
      const auto gamma = PointSequence::lattice(mp, 1, static_cast<int>(40 / mp) + 2);
      const auto pts = frame_lower_diagnostic(Window::gaussian(1), gamma, 1.1, {6, 10, 14, 20});
      detail += fmt(" [mu'=%g:", mp);
      for (const auto& p : pts) detail += fmt(" N=%d %.4g", p.N, p.sigma_min);
      if (mp > 1.0) {
        const bool drop = pts[3].sigma_min <= pts[0].sigma_min / 10.0;
        detail += drop ? " drop>=10]" : " drop<10]";
        ok = ok && drop;
      } else {
        const double rel = std::abs(pts[3].sigma_min - pts[2].sigma_min) / pts[2].sigma_min;
        detail += fmt(" rel14-20=%.3g]", rel);
        ok = ok && rel <= 0.10;
      }
    }
    return ok;
  });

  run(5, 60, [&](std::string& detail) {
    AK1Params p;
    p.profile.w = Envelope::power_law(1.0, 2.0);
    // Brute force: S(K) = sum_{k>=K} (1+k)^-4 over 1e6 terms; beyond that the
    // inner tail is below (1+M)^-3/3 and the outer one below M^-2/6.
    const long M = 1'000'000;
    std::vector<double> S(M + 2, 0.0);
    for (long k = M; k >= 1; --k) S[k] = S[k + 1] + std::pow(1.0 + k, -4.0);
    bool ok = true;
    double prev = kInf;
    for (long K1 : {5L, 10L, 20L, 40L}) {
      const TailSum a = a_k1(p, K1);
      double brute = 0.0;
      for (long K = M; K >= K1; --K) brute += S[K];
      const double slack = M * std::pow(1.0 + M, -3.0) / 3.0 + 1.0 / (6.0 * M * M);
      const bool in_gap = a.lower <= brute + slack && brute <= a.upper;
      ok = ok && in_gap && a.upper < prev;
      prev = a.upper;
      detail += fmt(" [K1=%ld %.12g<=%.12g<=%.12g]", K1, a.lower, brute, a.upper);
    }
    return ok;
  });

  run(6, 60, [&](std::string& detail) {
    bool ok = true;
    for (double mu : {0.8, 1.0, 1.25}) {
      const auto g = PointSequence::lattice(mu, 1, static_cast<int>(std::ceil(60.0 / mu)));
      const auto prof = density_profile(g, {10.0, 20.0, 40.0});
      const double target = 1.0 / (mu * mu);
      const double lo = prof.lower_estimate(), hi = prof.upper_estimate();
      const bool hit = std::abs(lo - target) <= 0.05 * target && std::abs(hi - target) <= 0.05 * target;
      const auto pd = density_profile(g.doubled(), {10.0, 20.0, 40.0});
      bool doubled = true;
      for (std::size_t i = 0; i < prof.radii.size(); ++i)
        doubled = doubled && pd.lower[i] == 2.0 * prof.lower[i] && pd.upper[i] == 2.0 * prof.upper[i];
      ok = ok && hit && doubled;
      detail += fmt(" [mu=%g R=40 lower=%.4f upper=%.4f target=%.4f doubled=%s]", mu, lo, hi, target,
                    doubled ? "exact" : "no");
    }
    return ok;
  });

  run(7, 600, [&](std::string& detail) {
    const auto gamma = PointSequence::lattice(1.25, 1, 80);
    const auto fam = gaussian_molecules(gamma, Envelope::gaussian(1.0, pi / 2));
    const double eps = 1e-2;
    const DminusWitness w = dminus_witness(fam, eps);
    const double xn = weighted_norm(w.x.values(), 2, w.p, 0.0);
    const bool ok = std::abs(xn - 1.0) <= 1e-12 && w.kernel_residual <= kDefaultKernelTol &&
                    w.case1_norm <= kDefaultKernelTol && w.case2_numeric <= w.case2_bound &&
                    w.case3_numeric <= w.case3_bound + 1e-300 && w.total_bound <= std::sqrt(2.0) * eps;
    detail = fmt("N0=%d n0=%d K1=%d case1=%.3g kres=%.3g case2=%.3g(direct %.3g) case3=%.3g(direct %.3g, to |j'|=%d) "
                 "total=%.3g limit=%.3g",
                 w.params.N0, w.params.n0, w.params.K1, w.case1_norm, w.kernel_residual, w.case2_bound,
                 w.case2_numeric, w.case3_bound, w.case3_numeric, w.checked_radius, w.total_bound,
                 std::sqrt(2.0) * eps);
    return ok;
  });

  run(8, 900, [&](std::string& detail) {
    const SpreadingSpec spec = SpreadingSpec::make(1.5, 1.1);
    const Signal g = gaussian_signal();
    const int j[2] = {1, 0};
    const auto a = family_member(spec, j, g);
    const auto b = family_member_composed(spec, j, g);
    double dual = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dual = std::max(dual, std::abs(a.v[k] - b.v[k]));
    dual /= a.max_abs();
    const auto pts = identifiability_diagnostic(spec, g, {4, 10});
    const double ratio = pts[1].sigma_min / pts[0].sigma_min;
    const double smax = max_singular(identification_matrix(spec, g, pts[0].Ntilde, 4));
    const double floor = std::numeric_limits<double>::epsilon() * smax;
    const auto mix = identifiability_diagnostic(spec, random_gaussian_mixture(7), {4, 10});
    detail = fmt("sigma_min N=4 %.3g N=10 %.3g ratio=%.3g dual=%.3g sigma_max=%.3g eps*sigma_max=%.3g "
                 "mixture(seed 7) N=4 %.3g N=10 %.3g",
                 pts[0].sigma_min, pts[1].sigma_min, ratio, dual, smax, floor, mix[0].sigma_min, mix[1].sigma_min);
    if (pts[0].sigma_min < floor) detail += " (below rounding floor)";
    return ratio <= 0.2 && dual <= 1e-6;
  });

  run(9, 120, [&](std::string& detail) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n01;
    std::uniform_int_distribution<int> rrow(0, 99);
    double worst_res = 0.0, worst_gap = 0.0;
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
      const int Nt = rrow(rng);
      const int N = std::uniform_int_distribution<int>(Nt + 1, 129)(rng);
      DenseBlock A(1, Nt, N);
      for (cplx& v : A.values) v = {n01(rng), n01(rng)};
      const KernelResult k = kernel_vector(A, 2.0);
      worst_res = std::max(worst_res, k.residual);
      // sigma_min of the tall adjoint against random probes and a full SVD.
      const DenseBlock At = A.adjoint();
      const double s = sigma_min(At);
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
          At.values.data(), static_cast<Eigen::Index>(At.rows()), static_cast<Eigen::Index>(At.cols()));
      const Eigen::MatrixXcd Md = M;
      double env = kInf;
      for (int q = 0; q < 20; ++q) {
        Eigen::VectorXcd x(Md.cols());
        for (auto& v : x) v = {n01(rng), n01(rng)};
        env = std::min(env, (Md * x).norm() / x.norm());
      }
      const auto sv = Eigen::BDCSVD<Eigen::MatrixXcd>(Md).singularValues();
      const double full = sv(sv.size() - 1);
      worst_gap = std::max(worst_gap, std::abs(s - full) / sv(0));
      ok = ok && k.residual <= 1e-10 && s <= env && sigma_min(A) <= env && std::abs(s - full) <= 1e-10 * sv(0);
    }
    detail = fmt("blocks=100 (up to 199x259) max residual=%.3g max |sigma_min-svd|/sigma_max=%.3g", worst_res,
                 worst_gap);
    return ok;
  });

  run(10, 900, [&](std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "wf_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "c.json")
        << R"({"witness": {"matrix": {"kind": "gauss-gabor", "d": 2, "mu": 1.25, "lambda": 1.1, "radius": 60}, "epsilon": 0.1},
  "frame": {"sizes": [4, 6]},
  "density": {"radii": [5, 10, 20], "coverage": 40},
  "identify": {"sizes": [2, 4], "g": {"kind": "mixture"}},
  "tailsum": {"K1": [5, 10, 20, 40]}})";
    bool ok = true;
    for (const std::string cmd : {"witness", "frame", "density", "identify", "tailsum"}) {
      std::string first;
      for (const std::string run : {"a", "b"}) {
        const fs::path out = dir / (cmd + run);
        const int rc = tool(cmd + " --config " + (dir / "c.json").string() + " --seed 5 --threads " +
                                (run == "a" ? "1" : "2") + " --out " + out.string(),
                            dir / (cmd + run + ".log"));
        const std::string bytes = dir_bytes(out) + slurp(dir / (cmd + run + ".log"));
        if (rc != 0) ok = false;
        if (run == "a") first = bytes;
        else {
          const bool same = first == bytes;
          ok = ok && same;
          detail += " " + cmd + (rc != 0 ? ":exit" + std::to_string(rc) : same ? ":identical" : ":DIFFER");
        }
      }
    }
    return ok;
  });

  std::printf("acceptance: %d failing line(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
