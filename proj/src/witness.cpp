#include "wedgeframe/witness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "wedgeframe/error.hpp"
#include "wedgeframe/parallel.hpp"

namespace wedgeframe {

namespace {

constexpr long kK1Limit = 10'000'000;

int ceil_guarded(double x) { return static_cast<int>(std::ceil(x - 1e-12 * std::max(1.0, std::abs(x)))); }

double pnorm_combine(double a, double b, double p) {
  if (std::isinf(p)) return std::max(a, b);
  return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
}

// Certified left side and threshold of the K1 condition for each regime.
struct K1Test {
  const WitnessParams& P;
  double r1, r2, q1, lam;

  bool passes(long K1) const {
    const int d = P.d;
    const double p2 = P.p2;
    const double eps = P.epsilon;
    const Envelope& w = P.profile.w;
    const double ratio = lam / (lam - 1.0);
    if (std::isinf(q1) && !std::isinf(p2)) {
      const auto [N, Nt] = dims_from_k1(K1, lam);
      (void)N;
      const long Ks = Nt;  // ceil(N/lambda) + K1
      const double lhs = std::pow(K1 + 3.0, p2 * r1) * outer_series(w, d, kInf, p2, r2, Ks).upper;
      const double rhs = std::pow(eps, p2) / (std::pow(2.0, d + p2 * r2) * d * std::pow(ratio, p2 * r1));
      return lhs <= rhs;
    }
    if (std::isinf(p2)) {
      const double lhs = std::pow(K1 + 3.0, r1) * outer_series(w, d, q1, kInf, r2, K1).upper;
      const double rhs = std::isinf(q1) ? eps / std::pow(ratio, r1)
                                        : eps / (std::pow(std::pow(2.0, d) * d, 1.0 / q1) * std::pow(2.0, r2) *
                                                 std::pow(ratio, r1));
      return lhs <= rhs;
    }
    AK1Params a{p2, q1, d, r1, r2, P.profile};
    const double lhs = a_k1(a, K1).upper;
    const double rhs = std::pow(std::pow(2.0, d) * d, -p2 / q1 - 1.0) * std::pow(2.0, -p2 * r2) *
                       std::pow(1.0 / ratio, p2 * r1) * std::pow(eps, p2);
    return lhs <= rhs;
  }
};

FiniteVector rescale(const FiniteVector& x, double p, double s) {
  const double n = weighted_norm(x.values(), x.dim(), p, s);
  std::vector<cplx> v(x.values().begin(), x.values().end());
  if (n > 0.0)
    for (cplx& z : v) z /= n;
  return FiniteVector(x.dim(), x.support_radius(), std::move(v));
}

std::size_t argmax_abs(std::span<const cplx> v, std::size_t from, std::size_t to) {
  std::size_t best = from;
  for (std::size_t i = from; i < to; ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return best;
}

std::string index_string(const BoxIndexing& box, std::size_t pos) {
  std::ostringstream os;
  os << "(";
  auto c = box.coords(pos);
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ")";
  return os.str();
}

nlohmann::json vector_json(const FiniteVector& x) {
  nlohmann::json arr = nlohmann::json::array();
  const auto box = box_indexing(x.dim(), x.support_radius());
  for (std::size_t i = 0; i < box->size(); ++i) {
    const cplx v = x.values()[i];
    if (v == 0.0) continue;
    auto c = box->coords(i);
    arr.push_back({{"j", std::vector<int>(c.begin(), c.end())}, {"re", v.real()}, {"im", v.imag()}});
  }
  return arr;
}

nlohmann::json real_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

WitnessParams WitnessParams::from_spec(const MatrixSpec& spec, double epsilon) {
  WitnessParams p;
  p.epsilon = epsilon;
  p.p1 = spec.domain.p;
  p.s1 = spec.domain.s;
  p.p2 = spec.codomain.p;
  p.s2 = spec.codomain.s;
  p.r1 = spec.profile.r1;
  p.r2 = spec.profile.r2;
  p.d = spec.d;
  p.profile = spec.profile;
  return p;
}

std::pair<int, int> dims_from_k1(long K1, double lambda) {
  if (!(lambda > 1.0) || K1 < 1) throw Error(ErrorCode::Config, "dims_from_k1 needs lambda > 1 and K1 >= 1");
  const int N = ceil_guarded(lambda * (K1 + 1.0) / (lambda - 1.0));
  const int Nt = ceil_guarded(N / lambda) + static_cast<int>(K1);
  if (!(Nt < N)) throw Error(ErrorCode::Config, "row radius is not below the column radius");
  return {N, Nt};
}

long choose_k1(const WitnessParams& params) {
  if (!(params.epsilon > 0.0)) throw Error(ErrorCode::Config, "epsilon must be positive");
  const DecayProfile& prof = params.profile;
  prof.validate();
  if (prof.orientation() != Orientation::Left) throw Error(ErrorCode::Orientation, "choose_k1 needs a left wedge");
  const SpaceSpec dom(params.p1, params.s1, params.d), cod(params.p2, params.s2, params.d);
  const double delta = params.delta.value_or(default_delta(prof, dom, cod));
  DecayProfile reduced = prof;
  reduced.r1 = params.r1;
  reduced.r2 = params.r2;
  check_admissible(reduced, dom, cod, delta);
  const K1Test test{params, params.r1 - params.s1, params.r2 + params.s2, dom.conjugate(), prof.lambda};

  const long start = static_cast<long>(std::floor(std::max(prof.K0, 1.0))) + 1;
  if (test.passes(start)) return start;
  long lo = start, hi = start;
  while (!test.passes(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kK1Limit) throw Error(ErrorCode::K1Range, "no K1 below 1e7 meets the threshold");
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (test.passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<cplx> apply_rows(const MatrixSpec& spec, const FiniteVector& x, int radius) {
  const auto rows = box_indexing(spec.d, radius);
  const auto cols = box_indexing(spec.d, x.support_radius());
  std::vector<std::size_t> nz;
  for (std::size_t c = 0; c < cols->size(); ++c)
    if (x.values()[c] != 0.0) nz.push_back(c);
  std::vector<cplx> y(rows->size());
  parallel_for(0, rows->size(), [&](std::size_t r) {
    auto jr = rows->coords(r);
    cplx acc = 0.0;
    for (std::size_t c : nz) acc += spec.entry(jr, cols->coords(c)) * x.values()[c];
    y[r] = acc;
  });
  return y;
}

Witness build_witness(const MatrixSpec& spec_in, const WitnessParams& params_in) {
  if (spec_in.profile.orientation() == Orientation::Right) {
    const MatrixSpec adj = adjoint(spec_in);
    WitnessParams p = params_in;
    p.p1 = adj.domain.p;
    p.s1 = adj.domain.s;
    p.p2 = adj.codomain.p;
    p.s2 = adj.codomain.s;
    p.r1 = adj.profile.r1;
    p.r2 = adj.profile.r2;
    p.profile = adj.profile;
    Witness w = build_witness(adj, p);
    w.adjoint = true;
    return w;
  }
  const MatrixSpec& spec = spec_in;
  WitnessParams params = params_in;
  if (params.d != spec.d || params.p1 != spec.domain.p || params.p2 != spec.codomain.p ||
      params.s1 != spec.domain.s || params.s2 != spec.codomain.s)
    throw Error(ErrorCode::Config, "witness exponents do not match the matrix spaces");
  const int d = spec.d;
  const double p2 = params.p2;
  const double eps = params.epsilon;
  const double target = eps * (1.0 + params.cert_slack);

  long K1 = choose_k1(params);
  for (int attempt = 0;; ++attempt) {
    const auto [N, Nt] = dims_from_k1(K1, spec.profile.lambda);
    DenseBlock block = truncate(spec, Nt, N);
    const double smax = sigma_max_estimate(block.values, block.rows(), block.cols());
    KernelResult kr = kernel_vector_inplace(std::move(block), params.p1);
    Witness w;
    w.x = rescale(kr.x, params.p1, params.s1);
    w.epsilon = eps;
    w.p2 = p2;
    w.K1 = K1;
    w.N = N;
    w.Ntilde = Nt;
    const int Jmin = static_cast<int>(std::floor((N + spec.profile.K0) / spec.profile.lambda));
    w.Jmax = std::max(Jmin, Nt + static_cast<int>(K1) + 2);
    while (!(spec.profile.lambda * (w.Jmax + 1.0) - N > spec.profile.K0)) ++w.Jmax;
    w.escalations = attempt;

    const std::vector<cplx> y = apply_rows(spec, w.x, 2 * w.Jmax);
    const std::size_t nk = static_cast<std::size_t>(box_size(d, Nt));
    const std::size_t nj = static_cast<std::size_t>(box_size(d, w.Jmax));
    {
      double r2 = 0.0, x2 = 0.0;
      for (std::size_t i = 0; i < nk; ++i) r2 += std::norm(y[i]);
      for (const cplx& v : w.x.values()) x2 += std::norm(v);
      w.kernel_residual = std::sqrt(r2 / x2) / std::max(1.0, smax);
    }
    if (!(w.kernel_residual <= params.kernel_tol))
      throw Error(ErrorCode::NoKernel, "kernel rows do not vanish (residual " + std::to_string(w.kernel_residual) + ")");
    w.numeric_norm = weighted_norm(std::span<const cplx>(y.data(), nj), d, p2, params.s2);
    w.verified_norm = weighted_norm(y, d, p2, params.s2);
    {
      std::vector<cplx> beyond(y.begin(), y.end());
      std::fill(beyond.begin(), beyond.begin() + nj, cplx(0.0));
      w.explicit_tail = weighted_norm(beyond, d, p2, params.s2);
    }
    w.tail_certificate = row_tail_bound(spec, w.x, w.Jmax);
    w.total_bound = pnorm_combine(w.numeric_norm, w.tail_certificate, p2);

    if (w.numeric_norm > target) {
      const auto box = box_indexing(d, w.Jmax);
      const std::size_t at = argmax_abs(y, nk, nj);
      throw Error(ErrorCode::CertFail, "rows up to Jmax=" + std::to_string(w.Jmax) + " give " +
                                           std::to_string(w.numeric_norm) + " > target, largest at row " +
                                           index_string(*box, at));
    }
    if (w.explicit_tail > w.tail_certificate * (1.0 + 1e-9) + 1e-300) {
      const auto box = box_indexing(d, 2 * w.Jmax);
      const std::size_t at = argmax_abs(y, nj, y.size());
      throw Error(ErrorCode::CertFail, "tail certificate is below the directly computed rows, largest at row " +
                                           index_string(*box, at));
    }
    if (w.total_bound <= target) return w;
    if (attempt >= params.max_escalations)
      throw Error(ErrorCode::CertFail, "tail certificate " + std::to_string(w.tail_certificate) +
                                           " stays above the target after escalating K1");
    K1 = std::max(K1 + 1, static_cast<long>(std::ceil(1.5 * K1)));
  }
}

std::string witness_to_json(const Witness& w, bool include_vector) {
  nlohmann::ordered_json j;
  j["epsilon"] = w.epsilon;
  j["p2"] = real_or_string(w.p2);
  j["K1"] = w.K1;
  j["N"] = w.N;
  j["Ntilde"] = w.Ntilde;
  j["Jmax"] = w.Jmax;
  j["numeric_norm"] = w.numeric_norm;
  j["tail_certificate"] = w.tail_certificate;
  j["total_bound"] = w.total_bound;
  j["kernel_residual"] = w.kernel_residual;
  j["explicit_tail"] = w.explicit_tail;
  j["verified_norm"] = w.verified_norm;
  j["escalations"] = w.escalations;
  j["adjoint"] = w.adjoint;
  j["support_radius"] = w.x.support_radius();
  j["dim"] = w.x.dim();
  if (include_vector) j["x"] = vector_json(w.x);
  return j.dump(2) + "\n";
}

std::string dminus_to_json(const DminusWitness& w, bool include_vector) {
  nlohmann::ordered_json j;
  const DminusParams& P = w.params;
  j["epsilon"] = P.epsilon;
  j["p"] = real_or_string(w.p);
  j["alpha1"] = P.alpha1;
  j["alpha2"] = P.alpha2;
  j["alpha3"] = P.alpha3;
  j["n0"] = P.n0;
  j["R0_tilde"] = P.R0_tilde;
  j["R0"] = P.R0;
  j["N0"] = P.N0;
  j["K1"] = P.K1;
  j["K2"] = P.K2;
  j["K2_tilde"] = P.K2_tilde;
  j["z0"] = P.z0;
  j["lower_density"] = P.lower_density;
  j["upper_density"] = P.upper_density;
  j["case1_norm"] = w.case1_norm;
  j["case2_bound"] = w.case2_bound;
  j["case2_numeric"] = w.case2_numeric;
  j["case3_bound"] = w.case3_bound;
  j["case3_numeric"] = w.case3_numeric;
  j["total_bound"] = w.total_bound;
  j["kernel_residual"] = w.kernel_residual;
  j["checked_radius"] = w.checked_radius;
  if (include_vector) j["x"] = vector_json(w.x);
  return j.dump(2) + "\n";
}

}  // namespace wedgeframe
