#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "wedgeframe/block_io.hpp"
#include "wedgeframe/cli.hpp"
#include "wedgeframe/density.hpp"
#include "wedgeframe/ident.hpp"
#include "wedgeframe/parallel.hpp"
#include "wedgeframe/tf.hpp"
#include "wedgeframe/witness.hpp"

namespace wedgeframe::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Rows of named columns, written as CSV or JSON plus a gnuplot .dat.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += "\n";
    }
    return s;
  }

  std::string dat() const {
    std::string s = "#";
    for (const auto& c : columns) s += " " + c;
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? " " : "") + (r[i].empty() ? std::string("nan") : r[i]);
      s += "\n";
    }
    return s;
  }

  std::string json_text() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].empty()) o[columns[i]] = nullptr;
        else o[columns[i]] = std::stod(r[i]);
      }
      arr.push_back(o);
    }
    return arr.dump(2) + "\n";
  }
};

std::filesystem::path out_path(const ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return std::filesystem::path(c.out_dir) / name;
}

void write_table(const ExperimentConfig& c, const std::string& stem, const Table& t) {
  if (c.format == "json") write_file_atomic(out_path(c, stem + ".json").string(), t.json_text());
  else write_file_atomic(out_path(c, stem + ".csv").string(), t.csv());
  write_file_atomic(out_path(c, stem + ".dat").string(), t.dat());
}

Envelope envelope_of(const EnvelopeConfig& e) { return Envelope{e.C, e.alpha, e.beta, kInf}; }

QuadratureOptions quad_of(const ExperimentConfig& c) {
  QuadratureOptions q;
  q.step = 1.0 / c.quad_steps;
  return q;
}

// Entry table: "jp_0..jp_{d-1},j_0..j_{d-1},re,im" per line, header optional.
EntryFn read_entry_table(const std::string& path, int d, int& radius) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read entry table " + path);
  auto table = std::make_shared<std::map<std::vector<int>, cplx>>();
  std::string line;
  radius = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Io, "bad number '" + cell + "' in " + path);
      }
    }
    if (vals.size() != static_cast<std::size_t>(2 * d + 2))
      throw Error(ErrorCode::Io, "entry table line has " + std::to_string(vals.size()) + " fields, expected " +
                                     std::to_string(2 * d + 2));
    std::vector<int> key(2 * d);
    for (int i = 0; i < 2 * d; ++i) {
      key[i] = static_cast<int>(std::lround(vals[i]));
      radius = std::max(radius, std::abs(key[i]));
    }
    (*table)[key] = cplx(vals[2 * d], vals[2 * d + 1]);
  }
  return [table, d](std::span<const int> row, std::span<const int> col) -> cplx {
    std::vector<int> key(row.begin(), row.end());
    key.insert(key.end(), col.begin(), col.end());
    auto it = table->find(key);
    return it == table->end() ? cplx(0.0) : it->second;
  };
}

PointSequence lattice_or_file(const std::string& file, double mu, int d, int radius) {
  if (!file.empty()) return read_gamma_csv(file, d);
  return PointSequence::lattice(mu, d, radius);
}

void print_summary(const std::string& s) { std::cout << s << std::endl; }

}  // namespace

MatrixSpec build_matrix(const MatrixConfig& m, const ExperimentConfig& config) {
  const WitnessConfig& w = config.witness;
  MatrixSpec spec;
  if (m.kind == "gauss-gabor") {
    GaborOptions opt;
    opt.p = w.p1;
    opt.s = w.s1;
    opt.quad = quad_of(config);
    const int td = m.d / 2;
    spec = gabor_analysis_synthesis_matrix(Window::gaussian(td), PointSequence::lattice(m.mu, td, m.radius), m.lambda,
                                           TFPoint::zero(td), opt);
  } else {
    spec.d = m.d;
    spec.profile.w = envelope_of(m.w);
    spec.profile.lambda = m.lambda;
    spec.profile.K0 = m.K0;
    spec.profile.r1 = m.r1;
    spec.profile.r2 = m.r2;
    spec.profile.validate();
    int radius = 8;
    if (m.kind == "zero") {
      spec.entry = [](std::span<const int>, std::span<const int>) { return cplx(0.0); };
    } else if (m.kind == "power-wedge") {
      const DecayProfile prof = spec.profile;
      spec.entry = [prof](std::span<const int> row, std::span<const int> col) {
        const double a = sup_norm(row), b = sup_norm(col);
        const double slack = prof.lambda > 1.0 ? prof.lambda * a - b : b - prof.lambda * a;
        return cplx(prof.w(std::max(slack, 0.0)) * std::pow(1.0 + b, prof.r1) * std::pow(1.0 + a, prof.r2));
      };
    } else {
      int table_radius = 0;
      spec.entry = read_entry_table(m.file, m.d, table_radius);
      radius = std::min(radius, std::max(table_radius, 1));
    }
    if (spot_certify(spec, radius, radius) > 1.0 + 1e-12)
      throw Error(ErrorCode::Config, "matrix entries exceed the declared decay profile");
  }
  spec.domain = SpaceSpec(w.p1, w.s1, m.d);
  spec.codomain = SpaceSpec(w.p2, w.s2, m.d);
  return spec;
}

int cmd_witness(const ExperimentConfig& c) {
  const WitnessConfig& w = c.witness;
  if (w.construction == "dminus") {
    const auto& m = w.matrix;
    const auto gamma = lattice_or_file(w.gamma_file, m.mu, m.d / 2, m.radius);
    const auto family = gaussian_molecules(gamma, Envelope::gaussian(1.0, std::numbers::pi / 2.0));
    DminusOptions opt;
    opt.p = w.p1;
    opt.kernel_tol = c.kernel_tol;
    const DminusWitness res = dminus_witness(family, w.epsilon, opt);
    write_file_atomic(out_path(c, "witness.json").string(), dminus_to_json(res, w.include_vector));
    print_summary("epsilon=" + num(w.epsilon) + " total_bound=" + num(res.total_bound) +
                             " N=" + std::to_string(res.params.N0) + " Ntilde=" + std::to_string(res.params.N0 - 1));
    return 0;
  }
  const MatrixSpec spec = build_matrix(w.matrix, c);
  WitnessParams params = WitnessParams::from_spec(spec, w.epsilon);
  params.cert_slack = c.cert_slack;
  params.kernel_tol = c.kernel_tol;
  const Witness res = build_witness(spec, params);
  write_file_atomic(out_path(c, "witness.json").string(), witness_to_json(res, w.include_vector));
  print_summary("epsilon=" + num(res.epsilon) + " total_bound=" + num(res.total_bound) +
                           " N=" + std::to_string(res.N) + " Ntilde=" + std::to_string(res.Ntilde));
  return 0;
}

int cmd_frame(const ExperimentConfig& c) {
  const FrameConfig& f = c.frame;
  int max_n = 0;
  for (int n : f.sizes) max_n = std::max(max_n, n);
  const int radius = f.radius > 0 ? f.radius
                                   : static_cast<int>(std::ceil((f.mu_synthesis * max_n + f.margin + 2.0) / f.mu_analysis)) + 1;
  const PointSequence gamma = lattice_or_file(f.gamma_file, f.mu_analysis, 1, radius);
  Table t{{"N", "rows", "cols", "sigma_min"}, {}};
  if (gamma.empty()) {
    t.rows.push_back({"0", "0", "0", "0"});
  } else {
    const Window g = f.window_file.empty() ? Window::gaussian(1) : read_window_csv(f.window_file);
    GaborOptions opt;
    opt.quad = quad_of(c);
    for (const auto& p : frame_lower_diagnostic(g, gamma, f.mu_synthesis, f.sizes, f.margin, opt))
      t.rows.push_back({std::to_string(p.N), std::to_string(p.rows), std::to_string(p.cols), num(p.sigma_min)});
  }
  write_table(c, "frame", t);
  print_summary("frame sizes=" + std::to_string(t.rows.size()) + " sigma_min_last=" + t.rows.back()[3]);
  return 0;
}

int cmd_density(const ExperimentConfig& c) {
  const DensityConfig& d = c.density;
  PointSequence gamma =
      lattice_or_file(d.gamma_file, d.mu, d.d, static_cast<int>(std::floor(d.coverage / d.mu + 1e-9)));
  if (d.doubled) gamma = gamma.doubled();
  const DensityProfile prof = density_profile(gamma, d.radii, d.step);
  Table t{{"R", "lower", "upper"}, {}};
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    t.rows.push_back({num(prof.radii[i]), num(prof.lower[i]), num(prof.upper[i])});
  write_table(c, "density", t);
  print_summary("lower=" + num(prof.lower_estimate()) + " upper=" + num(prof.upper_estimate()));
  return 0;
}

int cmd_identify(const ExperimentConfig& c) {
  const IdentifyConfig& i = c.identify;
  SpreadingSpec spec = SpreadingSpec::make(i.a, i.lambda);
  spec.nu_nodes = i.nu_nodes;
  spec.t_nodes = i.t_nodes;
  spec.h = i.h;
  spec.L = i.L;
  spec.validate();
  Signal g;
  if (i.g_kind == "gauss") g = gaussian_signal();
  else if (i.g_kind == "mixture") g = random_gaussian_mixture(c.seed, i.mixture_terms);
  else g = interpolated_signal(read_window_csv(i.g_file).samples);
  Table t{{"N", "Ntilde", "sigma_min", "assembly_seconds", "Ntilde_wide", "wide_rows", "wide_cols"}, {}};
  for (int n : i.sizes) {
    const auto t0 = std::chrono::steady_clock::now();
    const IdentPoint p = identifiability_diagnostic(spec, g, {n}).front();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    t.rows.push_back({std::to_string(p.N), std::to_string(p.Ntilde), num(p.sigma_min),
                      i.record_timings ? num(secs) : std::string(), std::to_string(p.Ntilde_wide),
                      std::to_string(p.wide_rows), std::to_string(p.wide_cols)});
  }
  write_table(c, "identify", t);
  print_summary("identify sizes=" + std::to_string(t.rows.size()) + " sigma_min_last=" + t.rows.back()[2]);
  return 0;
}

int cmd_tailsum(const ExperimentConfig& c) {
  const TailsumConfig& s = c.tailsum;
  AK1Params p;
  p.p2 = s.p2;
  p.q1 = s.q1;
  p.d = s.d;
  p.r1 = s.r1;
  p.r2 = s.r2;
  p.profile.w = envelope_of(s.w);
  p.profile.w.validate();
  Table t{{"K1", "upper", "lower"}, {}};
  for (long k : s.K1) {
    const TailSum a = a_k1(p, k);
    t.rows.push_back({std::to_string(k), num(a.upper), num(a.lower)});
  }
  write_table(c, "tailsum", t);
  print_summary("tailsum K1_last=" + t.rows.back()[0] + " upper=" + t.rows.back()[1]);
  return 0;
}

int run(const ExperimentConfig& c) {
  c.validate();
  if (c.threads > 0) set_thread_count(c.threads);
  switch (c.command) {
    case Command::Witness: return cmd_witness(c);
    case Command::Frame: return cmd_frame(c);
    case Command::Density: return cmd_density(c);
    case Command::Identify: return cmd_identify(c);
    case Command::Tailsum: return cmd_tailsum(c);
  }
  return 1;
}

}  // namespace wedgeframe::cli
