#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wedgeframe/cli.hpp"

namespace wedgeframe::cli {

using json = nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw Error(ErrorCode::Config, "unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json env_json(const EnvelopeConfig& e) { return json{{"C", e.C}, {"alpha", e.alpha}, {"beta", e.beta}}; }

EnvelopeConfig env_from(const json& j, const std::string& where) {
  check_keys(j, where, {"C", "alpha", "beta"});
  EnvelopeConfig e;
  get(j, "C", e.C);
  get(j, "alpha", e.alpha);
  get(j, "beta", e.beta);
  return e;
}

json matrix_json(const MatrixConfig& m) {
  return json{{"kind", m.kind}, {"d", m.d},   {"mu", m.mu}, {"lambda", m.lambda}, {"radius", m.radius},
              {"K0", m.K0},     {"w", env_json(m.w)}, {"r1", m.r1}, {"r2", m.r2}, {"file", m.file}};
}

MatrixConfig matrix_from(const json& j) {
  check_keys(j, "witness.matrix", {"kind", "d", "mu", "lambda", "radius", "K0", "w", "r1", "r2", "file"});
  MatrixConfig m;
  get(j, "kind", m.kind);
  get(j, "d", m.d);
  get(j, "mu", m.mu);
  get(j, "lambda", m.lambda);
  get(j, "radius", m.radius);
  get(j, "K0", m.K0);
  if (j.contains("w")) m.w = env_from(j.at("w"), "witness.matrix.w");
  get(j, "r1", m.r1);
  get(j, "r2", m.r2);
  get(j, "file", m.file);
  return m;
}

// Infinite exponents are written as the string "inf".
json exponent_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

double exponent_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(ErrorCode::Config, "exponent must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Witness: return "witness";
    case Command::Frame: return "frame";
    case Command::Density: return "density";
    case Command::Identify: return "identify";
    case Command::Tailsum: return "tailsum";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Witness, Command::Frame, Command::Density, Command::Identify, Command::Tailsum})
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::Config, "unknown command '" + name + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::Config, m); };
  if (format != "csv" && format != "json") fail("io.format must be csv or json");
  if (!(kernel_tol > 0.0)) fail("numeric.kernel_tol must be positive");
  if (!(cert_slack >= 0.0)) fail("numeric.cert_slack must be nonnegative");
  if (quad_steps < 4) fail("numeric.quad_steps must be at least 4");
  if (threads < 0) fail("threads must be nonnegative");
  switch (command) {
    case Command::Witness: {
      const auto& w = witness;
      if (w.construction != "kernel" && w.construction != "dminus") fail("witness.construction must be kernel or dminus");
      if (!(w.epsilon > 0.0)) fail("witness.epsilon must be positive");
      const auto& m = w.matrix;
      if (m.kind != "gauss-gabor" && m.kind != "power-wedge" && m.kind != "zero" && m.kind != "table")
        fail("unknown matrix kind '" + m.kind + "'");
      if (m.d < 1) fail("witness.matrix.d must be positive");
      if (m.kind == "gauss-gabor" && m.d % 2 != 0) fail("gauss-gabor needs an even index dimension");
      if (m.kind == "table" && m.file.empty()) fail("table matrix needs a file");
      if (w.construction == "dminus" && m.kind != "gauss-gabor") fail("dminus uses gauss-gabor molecules");
      break;
    }
    case Command::Frame:
      if (frame.sizes.empty()) fail("frame.sizes is empty");
      if (!(frame.mu_synthesis > 0.0) || !(frame.mu_analysis > 0.0)) fail("frame lattice scales must be positive");
      break;
    case Command::Density:
      if (density.radii.empty()) fail("density.radii is empty");
      if (!(density.mu > 0.0) || !(density.coverage > 0.0)) fail("density.mu and coverage must be positive");
      break;
    case Command::Identify:
      if (identify.sizes.empty()) fail("identify.sizes is empty");
      if (identify.g_kind != "gauss" && identify.g_kind != "mixture" && identify.g_kind != "file")
        fail("identify.g.kind must be gauss, mixture or file");
      if (identify.g_kind == "file" && identify.g_file.empty()) fail("identify.g.file is empty");
      break;
    case Command::Tailsum:
      if (tailsum.K1.empty()) fail("tailsum.K1 is empty");
      break;
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, "config",
               {"command", "io", "numeric", "threads", "seed", "witness", "frame", "density", "identify", "tailsum"});
    ExperimentConfig c;
    if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("io")) {
      const auto& io = j.at("io");
      check_keys(io, "io", {"out_dir", "format"});
      get(io, "out_dir", c.out_dir);
      get(io, "format", c.format);
    }
    if (j.contains("numeric")) {
      const auto& n = j.at("numeric");
      check_keys(n, "numeric", {"kernel_tol", "cert_slack", "quad_steps"});
      get(n, "kernel_tol", c.kernel_tol);
      get(n, "cert_slack", c.cert_slack);
      get(n, "quad_steps", c.quad_steps);
    }
    get(j, "threads", c.threads);
    get(j, "seed", c.seed);
    if (j.contains("witness")) {
      const auto& w = j.at("witness");
      check_keys(w, "witness",
                 {"construction", "matrix", "epsilon", "p1", "p2", "s1", "s2", "include_vector", "gamma_file"});
      auto& o = c.witness;
      get(w, "construction", o.construction);
      if (w.contains("matrix")) o.matrix = matrix_from(w.at("matrix"));
      get(w, "epsilon", o.epsilon);
      if (w.contains("p1")) o.p1 = exponent_from(w.at("p1"));
      if (w.contains("p2")) o.p2 = exponent_from(w.at("p2"));
      get(w, "s1", o.s1);
      get(w, "s2", o.s2);
      get(w, "include_vector", o.include_vector);
      get(w, "gamma_file", o.gamma_file);
    }
    if (j.contains("frame")) {
      const auto& f = j.at("frame");
      check_keys(f, "frame", {"mu_analysis", "mu_synthesis", "radius", "gamma_file", "window_file", "sizes", "margin"});
      auto& o = c.frame;
      get(f, "mu_analysis", o.mu_analysis);
      get(f, "mu_synthesis", o.mu_synthesis);
      get(f, "radius", o.radius);
      get(f, "gamma_file", o.gamma_file);
      get(f, "window_file", o.window_file);
      get(f, "sizes", o.sizes);
      get(f, "margin", o.margin);
    }
    if (j.contains("density")) {
      const auto& f = j.at("density");
      check_keys(f, "density", {"mu", "coverage", "gamma_file", "d", "radii", "step", "doubled"});
      auto& o = c.density;
      get(f, "mu", o.mu);
      get(f, "coverage", o.coverage);
      get(f, "gamma_file", o.gamma_file);
      get(f, "d", o.d);
      get(f, "radii", o.radii);
      get(f, "step", o.step);
      get(f, "doubled", o.doubled);
    }
    if (j.contains("identify")) {
      const auto& f = j.at("identify");
      check_keys(f, "identify", {"a", "lambda", "g", "sizes", "grids", "record_timings"});
      auto& o = c.identify;
      get(f, "a", o.a);
      get(f, "lambda", o.lambda);
      if (f.contains("g")) {
        const auto& g = f.at("g");
        check_keys(g, "identify.g", {"kind", "file", "terms"});
        get(g, "kind", o.g_kind);
        get(g, "file", o.g_file);
        get(g, "terms", o.mixture_terms);
      }
      get(f, "sizes", o.sizes);
      if (f.contains("grids")) {
        const auto& g = f.at("grids");
        check_keys(g, "identify.grids", {"nu_nodes", "t_nodes", "h", "L"});
        get(g, "nu_nodes", o.nu_nodes);
        get(g, "t_nodes", o.t_nodes);
        get(g, "h", o.h);
        get(g, "L", o.L);
      }
      get(f, "record_timings", o.record_timings);
    }
    if (j.contains("tailsum")) {
      const auto& f = j.at("tailsum");
      check_keys(f, "tailsum", {"d", "p2", "q1", "r1", "r2", "w", "K1"});
      auto& o = c.tailsum;
      get(f, "d", o.d);
      if (f.contains("p2")) o.p2 = exponent_from(f.at("p2"));
      if (f.contains("q1")) o.q1 = exponent_from(f.at("q1"));
      get(f, "r1", o.r1);
      get(f, "r2", o.r2);
      if (f.contains("w")) o.w = env_from(f.at("w"), "tailsum.w");
      get(f, "K1", o.K1);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad config value: ") + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["io"] = {{"out_dir", c.out_dir}, {"format", c.format}};
  j["numeric"] = {{"kernel_tol", c.kernel_tol}, {"cert_slack", c.cert_slack}, {"quad_steps", c.quad_steps}};
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  const auto& w = c.witness;
  j["witness"] = {{"construction", w.construction}, {"matrix", matrix_json(w.matrix)},
                  {"epsilon", w.epsilon},           {"p1", exponent_json(w.p1)},
                  {"p2", exponent_json(w.p2)},      {"s1", w.s1},
                  {"s2", w.s2},                     {"include_vector", w.include_vector},
                  {"gamma_file", w.gamma_file}};
  const auto& f = c.frame;
  j["frame"] = {{"mu_analysis", f.mu_analysis}, {"mu_synthesis", f.mu_synthesis}, {"radius", f.radius},
                {"gamma_file", f.gamma_file},   {"window_file", f.window_file},   {"sizes", f.sizes},
                {"margin", f.margin}};
  const auto& d = c.density;
  j["density"] = {{"mu", d.mu},       {"coverage", d.coverage}, {"gamma_file", d.gamma_file}, {"d", d.d},
                  {"radii", d.radii}, {"step", d.step},         {"doubled", d.doubled}};
  const auto& i = c.identify;
  j["identify"] = {{"a", i.a},
                   {"lambda", i.lambda},
                   {"g", {{"kind", i.g_kind}, {"file", i.g_file}, {"terms", i.mixture_terms}}},
                   {"sizes", i.sizes},
                   {"grids", {{"nu_nodes", i.nu_nodes}, {"t_nodes", i.t_nodes}, {"h", i.h}, {"L", i.L}}},
                   {"record_timings", i.record_timings}};
  const auto& t = c.tailsum;
  j["tailsum"] = {{"d", t.d},   {"p2", exponent_json(t.p2)}, {"q1", exponent_json(t.q1)}, {"r1", t.r1},
                  {"r2", t.r2}, {"w", env_json(t.w)},        {"K1", t.K1}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::CertFail:
      return 2;
    case ErrorCode::Config:
    case ErrorCode::Io:
    case ErrorCode::Exponents:
    case ErrorCode::DivergentTail:
    case ErrorCode::Orientation:
      return 1;
    default:
      return 3;
  }
}

}  // namespace wedgeframe::cli
