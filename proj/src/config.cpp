#include "platehom/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "platehom/energy.hpp"
#include "platehom/errors.hpp"
#include "platehom/recovery.hpp"

namespace platehom {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, const std::string& why) {
  fail(ErrKind::ParseError, why, path);
}
[[noreturn]] void validation_fail(const std::string& path, const std::string& why) {
  fail(ErrKind::ValidationError, why, path);
}

double need_number(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

const json& need_key(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) parse_fail(path + "." + key, "missing field");
  return j.at(key);
}

Direction parse_direction(const json& j, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object with p,q or angle");
  if (j.contains("angle")) return Direction::generic(need_number(j.at("angle"), path + ".angle"));
  std::int64_t p = std::llround(need_number(need_key(j, "p", path), path + ".p"));
  std::int64_t q = std::llround(need_number(need_key(j, "q", path), path + ".q"));
  if (p == 0 && q == 0) validation_fail(path, "direction (0,0) is not allowed");
  std::int64_t g = std::gcd(std::abs(p), std::abs(q));
  Direction d = Direction::rational(p, q);
  if (g > 1 || p < 0 || (p == 0 && q < 0))
    std::cerr << "warning: " << path << ": direction {" << p << "," << q
              << "} normalized to {" << d.p() << "," << d.q() << "}\n";
  return d;
}

json direction_json(const Direction& d) {
  if (d.is_rational()) return json{{"p", d.p()}, {"q", d.q()}};
  return json{{"angle", d.angle()}};
}

MaterialConfig parse_material(const json& j) {
  MaterialConfig m;
  if (!j.is_object()) parse_fail("material", "expected an object");
  m.type = need_key(j, "type", "material").get<std::string>();
  if (j.contains("alpha_ell")) m.alpha_ell = need_number(j.at("alpha_ell"), "material.alpha_ell");
  if (m.type == "laminate") {
    const json& co = need_key(j, "coeffs", "material");
    if (!co.is_array() || co.empty()) parse_fail("material.coeffs", "expected a nonempty array");
    for (const auto& c : co) m.coeffs.push_back(need_number(c, "material.coeffs[]"));
    m.axis = j.value("axis", 1);
    if (m.axis != 1 && m.axis != 2) validation_fail("material.axis", "axis must be 1 or 2");
    m.n = int(m.coeffs.size());
  } else if (m.type == "grid") {
    m.n = int(need_number(need_key(j, "n", "material"), "material.n"));
    if (m.n < 1) validation_fail("material.n", "grid size must be positive");
    const json& cells = need_key(j, "cells", "material");
    if (!cells.is_array() || int(cells.size()) != m.n)
      parse_fail("material.cells", "expected n rows of n cells");
    for (int i = 0; i < m.n; ++i) {
      const json& row = cells.at(i);
      if (!row.is_array() || int(row.size()) != m.n)
        parse_fail("material.cells", "expected n rows of n cells");
      for (int jj = 0; jj < m.n; ++jj) {
        const json& e = row.at(jj);
        Mat3 M;
        if (e.is_number()) {
          M = e.get<double>() * Mat3::Identity();
        } else if (e.is_array() && e.size() == 9) {
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) M(r, c) = need_number(e.at(3 * r + c), "material.cells[][]");
        } else if (e.is_array() && e.size() == 3) {
          for (int r = 0; r < 3; ++r) {
            const json& rr = e.at(r);
            if (!rr.is_array() || rr.size() != 3) parse_fail("material.cells[][]", "expected 3x3 matrix");
            for (int c = 0; c < 3; ++c) M(r, c) = need_number(rr.at(c), "material.cells[][]");
          }
        } else {
          parse_fail("material.cells[][]", "expected scalar, 9-array, or 3x3 matrix");
        }
        m.cells.push_back(M);
      }
    }
  } else if (m.type == "random_grid") {
    m.n = int(need_number(need_key(j, "n", "material"), "material.n"));
    m.seed = std::uint64_t(j.value("seed", 0.0));
    if (!m.alpha_ell) m.alpha_ell = 0.25;
  } else {
    validation_fail("material.type", "unknown material type '" + m.type + "'");
  }
  return m;
}

Poly parse_poly(const json& j, const std::string& path) {
  if (j.is_number()) return Poly::constant(j.get<double>());
  if (!j.is_array() || j.empty() || j.size() > 4)
    parse_fail(path, "expected up to 4 polynomial coefficients");
  std::vector<double> c;
  for (const auto& e : j) c.push_back(need_number(e, path));
  return Poly(std::move(c));
}

ChartSpec parse_chart(const json& j) {
  ChartSpec spec;
  if (!j.is_object()) parse_fail("chart", "expected an object");
  spec.s_lo = need_number(need_key(j, "s_lo", "chart"), "chart.s_lo");
  spec.s_hi = need_number(need_key(j, "s_hi", "chart"), "chart.s_hi");
  if (j.contains("gamma0")) {
    const json& g = j.at("gamma0");
    if (!g.is_array() || g.size() != 2) parse_fail("chart.gamma0", "expected [x, y]");
    spec.gamma0 = Vec2(need_number(g.at(0), "chart.gamma0"), need_number(g.at(1), "chart.gamma0"));
  }
  spec.phi0 = j.value("phi0", 0.0);
  if (j.contains("pos0")) {
    const json& g = j.at("pos0");
    if (!g.is_array() || g.size() != 3) parse_fail("chart.pos0", "expected [x, y, z]");
    for (int i = 0; i < 3; ++i) spec.pos0[i] = need_number(g.at(i), "chart.pos0");
  }
  if (j.contains("frame0")) {
    const json& g = j.at("frame0");
    if (!g.is_array() || g.size() != 3) parse_fail("chart.frame0", "expected 3x3 matrix");
    for (int r = 0; r < 3; ++r) {
      const json& row = g.at(r);
      if (!row.is_array() || row.size() != 3) parse_fail("chart.frame0", "expected 3x3 matrix");
      for (int c = 0; c < 3; ++c) spec.frame0(r, c) = need_number(row.at(c), "chart.frame0");
    }
  }
  spec.knobs.delta_det = j.value("delta_det", 0.5);
  spec.knobs.kappa_min = j.value("kappa_min", 1e-6);
  spec.knobs.dist_min_factor = j.value("dist_min_factor", 1e-6);
  const json& pieces = need_key(j, "pieces", "chart");
  if (!pieces.is_array() || pieces.empty()) parse_fail("chart.pieces", "expected a nonempty array");
  for (size_t i = 0; i < pieces.size(); ++i) {
    const json& pj = pieces.at(i);
    std::string path = "chart.pieces[" + std::to_string(i) + "]";
    CurvaturePiece p;
    p.t_lo = need_number(need_key(pj, "t_lo", path), path + ".t_lo");
    p.t_hi = need_number(need_key(pj, "t_hi", path), path + ".t_hi");
    p.kappa = parse_poly(need_key(pj, "kappa", path), path + ".kappa");
    p.kappa_n = parse_poly(need_key(pj, "kappa_n", path), path + ".kappa_n");
    std::string kind = need_key(pj, "kind", path).get<std::string>();
    if (kind == "flat") p.kind = PieceKind::Flat;
    else if (kind == "cylindrical") p.kind = PieceKind::Cylindrical;
    else if (kind == "conical") p.kind = PieceKind::Conical;
    else validation_fail(path + ".kind", "unknown piece kind '" + kind + "'");
    if (pj.contains("direction")) p.direction = parse_direction(pj.at("direction"), path + ".direction");
    spec.pieces.push_back(std::move(p));
  }
  return spec;
}

RunSection parse_run(const json& j) {
  RunSection r;
  if (!j.is_object()) parse_fail("run", "expected an object");
  r.command = need_key(j, "command", "run").get<std::string>();
  if (j.contains("eps")) {
    r.eps.clear();
    const json& ee = j.at("eps");
    if (!ee.is_array() || ee.empty()) parse_fail("run.eps", "expected a nonempty array");
    for (const auto& e : ee) {
      double v = need_number(e, "run.eps[]");
      if (!(v > 0)) validation_fail("run.eps", "eps entries must be positive");
      r.eps.push_back(v);
    }
  }
  if (j.contains("k")) {
    const json& kk = j.at("k");
    if (!kk.is_array() || kk.size() != 2) parse_fail("run.k", "expected [k1, k2]");
    r.k = Eigen::Vector2i(int(need_number(kk.at(0), "run.k")), int(need_number(kk.at(1), "run.k")));
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    r.quad.nodes_per_cell = int(q.value("nodes_per_cell", 3.0));
    r.quad.richardson_tol = q.value("richardson_tol", 1e-3);
    r.quad.max_refine = int(q.value("max_refine", 4.0));
    if (r.quad.nodes_per_cell < 2)
      validation_fail("run.quadrature.nodes_per_cell", "need at least 2 nodes");
    if (!(r.quad.richardson_tol > 0))
      validation_fail("run.quadrature.richardson_tol", "tolerance must be positive");
  }
  r.out_dir = j.value("out_dir", std::string("."));
  r.threads = int(j.value("threads", 1.0));
  r.seed = std::uint64_t(j.value("seed", 0.0));
  r.mesh = j.value("mesh", false);
  if (j.contains("direction")) r.direction = parse_direction(j.at("direction"), "run.direction");
  return r;
}

}  // namespace

PeriodicQuadraticForm MaterialConfig::build() const {
  if (type == "laminate") return laminate(coeffs, axis, alpha_ell);
  if (type == "grid") return PeriodicQuadraticForm(n, cells, alpha_ell);
  if (type == "random_grid") return random_grid(n, seed, alpha_ell.value_or(0.25));
  fail(ErrKind::ValidationError, "unknown material type", "material.type");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail("<root>", e.what());
  }
  RunConfig config;
  config.material = parse_material(need_key(j, "material", "<root>"));
  if (j.contains("chart")) config.chart = parse_chart(j.at("chart"));
  config.run = parse_run(need_key(j, "run", "<root>"));

  // Build everything once so every validation error surfaces at parse time.
  try {
    config.material.build();
  } catch (const Error& e) {
    if (e.kind() == ErrKind::ParseError || e.kind() == ErrKind::ValidationError) throw;
    validation_fail("material", e.what());
  }
  if (config.chart) {
    try {
      build_chart(*config.chart);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrKind::DetDegenerate:
          validation_fail("chart.s_hi", "det bound");
        case ErrKind::NonContiguousPieces:
        case ErrKind::ClassificationMismatch:
        case ErrKind::SelfOverlap:
          validation_fail("chart.pieces", e.what());
        default:
          throw;
      }
    }
  }
  const std::string& cmd = config.run.command;
  if (cmd != "cell" && cmd != "classify" && cmd != "energy" && cmd != "recover" &&
      cmd != "twoscale")
    validation_fail("run.command", "unknown command '" + cmd + "'");
  if (cmd != "cell" && !config.chart)
    validation_fail("chart", "command '" + cmd + "' needs a chart section");
  return config;
}

namespace {

json material_json(const MaterialConfig& m) {
  json j{{"type", m.type}};
  if (m.alpha_ell) j["alpha_ell"] = *m.alpha_ell;
  if (m.type == "laminate") {
    j["coeffs"] = m.coeffs;
    j["axis"] = m.axis;
  } else if (m.type == "grid") {
    j["n"] = m.n;
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
      json row = json::array();
      for (int c = 0; c < m.n; ++c) {
        const Mat3& M = m.cells[size_t(i) * m.n + c];
        json flat = json::array();
        for (int r = 0; r < 3; ++r)
          for (int cc = 0; cc < 3; ++cc) flat.push_back(M(r, cc));
        row.push_back(flat);
      }
      rows.push_back(row);
    }
    j["cells"] = rows;
  } else if (m.type == "random_grid") {
    j["n"] = m.n;
    j["seed"] = m.seed;
  }
  return j;
}

json chart_json(const ChartSpec& spec) {
  json j;
  j["s_lo"] = spec.s_lo;
  j["s_hi"] = spec.s_hi;
  j["gamma0"] = {spec.gamma0.x(), spec.gamma0.y()};
  j["phi0"] = spec.phi0;
  j["pos0"] = {spec.pos0.x(), spec.pos0.y(), spec.pos0.z()};
  json f = json::array();
  for (int r = 0; r < 3; ++r)
    f.push_back({spec.frame0(r, 0), spec.frame0(r, 1), spec.frame0(r, 2)});
  j["frame0"] = f;
  j["delta_det"] = spec.knobs.delta_det;
  j["kappa_min"] = spec.knobs.kappa_min;
  j["dist_min_factor"] = spec.knobs.dist_min_factor;
  json pieces = json::array();
  for (const auto& p : spec.pieces) {
    json pj;
    pj["t_lo"] = p.t_lo;
    pj["t_hi"] = p.t_hi;
    pj["kappa"] = p.kappa.c.empty() ? std::vector<double>{0.0} : p.kappa.c;
    pj["kappa_n"] = p.kappa_n.c.empty() ? std::vector<double>{0.0} : p.kappa_n.c;
    pj["kind"] = p.kind == PieceKind::Flat ? "flat"
                 : p.kind == PieceKind::Cylindrical ? "cylindrical"
                                                    : "conical";
    if (p.direction) pj["direction"] = direction_json(*p.direction);
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

json run_json(const RunSection& r) {
  json j;
  j["command"] = r.command;
  j["eps"] = r.eps;
  j["k"] = {r.k.x(), r.k.y()};
  j["quadrature"] = {{"nodes_per_cell", r.quad.nodes_per_cell},
                     {"richardson_tol", r.quad.richardson_tol},
                     {"max_refine", r.quad.max_refine}};
  j["out_dir"] = r.out_dir;
  j["threads"] = r.threads;
  j["seed"] = r.seed;
  j["mesh"] = r.mesh;
  if (r.direction) j["direction"] = direction_json(*r.direction);
  return j;
}

json config_json(const RunConfig& config) {
  json j;
  j["material"] = material_json(config.material);
  if (config.chart) j["chart"] = chart_json(*config.chart);
  j["run"] = run_json(config.run);
  return j;
}

}  // namespace

std::string serialize_config(const RunConfig& config) { return config_json(config).dump(2); }

bool RunConfig::operator==(const RunConfig& o) const {
  return config_json(*this) == config_json(o);
}

std::string section_hash(const std::string& serialized) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialized) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

namespace {

void write_mesh(const DevelopableChart& chart, const std::string& path) {
  ImmersionSampler smp(std::make_shared<const DevelopableChart>(chart));
  const int nt = 129, ns = 17;
  std::ofstream os(path);
  for (int i = 0; i < nt; ++i) {
    double t = chart.length() * i / (nt - 1);
    for (int j = 0; j < ns; ++j) {
      double s = chart.s_lo() + (chart.s_hi() - chart.s_lo()) * j / (ns - 1);
      Vec3 u = smp.immersion(t, s).first;
      os << "v " << fmt17(u.x()) << " " << fmt17(u.y()) << " " << fmt17(u.z()) << "\n";
    }
  }
  auto vid = [&](int i, int j) { return i * ns + j + 1; };
  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j + 1 < ns; ++j) {
      os << "f " << vid(i, j) << " " << vid(i + 1, j) << " " << vid(i + 1, j + 1) << "\n";
      os << "f " << vid(i, j) << " " << vid(i + 1, j + 1) << " " << vid(i, j + 1) << "\n";
    }
}

}  // namespace

std::vector<std::string> run(const RunConfig& config_in, const CliOverrides& overrides) {
  RunConfig config = config_in;
  if (overrides.out_dir) config.run.out_dir = *overrides.out_dir;
  if (overrides.threads) config.run.threads = *overrides.threads;
  if (overrides.seed) {
    config.run.seed = *overrides.seed;
    if (config.material.type == "random_grid") config.material.seed = *overrides.seed;
  }
  if (overrides.quad_nodes) config.run.quad.nodes_per_cell = *overrides.quad_nodes;
  if (overrides.richardson_tol) config.run.quad.richardson_tol = *overrides.richardson_tol;
  if (overrides.mesh) config.run.mesh = true;

  namespace fs = std::filesystem;
  fs::create_directories(config.run.out_dir);
  auto out_path = [&](const std::string& name) {
    return (fs::path(config.run.out_dir) / name).string();
  };
  std::vector<std::string> written;

  PeriodicQuadraticForm Q = config.material.build();
  std::optional<DevelopableChart> chart;
  if (config.chart) chart = build_chart(*config.chart);

  std::string mat_hash = section_hash(material_json(config.material).dump());
  std::string chart_hash =
      config.chart ? section_hash(chart_json(*config.chart).dump()) : std::string();

  // Echo the effective config for reproducibility.
  {
    std::ofstream os(out_path("run_config.json"));
    os << serialize_config(config) << "\n";
    written.push_back(out_path("run_config.json"));
  }

  const std::string& cmd = config.run.command;
  if (cmd == "cell") {
    std::optional<Direction> dir = config.run.direction;
    if (!dir && config.chart)
      for (const auto& p : config.chart->pieces)
        if (p.kind == PieceKind::Cylindrical && p.direction) {
          dir = p.direction;
          break;
        }
    if (!dir)
      fail(ErrKind::ValidationError, "cell command needs run.direction or a cylindrical piece",
           "run.direction");
    CellSolution sol = solve_cell(Q, *dir);
    std::ofstream os(out_path("cell.csv"));
    os << "# material_hash=" << mat_hash << "\n";
    write_csv(sol, os);
    written.push_back(out_path("cell.csv"));
  } else if (cmd == "classify") {
    ClassifySummary summary = classify(*chart);
    std::ofstream os(out_path("classify.csv"));
    os << "# chart_hash=" << chart_hash << "\n";
    os << "kind,direction,measure\n";
    os << "flat,-," << fmt17(summary.flat_measure) << "\n";
    for (const auto& [dir, m] : summary.cylindrical_measure)
      os << "cylindrical," << dir.describe() << "," << fmt17(m) << "\n";
    os << "conical,-," << fmt17(summary.conical_measure) << "\n";
    written.push_back(out_path("classify.csv"));
  } else if (cmd == "energy") {
    auto chart_ptr = std::make_shared<const DevelopableChart>(*chart);
    ImmersionSampler smp(chart_ptr);
    double E_hom = energy_hom(Q, *chart, config.run.quad, config.run.threads);
    std::ofstream os(out_path("energy.csv"));
    os << "# chart_hash=" << chart_hash << " material_hash=" << mat_hash << "\n";
    os << "eps,E_eps,E_hom\n";
    for (double eps : config.run.eps) {
      double E = energy_eps(Q, smp, eps, config.run.quad, config.run.threads);
      os << fmt17(eps) << "," << fmt17(E) << "," << fmt17(E_hom) << "\n";
    }
    written.push_back(out_path("energy.csv"));
  } else if (cmd == "recover") {
    ConvergenceReport report =
        convergence_study(Q, *chart, config.run.eps, config.run.quad, config.run.threads);
    report.chart_hash = chart_hash;
    report.material_hash = mat_hash;
    std::ofstream os(out_path("recover.csv"));
    write_csv(report, os);
    written.push_back(out_path("recover.csv"));
  } else if (cmd == "twoscale") {
    auto chart_ptr = std::make_shared<const DevelopableChart>(*chart);
    Window window = Window::interior(*chart);
    std::ofstream os(out_path("twoscale.csv"));
    os << "# chart_hash=" << chart_hash << " material_hash=" << mat_hash << "\n";
    os << "# k=(" << config.run.k.x() << "," << config.run.k.y() << ")\n";
    os << "eps,abs_M,arg_M\n";
    for (double eps : config.run.eps) {
      ThetaProfile theta = build_theta(*chart, Q, eps);
      ImmersionSampler smp(chart_ptr, theta, eps / 16.0);
      std::complex<double> M =
          two_scale_coefficient(smp, eps, config.run.k, window, config.run.quad,
                                config.run.threads);
      os << fmt17(eps) << "," << fmt17(std::abs(M)) << "," << fmt17(std::arg(M)) << "\n";
    }
    written.push_back(out_path("twoscale.csv"));
  }

  if (config.run.mesh && chart) {
    write_mesh(*chart, out_path("mesh.obj"));
    written.push_back(out_path("mesh.obj"));
  }
  return written;
}

}  // namespace platehom
