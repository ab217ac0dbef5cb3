#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "platehom/config.hpp"
#include "platehom/errors.hpp"

using namespace platehom;

namespace {

const char* kCylinderLaminate = R"json({
  "material": {"type": "laminate", "coeffs": [1, 4], "axis": 1},
  "chart": {
    "s_lo": -0.5, "s_hi": 0.5,
    "pieces": [
      {"t_lo": 0, "t_hi": 1, "kind": "cylindrical",
       "kappa": [0], "kappa_n": [1], "direction": {"p": 1, "q": 0}}
    ]
  },
  "run": {"command": "recover", "eps": [0.125, 0.0625]}
})json";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrKind parse_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrKind::OutOfRange;  // sentinel: no error
}

}  // namespace

TEST_CASE("parse_config: minimal config fills defaults") {
  RunConfig config = parse_config(kCylinderLaminate);
  CHECK(config.material.type == "laminate");
  CHECK(config.run.quad.nodes_per_cell == 3);
  CHECK(config.run.quad.richardson_tol == doctest::Approx(1e-3));
  CHECK(config.run.threads == 1);
  REQUIRE(config.chart.has_value());
  CHECK(config.chart->knobs.delta_det == doctest::Approx(0.5));
  CHECK(config.chart->pieces.size() == 1);
}

TEST_CASE("parse_config: det bound violation points at chart.s_hi") {
  std::string text = kCylinderLaminate;
  // kappa 4 with s_hi 0.5 breaks 1 - s kappa >= 0.5
  auto pos = text.find("\"kappa\": [0]");
  text.replace(pos, 12, "\"kappa\": [4]");
  pos = text.find("\"kind\": \"cylindrical\"");
  text.replace(pos, 21, "\"kind\": \"conical\"");
  try {
    parse_config(text);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::ValidationError);
    CHECK(e.path() == "chart.s_hi");
    CHECK(std::string(e.what()).find("det bound") != std::string::npos);
  }
}

TEST_CASE("parse_config: non-coprime direction normalizes with a warning") {
  std::string text = kCylinderLaminate;
  auto pos = text.find("{\"p\": 1, \"q\": 0}");
  text.replace(pos, 16, "{\"p\": 2, \"q\": 0}");
  RunConfig config = parse_config(text);
  CHECK(config.chart->pieces[0].direction->p() == 1);
  CHECK(config.chart->pieces[0].direction->q() == 0);
}

TEST_CASE("parse_config: parse and validation diagnostics carry paths") {
  CHECK(parse_kind("{not json") == ErrKind::ParseError);
  CHECK(parse_kind(R"({"run": {"command": "recover"}})") == ErrKind::ParseError);
  CHECK(parse_kind(R"({"material": {"type": "nope"}, "run": {"command": "cell"}})") ==
        ErrKind::ValidationError);
  // chart required for chart commands
  CHECK(parse_kind(
            R"({"material": {"type": "laminate", "coeffs": [1]}, "run": {"command": "energy"}})") ==
        ErrKind::ValidationError);
  // negative eps
  std::string text = kCylinderLaminate;
  auto pos = text.find("[0.125, 0.0625]");
  text.replace(pos, 15, "[-0.125]");
  CHECK(parse_kind(text) == ErrKind::ValidationError);
}

TEST_CASE("config round-trip: parse(serialize(config)) == config") {
  RunConfig config = parse_config(kCylinderLaminate);
  std::string text = serialize_config(config);
  RunConfig again = parse_config(text);
  CHECK(config == again);
  CHECK(serialize_config(again) == text);
}

TEST_CASE("run: cell command writes the expected CSV") {
  std::string text = R"json({
    "material": {"type": "laminate", "coeffs": [1, 4], "axis": 1},
    "run": {"command": "cell", "direction": {"p": 1, "q": 0}, "out_dir": "test_out_cell"}
  })json";
  RunConfig config = parse_config(text);
  auto written = run(config);
  std::string csv = slurp("test_out_cell/cell.csv");
  CHECK(csv.find("# Q_av=2.5") != std::string::npos);
  CHECK(csv.find("# Q_hom=1.6") != std::string::npos);
  CHECK(csv.find("t_lo,t_hi,q_av,alpha_prime") != std::string::npos);
  std::filesystem::remove_all("test_out_cell");
}

TEST_CASE("run: classify command writes measures") {
  std::string text = R"json({
    "material": {"type": "laminate", "coeffs": [1, 4], "axis": 1},
    "chart": {
      "s_lo": -0.25, "s_hi": 0.25,
      "pieces": [{"t_lo": 0, "t_hi": 1, "kind": "conical", "kappa": [1], "kappa_n": [1]}]
    },
    "run": {"command": "classify", "out_dir": "test_out_classify"}
  })json";
  run(parse_config(text));
  std::string csv = slurp("test_out_classify/classify.csv");
  CHECK(csv.find("kind,direction,measure") != std::string::npos);
  CHECK(csv.find("conical,-,0.5") != std::string::npos);
  std::filesystem::remove_all("test_out_classify");
}

TEST_CASE("run: recover command is deterministic across thread counts") {
  RunConfig config = parse_config(kCylinderLaminate);
  config.run.eps = {0.125};
  CliOverrides a;
  a.out_dir = "test_out_t1";
  a.threads = 1;
  run(config, a);
  CliOverrides b;
  b.out_dir = "test_out_t4";
  b.threads = 4;
  run(config, b);
  std::string csv1 = slurp("test_out_t1/recover.csv");
  std::string csv4 = slurp("test_out_t4/recover.csv");
  CHECK(csv1 == csv4);
  CHECK(csv1.find("eps,E_eps,E_hom,rel_gap,l2_dist,bc_err") != std::string::npos);
  std::filesystem::remove_all("test_out_t1");
  std::filesystem::remove_all("test_out_t4");
}

TEST_CASE("run: mesh export writes vertices and faces") {
  RunConfig config = parse_config(kCylinderLaminate);
  config.run.eps = {0.25};
  config.run.command = "classify";
  CliOverrides o;
  o.out_dir = "test_out_mesh";
  o.mesh = true;
  run(config, o);
  std::string mesh = slurp("test_out_mesh/mesh.obj");
  CHECK(mesh.find("v ") == 0);
  CHECK(mesh.find("\nf ") != std::string::npos);
  std::filesystem::remove_all("test_out_mesh");
}

TEST_CASE("run: twoscale command writes coefficient rows") {
  std::string text = R"json({
    "material": {"type": "laminate", "coeffs": [1, 4], "axis": 1},
    "chart": {
      "s_lo": -0.5, "s_hi": 0.5,
      "pieces": [
        {"t_lo": 0, "t_hi": 1, "kind": "cylindrical",
         "kappa": [0], "kappa_n": [1], "direction": {"p": 1, "q": 0}}
      ]
    },
    "run": {"command": "twoscale", "eps": [0.125], "k": [1, 0],
            "out_dir": "test_out_twoscale"}
  })json";
  run(parse_config(text));
  std::string csv = slurp("test_out_twoscale/twoscale.csv");
  CHECK(csv.find("eps,abs_M,arg_M") != std::string::npos);
  CHECK(csv.find("# k=(1,0)") != std::string::npos);
  CHECK(csv.find("0.125,") != std::string::npos);
  std::filesystem::remove_all("test_out_twoscale");
}

TEST_CASE("cli binary: exit codes for validation and quadrature failures") {
  const char* bin = std::getenv("PLATEHOM_BIN");
  if (!bin) return;  // only run under ctest where the binary path is exported
  namespace fs = std::filesystem;
  fs::create_directories("test_out_cli");
  {
    std::ofstream os("test_out_cli/bad.json");
    os << R"({"material": {"type": "laminate", "coeffs": [1, 4], "axis": 1},
              "chart": {"s_lo": -0.5, "s_hi": 0.5,
                "pieces": [{"t_lo": 0, "t_hi": 1, "kind": "conical",
                            "kappa": [4], "kappa_n": [1]}]},
              "run": {"command": "classify"}})";
  }
  {
    std::ofstream os("test_out_cli/hostile.json");
    os << R"({"material": {"type": "random_grid", "n": 3, "seed": 5},
              "chart": {"s_lo": -0.25, "s_hi": 0.25,
                "pieces": [{"t_lo": 0, "t_hi": 1, "kind": "conical",
                            "kappa": [1], "kappa_n": [1]}]},
              "run": {"command": "energy", "eps": [0.25],
                      "quadrature": {"richardson_tol": 1e-15, "max_refine": 1}}})";
  }
  std::string q = "\"";
  int rc_ok = std::system((q + bin + q + " classify -c /dev/null 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc_ok) == 2);
  int rc_bad = std::system(
      (q + bin + q + " classify -c test_out_cli/bad.json -o test_out_cli 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc_bad) == 2);
  int rc_hostile = std::system(
      (q + bin + q + " energy -c test_out_cli/hostile.json -o test_out_cli 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc_hostile) == 3);
  fs::remove_all("test_out_cli");
}
