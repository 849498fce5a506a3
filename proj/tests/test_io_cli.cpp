#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "nfbc/cli_commands.hpp"
#include "nfbc/config.hpp"
#include "nfbc/csv_io.hpp"
#include "nfbc/errors.hpp"
#include "nfbc/field_dump.hpp"
#include "nfbc/grid.hpp"
#include "nfbc/manifest.hpp"

using namespace nfbc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "nfbc_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Redirects std::cout / std::cerr while alive so run_cli output is testable.
struct StreamCapture {
  std::ostringstream out, err;
  std::streambuf* old_out;
  std::streambuf* old_err;
  StreamCapture()
      : old_out(std::cout.rdbuf(out.rdbuf())), old_err(std::cerr.rdbuf(err.rdbuf())) {}
  ~StreamCapture() {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
  }
};

const char* kTinyFiberConfig = R"(# bare-fiber smoke configuration
[scenario]
kind = fiber
scale = full

[domain]
x_min = -1.2e-6
x_max = 1.2e-6
y_half = 0.55e-6
z_half = 0.55e-6
mesh_step = 25e-9

[source]
wavelength = 532e-9
ramp_cycles = 6

[run]
mode = cw
max_time = 25e-15
measure_cycles = 6
)";

} // namespace

TEST_CASE("config parser: defaults, round trip, strict schema") {
  const ScenarioConfig minimal = parse_config("[scenario]\nkind = fiber\n");
  CHECK(minimal.kind == ScenarioKind::Fiber);
  CHECK(minimal.scale == "desk");
  CHECK(minimal.domain.mesh_step == 20e-9);
  CHECK(minimal.fiber.radius == 150e-9);
  CHECK(minimal.nanodiamond.enabled);

  // canonical form is a fixed point of parse -> canonicalize
  const std::string canon = canonical_config(minimal);
  CHECK(canonical_config(parse_config(canon)) == canon);

  const char* full = R"([scenario]
kind = nfbc
scale = full

[domain]
x_min = -12e-6
x_max = 12e-6   # trailing comment
y_half = 0.8e-6
z_half = 0.8e-6
mesh_step = 2.5e-8

[grating]
n_per_side = 120
period = 2.4e-7
depth = 45e-9

[sweep]
ns = 0, 40, 80
sizes = 15e-9,25e-9
reference_field = 2e6
tune_period = true

[nanodiamond]
shape = polyhedron
vertices = 80

[run]
mode = pulsed
max_time = 1.2e-12
)";
  const ScenarioConfig cfg = parse_config(full);
  CHECK(cfg.kind == ScenarioKind::Nfbc);
  CHECK(cfg.grating.grooves_per_side == 120);
  CHECK(cfg.grating.depth == 45e-9);
  CHECK(cfg.sweep.ns == std::vector<std::size_t>{0, 40, 80});
  CHECK(cfg.sweep.sizes == std::vector<double>{15e-9, 25e-9});
  CHECK(cfg.sweep.tune_period);
  CHECK(cfg.nanodiamond.shape == NdKind::Polyhedron);
  CHECK(cfg.run.mode == RunMode::Pulsed);
  CHECK(canonical_config(parse_config(canonical_config(cfg))) == canonical_config(cfg));

  // carriage returns and blank/comment lines are tolerated
  const ScenarioConfig crlf = parse_config("[scenario]\r\nkind = fiber\r\n\r\n# x\r\n");
  CHECK(crlf.kind == ScenarioKind::Fiber);

  CHECK(contains(error_of([] { parse_config("kind = fiber\n"); }), "line 1"));
  CHECK(contains(error_of([] { parse_config(""); }), "missing required key 'scenario.kind'"));
  CHECK(contains(error_of([] { parse_config("[scenario]\nkind = laser\n"); }), "scenario.kind"));

  const std::string unknown =
      error_of([] { parse_config("[scenario]\nkind = fiber\nbogus = 1\n"); });
  CHECK(contains(unknown, "line 3"));
  CHECK(contains(unknown, "unknown key 'scenario.bogus'"));

  // keys of another scenario kind are rejected, with the kind named
  const std::string wrong_section = error_of(
      [] { parse_config("[scenario]\nkind = fiber\n[beam]\nfocus_offset = 1e-6\n"); });
  CHECK(contains(wrong_section, "beam.focus_offset"));
  CHECK(contains(wrong_section, "fiber"));

  CHECK(contains(error_of([] {
          parse_config("[scenario]\nkind = fiber\nkind = nfbc\n");
        }),
        "duplicate key 'scenario.kind'"));
  CHECK(contains(error_of([] {
          parse_config("[scenario]\nkind = fiber\n[domain]\nmesh_step = tiny\n");
        }),
        "domain.mesh_step"));
  CHECK(contains(error_of([] {
          parse_config("[scenario]\nkind = fiber\n[domain]\npml_cells = -4\n");
        }),
        "domain.pml_cells"));
  CHECK(contains(error_of([] {
          parse_config("[scenario]\nkind = fiber\n[run]\nmode = sometimes\n");
        }),
        "run.mode"));
  CHECK(contains(error_of([] {
          parse_config("[scenario]\nkind = fiber\nnot a key value line\n");
        }),
        "line 3"));
}

TEST_CASE("field dumps round-trip and reject corrupted files") {
  const auto dir = fresh_dir("nfb1");
  GridSpec s;
  s.nx = 8;
  s.ny = 6;
  s.nz = 5;
  s.dx = s.dy = s.dz = 10e-9;
  s.origin_x = -40e-9;
  s.origin_y = -30e-9;
  s.origin_z = -25e-9;
  YeeGrid g(s);
  for (std::size_t k = 0; k < g.ey.nz; ++k)
    for (std::size_t j = 0; j < g.ey.ny; ++j)
      for (std::size_t i = 0; i < g.ey.nx; ++i)
        g.ey(i, j, k) = double(i) + 10.0 * double(j) - 0.25 * double(k);

  const auto written = dump_grid_fields(g, dir.string());
  CHECK(written.size() == 9);

  DumpHeader h;
  const Array3 d = read_nfb1((dir / "field_ey.nfb1").string(), h);
  CHECK(h.nx == g.ey.nx);
  CHECK(h.ny == g.ey.ny);
  CHECK(h.nz == g.ey.nz);
  CHECK(h.component == 1);
  CHECK(h.dx == 10e-9);
  // Ey nodes sit on integer x, so the dump origin matches the grid origin in x
  CHECK(h.origin_x == doctest::Approx(-40e-9));
  CHECK(h.origin_y == doctest::Approx(-30e-9 + 5e-9));
  CHECK(d.v == g.ey.v);

  // permittivity dumps exist and default to vacuum
  DumpHeader he;
  const Array3 eps = read_nfb1((dir / "eps_y.nfb1").string(), he);
  CHECK(he.component == 7);
  for (double v : eps.v) CHECK(v == doctest::Approx(1.0));

  const std::string good = read_file(dir / "field_ey.nfb1");
  write_file(dir / "trunc.nfb1", good.substr(0, good.size() / 2));
  DumpHeader hx;
  CHECK(contains(error_of([&] { read_nfb1((dir / "trunc.nfb1").string(), hx); }),
                 "trunc"));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  write_file(dir / "magic.nfb1", bad_magic);
  CHECK_THROWS_AS(read_nfb1((dir / "magic.nfb1").string(), hx), IoError);
  CHECK_THROWS_AS(read_nfb1((dir / "missing.nfb1").string(), hx), IoError);
}

TEST_CASE("manifest checksums match the emitted files") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(to_hex(fnv1a64("hello world\n", 12)) == "782e1488cd5a68b7");

  const auto dir = fresh_dir("manifest");
  write_file(dir / "a.csv", "x,y\n1,2\n");
  write_file(dir / "b.csv", "hello world\n");

  RunManifest m;
  m.kind = "fiber";
  m.scale = "desk";
  m.config_text = "[scenario]\nkind = fiber\n";
  m.nx = 8;
  m.ny = 6;
  m.nz = 5;
  m.mesh_step = 25e-9;
  m.dt = 1e-17;
  m.steps = 123;
  m.wall_seconds = 0.5;
  m.termination = "converged";
  m.threads = 2;
  write_manifest(m, dir.string(), {"a.csv", "b.csv"});

  const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(j["solver_version"] == kSolverVersion);
  CHECK(j["kind"] == "fiber");
  CHECK(j["grid"]["nx"] == 8);
  CHECK(j["steps"] == 123);
  CHECK(j["complete"] == true);
  CHECK(j["outputs"].size() == 2);
  CHECK(j["outputs"][1]["name"] == "b.csv");
  CHECK(j["outputs"][1]["bytes"] == 12);
  CHECK(j["outputs"][1]["fnv1a64"] == "782e1488cd5a68b7");
  const std::string a = read_file(dir / "a.csv");
  CHECK(j["outputs"][0]["fnv1a64"] == to_hex(fnv1a64(a.data(), a.size())));

  CHECK_THROWS_AS(write_manifest(m, dir.string(), {"nope.csv"}), IoError);
}

TEST_CASE("cli validate, oracle, and usage errors map to exit codes") {
  const auto dir = fresh_dir("cli");
  write_file(dir / "good.cfg", kTinyFiberConfig);
  {
    StreamCapture cap;
    CHECK(run_cli({"validate", "--config", (dir / "good.cfg").string()}) == 0);
    CHECK(cap.out.str() == "ok\n");
  }
  {
    // groove cut deeper than the fiber radius: named violation, exit 1
    write_file(dir / "deep.cfg",
               "[scenario]\nkind = nfbc\n[grating]\nn_per_side = 4\ndepth = 2e-7\n"
               "[run]\nmax_time = 1e-12\n");
    StreamCapture cap;
    CHECK(run_cli({"validate", "--config", (dir / "deep.cfg").string()}) == 1);
    CHECK(contains(cap.out.str(), "grating.depth"));
  }
  {
    write_file(dir / "unknown.cfg", "[scenario]\nkind = fiber\nbogus = 1\n");
    StreamCapture cap;
    CHECK(run_cli({"validate", "--config", (dir / "unknown.cfg").string()}) == 1);
    CHECK(contains(cap.err.str(), "unknown key"));
  }
  {
    StreamCapture cap;
    CHECK(run_cli({"validate", "--config", (dir / "missing.cfg").string()}) == 3);
  }
  {
    StreamCapture cap;
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({"run", "--config", "x"}) == 1); // --out is required
    CHECK(run_cli({"oracle", "mie", "--radius", "-1"}) == 1);
  }
  {
    StreamCapture cap;
    CHECK(run_cli({"oracle", "quasistatic", "--index", "2.417"}) == 0);
    CHECK(contains(cap.out.str(), "0.3825608855"));
  }
  {
    StreamCapture cap;
    CHECK(run_cli({"oracle", "tmm", "--pairs", "0", "--points", "5"}) == 0);
    std::istringstream lines(cap.out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "wavelength_m,transmission,reflection");
    int rows = 0;
    while (std::getline(lines, line)) {
      CHECK(contains(line, ",1,0"));
      ++rows;
    }
    CHECK(rows == 5);
  }
  {
    StreamCapture cap;
    const auto profile = dir / "he11.csv";
    CHECK(run_cli({"oracle", "mode", "--profile-out", profile.string()}) == 0);
    CHECK(contains(cap.out.str(), "1.8845426"));  // V number of the stock fiber
    CHECK(contains(cap.out.str(), "1.13467471")); // its effective index
    const CsvTable t = read_csv(profile.string());
    CHECK(t.header[0] == "r_m");
    CHECK(t.rows.size() > 100);
    // the evanescent outside field jumps at the surface and then decays
    std::size_t at_surface = 0, outside = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.rows[r][0] <= 150e-9) at_surface = r;
      if (t.rows[r][0] <= 300e-9) outside = r;
    }
    CHECK(t.rows[at_surface + 1][1] > t.rows[at_surface][1]);
    CHECK(t.rows[outside][1] < t.rows[at_surface + 1][1]);
  }
}

TEST_CASE("cli run is byte-deterministic across thread counts") {
  const auto dir = fresh_dir("run_det");
  write_file(dir / "tiny.cfg", kTinyFiberConfig);
  const std::string cfg = (dir / "tiny.cfg").string();
  {
    StreamCapture cap;
    CHECK(run_cli({"run", "--config", cfg, "--out", (dir / "t1").string(),
                   "--threads", "1"}) == 0);
    CHECK(contains(cap.out.str(), "termination max_time_reached"));
    CHECK(run_cli({"run", "--config", cfg, "--out", (dir / "t2").string(),
                   "--threads", "2"}) == 0);
  }
  for (const char* name : {"summary.csv", "cutline_x.csv", "cutline_y.csv"}) {
    const std::string a = read_file(dir / "t1" / name);
    const std::string b = read_file(dir / "t2" / name);
    CHECK(!a.empty());
    CHECK(a == b);
  }
  // manifests differ in wall time but agree on every output checksum
  const auto j1 = nlohmann::json::parse(read_file(dir / "t1" / "manifest.json"));
  const auto j2 = nlohmann::json::parse(read_file(dir / "t2" / "manifest.json"));
  CHECK(j1["complete"] == true);
  CHECK(j1["outputs"] == j2["outputs"]);
  CHECK(j1["config"] == j2["config"]);
  CHECK(j1["threads"] == 1);
  CHECK(j2["threads"] == 2);

  // the config snapshot embedded in the manifest reproduces the run setup
  const ScenarioConfig snap = parse_config(j1["config"].get<std::string>());
  CHECK(snap.kind == ScenarioKind::Fiber);
  CHECK(canonical_config(snap) == j1["config"].get<std::string>());

  {
    StreamCapture cap;
    CHECK(run_cli({"run", "--config", cfg, "--out", "/dev/null/sub"}) == 3);
  }
}

TEST_CASE("cli sweep input validation") {
  const auto dir = fresh_dir("sweep_cli");
  write_file(dir / "empty.cfg",
             "[scenario]\nkind = nfbc\n[sweep]\nns = \nsizes = 25e-9\n"
             "reference_field = 2e6\n[run]\nmax_time = 1e-12\n");
  {
    StreamCapture cap;
    CHECK(run_cli({"sweep", "--config", (dir / "empty.cfg").string(), "--out",
                   (dir / "out").string()}) == 1);
    CHECK(contains(cap.err.str(), "empty sweep"));
  }
  write_file(dir / "fiber.cfg", kTinyFiberConfig);
  {
    StreamCapture cap;
    CHECK(run_cli({"sweep", "--config", (dir / "fiber.cfg").string(), "--out",
                   (dir / "out2").string()}) == 1); // sweeps need kind nfbc
  }
}
