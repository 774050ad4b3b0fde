#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "orbmod/cli.hpp"
#include "orbmod/scan.hpp"

using namespace orbmod;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "orbmod");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return std::string(P_tmpdir) + "/orbmod_test_" + name; }

std::string jsonl(const ScanResult& r) {
  std::ostringstream os;
  write_jsonl(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("ζ grid: the trace-zero integer points of the box") {
  const auto data = GroupData::load("1/3(1,1,1)");
  for (int b = 0; b <= 3; ++b) {
    int brute = 0;
    for (int x = -b; x <= b; ++x)
      for (int y = -b; y <= b; ++y)
        for (int z = -b; z <= b; ++z) brute += x + y + z == 0;
    CHECK(static_cast<int>(zeta_grid(*data, b).size()) == brute);
  }
  CHECK(zeta_grid(*data, 2).size() == 19);
  for (const auto& z : zeta_grid(*data, 2)) CHECK(z[0] + z[1] + z[2] == 0.0);
  CHECK_THROWS_AS(zeta_grid(*data, -1), ValidationError);

  // weighted trace for the quaternion group: one block has d = 2
  const auto q8 = GroupData::load(testing::kQuaternionSpec);
  for (const auto& z : zeta_grid(*q8, 1)) {
    Real t = 0;
    for (size_t i = 0; i < z.size(); ++i) {
      const int d = q8->centre().structure.blocks[i].irrep_dim;
      t += z[i] * d * d;
    }
    CHECK(t == 0.0);
  }
}

TEST_CASE("wall test") {
  const auto data = GroupData::load("1/3(1,1,1)");
  CHECK(wall_free(*data, {1, 1, -2}));
  CHECK(wall_free(*data, {-2, 1, 1}));
  CHECK_FALSE(wall_free(*data, {-1, 0, 1}));
  CHECK_FALSE(wall_free(*data, {0, 0, 0}));
}

TEST_CASE("empty grid, empty report") {
  ScanConfig cfg;
  cfg.zetas.emplace();
  const auto r = scan_zeta(cfg);
  CHECK(r.points.empty());
  CHECK(r.cells.empty());
  CHECK(jsonl(r).empty());
}

TEST_CASE("generic ζ: every converged sample is smooth with a 3-dimensional tangent space") {
  ScanConfig cfg;
  cfg.zetas = std::vector<std::vector<Real>>{{1, 1, -2}, {-1, 2, -1}};
  cfg.starts = 3;
  const auto r = scan_zeta(cfg);
  CHECK(r.points.size() == 12);
  int converged = 0;
  for (const auto& p : r.points) {
    if (p.status != "converged") continue;
    ++converged;
    REQUIRE(p.jet_max);
    CHECK(*p.jet_max <= 1e-8);
    CHECK(p.h01 == 3);
    CHECK(p.stabilizer_dim == 0);
    CHECK(p.omega);
    CHECK(p.generic);
  }
  CHECK(converged >= 6);
  for (const auto& c : r.cells) CHECK(c.verdict == "smooth-on-samples");
}

TEST_CASE("ζ = 0: the cone point carries a quadratic jet") {
  ScanConfig cfg;
  cfg.zetas = std::vector<std::vector<Real>>{{0, 0, 0}};
  cfg.starts = 2;
  const auto r = scan_zeta(cfg);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].verdict == "quadratic-jet-present");
  bool cone = false;
  for (const auto& p : r.points)
    if (p.kind == "nilpotent" && p.status == "converged" && p.norm == 0.0) {
      cone = true;
      REQUIRE(p.jet_max);
      CHECK(*p.jet_max > 0.1);
      CHECK(p.h01 == 9);
      CHECK_FALSE(p.omega);
    }
  CHECK(cone);
}

TEST_CASE("failures are recorded per start and never abort the scan") {
  ScanConfig cfg;
  cfg.group = testing::kQuaternionSpec;
  cfg.zetas = std::vector<std::vector<Real>>{{0, 0, 0, 0, 0}};
  cfg.starts = 1;
  const auto r = scan_zeta(cfg);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].status == "converged");
  CHECK(r.points[1].status == "error");
  CHECK_FALSE(r.points[1].error.empty());
  CHECK_FALSE(r.points[1].jet_max);
  const auto j = to_json(r.points[1]);
  CHECK(j.contains("error"));
  CHECK_FALSE(j.contains("jet_max"));

  ScanConfig none;
  none.zetas = std::vector<std::vector<Real>>{{1, 1, -2}};
  none.starts = 0;
  CHECK(scan_zeta(none).cells.at(0).verdict == "unstable-only");
}

TEST_CASE("determinism: same seed, same report, whatever the thread count") {
  ScanConfig cfg;
  cfg.zeta_box = 1;
  cfg.starts = 2;
  cfg.seed = 42;
  cfg.threads = 1;
  const std::string a = strip_timestamps(jsonl(scan_zeta(cfg)));
  const std::string b = strip_timestamps(jsonl(scan_zeta(cfg)));
  cfg.threads = 3;
  const std::string c = strip_timestamps(jsonl(scan_zeta(cfg)));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("timestamp") == std::string::npos);
  cfg.seed = 43;
  CHECK(strip_timestamps(jsonl(scan_zeta(cfg))) != a);
}

TEST_CASE("summary CSV has one row per cell") {
  ScanConfig cfg;
  cfg.zeta_box = 1;
  cfg.starts = 1;
  const auto r = scan_zeta(cfg);
  std::ostringstream os;
  write_summary_csv(os, r);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.cells.size()) + 1);
  CHECK(text.rfind("cell,zeta,generic", 0) == 0);
}

TEST_CASE("cli: example-su3 reproduces the worked coefficients") {
  const auto r = cli({"example-su3", "--A", "1", "--B", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("coefficient 0.125") != std::string::npos);
  CHECK(r.out.find("0.166666666667") != std::string::npos);
  CHECK(r.out.find("not Ricci-flat") != std::string::npos);
  const std::string path = temp_path("su3.json");
  CHECK(cli({"example-su3", "--A", "2", "--B", "3", "--out", path}).code == 0);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("point1").at("diff").get<Real>() <= 1e-9);
  CHECK(j.at("point2").at("diff").get<Real>() <= 1e-9);
  std::remove(path.c_str());
}

TEST_CASE("cli: solve from a nilpotent start") {
  const auto r = cli({"solve", "--group", "1/3(1,1,1)", "--zeta", "-1,0,1", "--start", "nilpotent", "--seed", "7"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("flow").at("status") == "converged");
  CHECK(j.at("flow").at("mu_residual").get<Real>() <= 1e-10);
  CHECK(j.at("report").at("h01") == 3);
  CHECK(j.at("report").contains("omega_coefficient"));
  CHECK_FALSE(j.at("report").contains("tangent"));
  const auto d = cli({"solve", "--zeta", "-1,0,1", "--seed", "7", "--dump-tangent"});
  CHECK(nlohmann::json::parse(d.out).at("report").at("tangent").size() == 3);
}

TEST_CASE("cli: solve from an explicit point file") {
  const std::string path = temp_path("point.json");
  {
    std::ofstream os(path);
    os << R"({"character_basis": true, "components": [
      [[0,1,0],[0,0,2],[0,0,0]], [[0,0,0],[0,0,0],[0,0,0]], [[0,0,0],[0,0,0],[0,0,0]]]})";
  }
  const auto r = cli({"solve", "--zeta", "-1,-3,4", "--start", path});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("flow").at("iterations") == 0);
  std::remove(path.c_str());
}

TEST_CASE("cli: exit codes") {
  CHECK(cli({"scan", "--config", "missing.file"}).code == 1);
  CHECK(cli({"scan", "--config", "missing.file"}).err.find("missing.file") != std::string::npos);
  CHECK(cli({"solve", "--frobnicate"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"solve", "--zeta", "1,1,1"}).code == 1);
  CHECK(cli({"solve", "--group", "1/3(1,x)"}).code == 1);
  CHECK(cli({"solve", "--zeta", "-1,0,1", "--start", "zero"}).code == 2);
  CHECK(cli({"solve", "--zeta", "-1,0,1", "--max-iter", "1"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli: config file, with command-line flags taking precedence") {
  const std::string cfg = temp_path("scan.cfg");
  const std::string out = temp_path("scan.jsonl");
  {
    std::ofstream os(cfg);
    os << "# small scan\nzeta-box = 1\nstarts = 2   # per kind\nseed = 5\nout = " << out << "\n";
  }
  const auto r = cli({"scan", "--config", cfg, "--starts", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("finite-start") != std::string::npos);
  std::ifstream in(out);
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    ++lines;
    CHECK(nlohmann::json::parse(line).contains("timestamp"));
  }
  CHECK(lines == 7 * 2);
  std::ifstream csv(temp_path("scan.summary.csv"));
  CHECK(csv.good());

  const auto again = cli({"scan", "--config", cfg, "--starts", "1", "--out", out + "2"});
  CHECK(again.code == 0);
  std::ifstream a(out), b(out + "2");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(strip_timestamps(sa.str()) == strip_timestamps(sb.str()));
  for (const auto& p : {cfg, out, out + "2", temp_path("scan.summary.csv"), temp_path("scan.summary.csv")})
    std::remove(p.c_str());
}

TEST_CASE("cli: repeated config keys and list values") {
  const std::string cfg = temp_path("zetas.cfg");
  {
    std::ofstream os(cfg);
    os << "zeta = 1,1,-2\nzeta = \"-1,0,1\"  # a wall\nstarts = 1\n";
  }
  const auto r = cli({"scan", "--config", cfg});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::set<std::vector<Real>> seen;
  for (std::string line; std::getline(in, line);) seen.insert(nlohmann::json::parse(line).at("zeta").get<std::vector<Real>>());
  CHECK(seen == std::set<std::vector<Real>>{{1, 1, -2}, {-1, 0, 1}});
  {
    std::ofstream os(cfg);
    os << "[scan]\nseed = 1\n";
  }
  CHECK(cli({"scan", "--config", cfg}).code == 1);
  std::remove(cfg.c_str());
}

TEST_CASE("cli: ale-probe") {
  const auto r = cli({"ale-probe", "--zeta", "1,1,-2", "--radii", "4,8,16", "--theta", "1, 0.5+0.3i, -0.2i"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("slope").get<Real>() < -3.5);
  CHECK(cli({"ale-probe", "--zeta", "1,1,-2", "--theta", "1, 2+"}).code == 1);
  CHECK(cli({"ale-probe", "--radii", "2"}).code == 1);
}
