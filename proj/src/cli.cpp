#include "orbmod/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "orbmod/defcplx.hpp"
#include "orbmod/metric.hpp"
#include "orbmod/scan.hpp"
#include "orbmod/su3.hpp"
#include "orbmod/zero_fiber.hpp"

namespace orbmod {

namespace {

using nlohmann::json;

constexpr const char* kPolicy =
    "finite-start certificate: each ζ cell is sampled by k diagonal-orbit and k nilpotent starts; "
    "points not reached by a start are not examined";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `@file.json` reads a structured group spec from disk.
std::string group_spec(const std::string& arg) {
  return !arg.empty() && arg.front() == '@' ? read_file(arg.substr(1)) : arg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write '" + path + "'");
  os << text;
}

std::string summary_path(const std::string& out) {
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + ".summary.csv";
}

std::vector<Real> parse_reals(const std::string& text) {
  // same grammar as ζ: comma list of decimals or p/q
  return parse_zeta(text);
}

/// "1, 0.5+0.3i, -0.2i"
Vec parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) throw ValidationError("empty entry in complex list '" + text + "'");
    const char* p = tok.c_str();
    char* end = nullptr;
    Real re = 0, im = 0;
    if (tok == "i" || tok == "+i") {
      im = 1;
      end = const_cast<char*>(p + tok.size());
    } else if (tok == "-i") {
      im = -1;
      end = const_cast<char*>(p + tok.size());
    } else {
      const Real first = std::strtod(p, &end);
      if (end == p) throw ValidationError("bad complex number '" + tok + "'");
      if (*end == 'i') {
        im = first;
        ++end;
      } else {
        re = first;
        if (*end == '+' || *end == '-') {
          const char* q = end;
          if ((q[0] == '+' || q[0] == '-') && q[1] == 'i' && q[2] == '\0') {
            im = q[0] == '-' ? -1 : 1;
            end += 2;
          } else {
            im = std::strtod(q, &end);
            if (end == q || *end != 'i') throw ValidationError("bad complex number '" + tok + "'");
            ++end;
          }
        }
      }
    }
    if (*end != '\0') throw ValidationError("bad complex number '" + tok + "'");
    out.emplace_back(re, im);
  }
  Vec v(static_cast<Eigen::Index>(out.size()));
  for (size_t i = 0; i < out.size(); ++i) v(static_cast<Eigen::Index>(i)) = out[i];
  return v;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index a = 0; a < rows; ++a) {
    const auto& row = j[static_cast<size_t>(a)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("ragged matrix");
    for (Eigen::Index b = 0; b < cols; ++b) {
      const auto& e = row[static_cast<size_t>(b)];
      if (e.is_number()) m(a, b) = e.get<Real>();
      else if (e.is_array() && e.size() == 2) m(a, b) = Complex(e[0].get<Real>(), e[1].get<Real>());
      else throw ValidationError("matrix entries must be numbers or [re, im] pairs");
    }
  }
  return m;
}

/// {"components": [M_1, ..., M_n], "character_basis": bool}
EquivariantPoint point_from_file(const GroupData& data, const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("malformed start file '" + path + "': " + e.what());
  }
  const json& comps = j.is_object() ? j.at("components") : j;
  const bool character = j.is_object() && j.value("character_basis", false);
  std::vector<Mat> ms;
  for (const auto& c : comps) ms.push_back(character ? from_character_basis(data, matrix_from_json(c)) : matrix_from_json(c));
  return make_point(data, std::move(ms));
}

struct Common {
  std::string group = "1/3(1,1,1)";
  std::uint64_t seed = 0;
  Real tol = 1e-10;
  int max_iter = 20000;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  // consumed by expand_config before parsing; declared for --help
  sub->add_option("--config", "file of `key = value` lines using the long flag names (# starts a comment)");
  sub->add_option("--group", c.group, "1/r(a_1,...,a_n), or @file.json with {\"generators\": [...]}")
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "flow tolerance on |μ − ζ|")->capture_default_str();
  sub->add_option("--max-iter", c.max_iter, "flow iteration cap")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default: stdout)");
  sub->add_option("--threads", c.threads, "worker cap (ORBMOD_THREADS also caps)");
}

FlowOptions flow_options(const Common& c) {
  FlowOptions fo;
  fo.tol = c.tol;
  fo.max_iter = c.max_iter;
  return fo;
}

int cmd_solve(const Common& c, const std::string& zeta_text, const std::string& start, bool dump_tangent,
              std::ostream& out) {
  const auto data = GroupData::load(group_spec(c.group));
  const CentralParameter z = zeta_text.empty() ? zero_zeta(*data) : make_zeta(*data, parse_zeta(zeta_text));
  Rng rng(c.seed);
  EquivariantPoint a0;
  if (start == "nilpotent") {
    a0 = nilpotent_start(*data, rng, false);
  } else if (start == "nilpotent-random") {
    a0 = nilpotent_start(*data, rng, true);
  } else if (start == "diagonal") {
    Vec lambda(data->n());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = complex_normal(rng);
    a0 = diagonal_point(*data, make_orbit(*data, lambda));
  } else if (start == "zero") {
    a0 = zero_point(*data);
  } else {
    a0 = point_from_file(*data, start);
  }
  const FlowResult flow = kempf_ness_flow(*data, a0, z, flow_options(c));

  ScanConfig cfg;
  cfg.dump_tangent = dump_tangent;
  ModuliPointReport rep;
  rep.zeta = z.coefficients;
  rep.kind = start;
  rep.status = to_string(flow.status);
  rep.mu_residual = flow.mu_residual;
  rep.psi_residual = flow.psi_residual;
  rep.iterations = flow.iterations;
  rep.norm = flow.alpha.norm();
  if (flow.status == FlowStatus::converged) analyse_point(*data, cfg, flow.alpha, rep);

  json j{{"group", data->group().spec}, {"seed", c.seed}, {"zeta", to_json(z)}, {"flow", to_json(flow, true)}};
  json report = to_json(rep);
  for (const char* k : {"cell", "start", "mu_residual", "psi_residual", "iterations", "status", "zeta"}) report.erase(k);
  j["report"] = report;
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty()) out << text;
  else write_text(c.out, text);
  return flow.status == FlowStatus::converged ? 0 : 2;
}

int cmd_scan(const Common& c, const std::vector<std::string>& zetas, int box, int starts, bool dump_tangent,
             std::ostream& out, std::ostream& err) {
  ScanConfig cfg;
  cfg.group = group_spec(c.group);
  if (!zetas.empty()) {
    cfg.zetas.emplace();
    for (const auto& z : zetas) cfg.zetas->push_back(parse_zeta(z));
  }
  cfg.zeta_box = box;
  cfg.starts = starts;
  cfg.seed = c.seed;
  cfg.flow = flow_options(c);
  cfg.dump_tangent = dump_tangent;
  cfg.threads = c.threads;
  const ScanResult res = scan_zeta(cfg);

  std::ostringstream jsonl, csv;
  write_jsonl(jsonl, res);
  write_summary_csv(csv, res);
  std::ostream& table = c.out.empty() ? err : out;
  if (c.out.empty()) {
    out << jsonl.str();
  } else {
    write_text(c.out, jsonl.str());
    write_text(summary_path(c.out), csv.str());
  }
  table << "# " << kPolicy << "\n" << csv.str();
  return 0;
}

int cmd_ale(const Common& c, const std::string& zeta_text, const std::string& theta_text,
            const std::string& radii_text, const std::string& csv_path, bool self_test, std::ostream& out) {
  const auto data = GroupData::load(group_spec(c.group));
  AleOptions opts;
  opts.flow.tol = c.tol;
  opts.flow.max_iter = c.max_iter;
  opts.self_test = self_test;
  opts.threads = c.threads;
  Vec theta;
  if (theta_text.empty()) {
    // a fixed generic direction, reproducible without a seed
    theta = Vec::LinSpaced(data->n(), 1.0, 2.0);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) *= std::polar(1.0, 0.7 * static_cast<Real>(i + 1));
  } else {
    theta = parse_complex_list(theta_text);
  }
  const AleReport rep = ale_decay_probe(*data, parse_zeta(zeta_text), theta, parse_reals(radii_text), opts);
  const std::string text = to_json(rep).dump(2) + "\n";
  if (c.out.empty()) out << text;
  else write_text(c.out, text);
  if (!csv_path.empty()) {
    std::ostringstream csv;
    write_csv(csv, rep);
    write_text(csv_path, csv.str());
  }
  for (const auto& s : rep.samples)
    if (!s.ok()) return 2;
  return 0;
}

int cmd_su3(const Common& c, Real a, Real b, std::ostream& out) {
  const auto data = GroupData::load("1/3(1,1,1)");
  const EquivariantPoint p1 = point1(*data, a, b);
  const EquivariantPoint p2 = point2(*data, 0, 0, 1);
  const Real c1 = omega_norm_coefficient(*data, p1);
  const Real c2 = omega_norm_coefficient(*data, p2);
  const Real r1 = point1_reference(a, b);
  const Real r2 = 1.0 / 6.0;
  const Real d1 = std::abs(c1 - r1), d2 = std::abs(c2 - r2);
  const RicciProbe ricci = ricci_flat_probe({c1, c2});
  const Mat m1 = to_character_basis(*data, mu(p1));

  json j{{"point1", {{"A", a}, {"B", b}, {"coefficient", c1}, {"reference", r1}, {"diff", d1}}},
         {"point2", {{"coefficient", c2}, {"reference", r2}, {"diff", d2}}},
         {"mu_point1_diagonal", {m1(0, 0).real(), m1(1, 1).real(), m1(2, 2).real()}},
         {"ricci", to_json(ricci)}};
  out << std::setprecision(12);
  out << "point1(A=" << a << ", B=" << b << "): coefficient " << c1 << "  reference ½(AB/(A²+B²))² = " << r1
      << "  diff " << d1 << "\n";
  out << "point2: coefficient " << c2 << "  reference 1/6 = " << r2 << "  diff " << d2 << "\n";
  out << "Ricci probe: spread " << ricci.spread << "  verdict " << ricci.verdict << "\n";
  if (!c.out.empty()) write_text(c.out, j.dump(2) + "\n");
  return d1 <= 1e-9 && d2 <= 1e-9 ? 0 : 2;
}

/// Replaces `--config FILE` by the file's settings as `--key=value`
/// arguments placed right after the subcommand, so flags given on the
/// command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> files;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      files.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      files.push_back(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  if (files.empty() || rest.size() < 2) return rest;
  std::vector<std::string> settings;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw CLI::FileError::Missing(f);
    // CLI11 only understands whole-line comments, and it merges repeated keys;
    // strip trailing comments and hand it one line at a time
    for (std::string line; std::getline(in, line);) {
      bool quoted = false;
      for (size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') quoted = !quoted;
        if (line[k] == '#' && !quoted) {
          line.erase(k);
          break;
        }
      }
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '[') throw CLI::ConversionError("config sections are not supported: " + line);
      std::istringstream one(line);
      for (const auto& item : CLI::ConfigINI().from_config(one)) {
        // the INI reader splits "1,0,-1" into inputs; every option here takes one string
        std::string value;
        for (size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
        settings.push_back("--" + item.name + "=" + value);
      }
    }
  }
  rest.insert(rest.begin() + 2, settings.begin(), settings.end());
  return rest;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical moduli of Γ-equivariant commuting matrices"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  std::string zeta, start = "nilpotent", theta, radii = "2,4,8,16,32", csv;
  std::vector<std::string> zetas;
  int box = 2, starts = 4;
  bool dump_tangent = false, no_self_test = false;
  Real a = 1, b = 1;

  auto* solve = app.add_subcommand("solve", "one flow from a start to μ⁻¹(ζ), plus a point report");
  add_common(solve, common);
  solve->add_option("--zeta", zeta, "ζ coefficients, e.g. \"-1,0,1\" (default 0)");
  solve->add_option("--start", start, "nilpotent | nilpotent-random | diagonal | zero | path to a JSON point")
      ->capture_default_str();
  solve->add_flag("--dump-tangent", dump_tangent, "include a harmonic basis of the tangent space");

  auto* scan = app.add_subcommand("scan", "sweep a ζ grid and report every sampled point");
  add_common(scan, common);
  scan->add_option("--zeta", zetas, "explicit ζ (repeatable); replaces the box grid")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  scan->add_option("--zeta-box", box, "integer bound B of the ζ box")->capture_default_str();
  scan->add_option("--starts", starts, "k diagonal and k nilpotent starts per cell")->capture_default_str();
  scan->add_flag("--dump-tangent", dump_tangent, "include harmonic tangent bases");

  auto* ale = app.add_subcommand("ale-probe", "metric decay towards the flat cone along a ray");
  add_common(ale, common);
  ale->add_option("--zeta", zeta, "ζ coefficients")->required();
  ale->add_option("--theta", theta, "ray direction, e.g. \"1, 0.5+0.3i, -0.2i\"");
  ale->add_option("--radii", radii, "comma list of radii")->capture_default_str();
  ale->add_option("--csv", csv, "also write a per-radius CSV");
  ale->add_flag("--no-self-test", no_self_test, "skip the direct flow at each radius");

  auto* su3 = app.add_subcommand("example-su3", "the two SU(3) worked examples on C³/Z₃");
  add_common(su3, common);
  su3->add_option("--A", a, "point1 parameter A")->capture_default_str();
  su3->add_option("--B", b, "point1 parameter B")->capture_default_str();

  std::vector<char*> argv;
  std::vector<std::string> owned;
  try {
    owned = expand_config(args);
    for (auto& s : owned) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(common, zeta, start, dump_tangent, out);
    if (scan->parsed()) return cmd_scan(common, zetas, box, starts, dump_tangent, out, err);
    if (ale->parsed()) return cmd_ale(common, zeta, theta, radii, csv, !no_self_test, out);
    if (su3->parsed()) return cmd_su3(common, a, b, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace orbmod
