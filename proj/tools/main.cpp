// ringpot command line front end.
//
// Subcommands:
//   eval      point evaluations of the Green/Robin functions and gradients
//   r0        the two-point blow-up radius, optional f/g profile table
//   solve     multi-start critical-point search for the functional
//   validate  oracle suites (finite differences, Poisson solve, boundary data)
//
// Every JSON output is {"manifest": ..., "result": ...}; identical inputs and
// seed reproduce identical bodies apart from the timestamp. CSV files are
// plain header + rows and are referenced by path from the JSON record.
//
// Exit codes: 0 success, 2 input error, 3 no start converged, 4 validation
// failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ringpot/core.hpp"
#include "ringpot/functional.hpp"
#include "ringpot/green.hpp"
#include "ringpot/oracle.hpp"
#include "ringpot/solver.hpp"

using nlohmann::json;
using namespace ringpot;

namespace {

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, double a, double b, double tol, std::uint64_t seed) {
  return json{{"command", command}, {"a", a},           {"b", b},
              {"tol", tol},         {"seed", seed},     {"timestamp", iso_timestamp()},
              {"version", ringpot::version}};
}

void emit(const json& doc, const std::string& out_path) {
  std::string body = doc.dump(2);
  body.push_back('\n');
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << body;
  }
}

PolarPoint parse_point(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("point must be given as r,theta (polar)");
  }
  std::size_t used1 = 0, used2 = 0;
  double r = std::stod(s.substr(0, comma), &used1);
  double theta = std::stod(s.substr(comma + 1), &used2);
  if (used1 != comma || used2 != s.size() - comma - 1) {
    throw std::invalid_argument("point must be given as r,theta (polar)");
  }
  return {r, theta};
}

json point_json(const PolarPoint& p) {
  PlanarPoint c = to_planar(p);
  return json{{"r", p.r}, {"theta", p.theta}, {"x1", c.x1}, {"x2", c.x2}};
}

json gradient_json(const GradientValue& g) {
  return json{{"x1", g.vector.x1},
              {"x2", g.vector.x2},
              {"radial_part", g.radial_part},
              {"tangential_part", g.tangential_part}};
}

json report_json(const CriticalPointReport& rep) {
  json points = json::array();
  for (const auto& p : rep.config.points) points.push_back(point_json(p));
  json j{{"start_index", rep.start_index},
         {"converged", rep.converged},
         {"residual_norm", rep.residual_norm},
         {"iterations", rep.iterations},
         {"resamples", rep.resamples},
         {"cluster_id", rep.cluster_id},
         {"points", points}};
  if (rep.antipodality_gap) j["antipodality_gap"] = *rep.antipodality_gap;
  if (rep.radius_gap) j["radius_gap"] = *rep.radius_gap;
  if (rep.radius_spread) j["radius_spread"] = *rep.radius_spread;
  if (rep.angle_gap_spread) j["angle_gap_spread"] = *rep.angle_gap_spread;
  return j;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- eval

int cmd_eval(double a, double b, const std::string& what, const std::string& y_str,
             const std::string& x_str, double tol, const std::string& out_path) {
  Annulus ann(a, b);
  PolarPoint y = parse_point(y_str);
  json result{{"what", what}, {"y", point_json(y)}};
  SeriesControl ctrl;

  if (what == "robin" || what == "grad-robin") {
    std::array<double, 1> radii{y.r};
    ctrl = auto_truncation(ann, radii, tol, 512,
                           what == "robin" ? SeriesKind::value : SeriesKind::derivative);
    if (what == "robin") {
      result["value"] = robin(ann, y, ctrl);
    } else {
      result["gradient"] = gradient_json(grad_robin(ann, y, ctrl));
    }
  } else if (what == "green" || what == "grad-green") {
    if (x_str.empty()) throw std::invalid_argument("--x is required for " + what);
    PolarPoint x = parse_point(x_str);
    result["x"] = point_json(x);
    std::array<double, 2> radii{x.r, y.r};
    ctrl = auto_truncation(ann, radii, tol, 512,
                           what == "green" ? SeriesKind::value : SeriesKind::derivative);
    if (what == "green") {
      result["value"] = green(ann, x, y, ctrl);
    } else {
      result["gradient"] = gradient_json(grad_green_x(ann, x, y, ctrl));
    }
  } else {
    throw std::invalid_argument("--what must be one of green|robin|grad-green|grad-robin");
  }
  result["m_used"] = ctrl.m_used;
  result["tail_bound"] = ctrl.bound;

  emit(json{{"manifest", manifest("eval", a, b, tol, 0)}, {"result", result}}, out_path);
  return 0;
}

// ---------------------------------------------------------------- r0

int cmd_r0(double a, double b, double tol, const std::string& csv_path, int n_grid,
           const std::string& out_path) {
  Annulus ann(a, b);
  RootReport root = solve_r0(ann, tol);
  json result{{"r0", root.r0},
              {"residual", root.residual},
              {"bracket", json::array({root.bracket_lo, root.bracket_hi})},
              {"final_width", root.final_width},
              {"iterations", root.iterations}};

  if (!csv_path.empty()) {
    std::vector<double> rs;
    double eps = 0.01 * ann.width();
    for (int i = 0; i < n_grid; ++i) {
      rs.push_back(a + eps + (ann.width() - 2 * eps) * i / (n_grid - 1));
    }
    rs.push_back(root.bracket_lo);  // sqrt(ab), where g vanishes
    rs.push_back(root.bracket_hi);  // a^(1/4) b^(3/4), where f vanishes
    rs.push_back(root.r0);
    std::sort(rs.begin(), rs.end());
    std::ofstream f(csv_path);
    if (!f) throw std::invalid_argument("cannot open CSV file: " + csv_path);
    f << "r,f,g\n";
    for (double r : rs) {
      ProfilePoint p = profile(ann, r, SeriesControl{1e-14, 2048});
      f << fmt17(p.r) << ',' << fmt17(p.f) << ',' << fmt17(p.g) << '\n';
    }
    result["profile_csv"] = csv_path;
  }

  emit(json{{"manifest", manifest("r0", a, b, tol, 0)}, {"result", result}}, out_path);
  return 0;
}

// ---------------------------------------------------------------- solve

int cmd_solve(double a, double b, int l, int n_starts, std::uint64_t seed, double tol,
              int max_iterations, const std::string& out_path) {
  Annulus ann(a, b);
  SolveOptions opts;
  opts.seed = seed;
  opts.series_tol = tol;
  if (max_iterations > 0) opts.max_iterations = max_iterations;
  auto reports = find_critical_points(ann, l, n_starts, opts);

  json arr = json::array();
  int converged = 0;
  for (const auto& rep : reports) {
    arr.push_back(report_json(rep));
    if (rep.converged) ++converged;
  }
  emit(json{{"manifest", manifest("solve", a, b, tol, seed)}, {"result", arr}}, out_path);
  return converged == 0 ? 3 : 0;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool pass;
  double value;
  std::string threshold;
};

void run_green_suite(const Annulus& ann, double tol, SplitMix64& rng, std::vector<Check>& out) {
  // symmetry + positivity on random interior pairs with series ratio <= 0.9
  double worst_sym = 0.0, min_g = std::numeric_limits<double>::infinity();
  SeriesControl policy;
  policy.tol = tol;
  int accepted = 0;
  while (accepted < 200) {
    PolarPoint x(ann.a + ann.width() * rng.uniform(), two_pi * rng.uniform());
    PolarPoint y(ann.a + ann.width() * rng.uniform(), two_pi * rng.uniform());
    if (pair_ratio(ann, x.r, y.r) > 0.9) continue;
    if (distance(x, y) < 1e-3 * ann.width()) continue;
    ++accepted;
    double gxy = green(ann, x, y, policy);
    double gyx = green(ann, y, x, policy);
    worst_sym = std::max(worst_sym, std::abs(gxy - gyx));
    min_g = std::min(min_g, gxy);
  }
  out.push_back({"green_symmetry", worst_sym < 2.0 * tol, worst_sym, "< 2*tol"});
  // strict positivity holds by the maximum principle, but the evaluation can
  // only certify it to within its own tail bound (between near-antipodal
  // points on a relatively thin annulus the true value sits below any
  // practical tolerance)
  out.push_back({"green_positivity", min_g > -2.0 * tol, min_g, "> -2*tol"});

  // boundary data at controlled ratio
  PolarPoint yb(0.5 * (ann.a + ann.b), 0.3);
  double qb = std::max(pair_ratio(ann, ann.b, yb.r), pair_ratio(ann, ann.a, yb.r));
  int M = truncation_for_ratio(qb, tol).m_used;
  double bres = boundary_residual(ann, yb, M, 64);
  out.push_back({"boundary_residual", bres < 10.0 * tol, bres, "< 10*tol"});

  // discrete harmonicity of the regular part
  double h = 5e-3 * ann.width();
  std::vector<PolarPoint> samples;
  while (samples.size() < 6) {
    PolarPoint s(ann.a + (0.25 + 0.5 * rng.uniform()) * ann.width(), two_pi * rng.uniform());
    if (distance(s, yb) < 5.0 * h) continue;
    samples.push_back(s);
  }
  FDReport fd = fd_harmonic_check(ann, yb, samples, h);
  bool ok = fd.order_estimate > 1.5 && fd.order_estimate < 2.5;
  out.push_back({"harmonicity_order", ok, fd.order_estimate, "in [1.5, 2.5]"});
}

void run_gradient_suite(const Annulus& ann, double tol, SplitMix64& rng,
                        std::vector<Check>& out) {
  const double h = 1e-5 * ann.width();  // third derivatives scale like width^-3
  const double margin = 0.05 * ann.width();
  SeriesControl policy;
  policy.tol = tol;
  auto sample_point = [&] {
    return PolarPoint(ann.a + margin + (ann.width() - 2 * margin) * rng.uniform(),
                      two_pi * rng.uniform());
  };

  double worst_green = 0.0, worst_robin = 0.0, worst_ham = 0.0;
  int accepted = 0;
  while (accepted < 200) {
    PolarPoint x = sample_point(), y = sample_point();
    if (pair_ratio(ann, x.r, y.r) > 0.85) continue;
    if (pair_ratio(ann, x.r, x.r) > 0.85) continue;  // the robin check below sits at x
    if (distance(x, y) < 0.1 * ann.width()) continue;
    ++accepted;
    // one truncation order per sample, so the differenced function is smooth
    SeriesControl cv = truncation_for_ratio(pair_ratio(ann, x.r, y.r), policy.tol);
    GradientValue g = grad_green_x(ann, x, y, policy);
    PlanarPoint fd = central_gradient(
        [&](const PlanarPoint& p) { return green(ann, to_polar(p), y, cv); }, to_planar(x),
        h);
    worst_green = std::max(worst_green, norm(g.vector - fd));

    SeriesControl cr = truncation_for_ratio(pair_ratio(ann, x.r, x.r), policy.tol);
    GradientValue gr = grad_robin(ann, x, policy);
    PlanarPoint fdr = central_gradient(
        [&](const PlanarPoint& p) { return robin(ann, to_polar(p), cr); }, to_planar(x), h);
    worst_robin = std::max(worst_robin, norm(gr.vector - fdr));
  }

  for (int c = 0; c < 50; ++c) {
    Configuration config;
    config.points.push_back(sample_point());
    PolarPoint p = sample_point();
    while (distance(config.points[0], p) < 0.1 * ann.width()) p = sample_point();
    config.points.push_back(p);
    std::array<double, 2> config_radii{config.points[0].r, config.points[1].r};
    if (slowest_ratio(ann, config_radii) > 0.85) continue;  // robin and green parts both enter
    SeriesControl cf = truncation_for_ratio(slowest_ratio(ann, config_radii), policy.tol);
    auto grads = grad_hamiltonian(ann, config, policy);
    for (int i = 0; i < 2; ++i) {
      PlanarPoint fd = central_gradient(
          [&](const PlanarPoint& p) {
            Configuration c2 = config;
            c2.points[i] = to_polar(p);
            return hamiltonian(ann, c2, cf);
          },
          to_planar(config.points[i]), h);
      worst_ham = std::max(worst_ham, norm(grads[i].vector - fd));
    }
  }

  out.push_back({"grad_green_fd", worst_green <= 1e-7, worst_green, "<= 1e-7"});
  out.push_back({"grad_robin_fd", worst_robin <= 1e-7, worst_robin, "<= 1e-7"});
  out.push_back({"grad_hamiltonian_fd", worst_ham <= 1e-7, worst_ham, "<= 1e-7"});
}

void run_poisson_suite(const Annulus& ann, int n_grid, std::vector<Check>& out) {
  if (n_grid % 2 != 0) throw std::invalid_argument("--n-grid must be even");
  PolarPoint y(0.5 * (ann.a + ann.b), 0.0);  // mid-radius node for even n_grid
  PoissonGrid grid = fd_poisson_green(ann, y, n_grid, n_grid);
  double gap = poisson_series_gap(grid, ann, y, 0.2 * ann.width());
  double flux_err = std::abs(grid.flux - two_pi) / two_pi;
  // 5e-3 is the agreement level of the reference setup (unit-width annulus
  // around r = 1.5 at 256^2). The error scales with the squared mesh size
  // relative to the domain width; scale the threshold accordingly and keep
  // 1.5x headroom for the higher-order geometry terms the model drops.
  auto mesh2 = [](double width, double r_mid, double dr, double dtheta) {
    double ang = r_mid * dtheta / width, rad = dr / width;
    return ang * ang + rad * rad;
  };
  double threshold = 7.5e-3 * mesh2(ann.width(), y.r, grid.dr, grid.dtheta) /
                     mesh2(1.0, 1.5, 1.0 / 256, two_pi / 256);
  out.push_back({"poisson_series_gap", gap <= threshold, gap,
                 "<= 1.5 x the 256^2 reference level, mesh-scaled"});
  out.push_back({"poisson_flux", flux_err <= 0.01, flux_err, "|flux-2pi|/2pi <= 1%"});
}

int cmd_validate(double a, double b, const std::string& suite, double tol, int n_grid,
                 std::uint64_t seed, const std::string& out_path) {
  Annulus ann(a, b);
  SplitMix64 rng(seed);
  std::vector<Check> checks;
  if (suite == "green" || suite == "all") run_green_suite(ann, tol, rng, checks);
  if (suite == "gradients" || suite == "all") run_gradient_suite(ann, tol, rng, checks);
  if (suite == "poisson" || suite == "all") run_poisson_suite(ann, n_grid, checks);
  if (checks.empty()) {
    throw std::invalid_argument("--suite must be one of green|gradients|poisson|all");
  }

  json arr = json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    arr.push_back(json{
        {"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}});
    all_pass = all_pass && c.pass;
  }
  emit(json{{"manifest", manifest("validate", a, b, tol, seed)},
            {"result", json{{"suite", suite}, {"checks", arr}, {"pass", all_pass}}}},
       out_path);
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green/Robin functions on an annulus and blow-up point location"};
  app.require_subcommand(1);

  double a = 1.0, b = 2.0, tol = 1e-10;
  std::uint64_t seed = 0;
  std::string out_path, x_str, y_str, what = "green", csv_path, suite = "all";
  int l = 2, n_starts = 20, n_grid = 200, poisson_grid = 256;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--a", a, "inner radius")->required();
    sub->add_option("--b", b, "outer radius")->required();
    sub->add_option("--tol", tol, "series tolerance (default 1e-10)");
    sub->add_option("--out", out_path, "write JSON here instead of stdout");
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate green/robin functions or gradients");
  add_common(eval);
  eval->add_option("--y", y_str, "pole point as r,theta")->required();
  eval->add_option("--x", x_str, "evaluation point as r,theta (green/grad-green)");
  eval->add_option("--what", what, "green|robin|grad-green|grad-robin")->required();

  CLI::App* r0 = app.add_subcommand("r0", "solve the two-point radius equation f(r) = g(r)");
  add_common(r0);
  r0->add_option("--profile-csv", csv_path, "also write an r,f,g table here");
  r0->add_option("--n-grid", n_grid, "rows in the profile table (default 200)");

  CLI::App* solve = app.add_subcommand("solve", "multi-start critical point search");
  add_common(solve);
  solve->add_option("--points", l, "number of points in the configuration")->required();
  solve->add_option("--starts", n_starts, "number of random starts (default 20)");
  solve->add_option("--seed", seed, "random seed (default 0)");
  int max_iterations = 0;
  solve->add_option("--max-iterations", max_iterations, "iteration cap per start (default 500)");

  CLI::App* validate = app.add_subcommand("validate", "run oracle suites");
  add_common(validate);
  validate->add_option("--suite", suite, "green|gradients|poisson|all (default all)");
  validate->add_option("--n-grid", poisson_grid, "poisson grid resolution (default 256)");
  validate->add_option("--seed", seed, "random seed for sampled checks (default 0)");

  try {
    app.parse(argc, argv);
    if (eval->parsed()) return cmd_eval(a, b, what, y_str, x_str, tol, out_path);
    if (r0->parsed()) return cmd_r0(a, b, tol, csv_path, n_grid, out_path);
    if (solve->parsed()) return cmd_solve(a, b, l, n_starts, seed, tol, max_iterations, out_path);
    if (validate->parsed())
      return cmd_validate(a, b, suite, tol, poisson_grid, seed, out_path);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
