// gpwaves: travelling-wave laboratory for the Gross-Pitaevskii equation.
//
// Subcommands: disp1d, minimize, branch, obstacle, dyn, kernels, kp, rerun.
// Each run validates its JSON config, writes its artifacts into --out and
// drops a manifest (config echo + artifact hashes) beside them, so that
// `gpwaves rerun <manifest>` reproduces the outputs bit-identically.
//
// Exit codes: 0 ok, 1 numerical failure, 2 config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "gpw/dynamics.hpp"
#include "gpw/field_io.hpp"
#include "gpw/kernels.hpp"
#include "gpw/kp1.hpp"
#include "gpw/manifest.hpp"
#include "gpw/solver.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& require_key(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing config key '" + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key) {
  const json& v = require_key(j, key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

long require_integer(const json& j, const std::string& key) {
  const json& v = require_key(j, key);
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<long>();
}

std::string require_string(const json& j, const std::string& key) {
  const json& v = require_key(j, key);
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> require_number_list(const json& j, const std::string& key) {
  const json& v = require_key(j, key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

int worker_threads() {
  if (const char* env = std::getenv("GPWAVES_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + ov + "'");
    const std::string key = ov.substr(0, eq);
    const std::string val = ov.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (...) {
      parsed = val;  // plain string
    }
    json* cur = &j;
    std::size_t pos = 0;
    while (true) {
      const auto dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (dot == std::string::npos) {
        (*cur)[part] = parsed;
        break;
      }
      cur = &(*cur)[part];
      pos = dot + 1;
    }
  }
  return j;
}

gpw::Grid grid_from_config(const json& cfg, int default_dim) {
  const int dim = cfg.contains("dim") ? static_cast<int>(require_integer(cfg, "dim")) : default_dim;
  const long n = require_integer(cfg, "n");
  const int pts = static_cast<int>(require_integer(cfg, "points"));
  try {
    return gpw::Grid::make(dim, n, pts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad grid: ") + e.what() + " (keys 'dim','n','points')");
  }
}

gpw::MinimizeConfig solver_config(const json& cfg, double target_p) {
  gpw::MinimizeConfig mc(target_p);
  if (cfg.contains("max_iters")) mc.max_iters = static_cast<int>(require_integer(cfg, "max_iters"));
  if (cfg.contains("grad_tol")) mc.grad_tol = require_number(cfg, "grad_tol");
  if (cfg.contains("constraint_tol")) mc.constraint_tol = require_number(cfg, "constraint_tol");
  if (cfg.contains("step_rule")) {
    const std::string r = require_string(cfg, "step_rule");
    if (r == "fixed")
      mc.step_rule = gpw::StepRule::fixed;
    else if (r == "backtracking")
      mc.step_rule = gpw::StepRule::backtracking;
    else
      throw ConfigError("config key 'step_rule' must be 'fixed' or 'backtracking'");
  }
  if (cfg.contains("tau0")) mc.tau0 = require_number(cfg, "tau0");
  if (cfg.contains("init")) {
    const json& init = cfg.at("init");
    const std::string kind = require_string(init, "kind");
    if (kind == "vortex-pair") {
      mc.init = gpw::InitKind::vortex_pair;
      if (init.contains("separation")) mc.init_separation = require_number(init, "separation");
    } else if (kind == "kp-ansatz") {
      mc.init = gpw::InitKind::kp_ansatz;
      mc.init_eps = require_number(init, "eps");
    } else if (kind == "dark-1d") {
      mc.init = gpw::InitKind::dark_1d;
      mc.init_speed = require_number(init, "speed");
    } else if (kind == "file") {
      mc.init = gpw::InitKind::provided;
      mc.init_field = gpw::read_field(require_string(init, "path"));
    } else {
      throw ConfigError("config key 'init.kind' must be vortex-pair|kp-ansatz|dark-1d|file");
    }
  }
  return mc;
}

void write_branch_csv(const std::string& path, const std::vector<gpw::BranchPoint>& pts) {
  gpw::CsvWriter csv(path, {"p_target", "p_achieved", "E", "c_multiplier", "c_slope",
                            "pohozaev_r1", "pohozaev_r2", "n_vortices", "iters", "status"});
  for (const auto& bp : pts) {
    csv.row_mixed({gpw::format_g17(bp.p_target), gpw::format_g17(bp.p_achieved),
                   gpw::format_g17(bp.E), gpw::format_g17(bp.c_multiplier),
                   gpw::format_g17(bp.c_slope), gpw::format_g17(bp.pohozaev.r1),
                   gpw::format_g17(bp.pohozaev.r2), std::to_string(bp.vortices.size()),
                   std::to_string(bp.iters), gpw::to_string(bp.status)});
  }
}

void write_trace_csv(const std::string& path, const gpw::ObservableTrace& tr) {
  gpw::CsvWriter csv(path, {"t", "E", "p", "mass", "xcenter"});
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    csv.row({tr.times[i], tr.energies[i], tr.momenta[i], tr.masses[i], tr.mass_centers[i]});
}

// ---------------------------------------------------------------------------

int run_disp1d(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const double c0 = require_number(cfg, "c_start");
  const double c1 = require_number(cfg, "c_stop");
  const double dc = require_number(cfg, "c_step");
  if (!(dc > 0.0)) throw ConfigError("config key 'c_step' must be positive");
  const std::string name = cfg.value("out", "disp1d.csv");

  const fs::path csv_path = out / name;
  gpw::CsvWriter csv(csv_path.string(), {"c", "energy", "p_renorm", "p_physical", "mass"});
  for (double c = c0; c <= c1 + 1e-12; c += dc) {
    if (c >= gpw::kSqrt2) break;  // cap at the sonic speed
    const auto d = gpw::dispersion(gpw::Wave1D(c));
    csv.row({d.c, d.energy, d.p_renorm, d.p_physical, d.mass});
  }
  man.grid_spec = "closed forms";
  man.add_artifact(csv_path.string());
  return 0;
}

int run_minimize(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const gpw::Grid grid = grid_from_config(cfg, 2);
  const double p = require_number(cfg, "target_p");
  const gpw::MinimizeConfig mc = solver_config(cfg, p);
  const std::string prefix = cfg.value("out_prefix", "minimize");

  const gpw::BranchPoint bp = gpw::minimize_at_momentum(mc, grid);
  std::vector<gpw::BranchPoint> pts;
  pts.push_back(bp);
  const fs::path csv_path = out / (prefix + ".csv");
  write_branch_csv(csv_path.string(), pts);
  const fs::path field_path = out / (prefix + ".gpwv");
  gpw::write_field(bp.field, field_path.string());
  man.grid_spec = grid.describe();
  man.add_artifact(csv_path.string());
  man.add_artifact(field_path.string());
  for (const auto& w : bp.warnings) std::cerr << "[warn] " << w << "\n";
  std::cout << "p=" << bp.p_achieved << " E=" << bp.E << " c=" << bp.c_multiplier << " status="
            << gpw::to_string(bp.status) << " iters=" << bp.iters << "\n";
  if (bp.status != gpw::SolveStatus::converged &&
      bp.status != gpw::SolveStatus::trivial_minimizer)
    throw NumericalError(std::string("solver did not converge: ") + gpw::to_string(bp.status));
  return 0;
}

int run_branch(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const gpw::Grid grid = grid_from_config(cfg, 2);
  const std::vector<double> ps = require_number_list(cfg, "p_values");
  gpw::MinimizeConfig base = solver_config(cfg, ps.empty() ? 0.0 : ps.front());
  const std::string prefix = cfg.value("out_prefix", "branch");
  const bool warm = cfg.value("warm_start", true);

  std::vector<gpw::BranchPoint> pts;
  if (warm || worker_threads() <= 1) {
    pts = gpw::trace_branch(ps, grid, base);
  } else {
    // independent points may run concurrently when warm starting is off
    pts.resize(ps.size());
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    const int nthreads = std::min<std::size_t>(worker_threads(), ps.size());
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&]() {
        while (true) {
          std::size_t mine;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= ps.size()) return;
            mine = next++;
          }
          gpw::MinimizeConfig mc = base;
          mc.target_p = ps[mine];
          pts[mine] = gpw::minimize_at_momentum(mc, grid);
        }
      });
    for (auto& th : pool) th.join();
  }

  const fs::path csv_path = out / (prefix + ".csv");
  write_branch_csv(csv_path.string(), pts);
  man.grid_spec = grid.describe();
  man.add_artifact(csv_path.string());
  bool any_fail = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const fs::path fp = out / (prefix + "_p" + std::to_string(i) + ".gpwv");
    gpw::write_field(pts[i].field, fp.string());
    man.add_artifact(fp.string());
    if (pts[i].status != gpw::SolveStatus::converged &&
        pts[i].status != gpw::SolveStatus::trivial_minimizer)
      any_fail = true;
  }
  const auto ck = gpw::branch_checks(pts);
  json rep;
  rep["below_sqrt2_line"] = ck.below_sqrt2_line;
  rep["lipschitz"] = ck.lipschitz;
  rep["concave"] = ck.concave;
  rep["multiplier_decreasing"] = ck.multiplier_decreasing;
  rep["multipliers_subsonic"] = ck.multipliers_subsonic;
  rep["worst_slope_vs_multiplier"] = ck.worst_slope_vs_multiplier;
  const fs::path rep_path = out / (prefix + "_checks.json");
  std::ofstream(rep_path) << rep.dump(2) << "\n";
  man.add_artifact(rep_path.string());
  if (any_fail) throw NumericalError("one or more branch points failed; partial artifacts kept");
  return 0;
}

int run_obstacle(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const gpw::Grid grid = grid_from_config(cfg, 2);
  const double c = require_number(cfg, "c");
  const json& pot = require_key(cfg, "potential");
  const double amp = require_number(pot, "amplitude");
  const double width = require_number(pot, "width");
  const gpw::Potential V = gpw::Potential::gaussian(grid, amp, width);
  gpw::TrustRegion tr = gpw::TrustRegion::defaults(c);
  if (cfg.contains("lambda")) tr.lambda = require_number(cfg, "lambda");
  if (cfg.contains("kappa")) tr.kappa = require_number(cfg, "kappa");
  if (cfg.contains("v_l2_gate")) tr.v_l2_gate = require_number(cfg, "v_l2_gate");
  const std::string prefix = cfg.value("out_prefix", "obstacle");

  const auto fix = gpw::local_minimize_hamiltonian(
      c, V, tr, grid, cfg.value("max_iters", 30000), cfg.value("res_tol", 1e-10));

  json rep;
  rep["c"] = c;
  rep["V_l2"] = V.l2_norm;
  rep["lambda"] = tr.lambda;
  rep["kappa"] = tr.kappa;
  rep["F"] = fix.F;
  rep["E_n"] = fix.E_n;
  rep["residual"] = fix.residual;
  rep["iters"] = fix.iters;
  rep["status"] = gpw::to_string(fix.status);

  const fs::path field_path = out / (prefix + ".gpwv");
  gpw::write_field(fix.field, field_path.string());
  man.add_artifact(field_path.string());

  if (cfg.value("run_dynamics", false)) {
    const double t_end = require_number(cfg, "t_end");
    const double dt = cfg.value("dt", 2e-3);
    const auto dyn = gpw::obstacle_flow(V, c, t_end, dt, cfg.value("ramp_time", 0.5 * t_end),
                                        cfg.value("stride", 500));
    const fs::path trace_path = out / (prefix + "_trace.csv");
    write_trace_csv(trace_path.string(), dyn.trace);
    man.add_artifact(trace_path.string());
    json events = json::array();
    for (const auto& ev : dyn.events) {
      json e;
      e["t"] = ev.t;
      e["count"] = ev.count;
      json vs = json::array();
      for (const auto& v : ev.vortices) vs.push_back({{"x1", v.x1}, {"x2", v.x2}, {"degree", v.degree}});
      e["vortices"] = vs;
      events.push_back(e);
    }
    const fs::path ev_path = out / (prefix + "_events.json");
    std::ofstream(ev_path) << events.dump(2) << "\n";
    man.add_artifact(ev_path.string());
    double l2 = 0.0;
    for (std::size_t i = 0; i < dyn.field.values.size(); ++i)
      l2 += std::norm(dyn.field.values[i] - fix.field.values[i]);
    rep["dynamics_settled"] = dyn.settled;
    rep["dynamics_settle_residual"] = dyn.settle_residual;
    rep["dynamics_vs_minimizer_l2"] = std::sqrt(l2 * grid.cell_volume());
  }

  const fs::path rep_path = out / (prefix + ".json");
  std::ofstream(rep_path) << rep.dump(2) << "\n";
  man.grid_spec = grid.describe();
  man.add_artifact(rep_path.string());
  if (fix.status != gpw::SolveStatus::converged)
    throw NumericalError(std::string("obstacle solve: ") + gpw::to_string(fix.status));
  return 0;
}

int run_dyn(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const std::string kind = require_string(cfg, "kind");
  const std::string prefix = cfg.value("out_prefix", "dyn");
  if (kind == "evolve") {
    const gpw::Grid grid = grid_from_config(cfg, 1);
    const double c = require_number(cfg, "c");
    const gpw::TwistedWave tw = gpw::embed_dark_1d(gpw::Wave1D(c), grid);
    gpw::PropagatorConfig pc;
    pc.dt = cfg.value("dt", 1e-3);
    pc.t_end = require_number(cfg, "t_end");
    pc.observer_stride = cfg.value("stride", 500);
    const auto res = gpw::evolve(tw.field, pc);
    if (res.aborted_nan) throw NumericalError("evolution aborted on NaN");
    const fs::path trace_path = out / (prefix + "_trace.csv");
    write_trace_csv(trace_path.string(), res.trace);
    const fs::path field_path = out / (prefix + "_final.gpwv");
    gpw::write_field(res.field, field_path.string());
    man.grid_spec = grid.describe();
    man.add_artifact(trace_path.string());
    man.add_artifact(field_path.string());
    return 0;
  }
  if (kind == "stability") {
    const gpw::Grid grid = grid_from_config(cfg, 1);
    const double c = require_number(cfg, "c");
    const double delta = require_number(cfg, "delta");
    const double t_end = require_number(cfg, "t_end");
    const double window = require_number(cfg, "window");
    const std::uint64_t seed = cfg.value("seed", 20260809ULL);
    man.seed = seed;
    const auto res = gpw::stability_experiment(c, delta, t_end, window, grid, seed,
                                               cfg.value("dt", 2e-3), cfg.value("stride", 500));
    const fs::path csv_path = out / (prefix + "_distance.csv");
    gpw::CsvWriter csv(csv_path.string(), {"t", "distance"});
    for (std::size_t i = 0; i < res.times.size(); ++i) csv.row({res.times[i], res.distances[i]});
    json rep;
    rep["max_distance"] = res.max_distance;
    rep["initial_distance"] = res.initial_distance;
    rep["seed"] = res.seed;
    const fs::path rep_path = out / (prefix + ".json");
    std::ofstream(rep_path) << rep.dump(2) << "\n";
    man.grid_spec = grid.describe();
    man.add_artifact(csv_path.string());
    man.add_artifact(rep_path.string());
    return 0;
  }
  throw ConfigError("config key 'kind' must be 'evolve' or 'stability'");
}

int run_kernels(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const std::vector<double> cs = require_number_list(cfg, "c_values");
  const std::vector<double> dims = require_number_list(cfg, "dims");
  const std::string name = cfg.value("out", "kernels.csv");
  const fs::path csv_path = out / name;
  gpw::CsvWriter csv(csv_path.string(), {"c", "dim", "closed", "quadrature", "rel_err"});
  for (double c : cs)
    for (double dd : dims) {
      const int dim = static_cast<int>(dd);
      const double closed = gpw::k0_l2_norm_sq(c, dim);
      const double quad = gpw::k0_l2_norm_sq_quadrature(c, dim);
      csv.row({c, dd, closed, quad, std::abs(quad - closed) / closed});
    }
  man.grid_spec = "kernel quadrature";
  man.add_artifact(csv_path.string());

  if (cfg.contains("fit_field")) {
    const gpw::Field f = gpw::read_field(require_string(cfg, "fit_field"));
    const double c = require_number(cfg, "fit_c");
    const double r0 = require_number(cfg, "r_inner");
    const double r1 = require_number(cfg, "r_outer");
    const auto fit = gpw::fit_farfield(f, c, r0, r1);
    json rep;
    rep["alpha_measured"] = fit.measured.alpha;
    rep["alpha_predicted"] = fit.predicted.alpha;
    rep["alpha_relative_error"] = fit.alpha_relative_error;
    rep["relative_mismatch"] = fit.relative_mismatch;
    rep["annulus_ok"] = fit.annulus_ok;
    const fs::path rep_path = out / cfg.value("fit_out", "farfield_fit.json");
    std::ofstream(rep_path) << rep.dump(2) << "\n";
    man.add_artifact(rep_path.string());
  }
  return 0;
}

int run_kp(const json& cfg, const fs::path& out, gpw::RunManifest& man) {
  const std::string mode = require_string(cfg, "mode");
  if (mode == "lump") {
    const gpw::Grid grid = grid_from_config(cfg, 2);
    const double sigma = cfg.value("sigma", 1.0);
    auto w = gpw::sample_lump(grid);
    if (sigma != 1.0) w = gpw::scale_family(w, sigma);
    json rep;
    rep["sigma"] = sigma;
    rep["residual_l2"] = gpw::sw_residual(w, sigma);
    rep["lump_l2"] = gpw::kp_l2_norm(w);
    rep["relative_residual"] = gpw::sw_residual(w, sigma) / gpw::kp_l2_norm(w);
    rep["energy"] = gpw::kp_energy(w);
    rep["action"] = gpw::kp_action(w);
    const fs::path rep_path = out / cfg.value("out", "kp_lump.json");
    std::ofstream(rep_path) << rep.dump(2) << "\n";
    man.grid_spec = grid.describe();
    man.add_artifact(rep_path.string());
    return 0;
  }
  if (mode == "compare") {
    const gpw::Field u = gpw::read_field(require_string(cfg, "field"));
    const double c = require_number(cfg, "c");
    const gpw::KPField n = gpw::gp_to_kp(u, c);
    double linf = 0.0, l2 = 0.0, lumpinf = 0.0;
    for (int i = 0; i < n.grid.npts[0]; ++i)
      for (int j = 0; j < n.grid.npts[1]; ++j) {
        const double ref = gpw::lump(n.grid.coord(0, i), n.grid.coord(1, j));
        const double d = n.values[n.grid.index(i, j)] - ref;
        linf = std::max(linf, std::abs(d));
        lumpinf = std::max(lumpinf, std::abs(ref));
        l2 += d * d;
      }
    json rep;
    rep["c"] = c;
    rep["eps"] = std::sqrt(2.0 - c * c);
    rep["linf_discrepancy"] = linf;
    rep["linf_relative"] = linf / lumpinf;
    rep["l2_discrepancy"] = std::sqrt(l2 * n.grid.cell_volume());
    const fs::path rep_path = out / cfg.value("out", "kp_compare.json");
    std::ofstream(rep_path) << rep.dump(2) << "\n";
    man.grid_spec = n.grid.describe();
    man.add_artifact(rep_path.string());
    return 0;
  }
  if (mode == "scaling") {
    // branch CSV columns as written by the branch subcommand
    const std::string path = require_string(cfg, "branch_csv");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open branch csv '" + path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::vector<gpw::BranchSample> branch;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::size_t pos = 0;
      while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (cells.size() < 10 || cells[9] != "converged") continue;
      branch.push_back({std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
    }
    const auto rep = gpw::transonic_scalings_check(branch);
    json jr;
    jr["valid"] = rep.valid;
    jr["npoints"] = rep.npoints;
    jr["exponent_gap"] = rep.exponent_gap;
    jr["exponent_speed"] = rep.exponent_speed;
    jr["within_kp_expectation"] = rep.within_kp_expectation;
    const fs::path rep_path = out / cfg.value("out", "kp_scaling.json");
    std::ofstream(rep_path) << jr.dump(2) << "\n";
    man.grid_spec = "branch csv";
    man.add_artifact(rep_path.string());
    if (!rep.valid) throw NumericalError("insufficient branch points for the scaling fit");
    return 0;
  }
  throw ConfigError("config key 'mode' must be 'lump', 'compare' or 'scaling'");
}

int dispatch(const std::string& sub, const json& cfg, const fs::path& out) {
  fs::create_directories(out);
  gpw::RunManifest man;
  man.subcommand = sub;
  man.config = cfg;
  man.timestamp = gpw::RunManifest::now_iso8601();
  if (cfg.contains("seed")) man.seed = cfg.value("seed", 0ULL);

  int rc = 0;
  if (sub == "disp1d")
    rc = run_disp1d(cfg, out, man);
  else if (sub == "minimize")
    rc = run_minimize(cfg, out, man);
  else if (sub == "branch")
    rc = run_branch(cfg, out, man);
  else if (sub == "obstacle")
    rc = run_obstacle(cfg, out, man);
  else if (sub == "dyn")
    rc = run_dyn(cfg, out, man);
  else if (sub == "kernels")
    rc = run_kernels(cfg, out, man);
  else if (sub == "kp")
    rc = run_kp(cfg, out, man);
  else
    throw ConfigError("unknown subcommand '" + sub + "'");

  man.write((out / (sub + "_manifest.json")).string());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpwaves: travelling waves of the Gross-Pitaevskii equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::vector<std::string> overrides;
  std::string manifest_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "override config keys, key=value (dotted paths)");
  };
  for (const char* name : {"disp1d", "minimize", "branch", "obstacle", "dyn", "kernels", "kp"})
    add_common(app.add_subcommand(name));
  CLI::App* rerun = app.add_subcommand("rerun", "re-execute a recorded manifest");
  rerun->add_option("manifest", manifest_path, "manifest json")->required();
  rerun->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (rerun->parsed()) {
      const gpw::RunManifest man = gpw::RunManifest::load(manifest_path);
      return dispatch(man.subcommand, man.config, out_dir);
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    const json cfg = load_config(config_path, overrides);
    return dispatch(sub, cfg, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
