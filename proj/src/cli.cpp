#include "surftest/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "surftest/globe.hpp"
#include "surftest/io.hpp"
#include "surftest/profile.hpp"
#include "surftest/sim.hpp"

namespace surftest::cli {

namespace {

using nlohmann::json;

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot write " + path);
  file << text;
  if (!file) throw ValidationError("failed writing " + path);
}

json echo(const Manifest& m) {
  json e{{"command", m.command}, {"log10p1", m.log10p1}, {"q", m.q}, {"out", m.out}};
  if (m.command == "export-mean") {
    e["group"] = m.group1;
  } else {
    e["group1"] = m.group1;
    e["group2"] = m.group2;
  }
  if (m.command == "profile") {
    e["fix"] = std::string(1, m.fix);
    if (m.at) e["at"] = *m.at;
    if (m.index) e["index"] = *m.index;
    e["all"] = m.all;
  }
  return e;
}

FunctionalSample load(const std::string& path, bool log10p1) {
  FunctionalSample s = io::ingest_csv(path);
  return log10p1 ? io::log_transform(s) : s;
}

void run_globe(const Manifest& m, std::ostream& out) {
  const auto g1 = load(m.group1, m.log10p1);
  const auto g2 = load(m.group2, m.log10p1);
  json report = io::to_json(globe_test(g1, g2, m.q));
  report["config_echo"] = echo(m);
  write_output(m.out, report.dump(2) + "\n", out);
}

void run_profile(Manifest m, std::ostream& out) {
  const auto g1 = load(m.group1, m.log10p1);
  const auto g2 = load(m.group2, m.log10p1);
  if (!g1.grid_s().matches(g2.grid_s()) || !g1.grid_t().matches(g2.grid_t())) {
    throw ValidationError("groups '" + m.group1 + "' and '" + m.group2 +
                          "' are observed on different grids");
  }
  const ProfileAxis axis = m.fix == 's' ? ProfileAxis::fix_s : ProfileAxis::fix_t;
  const Grid& slice_grid = m.fix == 's' ? g1.grid_s() : g1.grid_t();
  json report;
  if (m.all) {
    report = io::sweep_to_json(profile_test_sweep(g1, g2, axis, m.q));
  } else {
    std::size_t idx = 0;
    if (m.index) {
      idx = *m.index;
      if (idx >= slice_grid.size()) {
        throw ValidationError("--index " + std::to_string(idx) + " out of range for a " +
                              std::to_string(slice_grid.size()) + "-point " + m.fix + "-grid");
      }
    } else {
      idx = slice_grid.nearest_index(*m.at);
    }
    report = io::to_json(profile_test_slices(g1, g2, axis, {idx}, m.q).front());
  }
  report["config_echo"] = echo(m);
  if (m.at && !m.all) report["config_echo"]["resolved_coordinate"] = report["slice"]["coordinate"];
  write_output(m.out, report.dump(2) + "\n", out);
}

void run_export_mean(const Manifest& m, std::ostream& out) {
  const auto g = load(m.group1, m.log10p1);
  g.require_replicates(2);
  const auto sys = marginal_eigen_system(marginal_covariance(g), m.q);
  const auto xi = score_curves(g, sys);
  const auto second = second_stage_systems(xi, xi);
  std::ostringstream text;
  io::write_surface_csv(estimate_mean_surface(g, sys, second), g.grid_s(), g.grid_t(), text);
  write_output(m.out, text.str(), out);
}

void run_simulate(const SimConfig& config, const std::string& out_path, std::ostream& out) {
  const SimReport report = run_monte_carlo(config);
  json j = io::to_json(report);
  j["config_echo"] = io::to_json(config);
  write_output(out_path, j.dump(2) + "\n", out);
}

std::optional<std::size_t> parse_mode(const std::string& mode) {
  if (mode == "globe") return std::nullopt;
  const std::string prefix = "profile:";
  if (mode.rfind(prefix, 0) == 0) {
    const std::string rest = mode.substr(prefix.size());
    std::size_t pos = 0;
    try {
      const auto v = std::stoull(rest, &pos);
      if (pos == rest.size()) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("--mode must be 'globe' or 'profile:IDX', got '" + mode + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-sample tests for mean surfaces of bivariate functional data"};
  app.require_subcommand(1);

  Manifest m;
  auto* test = app.add_subcommand("test", "Run a profile or globe test on two CSV groups");
  test->require_subcommand(1);
  auto add_common = [&m](CLI::App* sub) {
    sub->add_option("--group1", m.group1, "CSV file of group 1")->required();
    sub->add_option("--group2", m.group2, "CSV file of group 2")->required();
    sub->add_option("--q", m.q, "fraction of variance for selecting J")->capture_default_str();
    sub->add_flag("--log10p1", m.log10p1, "apply log10(y+1) before testing");
    sub->add_option("--out", m.out, "report path, '-' for stdout")->capture_default_str();
  };
  auto* globe = test->add_subcommand("globe", "Whole-surface equality test");
  add_common(globe);
  auto* profile = test->add_subcommand("profile", "Per-slice equality test");
  add_common(profile);
  std::string fix = "t";
  profile->add_option("--fix", fix, "axis held fixed")->check(CLI::IsMember({"t", "s"}))->required();
  double at_value = 0.0;
  std::size_t index_value = 0;
  auto* at_opt = profile->add_option("--at", at_value, "slice coordinate (nearest grid point)");
  auto* index_opt = profile->add_option("--index", index_value, "slice grid index");
  auto* all_opt = profile->add_flag("--all", m.all, "sweep every slice");
  at_opt->excludes(index_opt)->excludes(all_opt);
  index_opt->excludes(all_opt);

  SimConfig sim;
  std::string sim_mode = "globe";
  std::string sim_out = "-";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power run");
  simulate->add_option("--example", sim.example, "data model 1 or 2")->required()->check(CLI::IsMember({1, 2}));
  simulate->add_option("--n1", sim.n1)->required();
  simulate->add_option("--n2", sim.n2)->required();
  simulate->add_option("--delta", sim.delta)->required();
  simulate->add_option("--reps", sim.reps)->required();
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--level", sim.level)->capture_default_str();
  simulate->add_option("--mode", sim_mode, "globe or profile:IDX")->capture_default_str();
  simulate->add_option("--N", sim.N, "s-grid size")->capture_default_str();
  simulate->add_option("--M", sim.M, "t-grid size")->capture_default_str();
  simulate->add_option("--q", sim.q)->capture_default_str();
  simulate->add_option("--out", sim_out)->capture_default_str();

  auto* export_mean = app.add_subcommand("export-mean", "Reconstructed mean surface as CSV");
  export_mean->add_option("--group", m.group1, "CSV file")->required();
  export_mean->add_option("--q", m.q)->capture_default_str();
  export_mean->add_flag("--log10p1", m.log10p1);
  export_mean->add_option("--out", m.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kOk;
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    if (simulate->parsed()) {
      sim.profile_index = parse_mode(sim_mode);
      run_simulate(sim, sim_out, out);
    } else if (export_mean->parsed()) {
      m.command = "export-mean";
      run_export_mean(m, out);
    } else if (globe->parsed()) {
      m.command = "globe";
      run_globe(m, out);
    } else {
      m.command = "profile";
      m.fix = fix.front();
      if (at_opt->count() > 0) m.at = at_value;
      if (index_opt->count() > 0) m.index = index_value;
      if (!m.all && !m.at && !m.index) {
        throw ValidationError("test profile needs one of --at, --index or --all");
      }
      run_profile(m, out);
    }
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace surftest::cli
