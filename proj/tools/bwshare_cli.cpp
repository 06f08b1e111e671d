#include <bwshare/cli/run.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit { kOk = 0, kValidation = 2, kInvariant = 3, kIo = 4 };

struct Overrides {
  std::string mode;
  std::optional<double> horizon;
  std::optional<double> step;
  bool strict = false;
};

bwshare::Scenario load(const std::string& what, const Overrides& o) {
  auto sc = bwshare::cli::load_scenario(what);
  if (!o.mode.empty()) {
    auto m = bwshare::parse_run_mode(o.mode);
    if (!m) throw bwshare::ValidationError("--mode: unknown mode '" + o.mode + "'");
    sc.mode = *m;
  }
  if (o.horizon) sc.horizon = *o.horizon;
  if (o.step) sc.platform.step = *o.step;
  if (o.strict) sc.strict_bounds = true;
  bwshare::validate(sc);
  return sc;
}

void emit(const bwshare::cli::json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << '\n';
  else bwshare::cli::write_file(out, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth sharing simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::string target, other, run_dir, report;
  double zeta = 0.05;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "sync, async_compensated, async_uncompensated, ode_reference");
    sub->add_option("--horizon", o.horizon, "Horizon in time units");
    sub->add_option("--step", o.step, "Step size epsilon");
    sub->add_flag("--strict", o.strict, "Enforce the step-size guard and abort on invariant breach");
  };

  auto* run = app.add_subcommand("run", "Run a scenario and write trajectory.csv and summary.json");
  run->add_option("scenario", target, "Preset name (sync5, async3) or scenario file")->required();
  run->add_option("--out", run_dir, "Output directory")->default_val("out");
  add_overrides(run);

  auto* cmp = app.add_subcommand("compare", "Compare the service paths of two run outputs");
  cmp->add_option("a", target, "First output directory")->required();
  cmp->add_option("b", other, "Second output directory")->required();
  cmp->add_option("--out", report, "Write the report to this file instead of stdout");

  auto* bnd = app.add_subcommand("bounds", "Print the theoretical constants of a scenario");
  bnd->add_option("scenario", target)->required();
  bnd->add_option("--zeta", zeta, "Balance threshold")->default_val(0.05);
  bnd->add_option("--out", report, "Write the report to this file instead of stdout");
  add_overrides(bnd);

  auto* sol = app.add_subcommand("solve", "Print the stationary point of a scenario");
  sol->add_option("scenario", target)->required();
  sol->add_option("--out", report, "Write the report to this file instead of stdout");
  add_overrides(sol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      const auto sc = load(target, o);
      const auto r = bwshare::cli::run(sc);
      const auto b = bwshare::cli::write_bundle(r, run_dir);
      std::cout << "wrote " << b.trajectory_path.string() << " and " << b.summary_path.string() << '\n';
      if (!r.fairness_violations.empty()) {
        std::cout << "fairness violations:";
        for (const auto& id : r.fairness_violations) std::cout << ' ' << id;
        std::cout << '\n';
      }
      return r.strict_failed ? kInvariant : kOk;
    }
    if (*cmp) {
      const auto a = bwshare::cli::load_bundle(target);
      const auto b = bwshare::cli::load_bundle(other);
      emit(bwshare::cli::to_json(bwshare::cli::compare(a, b)), report);
      return kOk;
    }
    if (*bnd) {
      const auto sc = load(target, o);
      const auto specs = bwshare::all_apps(sc);
      const auto b = bwshare::compute_bounds(specs, sc.platform);
      bwshare::cli::json j{{"bounds", bwshare::cli::to_json(b)}};
      try {
        j["balance"] = bwshare::cli::to_json(bwshare::balance_thresholds(zeta, specs, sc.platform, b));
      } catch (const bwshare::ValidationError& e) {
        j["balance"] = {{"zeta", zeta}, {"error", e.what()}};
      }
      emit(j, report);
      return kOk;
    }
    if (*sol) {
      const auto sc = load(target, o);
      emit(bwshare::cli::to_json(bwshare::solve_stationary_point(sc.apps, sc.platform)), report);
      return kOk;
    }
  } catch (const bwshare::InvariantError& e) {
    std::cerr << "invariant violated at step " << e.step() << ": " << e.what() << '\n';
    return kInvariant;
  } catch (const bwshare::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const bwshare::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
