#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mflab/harness.hpp"
#include "mflab/margins.hpp"
#include "mflab/plot.hpp"
#include "mflab/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct TfArgs {
  std::string controller = "ip";
  double kp = 1.0;
  double ki = 0.0;
  double kd = 0.0;
  double alpha = 1.0;
  double delay = 0.0;
};

void add_tf_options(CLI::App* cmd, TfArgs& args) {
  cmd->add_option("--controller", args.controller, "ip, ipi, ipd or ipid")
      ->required();
  cmd->add_option("--kp", args.kp, "proportional gain")->required();
  cmd->add_option("--ki", args.ki, "integral gain (ipi/ipid)");
  cmd->add_option("--kd", args.kd, "derivative gain (ipd/ipid)");
  cmd->add_option("--alpha", args.alpha, "input scaling");
  cmd->add_option("--delay", args.delay, "input transport delay [s]");
}

mflab::OpenLoopTF make_tf(const TfArgs& args) {
  mflab::OpenLoopTF tf;
  tf.kind = mflab::controller_from_string(args.controller);
  tf.gains = {args.kp, args.ki, args.kd, args.alpha,
              mflab::controller_order(tf.kind)};
  tf.delay = args.delay;
  if (args.delay < 0.0) throw mflab::ValidationError("delay: must be >= 0");
  return tf;
}

json margin_report_json(const mflab::MarginReport& report) {
  json j;
  j["phase_margin_deg"] =
      report.phase_margin_deg ? json(*report.phase_margin_deg) : json();
  j["gain_margin"] = report.gain_margin ? json(*report.gain_margin) : json();
  j["gain_margin_db"] =
      report.gain_margin_db() ? json(*report.gain_margin_db()) : json();
  j["omega_gain_crossover"] =
      report.omega_gain ? json(*report.omega_gain) : json();
  j["omega_phase_crossover"] =
      report.omega_phase ? json(*report.omega_phase) : json();
  j["gain_crossovers"] = json::array();
  for (const auto& c : report.gain_crossovers)
    j["gain_crossovers"].push_back(
        {{"omega", c.omega}, {"phase_margin_deg", c.phase_margin_deg}});
  j["phase_crossovers"] = json::array();
  for (const auto& c : report.phase_crossovers)
    j["phase_crossovers"].push_back(
        {{"omega", c.omega}, {"gain_margin", c.gain_margin}});
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

void print_margin_report(const mflab::MarginReport& report) {
  if (report.phase_margin_deg)
    std::printf("phase margin      %.6g deg at omega = %.6g rad/s\n",
                *report.phase_margin_deg, *report.omega_gain);
  else
    std::printf("phase margin      n/a (%s)\n", report.note.c_str());
  if (report.gain_margin)
    std::printf("gain margin       %.6g (%.6g dB) at omega = %.6g rad/s\n",
                *report.gain_margin, *report.gain_margin_db(),
                *report.omega_phase);
  else
    std::printf("gain margin       +inf (no phase crossover)\n");
  if (report.gain_crossovers.size() > 1) {
    std::printf("gain crossovers   ");
    for (const auto& c : report.gain_crossovers)
      std::printf("[omega %.6g, PM %.6g deg] ", c.omega, c.phase_margin_deg);
    std::printf("\n");
  }
}

void print_run_summary(const mflab::RunResult& result) {
  std::printf("stable            %s\n", result.stable ? "yes" : "no");
  if (result.diverged_at)
    std::printf("diverged at       %.6g s\n", *result.diverged_at);
  std::printf("tracking rmse     %.6g\n", result.tracking_rmse);
  std::printf("estimation rmse   %.6g\n", result.estimation_rmse);
  std::printf("rows              %zu\n", result.trace.size());
}

json run_summary_json(const mflab::RunResult& result) {
  json j;
  j["stable"] = result.stable;
  j["tracking_rmse"] = result.tracking_rmse;
  j["estimation_rmse"] = result.estimation_rmse;
  j["rows"] = result.trace.size();
  j["diverged_at"] = result.diverged_at ? json(*result.diverged_at) : json();
  return j;
}

struct RunOutputs {
  fs::path trace;
  fs::path plot;
};

RunOutputs write_run_outputs(const mflab::RunResult& result,
                             const fs::path& out_dir, const std::string& stem) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::exists(out_dir))
    throw mflab::IoError("cannot create directory " + out_dir.string());
  RunOutputs out{out_dir / (stem + "_trace.csv"), out_dir / (stem + "_plot.svg")};
  mflab::emit_trace(result, out.trace.string());
  mflab::write_time_plot(result, out.plot.string());
  return out;
}

void report_run(const mflab::RunResult& result, const RunOutputs& outputs,
                bool as_json) {
  if (as_json) {
    json j = run_summary_json(result);
    j["trace"] = outputs.trace.string();
    j["plot"] = outputs.plot.string();
    std::cout << j.dump(2) << "\n";
    return;
  }
  print_run_summary(result);
  std::printf("trace             %s\n", outputs.trace.string().c_str());
  std::printf("plot              %s\n", outputs.plot.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mflab: ultra-local model-free control workbench\n"
      "Intelligent P/PI/PD/PID loops, stability and delay margins, and a\n"
      "fixed-step closed-loop simulator with trace/plot emission."};
  app.require_subcommand(1);

  // margins
  TfArgs margin_args;
  bool margins_json = false;
  bool force_numeric = false;
  auto* cmd_margins =
      app.add_subcommand("margins", "Phase/gain margins of one loop family");
  add_tf_options(cmd_margins, margin_args);
  cmd_margins->add_flag("--json", margins_json, "machine-readable output");
  cmd_margins->add_flag("--numeric", force_numeric,
                        "use the frequency-sweep oracle even without delay");

  // delay-margin
  double dm_kp = 1.0;
  bool dm_json = false;
  auto* cmd_dm = app.add_subcommand(
      "delay-margin", "Largest stable input delay of the iP loop: pi/(2 kp)");
  cmd_dm->add_option("--kp", dm_kp, "proportional gain")->required();
  cmd_dm->add_flag("--json", dm_json, "machine-readable output");

  // nyquist
  TfArgs nyq_args;
  double nyq_min = 1e-2, nyq_max = 1e2;
  int nyq_points = 500;
  std::string nyq_out = "nyquist.csv";
  std::string nyq_plot;
  auto* cmd_nyq = app.add_subcommand(
      "nyquist", "Log-spaced frequency response sweep to CSV (and SVG)");
  add_tf_options(cmd_nyq, nyq_args);
  cmd_nyq->add_option("--omega-min", nyq_min, "sweep start [rad/s]");
  cmd_nyq->add_option("--omega-max", nyq_max, "sweep end [rad/s]");
  cmd_nyq->add_option("--points", nyq_points, "number of samples");
  cmd_nyq->add_option("--out", nyq_out, "output CSV path")->required();
  cmd_nyq->add_option("--plot", nyq_plot, "optional SVG path");

  // simulate
  std::string sim_scenario;
  std::string sim_out = ".";
  bool sim_json = false;
  bool sim_perfect = false;
  auto* cmd_sim =
      app.add_subcommand("simulate", "Run one scenario file and emit outputs");
  cmd_sim->add_option("--scenario", sim_scenario, "scenario file")->required();
  cmd_sim->add_option("--out", sim_out, "output directory");
  cmd_sim->add_flag("--json", sim_json, "machine-readable summary");
  cmd_sim->add_flag("--perfect-estimation", sim_perfect,
                    "bypass the estimator and feed the exact F");

  // reproduce
  std::string rep_name;
  std::string rep_out = ".";
  std::string rep_dir = "scenarios";
  bool rep_json = false;
  auto* cmd_rep = app.add_subcommand(
      "reproduce", "Run a bundled preset (fig1..fig6): trace + plot");
  cmd_rep->add_option("figure", rep_name, "fig1..fig6")->required();
  cmd_rep->add_option("--out", rep_out, "output directory");
  cmd_rep->add_option("--scenarios", rep_dir, "directory with the presets");
  cmd_rep->add_flag("--json", rep_json, "machine-readable summary");

  // sweep-delay
  double sw_kp = 1.0, sw_min = 0.0, sw_max = 0.5, sw_step = 0.05;
  std::string sw_scenario;
  std::string sw_out;
  bool sw_json = false;
  auto* cmd_sw = app.add_subcommand(
      "sweep-delay", "Stability and tracking rmse across a delay grid");
  cmd_sw->add_option("--kp", sw_kp, "proportional gain")->required();
  cmd_sw->add_option("--tau-min", sw_min, "first delay [s]")->required();
  cmd_sw->add_option("--tau-max", sw_max, "last delay [s]")->required();
  cmd_sw->add_option("--step", sw_step, "grid step [s]")->required();
  cmd_sw->add_option("--scenario", sw_scenario,
                     "base scenario file (default: delayed linear plant)");
  cmd_sw->add_option("--out", sw_out, "optional CSV path");
  cmd_sw->add_flag("--json", sw_json, "machine-readable output");

  try {
    app.parse(argc, argv);

    if (cmd_margins->parsed()) {
      const mflab::OpenLoopTF tf = make_tf(margin_args);
      const mflab::MarginReport report =
          (tf.delay > 0.0 || force_numeric) ? mflab::margins_numeric(tf)
                                            : mflab::margins_analytic(tf);
      if (margins_json) {
        json j = margin_report_json(report);
        j["method"] =
            (tf.delay > 0.0 || force_numeric) ? "numeric-sweep" : "analytic";
        std::cout << j.dump(2) << "\n";
      } else {
        print_margin_report(report);
      }
      return 0;
    }

    if (cmd_dm->parsed()) {
      const double tau_max = mflab::delay_margin_ip(dm_kp);
      if (dm_json)
        std::cout << json{{"kp", dm_kp}, {"tau_max", tau_max}}.dump(2) << "\n";
      else
        std::printf("tau_max           %.6g s\n", tau_max);
      return 0;
    }

    if (cmd_nyq->parsed()) {
      const auto rows =
          mflab::nyquist_sample(make_tf(nyq_args), nyq_min, nyq_max, nyq_points);
      mflab::write_nyquist_csv(rows, nyq_out);
      std::printf("csv               %s\n", nyq_out.c_str());
      if (!nyq_plot.empty()) {
        mflab::write_frequency_plot(rows, nyq_plot);
        std::printf("plot              %s\n", nyq_plot.c_str());
      }
      return 0;
    }

    if (cmd_sim->parsed()) {
      const mflab::Scenario scenario = mflab::load_scenario_file(sim_scenario);
      mflab::RunOptions options;
      options.perfect_estimation = sim_perfect;
      const mflab::RunResult result = mflab::run_scenario(scenario, options);
      const std::string stem = fs::path(sim_scenario).stem().string();
      report_run(result, write_run_outputs(result, sim_out, stem), sim_json);
      return 0;
    }

    if (cmd_rep->parsed()) {
      static const char* const kPresets[] = {"fig1", "fig2", "fig3",
                                             "fig4", "fig5", "fig6"};
      if (std::find_if(std::begin(kPresets), std::end(kPresets),
                       [&](const char* p) { return rep_name == p; }) ==
          std::end(kPresets))
        throw mflab::ValidationError("unknown preset '" + rep_name +
                                     "' (expected fig1..fig6)");
      fs::path dir = rep_dir;
      if (!fs::exists(dir / (rep_name + ".scn"))) {
        // Fall back to the directory next to the executable's parent, the
        // layout of a build tree checkout.
        const fs::path alt =
            fs::path(argv[0]).parent_path() / ".." / ".." / "scenarios";
        if (fs::exists(alt / (rep_name + ".scn"))) dir = alt;
      }
      const fs::path preset = dir / (rep_name + ".scn");
      if (!fs::exists(preset))
        throw mflab::IoError("preset not found: " + preset.string() +
                             " (use --scenarios)");
      const mflab::Scenario scenario =
          mflab::load_scenario_file(preset.string());
      const mflab::RunResult result = mflab::run_scenario(scenario);
      report_run(result, write_run_outputs(result, rep_out, rep_name), rep_json);
      return 0;
    }

    if (cmd_sw->parsed()) {
      if (sw_step <= 0.0) throw mflab::ValidationError("step: must be > 0");
      if (sw_max < sw_min)
        throw mflab::ValidationError("tau-max: must be >= tau-min");
      mflab::Scenario base;
      if (!sw_scenario.empty()) {
        base = mflab::load_scenario_file(sw_scenario);
      } else {
        base = mflab::parse_scenario(
            "plant = linear-delayed\nkp = 1\nsample_period = 0.01\n"
            "estimator_window = 0.05\nnoise_std = 0.03\nduration = 30\n"
            "seed = 42\n");
      }
      std::vector<double> taus;
      for (double tau = sw_min; tau <= sw_max + 1e-9; tau += sw_step)
        taus.push_back(tau);
      const auto points = mflab::delay_sweep(sw_kp, taus, base);
      if (sw_json) {
        json j = json::array();
        for (const auto& p : points)
          j.push_back({{"tau", p.tau},
                       {"stable", p.stable},
                       {"tracking_rmse", p.tracking_rmse}});
        std::cout << j.dump(2) << "\n";
      } else {
        std::printf("%10s %8s %14s\n", "tau [s]", "stable", "tracking rmse");
        for (const auto& p : points)
          std::printf("%10.4g %8s %14.6g\n", p.tau, p.stable ? "yes" : "no",
                      p.tracking_rmse);
      }
      if (!sw_out.empty()) {
        std::ofstream csv(sw_out);
        if (!csv) throw mflab::IoError("cannot write " + sw_out);
        csv << "tau,stable,tracking_rmse\n";
        for (const auto& p : points)
          csv << mflab::format_double(p.tau) << "," << (p.stable ? 1 : 0) << ","
              << mflab::format_double(p.tracking_rmse) << "\n";
        std::printf("csv               %s\n", sw_out.c_str());
      }
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitValidation;
  } catch (const mflab::IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const mflab::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  }
}
