// Command-line front end: frequency and pump-power sweeps, loss-budget tables
// and OPO parameter fits.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>

#include "sqz/sqz.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sqz::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw sqz::Error("cannot write '" + output + "'");
  out << text;
}

sqz::SimulationConfig load_config(const std::string& path) {
  if (path.empty()) return sqz::SimulationConfig{};
  return sqz::parse_config(read_file(path));
}

std::string fit_report(const sqz::FitResult& fit, bool with_phase) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  const auto& cov = fit.covariance;
  s << std::setprecision(6);
  s << "threshold_power   " << fit.threshold_power * 1e3 << " mW  (+/- " << std::sqrt(cov(0, 0)) * 1e3 << ")\n";
  s << "efficiency        " << fit.efficiency << "  (+/- " << std::sqrt(cov(1, 1)) << ")\n";
  if (with_phase) s << "rms_phase_noise   " << fit.rms_phase_noise << " rad  (+/- " << std::sqrt(cov(2, 2)) << ")\n";
  s << "loss              " << 100.0 * (1.0 - fit.efficiency) << " %\n";
  s << "residual_norm     " << fit.residual_norm << " dB\n";

  nlohmann::ordered_json j;
  j["threshold_power_mw"] = fit.threshold_power * 1e3;
  j["efficiency"] = fit.efficiency;
  j["rms_phase_noise_rad"] = fit.rms_phase_noise;
  j["residual_norm_db"] = fit.residual_norm;
  j["parameters"] = with_phase ? nlohmann::json::array({"threshold_power_w", "efficiency", "rms_phase_noise_rad"})
                               : nlohmann::json::array({"threshold_power_w", "efficiency"});
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < cov.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < cov.cols(); ++c) row.push_back(cov(r, c));
    rows.push_back(row);
  }
  j["covariance"] = rows;
  s << j.dump(2) << '\n';
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light quantum-noise budget simulator"};
  app.require_subcommand(1);

  std::string config_path, output_path, data_path;
  double frequency = -1.0;
  bool fit_phase_noise = false;

  auto* sweep_freq = app.add_subcommand("sweep-freq", "Detected squeezing over the configured frequency grid (CSV)");
  auto* sweep_pump = app.add_subcommand("sweep-pump", "Detected squeezing over the pump-power grid (CSV)");
  auto* budget = app.add_subcommand("budget", "Loss-budget table (text; CSV with --output)");
  auto* fit = app.add_subcommand("fit", "Fit OPO threshold and efficiency to measurements");

  for (auto* sub : {sweep_freq, sweep_pump, budget, fit}) {
    sub->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--output", output_path, "Output file (default: standard output)");
  }
  for (auto* sub : {sweep_pump, budget})
    sub->add_option("--frequency", frequency, "Evaluation frequency in Hz (overrides the config)")
        ->check(CLI::NonNegativeNumber);
  fit->add_option("data", data_path, "Measurement CSV: " + std::string(sqz::measurement_header))
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_flag("--fit-phase-noise", fit_phase_noise, "Also fit an rms quadrature phase noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string context;
  try {
    context = config_path.empty() ? "" : config_path + ": ";
    auto cfg = load_config(config_path);
    context.clear();
    if (frequency >= 0.0) {
      cfg.frequency = frequency;
      cfg.budget_frequencies = {frequency};
    }

    std::ostringstream out;
    out.imbue(std::locale::classic());
    if (*sweep_freq) {
      sqz::write_csv(out, sqz::sweep_frequency(cfg));
      emit(out.str(), output_path);
    } else if (*sweep_pump) {
      sqz::write_csv(out, sqz::sweep_pump(cfg));
      emit(out.str(), output_path);
    } else if (*budget) {
      const auto report = sqz::budget_report(cfg.chain, cfg.budget_frequencies);
      sqz::write_budget_table(std::cout, cfg.chain, report);
      if (!output_path.empty()) {
        sqz::write_budget_csv(out, cfg.chain, report);
        emit(out.str(), output_path);
      }
    } else if (*fit) {
      context = data_path + ": ";
      const auto records = sqz::parse_measurements_csv(read_file(data_path));
      context.clear();
      sqz::FitOptions opt;
      opt.fit_phase_noise = fit_phase_noise;
      opt.opo_hwhm = cfg.opo.hwhm;
      const auto result = sqz::fit_opo(records, opt);
      const auto text = fit_report(result, fit_phase_noise);
      std::cout << text;
      if (!output_path.empty()) emit(text, output_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "sqzbudget: error: " << context << e.what() << '\n';
    return sqz::exit_code_for(e);
  }
  return 0;
}
