// entropykit: nearest-neighbour entropy estimation from the command line.
//
// Exit codes: 0 success, 1 unexpected failure, 2 malformed input or
// configuration, 3 duplicate points, 4 dimension mismatch, 5 output not
// writable. Results go to stdout, everything else to stderr.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"
#include "entropykit/experiments.hpp"
#include "entropykit/io.hpp"
#include "entropykit/version.hpp"

namespace ek = entropykit;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,
  kDuplicates = 3,
  kDimensionMismatch = 4,
  kUnwritable = 5,
};

int exit_code_for(ek::ErrorCode code) {
  switch (code) {
    case ek::ErrorCode::DuplicatePoints: return kDuplicates;
    case ek::ErrorCode::DimensionMismatch: return kDimensionMismatch;
    case ek::ErrorCode::IoError: return kUnwritable;
    case ek::ErrorCode::PrecisionUnachievable: return kFailure;
    default: return kBadInput;
  }
}

std::size_t thread_count(int flag) {
  if (flag >= 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("ENTROPYKIT_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (...) {
      std::cerr << "warning: ignoring ENTROPYKIT_THREADS=" << env << "\n";
    }
  }
  return 0;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Exit 5 is reserved for unwritable output; an unreadable input is bad input.
std::string read_input(const std::string& path) {
  try {
    return ek::read_text_file(path);
  } catch (const ek::Error& e) {
    throw ek::Error(ek::ErrorCode::ParseError, e.what());
  }
}

json estimate_json(const ek::EntropyEstimate& est) {
  json out = {{"schema_version", ek::kSchemaVersion},
              {"h_n", est.value},
              {"n", est.n},
              {"d", est.d},
              {"euler_mascheroni", est.euler_mascheroni},
              {"log_domain", est.log_domain}};
  out["backend"] = est.backend ? json(std::string(ek::to_string(*est.backend))) : json("logdomain");
  if (est.clamp) out["clamp"] = *est.clamp;
  return out;
}

json report_json(const ek::DiagnosticsReport& r) {
  return {{"schema_version", ek::kSchemaVersion},
          {"m_n", r.m_n},
          {"tilde_h_n", r.tilde_h_n},
          {"h_n", r.h_n},
          {"ball_mass_sum", r.ball_mass_sum},
          {"empirical_log_tail", r.empirical_log_tail},
          {"ks_ball_mass_uniform", r.ks_ball_mass_uniform ? json(*r.ks_ball_mass_uniform) : json(nullptr)},
          {"decomposition_residual", r.decomposition_residual},
          {"n", r.n},
          {"d", r.d},
          {"spec", r.spec}};
}

void print_summary(const std::vector<ek::SummaryRow>& summary) {
  std::cout << "n,count,failed,mean_h,median_h,sd_h,mean_abs_error\n";
  for (const auto& s : summary) {
    std::cout << s.n << ',' << s.count << ',' << s.failed << ',' << ek::format_number(s.mean_h) << ','
              << ek::format_number(s.median_h) << ',' << ek::format_number(s.sd_h) << ','
              << ek::format_number(s.mean_abs_error) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kozachenko-Leonenko nearest-neighbour entropy estimation"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  int threads_flag = -1;
  app.add_option("--threads", threads_flag, "Worker threads (0 = all cores; default ENTROPYKIT_THREADS or 0)")
      ->check(CLI::NonNegativeNumber);

  auto* estimate = app.add_subcommand("estimate", "Estimate differential entropy of a CSV sample");
  std::string input;
  std::string backend_name = "index";
  std::string format = "points";
  unsigned clamp = ek::kDefaultIntervalClamp;
  estimate->add_option("--input", input, "CSV file, one point per line")->required();
  estimate->add_option("--backend", backend_name, "Neighbour search backend")
      ->check(CLI::IsMember({"brute", "index"}));
  estimate->add_option("--format", format, "points | logpoint (lines of 'interval,fraction')")
      ->check(CLI::IsMember({"points", "logpoint"}));
  estimate->add_option("--clamp", clamp, "Interval clamp for --format logpoint")
      ->check(CLI::Range(1u, ek::kMaxIntervalClamp));

  auto* diagnose = app.add_subcommand("diagnose", "Decomposition and ball-mass diagnostics");
  std::string spec_arg;
  bool allow_mc = false;
  diagnose->add_option("--input", input, "CSV sample (logpoint lines for the counterexample)")->required();
  diagnose->add_option("--spec", spec_arg, "Distribution spec: JSON text or path to a JSON file")->required();
  diagnose->add_option("--backend", backend_name, "Neighbour search backend")
      ->check(CLI::IsMember({"brute", "index"}));
  diagnose->add_flag("--allow-monte-carlo", allow_mc, "Permit Monte Carlo ball masses (cube, d > 1)");

  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
  std::string config_path;
  std::string output_override;
  experiment->add_option("--config", config_path, "Experiment config JSON")->required();
  experiment->add_option("--output", output_override, "Override output_path from the config");

  app.add_subcommand("version", "Print version information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (app.got_subcommand("version")) {
      std::cout << json{{"schema_version", ek::kSchemaVersion}, {"version", ek::kVersion}}.dump() << "\n";
      return kOk;
    }

    const std::size_t threads = thread_count(threads_flag);
    const ek::Backend backend = ek::parse_backend(backend_name);

    if (app.got_subcommand("estimate")) {
      const std::string text = read_input(input);
      ek::EntropyEstimate est;
      if (format == "logpoint") {
        est = ek::kl_entropy_logdomain(ek::parse_logpoints_csv(text), clamp);
      } else {
        est = ek::kl_entropy(ek::parse_points_csv(text), backend, threads);
      }
      std::cout << estimate_json(est).dump() << "\n";
      return kOk;
    }

    if (app.got_subcommand("diagnose")) {
      json spec_json;
      try {
        spec_json = json::parse(spec_arg);
      } catch (const json::parse_error&) {
        try {
          spec_json = json::parse(read_input(spec_arg));
        } catch (const json::parse_error& e) {
          throw ek::Error(ek::ErrorCode::ParseError, std::string("spec JSON: ") + e.what());
        }
      }
      const ek::DistributionSpec spec = ek::DistributionSpec::from_json(spec_json);
      const std::string text = read_input(input);
      ek::DiagnosticsReport report;
      if (spec.is_counterexample()) {
        report = ek::diagnose(ek::parse_logpoints_csv(text), spec);
      } else {
        ek::DiagnosticsOptions options;
        options.backend = backend;
        options.allow_monte_carlo = allow_mc;
        report = ek::diagnose(ek::parse_points_csv(text), spec, options);
      }
      std::cout << report_json(report).dump() << "\n";
      return kOk;
    }

    if (app.got_subcommand("experiment")) {
      json config_json;
      try {
        config_json = json::parse(read_input(config_path));
      } catch (const json::parse_error& e) {
        throw ek::Error(ek::ErrorCode::ParseError, std::string("config JSON: ") + e.what());
      }
      ek::ExperimentConfig config = ek::ExperimentConfig::from_json(config_json);
      if (!output_override.empty()) config.output_path = output_override;

      const std::string started = utc_now();
      std::cerr << "running " << config.spec.name() << " over " << config.n_grid.size() << " sizes x "
                << config.replicates << " replicates\n";
      const auto rows = ek::run_experiment(config, threads);
      for (const auto& row : rows) {
        if (row.failed()) {
          std::cerr << "cell n=" << row.n << " replicate=" << row.replicate << " failed: " << *row.error << "\n";
        }
      }
      ek::write_file_atomically(config.output_path, ek::results_to_csv(rows));
      ek::write_file_atomically(ek::manifest_path_for(config.output_path),
                                ek::run_manifest(config, rows, started, utc_now(), threads).dump(2) + "\n");
      std::cerr << "wrote " << config.output_path << "\n";
      print_summary(ek::summarize(rows));
      return kOk;
    }
  } catch (const ek::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
