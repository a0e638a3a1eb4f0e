#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "entropykit/distributions.hpp"
#include "entropykit/nn.hpp"

namespace entropykit {

/// Optional per-row outputs. Timing is off by default because it is the one
/// column that differs between otherwise identical runs.
struct DiagnosticToggles {
  bool m_n = false;
  bool tilde_h_n = false;
  bool ball_mass_sum = false;
  bool log_tail = false;
  bool ell_n = false;
  bool wall_time = false;
  bool monte_carlo_ball_mass = false;
};

struct ExperimentConfig {
  DistributionSpec spec{UniformCube{}};
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  Backend backend = Backend::Index;
  DiagnosticToggles diagnostics;
  std::string output_path = "results.csv";

  /// Throws InvalidArgument unless n_grid is strictly ascending with every
  /// entry >= 2 and replicates >= 1.
  void validate() const;

  /// Keys: spec, n_grid, replicates, seed, backend, diagnostics (array of
  /// toggle names), output_path. Unknown keys are a ParseError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ResultRow {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::optional<double> h_n;  // empty when the cell failed
  double true_entropy = 0.0;
  std::optional<double> abs_error;
  std::optional<double> m_n;
  std::optional<double> tilde_h_n;
  std::optional<double> ball_mass_sum;
  std::optional<double> log_tail;
  std::optional<double> ell_n;
  std::optional<double> wall_time_ms;
  std::optional<std::string> error;  // not persisted in the CSV

  bool failed() const noexcept { return !h_n.has_value(); }
};

struct SummaryRow {
  std::size_t n = 0;
  double mean_h = 0.0;
  double median_h = 0.0;  // lower middle for even counts
  double sd_h = 0.0;      // sample standard deviation, 0 for one row
  double mean_abs_error = 0.0;
  std::size_t count = 0;   // successful rows
  std::size_t failed = 0;  // excluded rows
};

/// Seed of one (n, replicate) cell: derive_stream_key(seed, n, replicate,
/// StreamPurpose::Sample), i.e. four rounds of the SplitMix64 finaliser.
std::uint64_t cell_stream_key(std::uint64_t seed, std::size_t n, std::size_t replicate);

/// Runs a single cell in isolation. Estimator errors become a failed row.
ResultRow run_cell(const ExperimentConfig& config, std::size_t n, std::size_t replicate);

/// Every cell of the grid, sorted by (n, replicate). Output does not depend
/// on `threads` (0 = all cores).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

/// run_experiment restricted to ordinary families.
std::vector<ResultRow> run_convergence(const ExperimentConfig& config, std::size_t threads = 1);
/// run_experiment restricted to the counterexample; rows carry l_n.
std::vector<ResultRow> run_divergence(const ExperimentConfig& config, std::size_t threads = 1);

/// Throws EmptyInput for no rows.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

inline constexpr std::string_view kResultsHeader =
    "n,replicate,h_n,true_entropy,abs_error,m_n,tilde_h_n,ball_mass_sum,log_tail,ell_n,wall_time_ms";

/// CSV text with the header above; numbers use 17 significant digits and
/// disabled or failed fields are empty.
std::string results_to_csv(const std::vector<ResultRow>& rows);
/// Inverse of results_to_csv. Throws ParseError naming the line.
std::vector<ResultRow> results_from_csv(std::string_view text);

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place. Throws IoError.
void write_file_atomically(const std::string& path, std::string_view contents);

std::string manifest_path_for(const std::string& output_path);

/// Sidecar JSON: config echo, code version, timestamps, failed cells.
nlohmann::json run_manifest(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                            const std::string& started_at, const std::string& finished_at,
                            std::size_t threads);

/// Formats a double with 17 significant digits ("" for empty).
std::string format_number(double v);

}  // namespace entropykit
