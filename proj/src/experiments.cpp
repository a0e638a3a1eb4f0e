#include "entropykit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"
#include "entropykit/parallel.hpp"
#include "entropykit/summation.hpp"
#include "entropykit/version.hpp"

namespace entropykit {
namespace {

struct ToggleName {
  const char* name;
  bool DiagnosticToggles::*flag;
};

constexpr ToggleName kToggles[] = {
    {"m_n", &DiagnosticToggles::m_n},
    {"tilde_h_n", &DiagnosticToggles::tilde_h_n},
    {"ball_mass_sum", &DiagnosticToggles::ball_mass_sum},
    {"log_tail", &DiagnosticToggles::log_tail},
    {"ell_n", &DiagnosticToggles::ell_n},
    {"wall_time", &DiagnosticToggles::wall_time},
    {"monte_carlo_ball_mass", &DiagnosticToggles::monte_carlo_ball_mass},
};

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, "invalid experiment config: " + what);
}

bool needs_ball_mass(const DiagnosticToggles& t) { return t.m_n || t.tilde_h_n || t.ball_mass_sum; }

void fill_row(const ExperimentConfig& config, ResultRow& row) {
  const DiagnosticToggles& t = config.diagnostics;
  RngStream rng(cell_stream_key(config.seed, row.n, row.replicate));
  const Draws draws = draw(config.spec, row.n, rng);

  if (const auto* points = std::get_if<std::vector<LogPoint>>(&draws)) {
    const auto clamp = std::get<Counterexample>(config.spec.family()).clamp;
    row.h_n = kl_entropy_logdomain(*points, clamp).value;
    row.ell_n = ell_statistic(*points, clamp);
    if (needs_ball_mass(t)) {
      const Decomposition dec = decompose(*points, config.spec);
      if (t.m_n) row.m_n = dec.m_n;
      if (t.tilde_h_n) row.tilde_h_n = dec.tilde_h_n;
      if (t.ball_mass_sum) row.ball_mass_sum = dec.ball_mass_sum;
    }
    if (t.log_tail) row.log_tail = empirical_log_tail(*points);
    return;
  }

  const auto& sample = std::get<PointSample>(draws);
  if (needs_ball_mass(t)) {
    DiagnosticsOptions options;
    options.backend = config.backend;
    options.allow_monte_carlo = t.monte_carlo_ball_mass;
    options.ball.seed = derive_stream_key(config.seed, row.n, row.replicate,
                                          StreamPurpose::BallMassMonteCarlo);
    const Decomposition dec = decompose(sample, config.spec, options);
    row.h_n = dec.h_n;
    if (t.m_n) row.m_n = dec.m_n;
    if (t.tilde_h_n) row.tilde_h_n = dec.tilde_h_n;
    if (t.ball_mass_sum) row.ball_mass_sum = dec.ball_mass_sum;
  } else {
    row.h_n = kl_entropy(sample, config.backend).value;
  }
  if (t.log_tail) row.log_tail = empirical_log_tail(sample);
  if (t.ell_n && sample.dimension() == 1) row.ell_n = ell_statistic(sample, config.backend);
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::optional<double> parse_optional(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view field, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": bad count '" + std::string(field) + "'");
  }
  return value;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw Error(ErrorCode::InvalidArgument, "n_grid must not be empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 2) throw Error(ErrorCode::InvalidArgument, "every n in n_grid must be >= 2");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) {
      throw Error(ErrorCode::InvalidArgument, "n_grid must be strictly ascending");
    }
  }
  if (replicates < 1) throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
  if (diagnostics.monte_carlo_ball_mass && spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument, "monte_carlo_ball_mass does not apply to the counterexample");
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) parse_fail("expected a JSON object");
  static constexpr const char* kKeys[] = {"spec", "n_grid", "replicates", "seed",
                                          "backend", "diagnostics", "output_path"};
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; })) {
      parse_fail("unknown key '" + key + "'");
    }
  }
  for (const char* required : {"spec", "n_grid", "replicates", "seed"}) {
    if (!j.contains(required)) parse_fail(std::string("missing key '") + required + "'");
  }

  ExperimentConfig config;
  config.spec = DistributionSpec::from_json(j["spec"]);
  if (!j["n_grid"].is_array()) parse_fail("'n_grid' must be an array");
  for (const auto& v : j["n_grid"]) {
    if (!v.is_number_unsigned()) parse_fail("'n_grid' entries must be positive integers");
    config.n_grid.push_back(v.get<std::size_t>());
  }
  if (!j["replicates"].is_number_unsigned()) parse_fail("'replicates' must be a positive integer");
  config.replicates = j["replicates"].get<std::size_t>();
  if (!j["seed"].is_number_unsigned()) parse_fail("'seed' must be a nonnegative integer");
  config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("backend")) {
    if (!j["backend"].is_string()) parse_fail("'backend' must be a string");
    try {
      config.backend = parse_backend(j["backend"].get<std::string>());
    } catch (const Error& e) {
      parse_fail(e.what());
    }
  }
  if (j.contains("diagnostics")) {
    if (!j["diagnostics"].is_array()) parse_fail("'diagnostics' must be an array of names");
    for (const auto& v : j["diagnostics"]) {
      if (!v.is_string()) parse_fail("'diagnostics' entries must be strings");
      const std::string name = v.get<std::string>();
      const auto* hit = std::find_if(std::begin(kToggles), std::end(kToggles),
                                     [&](const ToggleName& t) { return name == t.name; });
      if (hit == std::end(kToggles)) parse_fail("unknown diagnostic '" + name + "'");
      config.diagnostics.*(hit->flag) = true;
    }
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) parse_fail("'output_path' must be a string");
    config.output_path = j["output_path"].get<std::string>();
  }
  try {
    config.validate();
  } catch (const Error& e) {
    parse_fail(e.what());
  }
  return config;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json toggles = nlohmann::json::array();
  for (const auto& t : kToggles) {
    if (diagnostics.*(t.flag)) toggles.push_back(t.name);
  }
  return {{"spec", spec.to_json()},
          {"n_grid", n_grid},
          {"replicates", replicates},
          {"seed", seed},
          {"backend", std::string(to_string(backend))},
          {"diagnostics", toggles},
          {"output_path", output_path}};
}

std::uint64_t cell_stream_key(std::uint64_t seed, std::size_t n, std::size_t replicate) {
  return derive_stream_key(seed, n, replicate, StreamPurpose::Sample);
}

ResultRow run_cell(const ExperimentConfig& config, std::size_t n, std::size_t replicate) {
  ResultRow row;
  row.n = n;
  row.replicate = replicate;
  row.true_entropy = exact_entropy(config.spec);
  const auto start = std::chrono::steady_clock::now();
  try {
    fill_row(config, row);
    row.abs_error = std::fabs(*row.h_n - row.true_entropy);
  } catch (const Error& e) {
    const double truth = row.true_entropy;
    row = ResultRow{};
    row.n = n;
    row.replicate = replicate;
    row.true_entropy = truth;
    row.error = e.what();
  }
  if (config.diagnostics.wall_time) {
    row.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t n : config.n_grid) {
    for (std::size_t r = 0; r < config.replicates; ++r) cells.emplace_back(n, r);
  }
  std::vector<ResultRow> rows(cells.size());
  // Cells are handed out one at a time; each writes only its own slot.
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(resolve_threads(threads), cells.size());
  parallel_for(workers, workers, [&](std::size_t, std::size_t) {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      rows[k] = run_cell(config, cells[k].first, cells[k].second);
    }
  });
  return rows;
}

std::vector<ResultRow> run_convergence(const ExperimentConfig& config, std::size_t threads) {
  if (config.spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument, "run_convergence does not take the counterexample");
  }
  return run_experiment(config, threads);
}

std::vector<ResultRow> run_divergence(const ExperimentConfig& config, std::size_t threads) {
  if (!config.spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument, "run_divergence needs the counterexample spec");
  }
  return run_experiment(config, threads);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "EmptyInput: no rows to summarise");
  std::map<std::size_t, std::vector<const ResultRow*>> groups;
  for (const auto& row : rows) groups[row.n].push_back(&row);

  std::vector<SummaryRow> out;
  for (auto& [n, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const ResultRow* a, const ResultRow* b) { return a->replicate < b->replicate; });
    SummaryRow s;
    s.n = n;
    std::vector<double> h;
    std::vector<double> err;
    for (const ResultRow* row : group) {
      if (row->failed()) {
        ++s.failed;
        continue;
      }
      h.push_back(*row->h_n);
      if (row->abs_error) err.push_back(*row->abs_error);
    }
    s.count = h.size();
    if (h.empty()) {
      s.mean_h = s.median_h = s.sd_h = s.mean_abs_error = std::nan("");
      out.push_back(s);
      continue;
    }
    const double k = static_cast<double>(h.size());
    s.mean_h = compensated_sum(h) / k;
    std::vector<double> deviations(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double dev = h[i] - s.mean_h;
      deviations[i] = dev * dev;
    }
    s.sd_h = h.size() > 1 ? std::sqrt(compensated_sum(deviations) / (k - 1.0)) : 0.0;
    std::vector<double> sorted(h);
    std::sort(sorted.begin(), sorted.end());
    s.median_h = sorted[(sorted.size() - 1) / 2];
    s.mean_abs_error = err.empty() ? std::nan("") : compensated_sum(err) / static_cast<double>(err.size());
    out.push_back(s);
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += std::to_string(row.n) + ',' + std::to_string(row.replicate) + ',' +
           optional_number(row.h_n) + ',' + format_number(row.true_entropy) + ',' +
           optional_number(row.abs_error) + ',' + optional_number(row.m_n) + ',' +
           optional_number(row.tilde_h_n) + ',' + optional_number(row.ball_mass_sum) + ',' +
           optional_number(row.log_tail) + ',' + optional_number(row.ell_n) + ',' +
           optional_number(row.wall_time_ms) + '\n';
  }
  return out;
}

std::vector<ResultRow> results_from_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kResultsHeader) {
        throw Error(ErrorCode::ParseError, "line 1: unexpected header");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 11) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected 11 fields, got " + std::to_string(f.size()));
    }
    ResultRow row;
    row.n = parse_count(f[0], line_no);
    row.replicate = parse_count(f[1], line_no);
    row.h_n = parse_optional(f[2], line_no);
    const auto truth = parse_optional(f[3], line_no);
    if (!truth) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing true_entropy");
    row.true_entropy = *truth;
    row.abs_error = parse_optional(f[4], line_no);
    row.m_n = parse_optional(f[5], line_no);
    row.tilde_h_n = parse_optional(f[6], line_no);
    row.ball_mass_sum = parse_optional(f[7], line_no);
    row.log_tail = parse_optional(f[8], line_no);
    row.ell_n = parse_optional(f[9], line_no);
    row.wall_time_ms = parse_optional(f[10], line_no);
    rows.push_back(row);
  }
  if (!saw_header) throw Error(ErrorCode::ParseError, "line 1: missing header");
  return rows;
}

void write_file_atomically(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "IoError: cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "IoError: short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "IoError: cannot move output into " + path);
  }
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

nlohmann::json run_manifest(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                            const std::string& started_at, const std::string& finished_at,
                            std::size_t threads) {
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& row : rows) {
    if (row.failed()) {
      failed.push_back({{"n", row.n}, {"replicate", row.replicate}, {"error", row.error.value_or("")}});
    }
  }
  return {{"schema_version", kSchemaVersion},
          {"code_version", kVersion},
          {"config", config.to_json()},
          {"started_at", started_at.empty() ? utc_now() : started_at},
          {"finished_at", finished_at.empty() ? utc_now() : finished_at},
          {"threads", threads},
          {"rows", rows.size()},
          {"failed_cells", failed}};
}

}  // namespace entropykit
