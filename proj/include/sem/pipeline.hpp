#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sem/evaluate.hpp"
#include "sem/mc_verify.hpp"
#include "sem/score_forecast.hpp"
#include "sem/sem_core.hpp"

namespace sem {

/// Synthetic data: per-cohort family parameters drift linearly from
/// first_cohort.
struct SyntheticConfig {
  KeyKind family = KeyKind::IG;
  int last_cohort = 0;  // 0 = latest target cohort
  double ig_a = 0.07, ig_a_slope = -0.00005;
  double ig_b = 1.0, ig_b_slope = 0.002;
  double id_alpha = -1.0, id_alpha_slope = -0.002;
  double id_beta = -1.0, id_gamma = 0.08, id_change_point = 50.0;
  std::size_t cohort_size = 0;  // 0 = exact probabilities
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_dir = "sem-out";
  bool synthetic = false;
  int first_cohort = 1781, last_cohort = 1830, last_data_year = 1940;
  SemParams params;
  int basis_size = 20, order = 4;
  double theta = 0.995;
  std::vector<double> deltas{0.95};
  ArimaSearch search;
  int eval_age = 30;
  std::vector<int> targets{1870, 1890, 1910};
  MseLowerLimit mse_lower = MseLowerLimit::displayed;
  std::vector<KeyKind> kinds{KeyKind::ID, KeyKind::IG};
  SyntheticConfig synth;
  std::size_t verify_paths = 1000000;
  std::string verify_fault = "none";  // "ig_sign" corrupts q_ig inside verify
  std::uint64_t seed = 20240101;

  void validate() const;
  /// Canonical INI text; loading it reproduces this configuration.
  std::string echo() const;
};

/// Reads an INI config; relative paths resolve against `base_dir`.
/// Unknown sections or keys are rejected; a [manifest] section is ignored.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Writes mortality.tsv (full available ages per cohort).
void run_ingest(const RunConfig& cfg, std::ostream& log);
/// Inversion, smoothing and FPCA per kind: model_<kind>.txt and dumps.
void run_fit(const RunConfig& cfg, std::ostream& log);
/// Score ARIMA forecasts, modification and mortality predictions.
void run_forecast(const RunConfig& cfg, std::ostream& log);
/// MSE of predictions against the held-out data; table on `log`.
void run_evaluate(const RunConfig& cfg, std::ostream& log);
/// Oracle suite; returns false if any oracle fails.
bool run_verify(const RunConfig& cfg, std::ostream& log);

/// 64-bit FNV-1a of a file's bytes.
std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace sem
