#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgdm/overlaps.hpp"

namespace mgdm::harness {

enum class ModelKind { spiked, powerlaw };

/// One empirical sweep: a gamma grid at fixed (model, d, beta, sigma),
/// n_trials independent dataset pairs per grid point.
struct SweepConfig {
  ModelKind model_kind = ModelKind::spiked;
  int d = 500;
  double beta = 0.0;
  double sigma_reg = 0.0;
  double alpha = 1.0;
  std::vector<double> gamma_grid;
  int n_trials = 5;
  int n_latents = 64;
  std::uint64_t master_seed = 0;
  std::vector<overlaps::OverlapKind> outputs;
  bool subtract_baseline = false;
  int workers = 1;
};

/// One row per (gamma, trial). Empirical fields are set only for requested
/// outputs; theory fields are absent where the prediction is undefined
/// (e.g. the KL divergence at sigma = 0, gamma < 1).
struct ResultRow {
  double gamma = 0.0;
  double effective_gamma = 0.0;
  long long n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::optional<double> m_emp, m_err;
  std::optional<double> q_emp, q_err;
  std::optional<double> Q_emp, Q_err;
  std::optional<double> Qstar_emp, Qstar_err;
  std::optional<double> q_theory;
  std::optional<double> Q_theory;
  std::optional<double> m_theory;
  std::optional<double> kl_exact, kl_lower, kl_upper;
  std::optional<double> ms_exact, ms_asym;
};

/// Theory values shared by the sweep columns and the standalone curve
/// table; both go through this single code path.
struct TheoryValues {
  std::optional<double> q_theory;
  std::optional<double> bbp_delta;
  std::optional<double> Q_theory;
  std::optional<double> m_theory;
  std::optional<double> kl_exact, kl_lower, kl_upper;
  std::optional<double> ms_exact, ms_asym;
};

TheoryValues compute_theory(double gamma, long long n, double beta,
                            double sigma_reg);

/// Sample count for a grid point: round(gamma * d), at least 1.
long long sample_count(double gamma, int d);

/// Parse "lo:hi:{lin|log}:count" or a comma list; result sorted ascending.
std::vector<double> parse_gamma_grid(const std::string& text);

/// Run the sweep. Rows are ordered by grid index then trial index and are
/// identical for any worker count.
std::vector<ResultRow> run_sweep(const SweepConfig& config);

struct TheoryRow {
  double gamma = 0.0;
  long long n = 0;
  TheoryValues values;
};

std::vector<TheoryRow> theory_curves(const std::vector<double>& gamma_grid,
                                     double beta, double sigma_reg, int d_ref);

/// Shortest round-trip decimal form; unset and non-finite become the empty
/// string (empty CSV cell).
std::string format_double(double value);
std::string format_cell(const std::optional<double>& value);

std::string sweep_csv(const std::vector<ResultRow>& rows);
std::string sweep_jsonl(const std::vector<ResultRow>& rows);
std::string theory_csv(const std::vector<TheoryRow>& rows);

void emit_theory_curves(const std::vector<double>& gamma_grid, double beta,
                        double sigma_reg, int d_ref, const std::string& out_path);

/// Command-line front end; returns the process exit status (0 ok, 1 usage,
/// 2 runtime/data error).
int cli_entry(int argc, const char* const* argv);

/// Fixed sweep CSV header.
extern const char* const kSweepCsvHeader;

}  // namespace mgdm::harness
