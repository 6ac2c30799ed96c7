#include "mgdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mgdm/linalg.hpp"
#include "mgdm/models.hpp"
#include "mgdm/rng.hpp"
#include "mgdm/theory.hpp"

namespace mgdm::harness {

const char* const kSweepCsvHeader =
    "gamma,effective_gamma,n,d,seed,m_emp,m_err,q_emp,q_err,Q_emp,Q_err,"
    "Qstar_emp,Qstar_err,q_theory,Q_theory,m_theory,kl_exact,kl_lower,"
    "kl_upper,ms_exact,ms_asym";

namespace {

std::optional<double> finite_or_null(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

double parse_positive_real(const std::string& token, const char* what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE ||
      !std::isfinite(value) || value <= 0.0)
    throw std::invalid_argument(std::string(what) + ": bad value '" + token +
                                "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) parts.push_back(token);
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

bool wants(const SweepConfig& config, overlaps::OverlapKind kind) {
  return std::find(config.outputs.begin(), config.outputs.end(), kind) !=
         config.outputs.end();
}

void validate_config(const SweepConfig& config) {
  if (config.d < 1)
    throw std::invalid_argument("sweep: d must be >= 1");
  if (config.n_trials < 1)
    throw std::invalid_argument("sweep: n_trials must be >= 1");
  if (config.workers < 1)
    throw std::invalid_argument("sweep: workers must be >= 1");
  if (config.outputs.empty())
    throw std::invalid_argument("sweep: no outputs requested");
  if (config.gamma_grid.empty())
    throw std::invalid_argument("sweep: empty gamma grid");
  if (!std::is_sorted(config.gamma_grid.begin(), config.gamma_grid.end()))
    throw std::invalid_argument("sweep: gamma grid must be ascending");
  for (double g : config.gamma_grid)
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument("sweep: gamma values must be > 0");
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta))
    throw std::invalid_argument("sweep: beta must be >= 0");
  if (!(config.sigma_reg >= 0.0) || !std::isfinite(config.sigma_reg))
    throw std::invalid_argument("sweep: sigma must be >= 0");
  bool needs_latents = wants(config, overlaps::OverlapKind::m) ||
                       wants(config, overlaps::OverlapKind::q);
  if (needs_latents && config.n_latents < 1)
    throw std::invalid_argument("sweep: n_latents must be >= 1");
}

}  // namespace

TheoryValues compute_theory(double gamma, long long n, double beta,
                            double sigma_reg) {
  TheoryValues v;
  v.q_theory = finite_or_null(theory::q_analytical(gamma, sigma_reg));
  theory::BBPResult bbp = theory::bbp_overlap(beta, gamma);
  v.bbp_delta = finite_or_null(bbp.delta);
  v.Q_theory = finite_or_null(bbp.q_theory);
  if (n >= 2) v.m_theory = finite_or_null(theory::m_asymptotic(n, sigma_reg));
  if (sigma_reg > 0.0 || gamma >= 1.0) {
    theory::KLResult kl = theory::kl_divergence(gamma, sigma_reg);
    v.kl_exact = finite_or_null(kl.d_exact);
    v.kl_lower = finite_or_null(kl.lower);
    v.kl_upper = finite_or_null(kl.upper);
  }
  v.ms_exact = finite_or_null(theory::ms_distance(beta, gamma).d_ms);
  if (beta > 0.0)
    v.ms_asym = finite_or_null(theory::ms_asymptotic(beta, bbp.q_theory));
  return v;
}

long long sample_count(double gamma, int d) {
  return std::max(1ll, std::llround(gamma * double(d)));
}

std::vector<double> parse_gamma_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 4)
      throw std::invalid_argument(
          "gamma grid: expected lo:hi:{lin|log}:count, got '" + text + "'");
    double lo = parse_positive_real(parts[0], "gamma grid lo");
    double hi = parse_positive_real(parts[1], "gamma grid hi");
    const std::string& mode = parts[2];
    int count = 0;
    auto [p, ec] = std::from_chars(
        parts[3].data(), parts[3].data() + parts[3].size(), count);
    if (ec != std::errc() || p != parts[3].data() + parts[3].size() ||
        count < 1)
      throw std::invalid_argument("gamma grid: bad count '" + parts[3] + "'");
    if (hi < lo)
      throw std::invalid_argument("gamma grid: hi must be >= lo");
    if (mode != "lin" && mode != "log")
      throw std::invalid_argument("gamma grid: mode must be lin or log");
    if (count == 1) {
      grid.push_back(lo);
    } else if (mode == "lin") {
      double step = (hi - lo) / double(count - 1);
      for (int i = 0; i < count; ++i) grid.push_back(lo + step * i);
    } else {
      double llo = std::log(lo);
      double step = (std::log(hi) - llo) / double(count - 1);
      for (int i = 0; i < count; ++i) grid.push_back(std::exp(llo + step * i));
    }
    // Pin both endpoints so callers get back exactly the bounds they gave.
    grid.front() = lo;
    grid.back() = hi;
  } else {
    for (const std::string& token : split(text, ','))
      grid.push_back(parse_positive_real(token, "gamma grid"));
    std::sort(grid.begin(), grid.end());
  }
  if (grid.empty()) throw std::invalid_argument("gamma grid: empty");
  return grid;
}

namespace {

struct SweepContext {
  const SweepConfig* config = nullptr;
  std::optional<models::SpikedModel> spiked;
  std::optional<models::PowerLawModel> powerlaw;
  Eigen::MatrixXd qstar_basis;
};

models::Dataset draw_dataset(const SweepContext& ctx, long long n,
                             std::uint64_t seed) {
  if (n > std::numeric_limits<int>::max())
    throw std::invalid_argument("sweep: n too large");
  if (ctx.spiked) return models::sample_dataset(*ctx.spiked, int(n), seed);
  return models::sample_dataset(*ctx.powerlaw, int(n), seed);
}

ResultRow compute_cell(const SweepContext& ctx, size_t gi, size_t ti) {
  const SweepConfig& config = *ctx.config;
  ResultRow row;
  row.gamma = config.gamma_grid[gi];
  row.n = sample_count(row.gamma, config.d);
  row.d = config.d;
  row.effective_gamma = double(row.n) / double(config.d);
  row.seed = rng::derive_seed(config.master_seed,
                              {1, std::uint64_t(gi), std::uint64_t(ti)});

  bool want_m = wants(config, overlaps::OverlapKind::m);
  bool want_q = wants(config, overlaps::OverlapKind::q);
  bool want_Q = wants(config, overlaps::OverlapKind::Q);
  bool want_Qstar = wants(config, overlaps::OverlapKind::Qstar);

  models::Dataset data_a =
      draw_dataset(ctx, row.n, rng::derive_seed(row.seed, {0}));
  std::optional<models::Dataset> data_b;
  if (want_q || want_Q || want_Qstar)
    data_b = draw_dataset(ctx, row.n, rng::derive_seed(row.seed, {1}));

  std::optional<linalg::GenerativeModel> model_a;
  std::optional<linalg::GenerativeModel> model_b;
  if (want_m || want_q || want_Q)
    model_a.emplace(data_a.samples, config.sigma_reg);
  if (want_q || want_Q)
    model_b.emplace(data_b->samples, config.sigma_reg);

  if (want_m) {
    auto e = overlaps::memorisation_overlap(
        *model_a, data_a, config.n_latents, rng::derive_seed(row.seed, {2}),
        config.subtract_baseline);
    row.m_emp = e.mean;
    row.m_err = e.std_err;
  }
  if (want_q) {
    auto e = overlaps::convergence_overlap(*model_a, *model_b,
                                           config.n_latents,
                                           rng::derive_seed(row.seed, {3}));
    row.q_emp = e.mean;
    row.q_err = e.std_err;
  }
  if (want_Q) {
    auto e = overlaps::subspace_overlap(*model_a, *model_b);
    row.Q_emp = e.mean;
    row.Q_err = e.std_err;
  }
  if (want_Qstar) {
    auto e = overlaps::rotated_subspace_overlap(
        data_a.samples, data_b->samples, ctx.qstar_basis, false);
    row.Qstar_emp = e.mean;
    row.Qstar_err = e.std_err;
  }

  TheoryValues theory = compute_theory(row.effective_gamma, row.n,
                                       config.beta, config.sigma_reg);
  row.q_theory = theory.q_theory;
  row.Q_theory = theory.Q_theory;
  row.m_theory = theory.m_theory;
  row.kl_exact = theory.kl_exact;
  row.kl_lower = theory.kl_lower;
  row.kl_upper = theory.kl_upper;
  row.ms_exact = theory.ms_exact;
  row.ms_asym = theory.ms_asym;
  return row;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepConfig& config) {
  validate_config(config);
  SweepContext ctx;
  ctx.config = &config;
  std::uint64_t model_seed = rng::derive_seed(config.master_seed, {0, 0});
  if (config.model_kind == ModelKind::spiked) {
    ctx.spiked = models::make_spiked_model(config.d, config.beta, model_seed);
    if (wants(config, overlaps::OverlapKind::Qstar))
      ctx.qstar_basis = Eigen::MatrixXd::Identity(config.d, config.d);
  } else {
    ctx.powerlaw = models::make_powerlaw_model(config.d, config.alpha,
                                               config.beta,
                                               models::BasisChoice::haar,
                                               model_seed);
    if (wants(config, overlaps::OverlapKind::Qstar))
      ctx.qstar_basis = ctx.powerlaw->basis.transpose();
  }

  const size_t n_cells = config.gamma_grid.size() * size_t(config.n_trials);
  std::vector<ResultRow> rows(n_cells);
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    while (true) {
      size_t cell = next.fetch_add(1);
      if (cell >= n_cells) break;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) break;
      }
      try {
        rows[cell] = compute_cell(ctx, cell / size_t(config.n_trials),
                                  cell % size_t(config.n_trials));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        break;
      }
    }
  };
  size_t n_workers = std::min(size_t(config.workers), n_cells);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t i = 0; i + 1 < n_workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

std::vector<TheoryRow> theory_curves(const std::vector<double>& gamma_grid,
                                     double beta, double sigma_reg,
                                     int d_ref) {
  if (d_ref < 1) throw std::invalid_argument("theory: d must be >= 1");
  if (gamma_grid.empty())
    throw std::invalid_argument("theory: empty gamma grid");
  std::vector<TheoryRow> rows;
  rows.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument("theory: gamma values must be > 0");
    TheoryRow row;
    row.gamma = gamma;
    row.n = sample_count(gamma, d_ref);
    row.values = compute_theory(gamma, row.n, beta, sigma_reg);
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double value) {
  if (!std::isfinite(value)) return "";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "";
  return std::string(buf, p);
}

std::string format_cell(const std::optional<double>& value) {
  if (!value) return "";
  return format_double(*value);
}

namespace {

void append_row_fields(std::string& out,
                       const std::vector<std::string>& fields, char sep) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += fields[i];
  }
  out.push_back('\n');
}

std::vector<std::string> row_cells(const ResultRow& r) {
  return {format_double(r.gamma),
          format_double(r.effective_gamma),
          std::to_string(r.n),
          std::to_string(r.d),
          std::to_string(r.seed),
          format_cell(r.m_emp),
          format_cell(r.m_err),
          format_cell(r.q_emp),
          format_cell(r.q_err),
          format_cell(r.Q_emp),
          format_cell(r.Q_err),
          format_cell(r.Qstar_emp),
          format_cell(r.Qstar_err),
          format_cell(r.q_theory),
          format_cell(r.Q_theory),
          format_cell(r.m_theory),
          format_cell(r.kl_exact),
          format_cell(r.kl_lower),
          format_cell(r.kl_upper),
          format_cell(r.ms_exact),
          format_cell(r.ms_asym)};
}

std::string json_value(const std::string& cell) {
  return cell.empty() ? "null" : cell;
}

}  // namespace

std::string sweep_csv(const std::vector<ResultRow>& rows) {
  std::string out = kSweepCsvHeader;
  out.push_back('\n');
  for (const ResultRow& r : rows) append_row_fields(out, row_cells(r), ',');
  return out;
}

std::string sweep_jsonl(const std::vector<ResultRow>& rows) {
  std::vector<std::string> keys = split(kSweepCsvHeader, ',');
  std::string out;
  for (const ResultRow& r : rows) {
    std::vector<std::string> cells = row_cells(r);
    out.push_back('{');
    for (size_t i = 0; i < keys.size(); ++i) {
      if (i) out.push_back(',');
      out.push_back('"');
      out += keys[i];
      out += "\":";
      out += json_value(cells[i]);
    }
    out += "}\n";
  }
  return out;
}

std::string theory_csv(const std::vector<TheoryRow>& rows) {
  std::string out =
      "gamma,n,q_analytical,m_asymptotic,bbp_delta,bbp_q_theory,kl_exact,"
      "kl_lower,kl_upper,ms_exact,ms_asym\n";
  for (const TheoryRow& r : rows) {
    append_row_fields(out,
                      {format_double(r.gamma), std::to_string(r.n),
                       format_cell(r.values.q_theory),
                       format_cell(r.values.m_theory),
                       format_cell(r.values.bbp_delta),
                       format_cell(r.values.Q_theory),
                       format_cell(r.values.kl_exact),
                       format_cell(r.values.kl_lower),
                       format_cell(r.values.kl_upper),
                       format_cell(r.values.ms_exact),
                       format_cell(r.values.ms_asym)},
                      ',');
  }
  return out;
}

void emit_theory_curves(const std::vector<double>& gamma_grid, double beta,
                        double sigma_reg, int d_ref,
                        const std::string& out_path) {
  std::string table = theory_csv(theory_curves(gamma_grid, beta, sigma_reg,
                                               d_ref));
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("emit_theory_curves: cannot open " + out_path);
  out << table;
  if (!out)
    throw std::runtime_error("emit_theory_curves: write failed: " + out_path);
}

}  // namespace mgdm::harness
