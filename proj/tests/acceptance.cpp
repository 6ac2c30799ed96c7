// Acceptance gate: exercises the headline phase-diagram results end to end
// at desk scale and prints one [PASS]/[FAIL] line per criterion. The exit
// status is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mgdm/harness.hpp"
#include "mgdm/linalg.hpp"
#include "mgdm/models.hpp"
#include "mgdm/overlaps.hpp"
#include "mgdm/pipeline.hpp"
#include "mgdm/rng.hpp"
#include "mgdm/theory.hpp"

using namespace mgdm;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double std_err_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------

bool convergence_curve(std::string& detail) {
  harness::SweepConfig config;
  config.model_kind = harness::ModelKind::spiked;
  config.d = 500;
  config.beta = 0.0;
  config.sigma_reg = 0.0;
  config.gamma_grid = harness::parse_gamma_grid("0.1:10:log:10");
  config.n_trials = 5;
  config.n_latents = 64;
  config.master_seed = 20260801;
  config.outputs = {overlaps::OverlapKind::q};
  std::vector<harness::ResultRow> rows = harness::run_sweep(config);

  double max_dev = 0.0;
  for (size_t gi = 0; gi < config.gamma_grid.size(); ++gi) {
    std::vector<double> trial_means;
    for (int t = 0; t < config.n_trials; ++t)
      trial_means.push_back(*rows[gi * 5 + size_t(t)].q_emp);
    double dev = std::abs(mean_of(trial_means) - *rows[gi * 5].q_theory);
    max_dev = std::max(max_dev, dev);
  }
  double spot = std::abs(theory::q_analytical(1.0, 0.0) -
                         64.0 / (9.0 * M_PI * M_PI));
  detail = fmt("max|q_emp-q_theory|=%.4f tol 0.03, spot dev=%.2e tol 1e-6",
               max_dev, spot);
  return max_dev <= 0.03 && spot <= 1e-6;
}

bool memorisation(std::string& detail) {
  const int d = 2000;
  models::SpikedModel flat = models::make_spiked_model(d, 0.0, 2100);

  models::Dataset one = models::sample_dataset(flat, 1, 2101);
  double m_one =
      overlaps::memorisation_overlap(
          linalg::empirical_covariance(one, 0.0), one, 16, 2102)
          .mean;
  bool anchor = std::abs(m_one - 1.0) <= 1e-10;

  double worst_oracle = 0.0, worst_asym = 0.0;
  for (std::int64_t n : {10, 30, 100, 300}) {
    models::Dataset data =
        models::sample_dataset(flat, n, rng::derive_seed(2103, {std::uint64_t(n)}));
    for (double sigma : {0.0, 1.0}) {
      linalg::GenerativeModel model =
          linalg::empirical_covariance(data, sigma);
      double m_emp =
          overlaps::memorisation_overlap(model, data, 64, 2104).mean;
      double oracle = overlaps::finite_n_memorisation_oracle(
          n, sigma, 40000, rng::derive_seed(2105, {std::uint64_t(n)}));
      worst_oracle = std::max(worst_oracle, std::abs(m_emp - oracle));
      if (n >= 100) {
        double asym = theory::m_asymptotic(n, sigma);
        worst_asym =
            std::max(worst_asym, std::abs(m_emp - asym) / asym);
      }
    }
  }
  detail = fmt("n=1 dev=%.1e, max|m-oracle|=%.4f tol 0.05, "
               "max rel dev vs asymptote=%.3f tol 0.15",
               std::abs(m_one - 1.0), worst_oracle, worst_asym);
  return anchor && worst_oracle <= 0.05 && worst_asym <= 0.15;
}

bool bbp_transition(std::string& detail) {
  harness::SweepConfig config;
  config.model_kind = harness::ModelKind::spiked;
  config.d = 1000;
  config.beta = 2.0;
  config.sigma_reg = 0.0;
  config.gamma_grid = {0.15, 1.0, 4.0};
  config.n_trials = 5;
  config.n_latents = 4;
  config.master_seed = 20260803;
  config.outputs = {overlaps::OverlapKind::Q};
  std::vector<harness::ResultRow> rows = harness::run_sweep(config);

  std::vector<double> bar(3);
  for (size_t gi = 0; gi < 3; ++gi) {
    std::vector<double> trials;
    for (int t = 0; t < 5; ++t)
      trials.push_back(*rows[gi * 5 + size_t(t)].Q_emp);
    bar[gi] = mean_of(trials);
  }
  double dev1 = std::abs(bar[1] - theory::bbp_overlap(2.0, 1.0).q_theory);
  double dev4 = std::abs(bar[2] - theory::bbp_overlap(2.0, 4.0).q_theory);
  detail = fmt("Q(0.15)=%.3f tol<0.1, dev at gamma=1: %.3f, at gamma=4: "
               "%.3f, tol 0.05",
               bar[0], dev1, dev4);
  return bar[0] < 0.1 && dev1 <= 0.05 && dev4 <= 0.05;
}

bool kl_bounds(std::string& detail) {
  std::vector<double> grid = harness::parse_gamma_grid("0.1:100:log:20");
  double worst = -1.0;
  bool ordered = true;
  for (double sigma : {0.1, 0.3, 1.0})
    for (double gamma : grid) {
      theory::KLResult kl = theory::kl_divergence(gamma, sigma);
      ordered = ordered && kl.lower <= kl.d_exact + 1e-6 &&
                kl.d_exact <= kl.upper + 1e-6;
      if (kl.upper_refined)
        ordered = ordered && kl.d_exact <= *kl.upper_refined + 1e-6;
      worst = std::max({worst, kl.lower - kl.d_exact,
                        kl.d_exact - kl.upper});
    }
  double spot = std::abs(theory::kl_divergence(1.0, 0.0).d_exact - 0.5);
  detail = fmt("worst bound slack=%.1e, exact(1,0) dev=%.1e tol 1e-6",
               worst, spot);
  return ordered && spot <= 1e-6;
}

bool ms_distance(std::string& detail) {
  std::vector<double> grid = harness::parse_gamma_grid("0.1:10:log:20");
  double worst_gap = 0.0;
  for (double gamma : grid) {
    double beta_th = 1.0 + 1.0 / std::sqrt(gamma);
    theory::MSResult ms = theory::ms_distance(beta_th, gamma);
    if (!ms.lambda_spike) {
      detail = "spike branch missing at its threshold";
      return false;
    }
    worst_gap =
        std::max(worst_gap, std::abs(*ms.lambda_spike - ms.lambda_bulk));
  }

  models::SpikedModel model = models::make_spiked_model(1000, 4.0, 2500);
  Eigen::MatrixXd population = model.population_covariance();
  double worst_emp = 0.0;
  for (double gamma : {1.0, 4.0, 16.0}) {
    models::Dataset data = models::sample_dataset(
        model, std::int64_t(gamma * 1000),
        rng::derive_seed(2501, {std::uint64_t(gamma)}));
    Eigen::MatrixXd sigma_hat =
        linalg::empirical_covariance(data, 0.0).sigma_hat();
    double emp = 0.5 * linalg::spectral_norm(population - sigma_hat);
    worst_emp = std::max(
        worst_emp, std::abs(emp - theory::ms_distance(4.0, gamma).d_ms));
  }

  double envelope = 0.0;
  for (double gamma : harness::parse_gamma_grid("10:100:log:20")) {
    double q_big = theory::bbp_overlap(4.0, gamma).q_theory;
    double diff = std::abs(theory::ms_distance(4.0, gamma).d_ms -
                           theory::ms_asymptotic(4.0, q_big));
    envelope = std::max(envelope, diff / (1.0 - q_big));
  }
  detail = fmt("branch gap=%.1e tol 1e-10, max emp dev=%.3f tol 0.1, "
               "envelope C=%.2f tol <5",
               worst_gap, worst_emp, envelope);
  return worst_gap <= 1e-10 && worst_emp <= 0.1 && envelope < 5.0;
}

// Per-sample random sign flips of the coordinates in the model's own frame:
// keeps every marginal amplitude, destroys cross-coordinate correlation.
models::Dataset sign_randomize(const models::Dataset& data,
                               const Eigen::MatrixXd& basis,
                               std::uint64_t seed) {
  rng::Stream stream(seed);
  Eigen::MatrixXd coords = data.samples * basis.transpose();
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = 0; j < coords.cols(); ++j)
      if (stream.uniform(0.0, 1.0) < 0.5) coords(i, j) = -coords(i, j);
  models::Dataset out;
  out.samples = coords * basis;
  out.provenance = data.provenance + "+sign-randomized";
  return out;
}

bool powerlaw_phenomenology(std::string& detail) {
  const std::vector<double> grid = {0.0625, 0.125, 0.25, 0.5, 1.0,
                                    2.0,    4.0,   8.0,  16.0};
  const int d = 256, latents = 32;
  const std::uint64_t trials = 3;
  models::PowerLawModel structured = models::make_powerlaw_model(
      d, 1.0, 1.0, models::BasisChoice::haar, 2600);
  models::PowerLawModel flat = models::make_powerlaw_model(
      d, 1.0, 0.0, models::BasisChoice::haar, 2601);
  Eigen::MatrixXd proj1 = structured.basis.transpose();
  Eigen::MatrixXd proj0 = flat.basis.transpose();

  double gamma_q = 0.0, gamma_qstar = 0.0;
  double worst_null = 0.0, worst_pairing = 0.0;
  for (size_t gi = 0; gi < grid.size(); ++gi) {
    std::int64_t n = harness::sample_count(grid[gi], d);
    std::vector<double> big_q, qstar1, qstar0, qstar3, q1, q3;
    for (std::uint64_t t = 0; t < trials; ++t) {
      std::uint64_t st = rng::derive_seed(2602, {gi, t});
      models::Dataset a1 =
          models::sample_dataset(structured, n, rng::derive_seed(st, {0}));
      models::Dataset b1 =
          models::sample_dataset(structured, n, rng::derive_seed(st, {1}));
      linalg::GenerativeModel ma = linalg::empirical_covariance(a1, 0.0);
      linalg::GenerativeModel mb = linalg::empirical_covariance(b1, 0.0);
      std::uint64_t latent_seed = rng::derive_seed(st, {3});
      q1.push_back(
          overlaps::convergence_overlap(ma, mb, latents, latent_seed).mean);
      big_q.push_back(overlaps::subspace_overlap(ma, mb).mean);
      qstar1.push_back(overlaps::rotated_subspace_overlap(
                           a1.samples, b1.samples, proj1, false)
                           .mean);

      models::Dataset a0 =
          models::sample_dataset(flat, n, rng::derive_seed(st, {4}));
      models::Dataset b0 =
          models::sample_dataset(flat, n, rng::derive_seed(st, {5}));
      qstar0.push_back(overlaps::rotated_subspace_overlap(
                           a0.samples, b0.samples, proj0, false)
                           .mean);

      models::Dataset a3 =
          sign_randomize(a1, structured.basis, rng::derive_seed(st, {6}));
      models::Dataset b3 =
          sign_randomize(b1, structured.basis, rng::derive_seed(st, {7}));
      q3.push_back(overlaps::convergence_overlap(
                       linalg::empirical_covariance(a3, 0.0),
                       linalg::empirical_covariance(b3, 0.0), latents,
                       latent_seed)
                       .mean);
      qstar3.push_back(overlaps::rotated_subspace_overlap(
                           a3.samples, b3.samples, proj1, false)
                           .mean);
    }
    if (gamma_q == 0.0 && mean_of(big_q) > 0.5) gamma_q = grid[gi];
    if (gamma_qstar == 0.0 && mean_of(qstar1) > 0.5) gamma_qstar = grid[gi];
    worst_null =
        std::max({worst_null, mean_of(qstar0), mean_of(qstar3)});
    double band =
        2.0 * std::hypot(std_err_of(q1), std_err_of(q3));
    worst_pairing = std::max(
        worst_pairing, std::abs(mean_of(q1) - mean_of(q3)) - band);
  }
  detail = fmt("Q>0.5 from gamma=%.4g, Q*>0.5 from gamma=%.4g, "
               "max null Q*=%.3f tol<0.15",
               gamma_q, gamma_qstar, worst_null);
  detail += fmt(", worst paired-q excess=%.4f tol<=0", worst_pairing);
  return gamma_q > 0.0 && gamma_qstar > 0.0 &&
         gamma_qstar >= 4.0 * gamma_q && worst_null < 0.15 &&
         worst_pairing <= 0.0;
}

bool rotated_eigenvector_identity(std::string& detail) {
  models::PowerLawModel model = models::make_powerlaw_model(
      64, 1.0, 2.0, models::BasisChoice::haar, 2700);
  linalg::EigenPair top =
      linalg::leading_eigenpair(model.population_covariance());
  Eigen::VectorXd rotated = model.basis * top.vector;
  Eigen::VectorXd predicted(64);
  for (int i = 0; i < 64; ++i) {
    double s = model.amplitudes(i);
    predicted(i) = s * model.spike(i) / (top.value - s * s);
  }
  double cosine = std::abs(rotated.dot(predicted)) /
                  (rotated.norm() * predicted.norm());
  detail = fmt("cosine deficit=%.2e tol 1e-8", std::max(0.0, 1.0 - cosine));
  return cosine >= 1.0 - 1e-8;
}

bool infrastructure(std::string& detail) {
  double worst_mp = 0.0;
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    worst_mp = std::max(
        worst_mp, std::abs(theory::mp_expectation(
                               [](double) { return 1.0; }, gamma, 0.0) -
                           1.0));
    worst_mp = std::max(
        worst_mp, std::abs(theory::mp_expectation(
                               [](double x) { return x; }, gamma, 0.0) -
                           1.0));
  }
  bool mp_ok = worst_mp <= 1e-8;

  rng::Stream stream(2800);
  models::Dataset data;
  data.samples = stream.gaussian_matrix(5, 12);
  std::string path = "acceptance-container.tmp";
  pipeline::write_container(data, 3, 4, path);
  pipeline::LoadedContainer loaded = pipeline::read_container(path);
  bool container_ok =
      (loaded.dataset.samples.array() == data.samples.array()).all();
  std::string copy_path = "acceptance-container-copy.tmp";
  pipeline::write_container(loaded.dataset, 3, 4, copy_path);
  {
    std::ifstream f1(path, std::ios::binary), f2(copy_path, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)),
                   std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)),
                   std::istreambuf_iterator<char>());
    container_ok = container_ok && b1 == b2;
  }
  std::remove(path.c_str());
  std::remove(copy_path.c_str());

  harness::SweepConfig config;
  config.model_kind = harness::ModelKind::spiked;
  config.d = 60;
  config.beta = 1.0;
  config.sigma_reg = 0.2;
  config.gamma_grid = {0.5, 1.0, 2.0};
  config.n_trials = 3;
  config.n_latents = 8;
  config.master_seed = 2801;
  config.outputs = {overlaps::OverlapKind::m, overlaps::OverlapKind::q,
                    overlaps::OverlapKind::Q};
  config.workers = 1;
  std::string serial = harness::sweep_csv(harness::run_sweep(config));
  config.workers = 8;
  bool workers_ok =
      harness::sweep_csv(harness::run_sweep(config)) == serial;

  int range_violations = 0;
  for (std::uint64_t c = 0; c < 200; ++c) {
    std::uint64_t base = rng::derive_seed(2802, {c});
    rng::Stream cfg_stream(base);
    int d = 3 + int(cfg_stream.uniform(0.0, 29.0));
    std::int64_t n = 2 + std::int64_t(cfg_stream.uniform(0.0, 38.0));
    double sigma = (c % 3 == 0) ? 0.0 : cfg_stream.uniform(0.0, 1.0);
    double beta = cfg_stream.uniform(0.0, 4.0);
    std::vector<double> values;
    if (c % 4 == 0) {
      models::PowerLawModel model = models::make_powerlaw_model(
          d, cfg_stream.uniform(0.2, 1.5), beta, models::BasisChoice::haar,
          base);
      models::Dataset da =
          models::sample_dataset(model, n, rng::derive_seed(base, {1}));
      models::Dataset db =
          models::sample_dataset(model, n, rng::derive_seed(base, {2}));
      linalg::GenerativeModel ma = linalg::empirical_covariance(da, sigma);
      linalg::GenerativeModel mb = linalg::empirical_covariance(db, sigma);
      Eigen::MatrixXd proj = model.basis.transpose();
      values = {overlaps::memorisation_overlap(ma, da, 4, base).mean,
                overlaps::convergence_overlap(ma, mb, 4, base).mean,
                overlaps::subspace_overlap(ma, mb).mean,
                overlaps::rotated_subspace_overlap(da.samples, db.samples,
                                                   proj, false)
                    .mean};
    } else {
      models::SpikedModel model = models::make_spiked_model(d, beta, base);
      models::Dataset da =
          models::sample_dataset(model, n, rng::derive_seed(base, {1}));
      models::Dataset db =
          models::sample_dataset(model, n, rng::derive_seed(base, {2}));
      linalg::GenerativeModel ma = linalg::empirical_covariance(da, sigma);
      linalg::GenerativeModel mb = linalg::empirical_covariance(db, sigma);
      Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
      values = {overlaps::memorisation_overlap(ma, da, 4, base).mean,
                overlaps::convergence_overlap(ma, mb, 4, base).mean,
                overlaps::subspace_overlap(ma, mb).mean,
                overlaps::rotated_subspace_overlap(da.samples, db.samples,
                                                   eye, false)
                    .mean};
    }
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0 + 1e-12)) ++range_violations;
  }
  detail = "mp dev=" + fmt("%.1e", worst_mp) +
           std::string(container_ok ? ", container bit-exact" :
                                      ", container MISMATCH") +
           (workers_ok ? ", workers byte-identical" : ", workers DIFFER") +
           ", range violations=" + std::to_string(range_violations) + "/800";
  return mp_ok && container_ok && workers_ok && range_violations == 0;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "convergence-curve", convergence_curve},
      {2, "memorisation", memorisation},
      {3, "bbp-transition", bbp_transition},
      {4, "kl-bounds", kl_bounds},
      {5, "ms-distance", ms_distance},
      {6, "powerlaw-phenomenology", powerlaw_phenomenology},
      {7, "rotated-eigenvector-identity", rotated_eigenvector_identity},
      {8, "infrastructure", infrastructure},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d %s (%s)\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d/8 criteria passed\n", 8 - failures);
  return failures;
}
