#include "mgdm/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgdm::theory {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuadTol = 1e-9;
constexpr int kMaxDepth = 60;

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1]; the embedded 7-point
// Gauss rule sits on the odd Kronrod nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
double kronrod_panel(const F& g, double a, double b, double& err) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = g(c);
  double k15 = kWgk[7] * fc;
  double g7 = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double f1 = g(c - h * kXgk[j]);
    double f2 = g(c + h * kXgk[j]);
    k15 += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) g7 += kWg[j / 2] * (f1 + f2);
  }
  err = std::abs(k15 - g7) * h;
  return k15 * h;
}

template <typename F>
double adaptive_quadrature(const F& g, double a, double b, double tol,
                           int depth) {
  double err = 0.0;
  double value = kronrod_panel(g, a, b, err);
  if (err <= tol || depth >= kMaxDepth) return value;
  double mid = 0.5 * (a + b);
  return adaptive_quadrature(g, a, mid, 0.5 * tol, depth + 1) +
         adaptive_quadrature(g, mid, b, 0.5 * tol, depth + 1);
}

void check_gamma(double gamma, const char* what) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument(std::string(what) + ": gamma must be > 0");
}

void check_sigma(double sigma_reg, const char* what) {
  if (!(sigma_reg >= 0.0) || !std::isfinite(sigma_reg))
    throw std::invalid_argument(std::string(what) + ": sigma_reg must be >= 0");
}

}  // namespace

MPLaw mp_law(double gamma) {
  check_gamma(gamma, "mp_law");
  double rt = 1.0 / std::sqrt(gamma);
  MPLaw law;
  law.gamma = gamma;
  law.lambda_minus = (1.0 - rt) * (1.0 - rt);
  law.lambda_plus = (1.0 + rt) * (1.0 + rt);
  law.atom_mass = std::max(0.0, 1.0 - gamma);
  return law;
}

double mp_density(double x, double gamma) {
  MPLaw law = mp_law(gamma);
  if (x <= law.lambda_minus || x >= law.lambda_plus) return 0.0;
  return gamma * std::sqrt((law.lambda_plus - x) * (x - law.lambda_minus)) /
         (2.0 * kPi * x);
}

double mp_expectation(const std::function<double(double)>& f, double gamma,
                      double sigma_reg) {
  check_gamma(gamma, "mp_expectation");
  check_sigma(sigma_reg, "mp_expectation");
  MPLaw law = mp_law(gamma);
  double s2 = sigma_reg * sigma_reg;
  double total = 0.0;
  if (law.atom_mass > 0.0) {
    double at_atom = f(s2);
    if (!std::isfinite(at_atom))
      throw std::domain_error("mp_expectation: divergent at the atom");
    total += law.atom_mass * at_atom;
  }
  double span = law.lambda_plus - law.lambda_minus;
  // x = lambda_minus + span sin^2(theta) absorbs the sqrt edge factors into
  // the weight; the s/x ratio is exactly 1 when lambda_minus = 0, which
  // removes the 1/x pole at the gamma = 1 left edge.
  auto g = [&](double theta) {
    double sn = std::sin(theta);
    double cs = std::cos(theta);
    double s = span * sn * sn;
    double x = law.lambda_minus + s;
    double ratio = law.lambda_minus == 0.0 ? 1.0 : s / x;
    double w = gamma * span * cs * cs / kPi * ratio;
    return w * f(x + s2);
  };
  total += adaptive_quadrature(g, 0.0, 0.5 * kPi, kQuadTol, 0);
  if (!std::isfinite(total))
    throw std::runtime_error("mp_expectation: integral is not finite");
  return total;
}

double q_analytical(double gamma, double sigma_reg) {
  check_gamma(gamma, "q_analytical");
  check_sigma(sigma_reg, "q_analytical");
  double s2 = sigma_reg * sigma_reg;
  double mean_root =
      mp_expectation([](double y) { return std::sqrt(y); }, gamma, sigma_reg);
  double q = mean_root * mean_root / (1.0 + s2);
  return std::min(1.0, std::max(0.0, q));
}

double m_asymptotic(std::int64_t n, double sigma_reg) {
  if (n < 2) throw std::invalid_argument("m_asymptotic: n must be >= 2");
  check_sigma(sigma_reg, "m_asymptotic");
  double nn = double(n);
  return std::sqrt(2.0 * std::log(nn) /
                   (nn * (1.0 + sigma_reg * sigma_reg)));
}

BBPResult bbp_overlap(double beta, double gamma) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("bbp_overlap: beta must be >= 0");
  check_gamma(gamma, "bbp_overlap");
  BBPResult r;
  if (beta == 0.0) {
    r.gamma_c = std::numeric_limits<double>::infinity();
    r.no_spike = true;
    return r;
  }
  r.gamma_c = 1.0 / (beta * beta);
  if (gamma > r.gamma_c) {
    double num = beta * beta * gamma - 1.0;
    double den = beta * (1.0 + beta * gamma);
    r.delta = std::sqrt(std::max(0.0, num) / den);
    r.q_theory = r.delta * r.delta;
  }
  return r;
}

double rescale_eigenvalue(double lambda, double sigma_reg) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("rescale_eigenvalue: lambda must be >= 0");
  check_sigma(sigma_reg, "rescale_eigenvalue");
  double s2 = sigma_reg * sigma_reg;
  return (lambda + s2) / (1.0 + s2);
}

KLResult kl_divergence(double gamma, double sigma_reg) {
  check_gamma(gamma, "kl_divergence");
  check_sigma(sigma_reg, "kl_divergence");
  if (sigma_reg == 0.0 && gamma < 1.0)
    throw std::domain_error(
        "kl_divergence: divergent for sigma_reg = 0 and gamma < 1");
  double s2 = sigma_reg * sigma_reg;
  double log_scale = std::log1p(s2);
  KLResult r;
  r.d_exact = mp_expectation(
      [&](double y) { return -0.5 * (std::log(y) - log_scale); }, gamma,
      sigma_reg);
  r.d_exact = std::max(0.0, r.d_exact);
  double q = q_analytical(gamma, sigma_reg);
  r.lower = std::max(0.0, -0.5 * std::log(q));
  double rest = 1.0 - q;
  r.upper = rest <= 0.0 ? 0.0 : 2.0 * (1.0 + std::log1p(1.0 / s2)) * rest;
  if (gamma >= 1.0) {
    double lam_minus = mp_law(gamma).lambda_minus;
    double edge = (lam_minus + s2) / (1.0 + s2);
    r.upper_refined =
        rest <= 0.0 ? 0.0 : 2.0 * (1.0 - std::log(edge)) * rest;
  }
  return r;
}

MSResult ms_distance(double beta, double gamma) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("ms_distance: beta must be >= 0");
  check_gamma(gamma, "ms_distance");
  double rt = 1.0 / std::sqrt(gamma);
  MSResult r;
  r.lambda_bulk = 1.0 / gamma + 2.0 * rt;
  r.beta_threshold = 1.0 + rt;
  if (beta >= r.beta_threshold) {
    r.lambda_spike = (1.0 + beta) / (2.0 * beta * gamma) *
                     (1.0 + std::sqrt(1.0 + 4.0 * beta * gamma));
    r.d_ms = 0.5 * *r.lambda_spike;
  } else {
    r.d_ms = 0.5 * r.lambda_bulk;
  }
  return r;
}

double ms_asymptotic(double beta, double Q) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("ms_asymptotic: beta must be > 0");
  if (!(Q >= 0.0 && Q <= 1.0))
    throw std::invalid_argument("ms_asymptotic: Q must be in [0, 1]");
  return 0.5 * std::sqrt(beta * (1.0 + beta)) * std::sqrt(1.0 - Q);
}

}  // namespace mgdm::theory
