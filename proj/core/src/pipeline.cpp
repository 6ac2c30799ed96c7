#include "mgdm/pipeline.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mgdm/linalg.hpp"
#include "mgdm/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "MGDM1 container I/O assumes a little-endian host");

namespace mgdm::pipeline {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_shape(Eigen::Index d, int h, int w, const char* what) {
  if (h < 1 || w < 1)
    throw std::invalid_argument(std::string(what) + ": h and w must be >= 1");
  if (Eigen::Index(h) * Eigen::Index(w) != d)
    throw std::invalid_argument(std::string(what) +
                                ": sample dimension is not h*w");
}

Eigen::MatrixXcd dft_matrix(int m) {
  Eigen::MatrixXcd f(m, m);
  double scale = 1.0 / std::sqrt(double(m));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double angle = -2.0 * kPi * double(j) * double(k) / double(m);
      f(j, k) = std::polar(scale, angle);
    }
  return f;
}

}  // namespace

LoadedContainer read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_container: cannot open " + path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("read_container: missing header in " + path);
  long long n = 0;
  int h = 0, w = 0;
  if (std::sscanf(header.c_str(), "MGDM1 %lld %d %d", &n, &h, &w) != 3)
    throw std::runtime_error("read_container: bad magic or header in " + path);
  if (n < 1 || h < 1 || w < 1)
    throw std::runtime_error("read_container: bad dimensions in " + path);
  Eigen::Index d = Eigen::Index(h) * Eigen::Index(w);
  std::vector<double> payload(size_t(n) * size_t(d));
  in.read(reinterpret_cast<char*>(payload.data()),
          std::streamsize(payload.size() * sizeof(double)));
  if (in.gcount() != std::streamsize(payload.size() * sizeof(double)))
    throw std::runtime_error("read_container: truncated payload in " + path);
  if (in.peek() != std::ifstream::traits_type::eof())
    throw std::runtime_error("read_container: trailing bytes in " + path);
  LoadedContainer loaded;
  loaded.h = h;
  loaded.w = w;
  loaded.dataset.samples.resize(n, d);
  for (long long i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      loaded.dataset.samples(i, j) = payload[size_t(i) * size_t(d) + size_t(j)];
  if (!loaded.dataset.samples.allFinite())
    throw std::runtime_error("read_container: non-finite values in " + path);
  loaded.dataset.provenance = "container:" + path;
  return loaded;
}

void write_container(const models::Dataset& dataset, int h, int w,
                     const std::string& path) {
  check_shape(dataset.samples.cols(), h, w, "write_container");
  if (dataset.samples.rows() < 1)
    throw std::invalid_argument("write_container: empty dataset");
  if (!dataset.samples.allFinite())
    throw std::invalid_argument("write_container: non-finite values");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_container: cannot open " + path);
  char header[64];
  int len = std::snprintf(header, sizeof(header), "MGDM1 %lld %d %d\n",
                          (long long)dataset.samples.rows(), h, w);
  out.write(header, len);
  const Eigen::Index d = dataset.samples.cols();
  std::vector<double> row(static_cast<size_t>(d));
  for (Eigen::Index i = 0; i < dataset.samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) row[size_t(j)] = dataset.samples(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(row.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write_container: write failed: " + path);
}

FourierCorpus to_fourier(const models::Dataset& dataset, int h, int w) {
  check_shape(dataset.samples.cols(), h, w, "to_fourier");
  const Eigen::Index n = dataset.samples.rows();
  const Eigen::Index d = dataset.samples.cols();
  Eigen::MatrixXcd fh = dft_matrix(h);
  Eigen::MatrixXcd fw = dft_matrix(w);
  FourierCorpus corpus;
  corpus.h = h;
  corpus.w = w;
  corpus.coefficients.resize(n, d);
  corpus.freq_index.reserve(size_t(d));
  for (int k1 = 0; k1 < h; ++k1)
    for (int k2 = 0; k2 < w; ++k2) corpus.freq_index.emplace_back(k1, k2);
  Eigen::MatrixXcd image(h, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        image(r, c) = dataset.samples(i, Eigen::Index(r) * w + c);
    Eigen::MatrixXcd spec = fh * image * fw.transpose();
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        corpus.coefficients(i, Eigen::Index(r) * w + c) = spec(r, c);
  }
  return corpus;
}

models::Dataset inverse_fourier(const FourierCorpus& corpus) {
  const int h = corpus.h;
  const int w = corpus.w;
  check_shape(corpus.coefficients.cols(), h, w, "inverse_fourier");
  const Eigen::Index n = corpus.coefficients.rows();
  Eigen::MatrixXcd fh = dft_matrix(h);
  Eigen::MatrixXcd fw = dft_matrix(w);
  models::Dataset out;
  out.samples.resize(n, corpus.coefficients.cols());
  out.provenance = "inverse-fourier";
  Eigen::MatrixXcd spec(h, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        spec(r, c) = corpus.coefficients(i, Eigen::Index(r) * w + c);
    Eigen::MatrixXcd image = fh.adjoint() * spec * fw.conjugate();
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        out.samples(i, Eigen::Index(r) * w + c) = image(r, c).real();
  }
  return out;
}

int conjugate_index(int flat, int h, int w) {
  if (h < 1 || w < 1 || flat < 0 || flat >= h * w)
    throw std::invalid_argument("conjugate_index: index out of range");
  int k1 = flat / w;
  int k2 = flat % w;
  return ((h - k1) % h) * w + (w - k2) % w;
}

SpectrumReport fourier_spectrum_report(const FourierCorpus& corpus,
                                       bool center,
                                       std::optional<bool> drop_dc) {
  const Eigen::Index n = corpus.coefficients.rows();
  const Eigen::Index d = corpus.coefficients.cols();
  if (n < 1 || d < 1)
    throw std::invalid_argument("fourier_spectrum_report: empty corpus");
  bool drop = drop_dc.value_or(center);
  Eigen::MatrixXcd x = corpus.coefficients;
  if (center) x.rowwise() -= corpus.coefficients.colwise().mean();
  SpectrumReport report;
  report.centered = center;
  report.variances =
      x.cwiseAbs2().colwise().sum().real().transpose() / double(n);
  for (Eigen::Index j = 0; j < d; ++j)
    if (!drop || report.variances(j) > 1e-12) report.kept.push_back(int(j));
  if (report.kept.empty())
    throw std::runtime_error("fourier_spectrum_report: no usable frequencies");
  Eigen::MatrixXcd xk(n, Eigen::Index(report.kept.size()));
  for (size_t j = 0; j < report.kept.size(); ++j)
    xk.col(Eigen::Index(j)) = x.col(report.kept[j]);
  Eigen::MatrixXcd rho = linalg::correlation_matrix(xk, false);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fourier_spectrum_report: eigensolve failed");
  report.eigenvalues = es.eigenvalues().reverse();
  return report;
}

overlaps::OverlapEstimate qstar_on_corpora(const models::Dataset& corpus_a,
                                           const models::Dataset& corpus_b,
                                           int h, int w, bool phase_randomize,
                                           std::uint64_t seed) {
  if (corpus_a.samples.cols() != corpus_b.samples.cols())
    throw std::invalid_argument("qstar_on_corpora: dimension mismatch");
  check_shape(corpus_a.samples.cols(), h, w, "qstar_on_corpora");
  Eigen::MatrixXcd ca = to_fourier(corpus_a, h, w).coefficients;
  Eigen::MatrixXcd cb = to_fourier(corpus_b, h, w).coefficients;
  if (phase_randomize) {
    ca = models::phase_randomize(ca, rng::derive_seed(seed, {0}));
    cb = models::phase_randomize(cb, rng::derive_seed(seed, {1}));
  }
  Eigen::VectorXd var_a =
      ca.cwiseAbs2().colwise().mean().real().transpose();
  Eigen::VectorXd var_b =
      cb.cwiseAbs2().colwise().mean().real().transpose();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < ca.cols(); ++j)
    if (var_a(j) > 1e-12 && var_b(j) > 1e-12) kept.push_back(j);
  if (kept.empty())
    throw std::runtime_error("qstar_on_corpora: no usable frequencies");
  Eigen::MatrixXcd ka(ca.rows(), Eigen::Index(kept.size()));
  Eigen::MatrixXcd kb(cb.rows(), Eigen::Index(kept.size()));
  for (size_t j = 0; j < kept.size(); ++j) {
    ka.col(Eigen::Index(j)) = ca.col(kept[j]);
    kb.col(Eigen::Index(j)) = cb.col(kept[j]);
  }
  auto top_a = linalg::leading_eigenpair(linalg::correlation_matrix(ka, false));
  auto top_b = linalg::leading_eigenpair(linalg::correlation_matrix(kb, false));
  overlaps::OverlapEstimate e;
  e.kind = overlaps::OverlapKind::Qstar;
  e.mean = std::abs(top_a.vector.dot(top_b.vector));
  e.n_latents = 0;
  e.n_trials = 1;
  return e;
}

models::Dataset phase_randomize_real(const models::Dataset& dataset, int h,
                                     int w, std::uint64_t seed) {
  FourierCorpus corpus = to_fourier(dataset, h, w);
  const Eigen::Index n = corpus.coefficients.rows();
  const int d = h * w;
  rng::Stream stream(seed, {4});
  Eigen::VectorXcd mult(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      int c = conjugate_index(k, h, w);
      if (c == k) {
        mult(k) = stream.uniform(0.0, 1.0) < 0.5 ? 1.0 : -1.0;
      } else if (c > k) {
        double theta = stream.uniform(-kPi, kPi);
        mult(k) = std::polar(1.0, theta);
        mult(c) = std::polar(1.0, -theta);
      }
    }
    corpus.coefficients.row(i) =
        corpus.coefficients.row(i).cwiseProduct(mult.transpose());
  }
  models::Dataset out = inverse_fourier(corpus);
  out.provenance = dataset.provenance.empty()
                       ? "phase-randomized"
                       : dataset.provenance + "+phase-randomized";
  return out;
}

}  // namespace mgdm::pipeline
