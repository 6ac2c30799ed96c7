#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "mgdm/models.hpp"
#include "mgdm/pipeline.hpp"
#include "mgdm/rng.hpp"

namespace testsupport {

// Unique temp path, removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    static std::atomic<unsigned> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter.fetch_add(1)) + ".tmp"))
                .string();
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SyntheticFourierCorpus {
  mgdm::models::Dataset data;
  Eigen::VectorXcd spike;      // unit-norm Fourier-domain direction
  Eigen::VectorXd amplitudes;  // per-frequency, conjugate pairs tied
};

// Real n x (h*w) corpus whose Fourier coefficients are independent circular
// Gaussians with a radial amplitude decay, plus an optional shared factor of
// strength beta along a Hermitian-symmetric direction. The coefficient
// covariance is D_a (I + beta u u^H) D_a, so beta > 0 plants a
// cross-frequency correlation spike while beta = 0 leaves the frequencies
// uncorrelated; amplitudes are tied across conjugate pairs so every sample
// is exactly real.
inline SyntheticFourierCorpus make_fourier_corpus(int n, int h, int w,
                                                  double decay, double beta,
                                                  std::uint64_t seed) {
  using mgdm::pipeline::conjugate_index;
  const int d = h * w;
  Eigen::VectorXd amp(d);
  for (int k = 0; k < d; ++k) {
    int k1 = k / w;
    int k2 = k % w;
    double r1 = std::min(k1, h - k1);
    double r2 = std::min(k2, w - k2);
    amp(k) = std::pow(1.0 + std::hypot(r1, r2), -decay);
  }
  mgdm::rng::Stream stream(seed, {7});
  auto draw_paired = [&](Eigen::VectorXcd& v) {
    for (int k = 0; k < d; ++k) {
      int c = conjugate_index(k, h, w);
      if (c == k) {
        v(k) = stream.gaussian();
      } else if (c > k) {
        std::complex<double> g(stream.gaussian(), stream.gaussian());
        v(k) = g / std::sqrt(2.0);
        v(c) = std::conj(v(k));
      }
    }
  };
  Eigen::VectorXcd u(d);
  draw_paired(u);
  u /= u.norm();
  mgdm::pipeline::FourierCorpus fc;
  fc.h = h;
  fc.w = w;
  fc.coefficients.resize(n, d);
  Eigen::VectorXcd g(d);
  for (int i = 0; i < n; ++i) {
    draw_paired(g);
    if (beta > 0.0) g += std::sqrt(beta) * stream.gaussian() * u;
    fc.coefficients.row(i) =
        g.cwiseProduct(amp.cast<std::complex<double>>()).transpose();
  }
  SyntheticFourierCorpus out;
  out.data = mgdm::pipeline::inverse_fourier(fc);
  out.spike = u;
  out.amplitudes = amp;
  return out;
}

}  // namespace testsupport
