#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mgdm/models.hpp"
#include "mgdm/overlaps.hpp"

namespace mgdm::pipeline {

/// Dataset loaded from an MGDM1 container, with the stored sample shape.
struct LoadedContainer {
  models::Dataset dataset;
  int h = 0;
  int w = 0;
};

/// MGDM1 container: ASCII header "MGDM1 <n> <h> <w>\n" followed by
/// n*h*w row-major little-endian 64-bit floats.
LoadedContainer read_container(const std::string& path);
void write_container(const models::Dataset& dataset, int h, int w,
                     const std::string& path);

/// Unitary 2-D DFT coefficients of every sample, flattened row-major;
/// freq_index maps the flat coefficient index back to (k1, k2).
struct FourierCorpus {
  Eigen::MatrixXcd coefficients;
  int h = 0;
  int w = 0;
  std::vector<std::pair<int, int>> freq_index;
};

FourierCorpus to_fourier(const models::Dataset& dataset, int h, int w);

/// Inverse of to_fourier; returns the real part (exact up to rounding for
/// Hermitian-symmetric coefficients).
models::Dataset inverse_fourier(const FourierCorpus& corpus);

/// Flat index of the frequency conjugate to flat index k, i.e. (-k1, -k2)
/// modulo (h, w). Real samples have coefficients(c) = conj(coefficients(k)).
int conjugate_index(int flat, int h, int w);

/// Eigenvalues (descending) of the Hermitian correlation matrix across
/// frequencies, plus the per-frequency variance profile. kept lists the
/// flat frequency indices that entered the correlation matrix.
struct SpectrumReport {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd variances;
  std::vector<int> kept;
  bool centered = false;
};

/// drop_dc defaults to the value of center: centering empties the constant
/// mode, and dropping near-zero-variance frequencies avoids the
/// zero-variance error in that case.
SpectrumReport fourier_spectrum_report(const FourierCorpus& corpus,
                                       bool center,
                                       std::optional<bool> drop_dc = {});

/// Q* between two disjoint corpora via the Fourier route: transform, then
/// the overlap of the leading eigenvectors of the complex correlation
/// matrices. With phase_randomize, each coefficient gets an independent
/// uniform phase first (the spectrum-preserving null).
overlaps::OverlapEstimate qstar_on_corpora(const models::Dataset& corpus_a,
                                           const models::Dataset& corpus_b,
                                           int h, int w, bool phase_randomize,
                                           std::uint64_t seed);

/// Phase randomisation that returns real samples: phases are drawn with the
/// Hermitian symmetry theta(-k) = -theta(k) (a random sign on self-paired
/// modes), so each sample keeps its exact power spectrum and stays real.
models::Dataset phase_randomize_real(const models::Dataset& dataset, int h,
                                     int w, std::uint64_t seed);

}  // namespace mgdm::pipeline
