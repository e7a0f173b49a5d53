#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sbl/rng.hpp"
#include "sbl/types.hpp"

namespace sbl {

enum class DictionaryKind { Identity, PartialDct, Gaussian, CustomFile };

DictionaryKind parse_dictionary_kind(const std::string& name);
std::string to_string(DictionaryKind kind);

// Noise is specified either as a precision beta, a target SNR in dB relative
// to the realized signal power, or as noiseless.
struct NoiseSpec {
  enum class Kind { Beta, Snr, Noiseless };
  Kind kind = Kind::Beta;
  double value = 1.0;

  static NoiseSpec beta(double b);
  static NoiseSpec snr_db(double db);
  static NoiseSpec noiseless();
  std::string label() const;
};

// Sparse signal with round(n * sparsity_percent / 100) nonzero standard-normal
// entries on a uniformly drawn support. Draws are keyed by (n, k) so every
// caller with the same seed sees the same signal.
Vector gen_sparse_signal(Eigen::Index n, double sparsity_percent, uint64_t seed);

// identity requires m == n; partial_dct takes the first m rows of the n-point
// orthonormal DCT-II and requires m <= n; gaussian draws N(0, 1/m) entries.
Matrix gen_dictionary(DictionaryKind kind, Eigen::Index m, Eigen::Index n, uint64_t seed = 0);

// Observation y = F x + noise. Returns y and the effective precision beta
// (infinity when noiseless). Noise unit normals are keyed by (m, n) and scaled
// by the standard deviation, so all noise specs share one underlying draw.
std::pair<Vector, double> gen_observation(const Matrix& dictionary, const Vector& signal,
                                          const NoiseSpec& noise, uint64_t seed);

// Per-component minimizer for the identity dictionary: max(y_i^2 - 1/beta, 0).
Vector denoising_reference(const Vector& observation, double beta);

}  // namespace sbl
