#include "sbl/datagen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace sbl {

DictionaryKind parse_dictionary_kind(const std::string& name) {
  if (name == "identity") return DictionaryKind::Identity;
  if (name == "partial_dct") return DictionaryKind::PartialDct;
  if (name == "gaussian") return DictionaryKind::Gaussian;
  if (name == "custom_file") return DictionaryKind::CustomFile;
  throw InputError("unknown dictionary kind '" + name +
                   "' (expected identity, partial_dct, gaussian, or custom_file)");
}

std::string to_string(DictionaryKind kind) {
  switch (kind) {
    case DictionaryKind::Identity: return "identity";
    case DictionaryKind::PartialDct: return "partial_dct";
    case DictionaryKind::Gaussian: return "gaussian";
    case DictionaryKind::CustomFile: return "custom_file";
  }
  return "unknown";
}

NoiseSpec NoiseSpec::beta(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw InputError("beta must be finite and positive");
  return {Kind::Beta, b};
}

NoiseSpec NoiseSpec::snr_db(double db) {
  if (!std::isfinite(db)) throw InputError("snr must be finite");
  return {Kind::Snr, db};
}

NoiseSpec NoiseSpec::noiseless() { return {Kind::Noiseless, 0.0}; }

std::string NoiseSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Beta: os << "beta" << value; break;
    case Kind::Snr: os << "snr" << value; break;
    case Kind::Noiseless: os << "noiseless"; break;
  }
  return os.str();
}

Vector gen_sparse_signal(Eigen::Index n, double sparsity_percent, uint64_t seed) {
  if (n < 1) throw InputError("signal length must be positive");
  if (!(sparsity_percent >= 0.0) || sparsity_percent > 100.0) {
    throw InputError("sparsity percent must lie in [0, 100]");
  }
  const auto k = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(n) * sparsity_percent / 100.0));
  const uint64_t key = (static_cast<uint64_t>(n) << 32) ^ static_cast<uint64_t>(k);

  // Partial Fisher-Yates: the first k entries of a virtual shuffle of 0..n-1.
  StreamRng support_rng(seed, Stream::Support, key);
  std::vector<Eigen::Index> pool(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = static_cast<Eigen::Index>(
        support_rng.next_below(static_cast<uint64_t>(n - i)));
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(i + j)]);
  }

  StreamRng signal_rng(seed, Stream::Signal, key);
  Vector x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    x[pool[static_cast<size_t>(i)]] = signal_rng.next_normal();
  }
  return x;
}

Matrix gen_dictionary(DictionaryKind kind, Eigen::Index m, Eigen::Index n, uint64_t seed) {
  if (m < 1 || n < 1) throw InputError("dictionary dimensions must be positive");
  switch (kind) {
    case DictionaryKind::Identity: {
      if (m != n) throw InputError("identity dictionary requires m == n");
      return Matrix::Identity(m, n);
    }
    case DictionaryKind::PartialDct: {
      if (m > n) throw InputError("partial dct requires m <= n");
      Matrix f(m, n);
      const double base = std::sqrt(1.0 / static_cast<double>(n));
      const double scaled = std::sqrt(2.0 / static_cast<double>(n));
      for (Eigen::Index k = 0; k < m; ++k) {
        const double alpha = k == 0 ? base : scaled;
        for (Eigen::Index j = 0; j < n; ++j) {
          f(k, j) = alpha * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k /
                                     (2.0 * static_cast<double>(n)));
        }
      }
      return f;
    }
    case DictionaryKind::Gaussian: {
      const uint64_t key =
          (static_cast<uint64_t>(m) << 32) ^ static_cast<uint64_t>(n);
      StreamRng rng(seed, Stream::Dictionary, key);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      Matrix f(m, n);
      // Row-major fill so the draw order is independent of storage layout.
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) f(i, j) = scale * rng.next_normal();
      }
      return f;
    }
    case DictionaryKind::CustomFile:
      throw InputError("custom_file dictionaries are loaded from disk, not generated");
  }
  throw InputError("unhandled dictionary kind");
}

std::pair<Vector, double> gen_observation(const Matrix& dictionary, const Vector& signal,
                                          const NoiseSpec& noise, uint64_t seed) {
  if (signal.size() != dictionary.cols()) {
    throw InputError("signal length does not match dictionary columns");
  }
  Vector clean = dictionary * signal;
  const Eigen::Index m = dictionary.rows();

  if (noise.kind == NoiseSpec::Kind::Noiseless) {
    return {clean, std::numeric_limits<double>::infinity()};
  }

  double beta_eff;
  double b;  // noise variance
  if (noise.kind == NoiseSpec::Kind::Beta) {
    beta_eff = noise.value;
    b = 1.0 / noise.value;
  } else {
    const double power = clean.squaredNorm() / static_cast<double>(m);
    if (power == 0.0) {
      throw InputError("snr noise spec requires a nonzero clean signal F x");
    }
    b = power / std::pow(10.0, noise.value / 10.0);
    beta_eff = 1.0 / b;
  }

  const uint64_t key = (static_cast<uint64_t>(m) << 32) ^
                       static_cast<uint64_t>(dictionary.cols());
  StreamRng rng(seed, Stream::Noise, key);
  const double sd = std::sqrt(b);
  Vector y = clean;
  for (Eigen::Index i = 0; i < m; ++i) y[i] += sd * rng.next_normal();
  return {y, beta_eff};
}

Vector denoising_reference(const Vector& observation, double beta) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  const double b = 1.0 / beta;
  return (observation.array().square() - b).max(0.0);
}

}  // namespace sbl
