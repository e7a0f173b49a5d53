#include "sbl/types.hpp"

#include <cmath>
#include <sstream>

namespace sbl {

ProblemInstance::ProblemInstance(Matrix dictionary, Vector observation, double noise_precision)
    : dictionary_(std::move(dictionary)),
      observation_(std::move(observation)),
      noise_precision_(noise_precision) {
  if (dictionary_.rows() < 1 || dictionary_.cols() < 1) {
    throw InputError("dictionary must have at least one row and one column");
  }
  if (observation_.size() != dictionary_.rows()) {
    std::ostringstream os;
    os << "observation length " << observation_.size() << " does not match dictionary rows "
       << dictionary_.rows();
    throw InputError(os.str());
  }
  if (!(noise_precision_ > 0.0) || !std::isfinite(noise_precision_)) {
    throw InputError("noise precision beta must be positive and finite");
  }
  if (!dictionary_.allFinite()) throw InputError("dictionary contains non-finite entries");
  if (!observation_.allFinite()) throw InputError("observation contains non-finite entries");

  is_identity_ = dictionary_.rows() == dictionary_.cols() && dictionary_.isIdentity(0.0);

  column_sq_norms_ = dictionary_.colwise().squaredNorm().transpose();
  dictionary_t_obs_ = dictionary_.transpose() * observation_;
  if (!is_identity_ && dictionary_.cols() <= kGramCacheMaxCols) {
    gram_ = dictionary_.transpose() * dictionary_;
  }
}

HyperparamVector::HyperparamVector(Vector gamma) : gamma_(std::move(gamma)) {
  if (gamma_.size() < 1) throw InputError("gamma must be non-empty");
  active_.reserve(static_cast<size_t>(gamma_.size()));
  for (Eigen::Index i = 0; i < gamma_.size(); ++i) {
    const double g = gamma_[i];
    if (!std::isfinite(g) || g < 0.0) {
      std::ostringstream os;
      os << "gamma[" << i << "] = " << g << " is not a finite nonnegative value";
      throw InputError(os.str());
    }
    if (g > 0.0) active_.push_back(i);
  }
}

HyperparamVector HyperparamVector::ones(Eigen::Index n) {
  return HyperparamVector(Vector::Ones(n));
}

HyperparamVector HyperparamVector::apply_update(const Vector& candidate, double prune_tol) const {
  if (candidate.size() != gamma_.size()) {
    throw InputError("update candidate length does not match gamma length");
  }
  Vector next = Vector::Zero(gamma_.size());
  for (Eigen::Index i : active_) {
    const double c = candidate[i];
    if (!std::isfinite(c)) {
      std::ostringstream os;
      os << "gamma update produced non-finite value at index " << i;
      throw NumericalError(os.str());
    }
    next[i] = c > prune_tol ? c : 0.0;
  }
  return HyperparamVector(std::move(next));
}

}  // namespace sbl
