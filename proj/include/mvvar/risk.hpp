#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

/// Left-tail probability level for VaR, restricted to (0, 0.5].
class ConfidenceLevel {
 public:
  explicit ConfidenceLevel(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || epsilon > 0.5)
      throw DomainError("confidence level " + fmt12(epsilon) + " outside (0, 0.5]");
  }
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Loss quantile with positive sign for losses.
struct VaRValue {
  double value;
};

/// Number of scenarios allowed to fall strictly below the VaR threshold:
/// K = floor(epsilon*T). The tiny slack keeps products like 0.3*10 from
/// flooring to 2 instead of 3.
inline Eigen::Index exceedance_count(ConfidenceLevel eps, Eigen::Index t) {
  return static_cast<Eigen::Index>(std::floor(eps.epsilon() * static_cast<double>(t) + 1e-9));
}

/// Value at sorted position k (0-based), i.e. the (k+1)-th smallest element.
inline double kth_smallest(const Eigen::VectorXd& r, Eigen::Index k) {
  if (k < 0 || k >= r.size())
    throw DomainError("order statistic index " + std::to_string(k) +
                      " out of range for length " + std::to_string(r.size()));
  std::vector<double> v(r.data(), r.data() + r.size());
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[static_cast<std::size_t>(k)];
}

/// Per-scenario portfolio returns R_t(x) = sum_k x_k r_kt for a fully
/// invested long-only weight vector.
inline Eigen::VectorXd portfolio_returns(const ScenarioMatrix& s, const Eigen::VectorXd& x) {
  if (x.size() != s.assets())
    throw DimensionError("weight length " + std::to_string(x.size()) +
                         " does not match asset count " + std::to_string(s.assets()));
  const double budget = x.sum();
  if (std::abs(budget - 1.0) > 1e-9)
    throw DomainError("weights sum to " + fmt12(budget) + ", not 1 within 1e-9");
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x(k) < -1e-12)
      throw DomainError("weight " + fmt12(x(k)) + " at asset " + std::to_string(k) +
                        " is negative beyond tolerance");
  return s.returns() * x;
}

/// Empirical VaR of an equally likely discrete return sample: the negative
/// of the (K+1)-th smallest return, K = exceedance_count(eps, T). This is the
/// smallest v such that at most K scenarios lose strictly more than v.
inline VaRValue empirical_var(const Eigen::VectorXd& r, ConfidenceLevel eps) {
  if (r.size() == 0) throw DomainError("empirical VaR of an empty return sample");
  return VaRValue{-kth_smallest(r, exceedance_count(eps, r.size()))};
}

}  // namespace mvvar
