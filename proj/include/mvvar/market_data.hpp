#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

enum class PeriodKind { weekly, daily };

inline std::string to_string(PeriodKind k) {
  return k == PeriodKind::weekly ? "weekly" : "daily";
}

inline PeriodKind period_kind_from_string(const std::string& s) {
  if (s == "weekly") return PeriodKind::weekly;
  if (s == "daily") return PeriodKind::daily;
  throw DomainError("unknown period kind '" + s + "' (expected weekly or daily)");
}

/// T x n panel of per-period linear returns, one column per asset, rows in
/// chronological order (oldest first). Immutable after construction and safe
/// to share across threads.
class ScenarioMatrix {
 public:
  ScenarioMatrix(Eigen::MatrixXd returns, std::vector<std::string> asset_names,
                 PeriodKind period_kind)
      : returns_(std::move(returns)),
        asset_names_(std::move(asset_names)),
        period_kind_(period_kind) {
    validate();
  }

  Eigen::Index periods() const { return returns_.rows(); }
  Eigen::Index assets() const { return returns_.cols(); }
  const Eigen::MatrixXd& returns() const { return returns_; }
  const std::vector<std::string>& asset_names() const { return asset_names_; }
  PeriodKind period_kind() const { return period_kind_; }

  /// Contiguous row window [first, last), as a new panel.
  ScenarioMatrix window(Eigen::Index first, Eigen::Index last) const {
    if (first < 0 || last > periods() || last - first < 2)
      throw DomainError("invalid scenario window [" + std::to_string(first) +
                        ", " + std::to_string(last) + ")");
    return ScenarioMatrix(returns_.middleRows(first, last - first),
                          asset_names_, period_kind_);
  }

 private:
  void validate() const {
    const Eigen::Index t = returns_.rows(), n = returns_.cols();
    if (t < 2) throw DomainError("scenario matrix needs at least 2 periods, got " + std::to_string(t));
    if (n < 1) throw DomainError("scenario matrix needs at least 1 asset");
    if (asset_names_.size() != static_cast<std::size_t>(n))
      throw DimensionError("asset name count " + std::to_string(asset_names_.size()) +
                           " does not match column count " + std::to_string(n));
    std::set<std::string> seen;
    for (const auto& name : asset_names_) {
      if (name.empty()) throw DomainError("empty asset name");
      if (name.find_first_of(",\"\r\n") != std::string::npos)
        throw DomainError("asset name '" + name + "' contains a character not representable in CSV headers");
      if (!seen.insert(name).second)
        throw DomainError("duplicate asset name '" + name + "'");
    }
    for (Eigen::Index i = 0; i < t; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = returns_(i, j);
        if (!std::isfinite(v))
          throw DomainError("non-finite return at period " + std::to_string(i + 1) +
                            ", asset " + asset_names_[static_cast<std::size_t>(j)]);
        if (v <= -1.0)
          throw DomainError("return " + fmt12(v) + " at period " + std::to_string(i + 1) +
                            ", asset " + asset_names_[static_cast<std::size_t>(j)] +
                            " is <= -100%");
      }
  }

  Eigen::MatrixXd returns_;
  std::vector<std::string> asset_names_;
  PeriodKind period_kind_;
};

/// Per-asset sample moments: mean vector and population covariance
/// (divisor T). Symmetric by construction and validated PSD on creation.
struct AssetStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  AssetStats(Eigen::VectorXd mu_in, Eigen::MatrixXd sigma_in)
      : mu(std::move(mu_in)), sigma(std::move(sigma_in)) {
    const Eigen::Index n = mu.size();
    if (sigma.rows() != n || sigma.cols() != n)
      throw DimensionError("covariance shape does not match mean length");
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
      throw ModelError("covariance asymmetry " + fmt12(asym) + " exceeds 1e-12");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-9 * std::max(sigma.trace(), 0.0))
      throw ModelError("covariance is not positive semidefinite (min eigenvalue " +
                       fmt12(min_eig) + ")");
  }

  Eigen::Index assets() const { return mu.size(); }
};

/// Mean and population covariance of a return panel.
inline AssetStats compute_stats(const ScenarioMatrix& s) {
  const auto& r = s.returns();
  const double t = static_cast<double>(r.rows());
  Eigen::VectorXd mu = r.colwise().sum() / t;
  Eigen::MatrixXd centered = r.rowwise() - mu.transpose();
  Eigen::MatrixXd sigma = (centered.transpose() * centered) / t;
  sigma = 0.5 * (sigma + sigma.transpose().eval());
  return AssetStats(std::move(mu), std::move(sigma));
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline bool iequals(const std::string& a, const char* b) {
  std::size_t i = 0;
  for (; i < a.size() && b[i] != '\0'; ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
  return i == a.size() && b[i] == '\0';
}

inline double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                     ": cannot parse '" + cell + "' as a decimal number");
  return v;
}

}  // namespace detail

/// Loads a return panel from CSV: a header row of asset names followed by one
/// row of comma-separated decimal returns per period, oldest first. A leading
/// column whose header is `date` (any case) is dropped.
inline ScenarioMatrix load_returns(const std::string& path, PeriodKind period_kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");
  auto header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);
  std::size_t first_col = 0;
  if (!header.empty() && detail::iequals(header[0], "date")) first_col = 1;
  std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first_col),
                                 header.end());
  if (names.empty()) throw ParseError("'" + path + "': header has no asset columns");
  const std::size_t n = names.size();

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;  // ignore blank trailing lines
    auto cells = detail::split_csv_line(line);
    if (cells.size() != n + first_col)
      throw ParseError("row " + std::to_string(lineno) + ": expected " +
                       std::to_string(n + first_col) + " columns, got " +
                       std::to_string(cells.size()));
    for (std::size_t j = 0; j < n; ++j)
      values.push_back(detail::parse_cell(cells[j + first_col], lineno, j + first_col + 1));
    ++rows;
  }
  if (rows < 2)
    throw DomainError("'" + path + "': need at least 2 data rows, got " + std::to_string(rows));

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n + j];
  return ScenarioMatrix(std::move(m), std::move(names), period_kind);
}

/// Writes a panel back to CSV with 12 significant digits per cell, the
/// inverse of load_returns for inputs of that precision.
inline void save_returns(const ScenarioMatrix& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  const auto& names = s.asset_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << ',';
    out << names[j];
  }
  out << '\n';
  const auto& r = s.returns();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      if (j) out << ',';
      out << fmt12(r(i, j));
    }
    out << '\n';
  }
}

}  // namespace mvvar
