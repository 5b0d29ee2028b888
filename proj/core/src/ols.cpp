#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "valtree/error.hpp"
#include "valtree/linmod.hpp"

namespace valtree::linmod {
namespace {

double two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

}  // namespace

double LinearFit::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < kept_columns.size(); ++k)
    s += coefficients[k] * x(static_cast<Eigen::Index>(kept_columns[k]));
  return s;
}

Eigen::VectorXd LinearFit::predict_all(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict(x.row(i));
  return out;
}

double LinearFit::coefficient(std::string_view term) const {
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (terms[k] == term) return coefficients[k];
  throw Error(ErrorCode::config, "no retained term '" + std::string(term) + "'");
}

LinearFit fit_ols(const Design& design, const OlsOptions& options) {
  const Eigen::Index n = design.x.rows();
  const Eigen::Index p = design.x.cols();
  if (design.y.size() != n) throw Error(ErrorCode::config, "design and response lengths differ");

  LinearFit fit;
  fit.n = static_cast<std::size_t>(n);
  fit.intercept = design.intercept;
  fit.design_width = static_cast<std::size_t>(p);
  fit.response = design.response;

  double y_scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) y_scale = std::max(y_scale, std::abs(design.y(i)));
  const double y_mean = n > 0 ? design.y.mean() : 0.0;
  fit.ss_tot = design.intercept ? (design.y.array() - y_mean).square().sum() : design.y.squaredNorm();
  const double spread = design.intercept ? (design.y.array() - y_mean).abs().maxCoeff()
                                         : (n > 0 ? design.y.cwiseAbs().maxCoeff() : 0.0);
  if (n == 0 || spread <= 1e-12 * y_scale)
    throw Error(ErrorCode::degenerate_response, "response '" + design.response + "' has zero variance");

  // Householder QR in column order; a column is dropped when what remains of
  // it after the earlier reflections is negligible relative to its norm.
  Eigen::MatrixXd a = design.x;
  Eigen::VectorXd b = design.y;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double original = design.x.col(j).norm();
    const double tail = rank < n ? a.col(j).segment(rank, n - rank).norm() : 0.0;
    if (original == 0.0 || tail <= options.collinearity_tolerance * original) {
      fit.dropped_terms.push_back(design.terms[static_cast<std::size_t>(j)]);
      continue;
    }
    Eigen::VectorXd v = a.col(j).segment(rank, n - rank);
    const double alpha = v(0) > 0 ? -tail : tail;
    v(0) -= alpha;
    const double vnorm2 = v.squaredNorm();
    auto block = a.block(rank, j, n - rank, p - j);
    block.noalias() -= v * ((2.0 / vnorm2) * (v.transpose() * block));
    auto bseg = b.segment(rank, n - rank);
    bseg -= v * ((2.0 / vnorm2) * v.dot(bseg));
    fit.kept_columns.push_back(static_cast<std::size_t>(j));
    ++rank;
  }

  const auto k = static_cast<std::size_t>(rank);
  const std::size_t used = k + options.absorbed_df;
  if (fit.n <= used)
    throw Error(ErrorCode::insufficient_data, std::to_string(fit.n) + " observations for " +
                                                  std::to_string(used) + " parameters");
  fit.df_resid = fit.n - used;

  Eigen::MatrixXd r(rank, rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    const auto col = static_cast<Eigen::Index>(fit.kept_columns[static_cast<std::size_t>(c)]);
    r.col(c) = a.col(col).head(rank);
  }
  const auto upper = r.triangularView<Eigen::Upper>();
  const Eigen::VectorXd beta = upper.solve(b.head(rank));
  const Eigen::MatrixXd r_inv = upper.solve(Eigen::MatrixXd::Identity(rank, rank));

  fit.ss_res = rank < n ? b.tail(n - rank).squaredNorm() : 0.0;
  const double sigma2 = fit.ss_res / static_cast<double>(fit.df_resid);
  fit.sigma = std::sqrt(sigma2);

  for (Eigen::Index c = 0; c < rank; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const double coef = beta(c);
    const double se = std::sqrt(sigma2 * r_inv.row(c).squaredNorm());
    double t = se > 0.0 ? coef / se : (coef == 0.0 ? 0.0 : std::copysign(INFINITY, coef));
    fit.terms.push_back(design.terms[fit.kept_columns[ci]]);
    fit.coefficients.push_back(coef);
    fit.std_errors.push_back(se);
    fit.t_values.push_back(t);
    fit.p_values.push_back(two_sided_p(t, static_cast<double>(fit.df_resid)));
  }

  fit.r2 = 1.0 - fit.ss_res / fit.ss_tot;
  if (fit.intercept) fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
  const double df_total = static_cast<double>(fit.n) - (fit.intercept ? 1.0 : 0.0);
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * df_total / static_cast<double>(fit.df_resid);
  fit.adj_r2 = std::min(fit.adj_r2, fit.r2);
  return fit;
}

std::string significance_stars(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::domain, "p-value " + std::to_string(p) + " outside [0, 1]");
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace valtree::linmod
