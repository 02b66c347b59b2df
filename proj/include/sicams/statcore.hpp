#ifndef SICAMS_STATCORE_HPP
#define SICAMS_STATCORE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace sicams::stat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Distribution functions.
//
// CDFs are computed from the regularized incomplete gamma/beta functions;
// quantiles invert them by bracketed bisection. No closed-form approximations.
// ---------------------------------------------------------------------------

/// Regularized lower incomplete gamma P(a, x).
double reg_gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_beta(double a, double b, double x);

double chi2_cdf(double x, int df);
double f_cdf(double x, int d1, int d2);
double t_cdf(double x, double df);

/// Inverse chi-squared CDF, |CDF(x) - q| < 1e-12 at the returned point.
double chi2_quantile(double q, int df);

/// Inverse Fisher CDF.
double f_quantile(double q, int d1, int d2);

/// Inverse Student-t CDF.
double t_quantile(double q, double df);

/// Welch two-sample test for equal means; returns the two-sided p-value.
/// Both samples constant: p = 1 if means equal, p = 0 otherwise.
double mean_diff_test(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Moments and whitening.
// ---------------------------------------------------------------------------

struct MomentEstimate {
    Vec mean;
    Mat cov;     // symmetric, unbiased (divisor n-1)
    long n = 0;  // sample count
};

struct WhiteningOperator {
    Mat w;     // w^T w == cov^{-1}
    Vec mean;
    long n = 0;

    Eigen::Index dim() const { return mean.size(); }
};

MomentEstimate estimate_moments(const std::vector<Vec>& samples);

/// Pooled covariance over simulation runs: (1 / (N * |T_k|)) sum_i sum_t
/// (x - mu_t)(x - mu_t)^T, with cluster_times indexing into each run.
Mat pooled_covariance(const std::vector<std::vector<Vec>>& runs,
                      const std::vector<std::size_t>& cluster_times,
                      const std::vector<Vec>& means);

/// S_ij = sigma_i * sigma_j * K_ij. corr must have unit diagonal.
Mat structured_covariance(const Mat& corr, const Vec& sigmas);

struct WhiteningOptions {
    double cond_limit = 1e10;      // ridge when condition number exceeds this
    double ridge_scale = 1e-8;     // lambda = ridge_scale * trace / s
    bool allow_ridge = true;
};

/// Cholesky whitening: with cov = L L^T, w = L^{-1}, so w^T w = cov^{-1}.
/// Near-singular covariances are ridged per options (with a warning); a
/// covariance that is still not positive definite raises NumericalError
/// naming the condition number.
WhiteningOperator build_whitening(const MomentEstimate& moments,
                                  const WhiteningOptions& opts = {});

/// ||w (x - mean)||^2 == (x - mean)^T cov^{-1} (x - mean).
double mahalanobis_sq(const Vec& x, const WhiteningOperator& op);

/// Partial sum of squares of a whitened vector over an index subset.
double partial_zsq(const Vec& z, const std::vector<std::size_t>& idx);

/// T^2 -> F scaling: (n - s) / (s (n - 1)) * t2. Requires n > s.
double t2_to_f(double t2, int s, long n);

/// Cube-root display transform (z2 / s)^(1/3).
double wilson_hilferty(double z2, int s);

// ---------------------------------------------------------------------------
// Ordinary least squares.
// ---------------------------------------------------------------------------

enum class RegressionForm { Linear, LogLinear };

struct RegressionFit {
    Vec coefficients;  // [intercept, slopes...]
    Vec std_errors;
    double r_squared = 0.0;
    RegressionForm form = RegressionForm::Linear;
};

/// Least squares of y on [1, x]. LogLinear regresses ln(1 + y) on ln(x);
/// it requires x > 0 and y >= 0 pointwise.
RegressionFit ols_fit(const std::vector<double>& x, const std::vector<double>& y,
                      RegressionForm form = RegressionForm::Linear);

/// Multi-regressor variant; columns of x are regressors (intercept added).
RegressionFit ols_fit_multi(const Mat& x, const Vec& y,
                            RegressionForm form = RegressionForm::Linear);

}  // namespace sicams::stat

#endif
