#include "sicams/statcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sicams/errors.hpp"

namespace sicams::stat {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 3.0e-15;
constexpr double kTiny = 1.0e-300;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_contfrac(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_contfrac(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// Bisection inversion of a monotone CDF on (0, inf) or (-inf, inf).
template <typename Cdf>
double invert_cdf(Cdf cdf, double q, double lo, double hi) {
    // Expand the bracket until it straddles q.
    for (int i = 0; i < 200 && cdf(hi) < q; ++i) hi *= 2.0;
    for (int i = 0; i < 200 && cdf(lo) > q; ++i) lo = (lo > 0) ? lo / 2.0 : lo * 2.0;
    for (int i = 0; i < 400; ++i) {
        double mid = 0.5 * (lo + hi);
        double f = cdf(mid);
        if (std::fabs(f - q) < 1e-13 || (hi - lo) < 1e-14 * std::max(1.0, std::fabs(mid)))
            return mid;
        if (f < q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_prob(double q, const char* what) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << what << ": probability must lie in (0,1), got " << q;
        throw std::domain_error(os.str());
    }
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double reg_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("reg_gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double reg_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("reg_beta: invalid shape");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_contfrac(a, b, x) / a;
    return 1.0 - front * beta_contfrac(b, a, 1.0 - x) / b;
}

double chi2_cdf(double x, int df) {
    if (df < 1) throw std::domain_error("chi2_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return reg_gamma_p(0.5 * df, 0.5 * x);
}

double f_cdf(double x, int d1, int d2) {
    if (d1 < 1 || d2 < 1) throw std::domain_error("f_cdf: degrees of freedom must be >= 1");
    if (x <= 0.0) return 0.0;
    return reg_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double t_cdf(double x, double df) {
    if (df <= 0.0) throw std::domain_error("t_cdf: df must be positive");
    double ib = reg_beta(0.5 * df, 0.5, df / (df + x * x));
    return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double chi2_quantile(double q, int df) {
    check_prob(q, "chi2_quantile");
    if (df < 1) throw std::domain_error("chi2_quantile: df must be >= 1");
    return invert_cdf([df](double x) { return chi2_cdf(x, df); }, q, 0.0, 2.0 * df + 10.0);
}

double f_quantile(double q, int d1, int d2) {
    check_prob(q, "f_quantile");
    if (d1 < 1 || d2 < 1) throw std::domain_error("f_quantile: degrees of freedom must be >= 1");
    return invert_cdf([d1, d2](double x) { return f_cdf(x, d1, d2); }, q, 0.0, 16.0);
}

double t_quantile(double q, double df) {
    check_prob(q, "t_quantile");
    return invert_cdf([df](double x) { return t_cdf(x, df); }, q, -64.0, 64.0);
}

double mean_diff_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::domain_error("mean_diff_test: both samples need at least 2 points");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_var(a, ma);
    const double vb = sample_var(b, mb);
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) {
        // Degenerate: both samples constant.
        return ma == mb ? 1.0 : 0.0;
    }
    const double t = (ma - mb) / std::sqrt(se2);
    if (t == 0.0) return 1.0;
    // Welch-Satterthwaite degrees of freedom.
    const double df = se2 * se2 /
                      ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    return 2.0 * (1.0 - t_cdf(std::fabs(t), df));
}

MomentEstimate estimate_moments(const std::vector<Vec>& samples) {
    if (samples.size() < 2) throw std::domain_error("estimate_moments: need n >= 2");
    const Eigen::Index s = samples.front().size();
    Vec mean = Vec::Zero(s);
    for (const Vec& x : samples) {
        if (x.size() != s) throw DataError("estimate_moments: inconsistent vector length");
        mean += x;
    }
    mean /= static_cast<double>(samples.size());
    Mat cov = Mat::Zero(s, s);
    for (const Vec& x : samples) {
        Vec d = x - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(samples.size() - 1);
    cov = 0.5 * (cov + cov.transpose());
    return {std::move(mean), std::move(cov), static_cast<long>(samples.size())};
}

Mat pooled_covariance(const std::vector<std::vector<Vec>>& runs,
                      const std::vector<std::size_t>& cluster_times,
                      const std::vector<Vec>& means) {
    if (runs.empty() || cluster_times.empty())
        throw DataError("pooled_covariance: empty runs or cluster times");
    const std::size_t len = runs.front().size();
    const Eigen::Index s = runs.front().front().size();
    for (const auto& run : runs)
        if (run.size() != len) throw DataError("pooled_covariance: runs differ in length");
    if (means.size() != len)
        throw DataError("pooled_covariance: means length does not match runs");
    Mat acc = Mat::Zero(s, s);
    for (const auto& run : runs) {
        for (std::size_t t : cluster_times) {
            if (t >= len) throw DataError("pooled_covariance: cluster time out of range");
            if (run[t].size() != s || means[t].size() != s)
                throw DataError("pooled_covariance: dimension mismatch");
            Vec d = run[t] - means[t];
            acc.noalias() += d * d.transpose();
        }
    }
    acc /= static_cast<double>(runs.size() * cluster_times.size());
    return acc;
}

Mat structured_covariance(const Mat& corr, const Vec& sigmas) {
    const Eigen::Index s = sigmas.size();
    if (corr.rows() != s || corr.cols() != s)
        throw DataError("structured_covariance: dimension mismatch");
    for (Eigen::Index i = 0; i < s; ++i) {
        if (std::fabs(corr(i, i) - 1.0) > 1e-9)
            throw std::domain_error("structured_covariance: correlation diagonal must be 1");
        if (!(sigmas(i) > 0.0))
            throw std::domain_error("structured_covariance: sigmas must be positive");
    }
    Mat out(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) out(i, j) = sigmas(i) * sigmas(j) * corr(i, j);
    return out;
}

WhiteningOperator build_whitening(const MomentEstimate& moments, const WhiteningOptions& opts) {
    const Eigen::Index s = moments.mean.size();
    Mat cov = 0.5 * (moments.cov + moments.cov.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    const double cond = (emin > 0.0) ? emax / emin : std::numeric_limits<double>::infinity();

    if (cond > opts.cond_limit) {
        if (!opts.allow_ridge) {
            std::ostringstream os;
            os << "build_whitening: covariance near-singular, condition number " << cond;
            throw NumericalError(os.str());
        }
        const double lambda = opts.ridge_scale * cov.trace() / static_cast<double>(s);
        std::ostringstream os;
        os << "build_whitening: condition number " << cond << " exceeds " << opts.cond_limit
           << "; adding ridge " << lambda << " to the diagonal";
        log_warning(os.str());
        cov.diagonal().array() += lambda;
    }

    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "build_whitening: covariance not positive definite after ridge "
           << "(condition number " << cond << ")";
        throw NumericalError(os.str());
    }
    Mat l = llt.matrixL();
    Mat w = l.triangularView<Eigen::Lower>().solve(Mat::Identity(s, s));

    // Construction check: w^T w must invert cov.
    const double err = (w.transpose() * w * cov - Mat::Identity(s, s)).cwiseAbs().maxCoeff();
    if (err > 1e-6) {
        std::ostringstream os;
        os << "build_whitening: whitening identity residual " << err
           << " (condition number " << cond << ")";
        throw NumericalError(os.str());
    }
    return {std::move(w), moments.mean, moments.n};
}

double mahalanobis_sq(const Vec& x, const WhiteningOperator& op) {
    if (x.size() != op.mean.size())
        throw DataError("mahalanobis_sq: dimension mismatch");
    return (op.w * (x - op.mean)).squaredNorm();
}

double partial_zsq(const Vec& z, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) {
        if (i >= static_cast<std::size_t>(z.size()))
            throw std::out_of_range("partial_zsq: index out of range");
        s += z(static_cast<Eigen::Index>(i)) * z(static_cast<Eigen::Index>(i));
    }
    return s;
}

double t2_to_f(double t2, int s, long n) {
    if (n <= s) throw std::domain_error("t2_to_f: requires n > s");
    if (t2 < 0.0) throw std::domain_error("t2_to_f: t2 must be nonnegative");
    return (static_cast<double>(n - s) / (static_cast<double>(s) * static_cast<double>(n - 1))) * t2;
}

double wilson_hilferty(double z2, int s) {
    return std::cbrt(z2 / static_cast<double>(s));
}

RegressionFit ols_fit_multi(const Mat& x, const Vec& y, RegressionForm form) {
    const Eigen::Index n = y.size();
    if (x.rows() != n) throw DataError("ols_fit: regressor/response length mismatch");
    if (n < 3) throw std::domain_error("ols_fit: need at least 3 observations");

    Mat xx(n, x.cols() + 1);
    Vec yy(n);
    xx.col(0).setOnes();
    if (form == RegressionForm::LogLinear) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                if (!(x(i, j) > 0.0))
                    throw std::domain_error("ols_fit: loglinear requires x > 0");
                xx(i, j + 1) = std::log(x(i, j));
            }
            if (y(i) < 0.0) throw std::domain_error("ols_fit: loglinear requires y >= 0");
            yy(i) = std::log1p(y(i));
        }
    } else {
        xx.rightCols(x.cols()) = x;
        yy = y;
    }

    Eigen::ColPivHouseholderQR<Mat> qr(xx);
    qr.setThreshold(1e-10);
    if (qr.rank() < xx.cols())
        throw NumericalError("ols_fit: design matrix is rank-deficient (collinear regressors)");
    Vec beta = qr.solve(yy);

    Vec resid = yy - xx * beta;
    const double sse = resid.squaredNorm();
    const double ybar = yy.mean();
    const double sst = (yy.array() - ybar).square().sum();
    const double dof = static_cast<double>(n - xx.cols());
    const double sigma2 = dof > 0 ? sse / dof : 0.0;
    Mat xtx_inv = (xx.transpose() * xx).inverse();
    Vec se = (sigma2 * xtx_inv.diagonal().array()).sqrt();

    RegressionFit fit;
    fit.coefficients = std::move(beta);
    fit.std_errors = std::move(se);
    fit.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 0.0;
    fit.form = form;
    return fit;
}

RegressionFit ols_fit(const std::vector<double>& x, const std::vector<double>& y,
                      RegressionForm form) {
    if (x.size() != y.size()) throw DataError("ols_fit: x and y lengths differ");
    Mat xm(static_cast<Eigen::Index>(x.size()), 1);
    Vec yv(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm(static_cast<Eigen::Index>(i), 0) = x[i];
        yv(static_cast<Eigen::Index>(i)) = y[i];
    }
    // Constant response: slope 0, R^2 = 0 by convention.
    return ols_fit_multi(xm, yv, form);
}

}  // namespace sicams::stat
