#include "sicams/lossreg.hpp"

#include <cmath>

#include "sicams/errors.hpp"

namespace sicams::loss {

LossModel fit_loss(const std::vector<double>& f_series, const std::vector<double>& loss_series,
                   stat::RegressionForm form, int window) {
    if (f_series.size() != loss_series.size())
        throw DataError("fit_loss: statistic and volume series are not aligned");
    if (f_series.size() < 10)
        throw DataError("fit_loss: need at least 10 aligned observations");
    if (form == stat::RegressionForm::LogLinear)
        for (double f : f_series)
            if (!(f > 0.0))
                throw std::domain_error("fit_loss: loglinear form requires F > 0 pointwise");
    LossModel model;
    model.fit = stat::ols_fit(f_series, loss_series, form);
    model.window = window;
    return model;
}

double predict_loss(const LossModel& model, double f) {
    const double a = model.fit.coefficients(0);
    const double b = model.fit.coefficients(1);
    if (model.fit.form == stat::RegressionForm::LogLinear) {
        if (!(f > 0.0)) throw std::domain_error("predict_loss: loglinear requires f > 0");
        double v = std::exp(a + b * std::log(f)) - 1.0;
        return v < 0.0 ? 0.0 : v;
    }
    if (f < 0.0) throw std::domain_error("predict_loss: f must be nonnegative");
    double v = a + b * f;
    if (v < 0.0) {
        log_warning("predict_loss: negative prediction floored at zero");
        return 0.0;
    }
    return v;
}

std::vector<double> residuals(const LossModel& model, const std::vector<double>& f_series,
                              const std::vector<double>& loss_series) {
    if (f_series.size() != loss_series.size())
        throw DataError("residuals: series are not aligned");
    std::vector<double> r(f_series.size());
    for (std::size_t i = 0; i < f_series.size(); ++i)
        r[i] = loss_series[i] - predict_loss(model, f_series[i]);
    return r;
}

}  // namespace sicams::loss
