#ifndef SICAMS_LOSSREG_HPP
#define SICAMS_LOSSREG_HPP

#include <vector>

#include "sicams/statcore.hpp"

namespace sicams::loss {

/// Regression linking the moving-averaged T^2_F statistic to total leakage
/// volume: linear L = a + b F, or log-linear ln(1+L) = a + b ln F.
struct LossModel {
    stat::RegressionFit fit;
    int window = 12;  // moving-average window used to form F
};

LossModel fit_loss(const std::vector<double>& f_series, const std::vector<double>& loss_series,
                   stat::RegressionForm form, int window = 12);

/// Predicted volume in m^3, floored at zero (with a warning for the linear
/// form when the raw prediction is negative).
double predict_loss(const LossModel& model, double f);

/// Residuals on the original volume scale, for diagnostics.
std::vector<double> residuals(const LossModel& model, const std::vector<double>& f_series,
                              const std::vector<double>& loss_series);

}  // namespace sicams::loss

#endif
