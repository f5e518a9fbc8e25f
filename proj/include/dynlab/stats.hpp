#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace dynlab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

// Standard error of the mean from contiguous block means; used for
// autocorrelated samples (one block per independent walker).
MeanSe batch_mean_se(const std::vector<double>& xs, size_t block);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    size_t n = 0;
};

LinFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// Two-sided Kolmogorov-Smirnov statistic against U[0,1]; xs need not be sorted.
double ks_uniform(std::vector<double> xs);

// Asymptotic KS critical value at the 1% level.
inline double ks_critical_1pct(size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

// A nonnegative sequence v_n with standard errors and a fitted geometric
// rate: log v = log a + n log(rate), fitted over rows above the noise floor
// max(2 se_n, 1e-13). fitted_rate is NaN when fewer than 2 rows qualify.
struct DecaySeries {
    struct Row {
        int n;
        double v;
        double se;
    };
    std::vector<Row> rows;
    double fitted_rate = 0.0;
    double fit_residual = 0.0;
    size_t fit_points = 0;
};

void fit_decay(DecaySeries& s);

// printf-style %.17g; the single formatting path for every float that lands
// in a CSV or cloud file (byte-identical output across runs and workers).
std::string fmt_g17(double x);

std::string fmt_int(long long v);

}  // namespace dynlab
