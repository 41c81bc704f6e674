#pragma once

#include <vector>

namespace smhd {

struct SummaryStat {
    long n = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double std_error = 0.0;
    double ci95_half = 0.0;  // 1.96 * std_error
};

SummaryStat summarize(const std::vector<double>& xs);

// Batch-means estimator for a correlated time series: the series is split
// into n_batches contiguous batches and the batch averages are summarized,
// which gives an honest standard error under mixing.
SummaryStat batch_means(const std::vector<double>& series, int n_batches = 20);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least-squares line through (log2 x_i, log2 y_i); all inputs must be > 0.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Trapezoid rule on uniformly spaced samples over [0, (n-1) h].
double trapezoid(const std::vector<double>& f, double h);

}  // namespace smhd
