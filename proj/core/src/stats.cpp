#include "smhd/stats.hpp"

#include <cmath>

#include "smhd/errors.hpp"

namespace smhd {

SummaryStat summarize(const std::vector<double>& xs) {
    SummaryStat s;
    s.n = long(xs.size());
    if (s.n == 0) return s;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(s.n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    s.mean = mean;
    if (s.n > 1) {
        s.variance = ss / double(s.n - 1);
        s.std_error = std::sqrt(s.variance / double(s.n));
        s.ci95_half = 1.96 * s.std_error;
    }
    return s;
}

SummaryStat batch_means(const std::vector<double>& series, int n_batches) {
    if (n_batches < 2) throw InvalidParameterError("need at least 2 batches");
    if (series.size() < std::size_t(2 * n_batches))
        throw InvalidParameterError("series too short for batch means");
    const std::size_t len = series.size() / std::size_t(n_batches);
    std::vector<double> batches;
    batches.reserve(std::size_t(n_batches));
    // Trailing remainder (< one batch) is dropped.
    for (int b = 0; b < n_batches; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) acc += series[b * len + i];
        batches.push_back(acc / double(len));
    }
    return summarize(batches);
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParameterError("need >= 2 matching points for a slope fit");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw InvalidParameterError("log-log fit requires positive data");
        lx[i] = std::log2(x[i]);
        ly[i] = std::log2(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double acc = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
    return acc * h;
}

}  // namespace smhd
