#include "zenolab/sampling.hpp"

#include <cmath>

#include "zenolab/errors.hpp"

namespace zenolab {

std::vector<double> lin_spaced(double lo, double hi, int count)
{
    if (count < 2) {
        throw Error(ErrorCode::InvalidArgument, "need at least two sample points");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    out.back() = hi;
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int count)
{
    if (!(lo > 0.0 && hi > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "log spacing needs positive end points");
    }
    std::vector<double> out = lin_spaced(std::log(lo), std::log(hi), count);
    for (double& v : out) {
        v = std::exp(v);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "line fit needs two or more paired samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace zenolab
