#include "sohb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sohb/errors.hpp"

namespace sohb {

OrderParameter order_parameter(std::span<const Mat3> orientations) {
    if (orientations.empty()) throw InvalidArgument("order_parameter: no orientations");
    Mat3 j = Mat3::Zero();
    for (const auto& a : orientations) j += a;
    j /= static_cast<double>(orientations.size());
    // The maximizer of mat_dot(R, J) over SO3 is unique unless the two
    // smallest singular values cancel after the determinant sign is applied.
    const Eigen::JacobiSVD<Mat3> svd(j);
    const Vec3 s = svd.singularValues();
    const double pair = j.determinant() < 0.0 ? s[1] - s[2] : s[1] + s[2];
    if (!(s[0] > 0.0) || pair <= DegeneracyTolerance{}.gap_min * s[0])
        throw DegenerateAverage("order_parameter: mean orientation is not unique");
    OrderParameter out;
    out.mean_orientation = reorthonormalize(j);
    out.value = mat_dot(out.mean_orientation, j) / 1.5;
    return out;
}

OrderParameter order_parameter(const ParticleState& state) {
    std::vector<Mat3> mats(state.size());
    for (std::size_t n = 0; n < mats.size(); ++n) mats[n] = state.rotation(n);
    return order_parameter(mats);
}

EstimatorReport estimate_order_parameter(std::span<const ParticleState> frames) {
    if (frames.empty()) throw InvalidArgument("estimate_order_parameter: no frames");
    std::vector<double> values;
    values.reserve(frames.size());
    for (const auto& f : frames) values.push_back(order_parameter(f).value);
    const auto ms = mean_and_error(values);
    EstimatorReport r;
    r.name = "order_parameter";
    r.value = ms.mean;
    r.std_error = ms.std_error;
    r.samples = values.size();
    return r;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // alternating series is slow there and Q > 1 - 1e-10
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

const double kolmogorov_mean = std::sqrt(std::numbers::pi / 2.0) * std::numbers::ln2;
const double kolmogorov_sd = std::sqrt(std::numbers::pi * std::numbers::pi / 12.0 - kolmogorov_mean * kolmogorov_mean);

double asymptotic_p(double stat, double n_eff) {
    const double root = std::sqrt(n_eff);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * stat);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 100) throw TooFewSamples("ks_one_sample: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, asymptotic_p(d, n), samples.size(), n};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 100 || b.size() < 100) throw TooFewSamples("ks_two_sample: need at least 100 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double n_eff = na * nb / (na + nb);
    return {d, asymptotic_p(d, n_eff), a.size() + b.size(), n_eff};
}

EstimatorReport ks_report(const std::string& name, const KsResult& ks, double alpha) {
    EstimatorReport r;
    r.name = name;
    r.value = ks.statistic;
    r.samples = ks.n;
    // Null standard deviation of the Kolmogorov distribution, scaled to n_eff.
    if (ks.n_eff > 0.0) r.std_error = kolmogorov_sd / std::sqrt(ks.n_eff);
    r.tolerance = alpha;
    r.passed = ks.p_value >= alpha;
    return r;
}

MeanStd mean_and_error(std::span<const double> x) {
    MeanStd out;
    if (x.empty()) return out;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    out.mean = mean;
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        out.std_error = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    }
    return out;
}

}  // namespace sohb
