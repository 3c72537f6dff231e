#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sohb/micro.hpp"
#include "sohb/rotations.hpp"

namespace sohb {

struct EstimatorReport {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    double tolerance = 0.0;
    bool passed = true;
};

/// Global order: max over R in SO3 of mat_dot(R, J) / 1.5 with J the mean
/// orientation matrix. Defined also when det J < 0.
struct OrderParameter {
    double value = 0.0;
    Mat3 mean_orientation = Mat3::Identity();
};
OrderParameter order_parameter(std::span<const Mat3> orientations);
OrderParameter order_parameter(const ParticleState& state);

/// Order parameter averaged over frames; the standard error is across frames.
EstimatorReport estimate_order_parameter(std::span<const ParticleState> frames);

/// Q(λ) = 2 Σ (-1)^{k-1} exp(-2 k² λ²), the Kolmogorov survival function.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    double n_eff = 0.0;  // n for one sample, na nb / (na + nb) for two
};

/// One-sample KS against a continuous CDF. Throws TooFewSamples below 100.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample KS. Throws TooFewSamples if either side has fewer than 100.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Wraps a KS result as a report; passes when p >= alpha.
EstimatorReport ks_report(const std::string& name, const KsResult& ks, double alpha);

/// Mean and standard error of the mean.
struct MeanStd {
    double mean = 0.0;
    double std_error = 0.0;
};
MeanStd mean_and_error(std::span<const double> x);

}  // namespace sohb
