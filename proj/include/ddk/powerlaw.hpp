#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace ddk {

// Pareto tail Pr[X > x] = (x_m / x)^alpha for x >= x_m.
double pareto_cdf(double x, double x_m, double alpha);

struct HillEstimate {
    double alpha = 0.0;
    double alpha_se = 0.0;  // alpha / sqrt(n_tail)
    std::size_t n_tail = 0;
};

// Closed-form MLE over the points x_i >= x_m. Throws AnalysisError when the
// tail is empty or every tail point equals x_m.
HillEstimate hill_mle(std::span<const double> sample, double x_m);

// Both distances take the tail sorted ascending with every value >= x_m.
double ks_distance(std::span<const double> sorted_tail, double x_m, double alpha);

// Anderson-Darling A^2 with F and 1-F floored at 1/(2N), which keeps the
// point sitting exactly at x_m finite.
double ad_distance(std::span<const double> sorted_tail, double x_m, double alpha);

enum class Distance { ks, ad };
const char* distance_name(Distance d);

enum class CandidatePolicy { unique_values, quantile_grid };

struct ScanConfig {
    std::size_t n_min = 50;
    CandidatePolicy policy = CandidatePolicy::unique_values;
    std::size_t grid_size = 500;

    void validate() const;
};

struct PowerLawFit {
    double x_m = 0.0;
    double alpha = 0.0;
    double alpha_se = 0.0;
    std::size_t n_tail = 0;
    double ks = 0.0;
    double ad = 0.0;
    Distance distance_used = Distance::ks;
    std::size_t candidates_evaluated = 0;
};

// Fit with x_m fixed; both distances are filled in.
PowerLawFit fit_at(std::span<const double> sample, double x_m);

// Scans candidate lower bounds, fitting alpha by Hill MLE for each, and keeps
// the candidate with the smallest distance among those with n_tail >= n_min.
// Ties go to the smaller x_m.
PowerLawFit scan_xmin(std::span<const double> sample, const ScanConfig& config, Distance distance);

}  // namespace ddk
