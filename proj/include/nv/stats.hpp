#pragma once

#include <string>
#include <vector>

namespace nv {

struct TTestResult {
    double student_stat = 0.0;
    double student_p = 1.0;
    double student_df = 0.0;
    double welch_stat = 0.0;
    double welch_p = 1.0;
    double welch_df = 0.0;
    bool p_clamped = false;  // a p-value hit the 1e-300 floor

    std::string to_text() const;
};

// Pooled-variance (Student's) and Welch's two-sample t statistics with
// two-sided p-values from the t-distribution CDF.
TTestResult t_tests(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);

double mean_of(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace nv
