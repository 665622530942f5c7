#include "nv/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nv/error.hpp"

namespace nv {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

namespace {

// Continued-fraction evaluation of the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    double x = df / (df + t * t);
    return incomplete_beta(0.5 * df, 0.5, x);
}

std::string TTestResult::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "student_stat " << student_stat << "\nstudent_df " << student_df << "\nstudent_p "
       << student_p << "\nwelch_stat " << welch_stat << "\nwelch_df " << welch_df << "\nwelch_p "
       << welch_p << "\np_clamped " << p_clamped << "\n";
    return os.str();
}

TTestResult t_tests(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
    require(sample_a.size() >= 2 && sample_b.size() >= 2, Errc::ConfigParse,
            "each sample needs at least 2 observations");
    const double n1 = static_cast<double>(sample_a.size());
    const double n2 = static_cast<double>(sample_b.size());
    const double m1 = mean_of(sample_a);
    const double m2 = mean_of(sample_b);
    const double v1 = sample_variance(sample_a);
    const double v2 = sample_variance(sample_b);

    require(!(v1 == 0.0 && v2 == 0.0 && m1 == m2), Errc::DegenerateVariance,
            "both samples constant and equal");

    TTestResult r;
    constexpr double kPFloor = 1e-300;
    auto finish_p = [&](double stat, double df, double& p_out) {
        double p = t_two_sided_p(stat, df);
        if (p < kPFloor) {
            p = kPFloor;
            r.p_clamped = true;
        }
        p_out = p;
    };

    const double diff = m1 - m2;
    double pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
    double se_pooled = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    r.student_df = n1 + n2 - 2.0;
    r.student_stat = se_pooled == 0.0
                         ? std::copysign(std::numeric_limits<double>::infinity(), diff)
                         : diff / se_pooled;
    finish_p(r.student_stat, r.student_df, r.student_p);
    if (std::isinf(r.student_stat)) {
        r.student_p = kPFloor;
        r.p_clamped = true;
    }

    double se2 = v1 / n1 + v2 / n2;
    double se_welch = std::sqrt(se2);
    r.welch_df = se2 == 0.0 ? r.student_df
                            : se2 * se2 / (v1 * v1 / (n1 * n1 * (n1 - 1.0)) +
                                           v2 * v2 / (n2 * n2 * (n2 - 1.0)));
    r.welch_stat = se_welch == 0.0
                       ? std::copysign(std::numeric_limits<double>::infinity(), diff)
                       : diff / se_welch;
    finish_p(r.welch_stat, r.welch_df, r.welch_p);
    if (std::isinf(r.welch_stat)) {
        r.welch_p = kPFloor;
        r.p_clamped = true;
    }
    return r;
}

}  // namespace nv
