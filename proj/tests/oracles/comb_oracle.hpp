#pragma once

// Direct evaluation of sum_h a b^2 / (b^2 + (h - x)^2), x = b c, over
// |h| <= H, plus the analytic remainder beyond H.

#include <cmath>

namespace oracle {

inline double lorentzian_tail(double a, double b, double from) {
    // sum_{h >= from} a b^2 / (b^2 + h^2) by the midpoint rule, whose error
    // is O(a b^2 / from^4).
    const double start = from - 0.5;
    return a * b * (0.5 * M_PI - std::atan(start / b));
}

/// Brute-force comb sum with Kahan-compensated accumulation, smallest terms
/// first.
inline double comb_sum_direct(double a, double b, double c, long long h_max = 1'000'000) {
    const double x = b * c;
    const double b2 = b * b;
    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    add(lorentzian_tail(a, b, static_cast<double>(h_max + 1) - x));
    add(lorentzian_tail(a, b, static_cast<double>(h_max + 1) + x));
    for (long long h = h_max; h >= 1; --h) {
        const double hp = static_cast<double>(h) - x;
        const double hm = static_cast<double>(h) + x;
        add(a * b2 / (b2 + hp * hp) + a * b2 / (b2 + hm * hm));
    }
    add(a * b2 / (b2 + x * x));
    return sum;
}

/// Sum over the two TLSs nearest the qubit, at x and 1 - x spacings.
inline double two_nearest(double a, double b, double c) {
    const double x = b * c;
    const double b2 = b * b;
    return a * b2 / (b2 + x * x) + a * b2 / (b2 + (1.0 - x) * (1.0 - x));
}

}  // namespace oracle
