// SPDX-License-Identifier: Apache-2.0
#include "cransim/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cransim/errors.hpp"

namespace cransim {

CVec steering_vector(int n_elements, double angle_rad) {
    CVec v(static_cast<std::size_t>(n_elements));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_elements));
    const double phase_step = -kPi * std::sin(angle_rad);
    for (int i = 0; i < n_elements; ++i) {
        const double ph = phase_step * static_cast<double>(i);
        v[static_cast<std::size_t>(i)] = cdouble(scale * std::cos(ph), scale * std::sin(ph));
    }
    return v;
}

Codebook::Codebook(int n_elements, double step_rad, double span_lo, double span_hi)
    : n_elements_(n_elements), step_rad_(step_rad) {
    if (n_elements < 1) throw config_error("codebook needs at least one element");
    if (step_rad <= 0.0) throw config_error("codebook step must be positive");
    const double span = span_hi - span_lo;
    if (span <= 0.0) throw config_error("codebook span must be non-empty");
    if (step_rad > span) throw config_error("codebook step exceeds the span");
    const int count = static_cast<int>(std::llround(span / step_rad));
    angles_.reserve(static_cast<std::size_t>(count));
    beams_.reserve(static_cast<std::size_t>(count));
    for (int b = 0; b < count; ++b) {
        const double a = span_lo + static_cast<double>(b) * step_rad;
        angles_.push_back(a);
        beams_.push_back(steering_vector(n_elements, a));
    }
}

int Codebook::nearest_beam(double angle_rad) const {
    const double a = wrap_two_pi(angle_rad);
    int best = 0;
    double best_d = angular_distance(a, angle_of(0));
    for (int b = 1; b < size(); ++b) {
        const double d = angular_distance(a, angle_of(b));
        if (d < best_d) {  // strict: ties stay at the lower index
            best_d = d;
            best = b;
        }
    }
    return best;
}

std::vector<int> Codebook::candidate_beams(double angle_rad, int k) const {
    const double a = wrap_two_pi(angle_rad);
    std::vector<int> order(static_cast<std::size_t>(size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        const double dl = angular_distance(a, angle_of(lhs));
        const double dr = angular_distance(a, angle_of(rhs));
        if (dl != dr) return dl < dr;
        return lhs < rhs;
    });
    order.resize(static_cast<std::size_t>(std::min(k, size())));
    return order;
}

double beamformed_power(const CMat& h, const CVec& v, const CVec& u, double p_tx_w,
                        double h_pl) {
    if (static_cast<int>(v.size()) != h.cols() || static_cast<int>(u.size()) != h.rows())
        throw std::invalid_argument("beamforming vector dimensions do not match channel");
    return p_tx_w * h_pl * h_pl * beamformed_gain(u, h, v);
}

}  // namespace cransim
