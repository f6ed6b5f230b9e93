// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cransim/cmat.hpp"
#include "cransim/geom.hpp"

namespace cransim {

// Unit-norm ULA steering vector for half-wavelength spacing:
// element i carries phase -pi * i * sin(angle). `angle` is measured from
// the array broadside.
CVec steering_vector(int n_elements, double angle_rad);

// Uniform grid of steering vectors over [span_lo, span_hi); defaults cover
// the full circle. Beam b points at span_lo + b * step_rad.
class Codebook {
public:
    Codebook(int n_elements, double step_rad, double span_lo = 0.0,
             double span_hi = kTwoPi);

    int size() const { return static_cast<int>(beams_.size()); }
    int elements() const { return n_elements_; }
    double step() const { return step_rad_; }
    double angle_of(int beam) const { return angles_[static_cast<std::size_t>(beam)]; }
    const CVec& beam(int b) const { return beams_[static_cast<std::size_t>(b)]; }

    // beam whose pointing angle is closest (wrapped distance) to `angle_rad`;
    // ties broken toward the lower index
    int nearest_beam(double angle_rad) const;

    // the k beams closest to `angle_rad`, ordered by angular distance
    // (ties broken by lower index); k is clamped to size()
    std::vector<int> candidate_beams(double angle_rad, int k) const;

private:
    int n_elements_;
    double step_rad_;
    std::vector<double> angles_;
    std::vector<CVec> beams_;
};

// P = P_Tx * h_PL^2 * |u^H H v|^2
double beamformed_power(const CMat& h, const CVec& v, const CVec& u, double p_tx_w,
                        double h_pl);

}  // namespace cransim
