// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cransim/cmat.hpp"
#include "cransim/scenario.hpp"

namespace cransim {

// One propagation path, kept alongside the summed matrix so received power
// can be re-evaluated per ray pair under any beam/filter combination.
struct PropagationRay {
    cdouble gain;         // complex amplitude at the carrier, array scale folded in
    double path_m = 0.0;  // geometric path length; differences set excess delays
    CVec a_rx;            // receive array response at the LCS arrival azimuth
    CVec a_tx;            // transmit array response at the departure azimuth
};

// One RRH-to-user link. `entries` carries the dimensionless ray gains;
// the pathloss amplitude is kept separate so received power is
// P_Tx * h_PL^2 * |u^H H v|^2.
struct ChannelMatrix {
    CMat entries;                    // n_rx x n_tx, coherent ray sum
    std::vector<PropagationRay> rays;
    double aoa_azimuth = 0.0;        // direct-path arrival azimuth, device frame
    double aod_azimuth = 0.0;        // direct-path departure azimuth from array broadside
    double pathloss_amplitude = 1.0;
    bool has_rays = true;            // false only for NLOS with an empty scatterer field
};

// Free-space amplitude (c / (4*pi*d*f_c)) generalized to an excess-loss
// exponent with 1 m reference distance: (c/(4*pi*f_c)) * d^(-exponent/2).
double pathloss(double distance_m, double carrier_hz, double exponent = 2.0);

// Ray superposition channel: in LOS mode one specular ray plus one
// single-bounce ray per scatterer; in NLOS mode the specular ray is dropped
// and the excess pathloss exponent applies. Receive-side arrival directions
// are rotated into the user's LCS before evaluating the array response, so
// device orientation re-aims the receive pattern without changing ray energy.
// Per-ray gains and path lengths are retained for band-averaged power.
// `t` advances per-ray Doppler phase for a user moving along +x.
ChannelMatrix synthesize_channel(const ScenarioConfig& cfg, int rrh, const Vec3& user_pos,
                                 const OrientationAngles& orientation,
                                 const ScattererField& scatterers, double t = 0.0);

// All links of one drop, indexed [user][rrh]; built from true positions.
struct ChannelSet {
    int n_users = 0;
    int n_rrhs = 0;
    std::vector<ChannelMatrix> links;

    const ChannelMatrix& at(int user, int rrh) const {
        return links[static_cast<std::size_t>(user) * static_cast<std::size_t>(n_rrhs) +
                     static_cast<std::size_t>(rrh)];
    }
};

ChannelSet build_channels(const ScenarioConfig& cfg, const UserDrop& drop,
                          const ScattererField& scatterers, double t = 0.0);

// Received power through precoder v and filter u, averaged over the operating
// band. Ray pairs whose path lengths differ by more than c/W decorrelate
// across the band, so their cross terms shrink by sinc(pi*W*delta_tau) and
// long echoes add in power rather than amplitude. bandwidth_hz = 0 recovers
// the single-frequency coherent value |u^H H v|^2 exactly.
double band_averaged_power(const ChannelMatrix& ch, const CVec& v, const CVec& u,
                           double p_tx_w, double bandwidth_hz);

}  // namespace cransim
