// SPDX-License-Identifier: Apache-2.0
#include "cransim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "cransim/codebook.hpp"
#include "cransim/rotation.hpp"

namespace cransim {

double pathloss(double distance_m, double carrier_hz, double exponent) {
    if (distance_m <= 0.0) throw std::invalid_argument("pathloss needs distance > 0");
    const double ref = kSpeedOfLight / (4.0 * kPi * carrier_hz);
    return ref * std::pow(distance_m, -exponent / 2.0);
}

namespace {

struct Ray {
    cdouble amplitude;
    double aod;        // departure azimuth relative to broadside
    double path_m;     // total geometric path length
    Vec3 arrival_dir;  // unit vector from the user toward the last bounce point
};

// arrival direction rotated into the LCS, then reduced to the azimuth the
// receive ULA responds to
double local_arrival_azimuth(const RotationMatrix& r, const Vec3& dir) {
    const Vec3 local = r.apply_transposed(dir);
    const SphericalAngles a = angles_from_direction(local);
    return a.phi;
}

}  // namespace

ChannelMatrix synthesize_channel(const ScenarioConfig& cfg, int rrh, const Vec3& user_pos,
                                 const OrientationAngles& orientation,
                                 const ScattererField& scatterers, double t) {
    const Vec3& rrh_pos = cfg.rrh_positions[static_cast<std::size_t>(rrh)];
    const double d_dir = distance(rrh_pos, user_pos);
    if (d_dir <= 0.0) throw std::invalid_argument("user coincides with RRH");

    const double lambda = cfg.wavelength();
    const double broadside = cfg.rrh_broadside(rrh);
    const bool los = cfg.los_mode == LosMode::kLos;
    const RotationMatrix rot = compose_rotation(orientation);

    ChannelMatrix ch;
    ch.entries = CMat(cfg.n_rx, cfg.n_tx);
    ch.aod_azimuth = wrap_pi(azimuth(rrh_pos, user_pos) - broadside);
    // arrival bearing as the device itself sees it: pilots go through the
    // physical antennas, so the receive side is referenced to the local frame
    const Vec3 toward_rrh = (rrh_pos - user_pos) * (1.0 / d_dir);
    ch.aoa_azimuth = local_arrival_azimuth(rot, toward_rrh);
    ch.pathloss_amplitude =
        pathloss(d_dir, cfg.carrier_hz, los ? 2.0 : cfg.nlos_pathloss_exponent);

    std::vector<Ray> rays;
    rays.reserve(scatterers.points.size() + 1);
    if (los) {
        Ray r;
        const double phase = -kTwoPi * d_dir / lambda;
        r.amplitude = cdouble(std::cos(phase), std::sin(phase));
        r.aod = ch.aod_azimuth;
        r.path_m = d_dir;
        r.arrival_dir = (rrh_pos - user_pos) * (1.0 / d_dir);
        rays.push_back(r);
    }
    for (std::size_t k = 0; k < scatterers.points.size(); ++k) {
        const Vec3& s = scatterers.points[k];
        const double d1 = distance(rrh_pos, s);
        const double d2 = distance(s, user_pos);
        if (d1 <= 0.0 || d2 <= 0.0) continue;  // scatterer on an endpoint: skip
        Ray r;
        // quadratic detour decay: d_dir/(d1+d2) <= 1 by the triangle
        // inequality, squaring keeps near-path reflectors strong while
        // off-corridor clutter fades fast
        const double ratio = d_dir / (d1 + d2);
        const double rel = ratio * ratio;
        const double phase = -kTwoPi * (d1 + d2) / lambda;
        r.amplitude = scatterers.reflection_gains[k] * rel *
                      cdouble(std::cos(phase), std::sin(phase));
        r.aod = wrap_pi(azimuth(rrh_pos, s) - broadside);
        r.path_m = d1 + d2;
        r.arrival_dir = (s - user_pos) * (1.0 / d2);
        rays.push_back(r);
    }

    ch.has_rays = !rays.empty();
    ch.rays.reserve(rays.size());
    const double scale = std::sqrt(static_cast<double>(cfg.n_rx) *
                                   static_cast<double>(cfg.n_tx));
    for (const Ray& r : rays) {
        cdouble amp = r.amplitude;
        if (t != 0.0) {
            // Doppler for motion along +x: f_d = v * (dir . x) / lambda
            const double fd = cfg.user_speed_mps * r.arrival_dir.x / lambda;
            const double ph = kTwoPi * fd * t;
            amp *= cdouble(std::cos(ph), std::sin(ph));
        }
        PropagationRay pr;
        pr.gain = amp * scale;
        pr.path_m = r.path_m;
        pr.a_rx = steering_vector(cfg.n_rx, local_arrival_azimuth(rot, r.arrival_dir));
        pr.a_tx = steering_vector(cfg.n_tx, r.aod);
        ch.entries.add_outer(pr.a_rx, pr.a_tx, pr.gain);
        ch.rays.push_back(std::move(pr));
    }
    return ch;
}

double band_averaged_power(const ChannelMatrix& ch, const CVec& v, const CVec& u,
                           double p_tx_w, double bandwidth_hz) {
    if (!ch.rays.empty() &&
        (ch.rays.front().a_rx.size() != u.size() || ch.rays.front().a_tx.size() != v.size()))
        throw std::invalid_argument("beamforming vector dimensions do not match channel");
    CVec c;
    c.reserve(ch.rays.size());
    for (const PropagationRay& r : ch.rays)
        c.push_back(r.gain * inner(u, r.a_rx) * inner(r.a_tx, v));
    double p = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        p += std::norm(c[i]);
        for (std::size_t k = i + 1; k < c.size(); ++k) {
            const double x = kPi * bandwidth_hz *
                             (ch.rays[i].path_m - ch.rays[k].path_m) / kSpeedOfLight;
            const double w = std::abs(x) < 1e-9 ? 1.0 : std::sin(x) / x;
            p += 2.0 * w * (c[i] * std::conj(c[k])).real();
        }
    }
    // the band average of a nonnegative quantity; clamp away rounding dust
    p = std::max(p, 0.0);
    return p_tx_w * ch.pathloss_amplitude * ch.pathloss_amplitude * p;
}

ChannelSet build_channels(const ScenarioConfig& cfg, const UserDrop& drop,
                          const ScattererField& scatterers, double t) {
    ChannelSet set;
    set.n_users = drop.size();
    set.n_rrhs = cfg.n_rrhs();
    set.links.reserve(static_cast<std::size_t>(set.n_users) *
                      static_cast<std::size_t>(set.n_rrhs));
    for (int u = 0; u < set.n_users; ++u) {
        for (int r = 0; r < set.n_rrhs; ++r) {
            set.links.push_back(synthesize_channel(
                cfg, r, drop.true_positions[static_cast<std::size_t>(u)],
                drop.orientations[static_cast<std::size_t>(u)], scatterers, t));
        }
    }
    return set;
}

}  // namespace cransim
