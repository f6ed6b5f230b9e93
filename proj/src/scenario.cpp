// SPDX-License-Identifier: Apache-2.0
#include "cransim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cransim/errors.hpp"
#include "cransim/rng.hpp"

namespace cransim {

namespace {

// seed-stream tags; arbitrary distinct constants
constexpr std::uint64_t kDropTag = 0x44524f50u;         // "DROP"
constexpr std::uint64_t kNoiseTag = 0x4e4f4953u;        // "NOIS"
constexpr std::uint64_t kOrientTag = 0x4f524e54u;       // "ORNT"
constexpr std::uint64_t kScatTag = 0x53434154u;         // "SCAT"
constexpr std::uint64_t kPoolTag = 0x504f4f4cu;         // "POOL"
constexpr std::uint64_t kPickTag = 0x5049434bu;         // "PICK"

constexpr int kMaxPlacementAttempts = 10000;

}  // namespace

void ScenarioConfig::finalize() {
    if (rrh_positions.empty()) {
        const double a = rrh_inset_m;
        const double b = domain_size_m - rrh_inset_m;
        rrh_positions = {
            {a, a, tx_height_m},
            {b, a, tx_height_m},
            {b, b, tx_height_m},
            {a, b, tx_height_m},
        };
    }
    if (domain_size_m <= 0.0) throw config_error("domain size must be positive");
    if (rrh_positions.size() < 1) throw config_error("need at least one RRH");
    if (n_users != n_rrhs())
        throw config_error("user count must equal RRH count (one user per RRH)");
    if (carrier_hz <= 0.0 || bandwidth_hz <= 0.0)
        throw config_error("carrier and bandwidth must be positive");
    if (n_tx < 1 || n_rx < 1) throw config_error("array sizes must be >= 1");
    if (tx_power_w <= 0.0) throw config_error("tx power must be positive");
    if (frame_duration_s <= 0.0 || tti_duration_s <= 0.0)
        throw config_error("frame and TTI durations must be positive");
    if (tx_height_m <= rx_height_m)
        throw config_error("RRH height must exceed user height");
    if (exclusion_radius_m < 0.0) throw config_error("exclusion radius must be >= 0");
    if (tx_beam_step_rad <= 0.0 || rx_filter_step_rad <= 0.0)
        throw config_error("beam steps must be positive");
    if (candidate_tx_beams < 1 || candidate_rx_filters < 1)
        throw config_error("candidate set sizes must be >= 1");
    if (grid_spacing_m <= 0.0 || grid_spacing_m > domain_size_m)
        throw config_error("grid spacing must be in (0, domain size]");
    if (forest_trees < 1 || forest_depth < 1 || forest_mtry < 1)
        throw config_error("forest parameters must be >= 1");
    if (positions_per_user < 1)
        throw config_error("position pool size must be >= 1");
    if (pool_ring_inner_m < 0.0 || pool_ring_outer_m < 0.0 ||
        (pool_ring_outer_m > 0.0 && pool_ring_inner_m >= pool_ring_outer_m))
        throw config_error("pool ring must satisfy 0 <= inner < outer");
    if (pool_margin_m < 0.0) throw config_error("pool margin must be >= 0");
    if (scatterer_density_per_m2 < 0.0) throw config_error("scatterer density must be >= 0");
    if (scatterer_gain_min < 0.0 || scatterer_gain_max > 1.0 ||
        scatterer_gain_min > scatterer_gain_max)
        throw config_error("scatterer gains must satisfy 0 <= min <= max <= 1");
    if (nlos_pathloss_exponent < 2.0)
        throw config_error("NLOS pathloss exponent must be >= 2");
    if (elevation_band_lo_rad < 0.0 || elevation_band_hi_rad > kPi ||
        elevation_band_lo_rad > elevation_band_hi_rad)
        throw config_error("elevation band must satisfy 0 <= lo <= hi <= pi");
    if (symbols_per_frame < 1 || frames_per_tti < 1 || subcarriers_total < 1 ||
        beacon_subcarriers < 1 || users_per_beacon < 1 || csi_symbols_per_user < 1 ||
        csi_guard_every < 1)
        throw config_error("overhead numerology fields must be >= 1");
    if (beacon_subcarriers > subcarriers_total)
        throw config_error("beacon band cannot exceed the full band");
    // every user must have somewhere to stand
    const double disc_area = static_cast<double>(n_rrhs()) * kPi * exclusion_radius_m *
                             exclusion_radius_m;
    if (disc_area >= domain_size_m * domain_size_m)
        throw config_error("exclusion discs cover the whole domain");
}

double ScenarioConfig::noise_power_w() const {
    constexpr double kBoltzmann = 1.380649e-23;
    constexpr double kT0 = 290.0;
    return kBoltzmann * kT0 * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

double ScenarioConfig::rrh_broadside(int rrh) const {
    const Vec3 centre{domain_size_m / 2.0, domain_size_m / 2.0, rx_height_m};
    return azimuth(rrh_positions[static_cast<std::size_t>(rrh)], centre);
}

namespace {

bool outside_exclusions(const ScenarioConfig& cfg, const Vec3& p) {
    for (const Vec3& r : cfg.rrh_positions) {
        if (horizontal_distance(p, r) < cfg.exclusion_radius_m) return false;
    }
    return true;
}

Vec3 sample_position(const ScenarioConfig& cfg, Rng& rng) {
    Vec3 p{0.0, 0.0, cfg.rx_height_m};
    int attempts = 0;
    do {
        if (++attempts > kMaxPlacementAttempts)
            throw config_error("could not place a user outside the exclusion discs");
        p.x = rng.uniform(0.0, cfg.domain_size_m);
        p.y = rng.uniform(0.0, cfg.domain_size_m);
    } while (!outside_exclusions(cfg, p));
    return p;
}

}  // namespace

UserDrop sample_drop(const ScenarioConfig& cfg, int drop_index) {
    Rng rng(derive_seed(cfg.rng_seed, kDropTag, static_cast<std::uint64_t>(drop_index)));
    UserDrop drop;
    drop.true_positions.reserve(static_cast<std::size_t>(cfg.n_users));
    for (int u = 0; u < cfg.n_users; ++u) {
        drop.true_positions.push_back(sample_position(cfg, rng));
    }
    drop.reported_positions = drop.true_positions;
    drop.orientations.assign(static_cast<std::size_t>(cfg.n_users), OrientationAngles{});
    return drop;
}

PositionPool build_position_pool(const ScenarioConfig& cfg, std::uint64_t seed) {
    PositionPool pool;
    pool.per_user.resize(static_cast<std::size_t>(cfg.n_users));
    for (int u = 0; u < cfg.n_users; ++u) {
        Rng rng(derive_seed(seed, kPoolTag, static_cast<std::uint64_t>(u)));
        auto& slots = pool.per_user[static_cast<std::size_t>(u)];
        slots.reserve(static_cast<std::size_t>(cfg.positions_per_user));
        for (int s = 0; s < cfg.positions_per_user; ++s) {
            // each user roams the service region of its own RRH, so the
            // nearest-RRH pairing stays one-to-one; an optional ring keeps the
            // pool at mast distances where beam pointing is tolerant of
            // position error, like street-level users around a corner site
            Vec3 p;
            int attempts = 0;
            bool ok = false;
            do {
                if (++attempts > kMaxPlacementAttempts)
                    throw config_error("could not build a position pool inside the service region");
                p = sample_position(cfg, rng);
                double d_own = 0.0, d_other = 1e30;
                for (std::size_t k = 0; k < cfg.rrh_positions.size(); ++k) {
                    const double dx = p.x - cfg.rrh_positions[k].x;
                    const double dy = p.y - cfg.rrh_positions[k].y;
                    const double hd = std::sqrt(dx * dx + dy * dy);
                    if (static_cast<int>(k) == u)
                        d_own = hd;
                    else
                        d_other = std::min(d_other, hd);
                }
                // a reported position displaced by less than the margin can
                // never cross the serving-cell boundary
                ok = d_own + 2.0 * cfg.pool_margin_m <= d_other;
                if (ok && cfg.pool_ring_outer_m > 0.0)
                    ok = d_own >= cfg.pool_ring_inner_m && d_own <= cfg.pool_ring_outer_m;
            } while (!ok);
            slots.push_back(p);
        }
    }
    return pool;
}

UserDrop drop_from_pool(const PositionPool& pool, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kPickTag));
    UserDrop drop;
    drop.true_positions.reserve(pool.per_user.size());
    for (const auto& slots : pool.per_user) {
        drop.true_positions.push_back(slots[rng.uniform_index(slots.size())]);
    }
    drop.reported_positions = drop.true_positions;
    drop.orientations.assign(pool.per_user.size(), OrientationAngles{});
    return drop;
}

std::vector<Vec3> snap_to_pool(const PositionPool& pool, const std::vector<Vec3>& reported) {
    if (reported.size() != pool.per_user.size())
        throw std::invalid_argument("one reported position per pooled user expected");
    std::vector<Vec3> out;
    out.reserve(reported.size());
    for (std::size_t u = 0; u < reported.size(); ++u) {
        const Vec3& r = reported[u];
        const auto& slots = pool.per_user[u];
        Vec3 best = slots.front();
        double best_d = horizontal_distance(r, best);
        for (const Vec3& s : slots) {
            const double d = horizontal_distance(r, s);
            if (d < best_d) {
                best_d = d;
                best = s;
            }
        }
        out.push_back(best);
    }
    return out;
}

UserDrop inject_position_noise(const UserDrop& drop, double radius_m, std::uint64_t seed) {
    UserDrop out = drop;
    Rng rng(derive_seed(seed, kNoiseTag));
    for (std::size_t u = 0; u < out.reported_positions.size(); ++u) {
        // uniform over the disc: r = R*sqrt(u) gives constant density per area
        const double r = radius_m * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, kTwoPi);
        out.reported_positions[u].x = drop.true_positions[u].x + r * std::cos(phi);
        out.reported_positions[u].y = drop.true_positions[u].y + r * std::sin(phi);
        out.reported_positions[u].z = drop.true_positions[u].z;
    }
    return out;
}

OrientationAngles sample_orientation(OrientationMode mode, double elevation_lo,
                                     double elevation_hi, std::uint64_t seed) {
    if (mode == OrientationMode::kAligned) return OrientationAngles{};
    Rng rng(derive_seed(seed, kOrientTag));
    OrientationAngles o;
    o.phi0 = rng.uniform(0.0, kTwoPi);
    o.theta0 = rng.uniform(elevation_lo, elevation_hi);
    return o;
}

UserDrop with_orientations(const UserDrop& drop, OrientationMode mode,
                           const ScenarioConfig& cfg, std::uint64_t seed) {
    UserDrop out = drop;
    for (std::size_t u = 0; u < out.orientations.size(); ++u) {
        out.orientations[u] = sample_orientation(
            mode, cfg.elevation_band_lo_rad, cfg.elevation_band_hi_rad,
            derive_seed(seed, kOrientTag, static_cast<std::uint64_t>(u)));
    }
    return out;
}

ScattererField build_scatterers(const ScenarioConfig& cfg, double density_per_m2,
                                std::uint64_t seed) {
    ScattererField field;
    const double area = cfg.domain_size_m * cfg.domain_size_m;
    const int count = static_cast<int>(std::llround(density_per_m2 * area));
    field.points.reserve(static_cast<std::size_t>(count));
    field.reflection_gains.reserve(static_cast<std::size_t>(count));
    Rng rng(derive_seed(seed, kScatTag));
    const double z_lo = std::min(cfg.rx_height_m, cfg.tx_height_m);
    const double z_hi = std::max(cfg.rx_height_m, cfg.tx_height_m);
    for (int k = 0; k < count; ++k) {
        Vec3 p;
        p.x = rng.uniform(0.0, cfg.domain_size_m);
        p.y = rng.uniform(0.0, cfg.domain_size_m);
        p.z = rng.uniform(z_lo, z_hi);
        const double mag = rng.uniform(cfg.scatterer_gain_min, cfg.scatterer_gain_max);
        const double ph = rng.uniform(0.0, kTwoPi);
        field.points.push_back(p);
        field.reflection_gains.emplace_back(mag * std::cos(ph), mag * std::sin(ph));
    }
    return field;
}

std::vector<int> assign_users(const ScenarioConfig& cfg, const std::vector<Vec3>& positions) {
    const int n = static_cast<int>(positions.size());
    if (n != cfg.n_rrhs())
        throw config_error("assignment requires exactly one user per RRH");
    // nearest-RRH pairing, kept one-to-one: repeatedly match the globally
    // closest unassigned (user, RRH) pair. Identical to everyone-takes-their-
    // nearest whenever users sit in distinct service regions.
    std::vector<int> result(static_cast<std::size_t>(n), -1);
    std::vector<bool> user_done(static_cast<std::size_t>(n), false);
    std::vector<bool> rrh_done(static_cast<std::size_t>(n), false);
    for (int round = 0; round < n; ++round) {
        int bu = -1, br = -1;
        double best = 0.0;
        for (int u = 0; u < n; ++u) {
            if (user_done[static_cast<std::size_t>(u)]) continue;
            for (int r = 0; r < n; ++r) {
                if (rrh_done[static_cast<std::size_t>(r)]) continue;
                const double d = horizontal_distance(
                    positions[static_cast<std::size_t>(u)],
                    cfg.rrh_positions[static_cast<std::size_t>(r)]);
                if (bu < 0 || d < best) {
                    best = d;
                    bu = u;
                    br = r;
                }
            }
        }
        result[static_cast<std::size_t>(bu)] = br;
        user_done[static_cast<std::size_t>(bu)] = true;
        rrh_done[static_cast<std::size_t>(br)] = true;
    }
    return result;
}

}  // namespace cransim
