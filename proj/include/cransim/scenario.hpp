// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cransim/geom.hpp"
#include "cransim/rotation.hpp"

namespace cransim {

enum class LosMode { kLos, kNlos };

// Full description of one antenna domain: geometry, radio constants,
// codebook and learning parameters. Immutable once validated.
struct ScenarioConfig {
    // geometry
    double domain_size_m = 60.0;          // square side
    std::vector<Vec3> rrh_positions;      // filled by finalize() if empty
    double rrh_inset_m = 5.0;             // corner inset of the default layout
    int n_users = 4;                      // one user per RRH
    double tx_height_m = 10.0;
    double rx_height_m = 1.5;
    double exclusion_radius_m = 1.0;      // keep-out disc around each RRH

    // radio
    double carrier_hz = 3.5e9;
    double bandwidth_hz = 200e6;
    int n_tx = 8;
    int n_rx = 2;
    double tx_power_w = 1e-3;
    double frame_duration_s = 0.2e-3;     // TDD frame, the scheduling slot
    double tti_duration_s = 1.0e-3;       // 5 frames; basis of the overhead numerology
    double user_speed_mps = 30.0;
    double noise_figure_db = 35.0;

    // propagation
    LosMode los_mode = LosMode::kLos;
    double scatterer_density_per_m2 = 0.005;
    double scatterer_gain_min = 0.1;
    double scatterer_gain_max = 0.5;
    double nlos_pathloss_exponent = 2.2;  // LOS is fixed free-space (exponent 2)

    // codebooks and allocation search
    double tx_beam_step_rad = 3.0 * kPi / 180.0;
    double rx_filter_step_rad = 12.0 * kPi / 180.0;
    int candidate_tx_beams = 5;           // per-link shortlist for the CSI search
    int candidate_rx_filters = 3;
    double grid_spacing_m = 2.0;

    // random forest
    int forest_trees = 100;
    int forest_depth = 10;
    int forest_mtry = 3;
    int positions_per_user = 100;         // candidate location pool per user
    double pool_ring_inner_m = 22.0;      // pool slots keep this horizontal distance band
    double pool_ring_outer_m = 33.0;      // from the serving mast (0 disables the band)
    double pool_margin_m = 5.0;           // slack kept to the serving-cell boundary

    // device orientation sampling
    double elevation_band_lo_rad = 60.0 * kPi / 180.0;
    double elevation_band_hi_rad = 120.0 * kPi / 180.0;

    // overhead numerology (per TTI)
    int symbols_per_frame = 14;
    int frames_per_tti = 5;
    int subcarriers_total = 1200;
    int beacon_subcarriers = 24;
    int users_per_beacon = 12;
    int csi_symbols_per_user = 1;
    int csi_guard_every = 3;              // one guard symbol per this many CSI pilots

    double class_support_warn_floor = 0.005;

    std::uint64_t rng_seed = 1;

    // Fill derived fields (default RRH layout) and check every invariant.
    // Throws config_error on violation.
    void finalize();

    int n_rrhs() const { return static_cast<int>(rrh_positions.size()); }
    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    // thermal noise floor kTB scaled by the noise figure
    double noise_power_w() const;
    // broadside azimuth of an RRH array (aimed at the domain centre)
    double rrh_broadside(int rrh) const;
};

// One sampled placement of all users. True positions are the ground truth;
// reported positions are what the allocator sees.
struct UserDrop {
    std::vector<Vec3> true_positions;
    std::vector<Vec3> reported_positions;
    std::vector<OrientationAngles> orientations;

    int size() const { return static_cast<int>(true_positions.size()); }
};

struct ScattererField {
    std::vector<Vec3> points;
    std::vector<std::complex<double>> reflection_gains;  // |g| <= 1

    int size() const { return static_cast<int>(points.size()); }
};

enum class OrientationMode { kAligned, kRandom };

// Fixed set of candidate locations per user. Drops (for both training and
// evaluation) place each user at one of its pool locations, so the same
// spots recur under ever-changing interference constellations.
struct PositionPool {
    std::vector<std::vector<Vec3>> per_user;  // [user][slot]

    int users() const { return static_cast<int>(per_user.size()); }
    int slots() const {
        return per_user.empty() ? 0 : static_cast<int>(per_user.front().size());
    }
};

// Deterministic user placement for evaluation drop `drop_index`: uniform over
// the domain square excluding the keep-out discs. reported == true, aligned
// orientations.
UserDrop sample_drop(const ScenarioConfig& cfg, int drop_index);

// positions_per_user candidate locations per user, sampled like sample_drop
// but confined to each user's own RRH service region (its nearest-RRH cell).
PositionPool build_position_pool(const ScenarioConfig& cfg, std::uint64_t seed);

// Place every user at a uniformly chosen slot of its pool.
UserDrop drop_from_pool(const PositionPool& pool, std::uint64_t seed);

// Match each reported fix to that user's nearest known candidate location:
// beams are precomputed for known spots, so that is where a position estimate
// gets resolved. Small errors vanish; larger ones land on a neighbouring slot.
std::vector<Vec3> snap_to_pool(const PositionPool& pool, const std::vector<Vec3>& reported);

// reported = true + planar error uniform in a disc of the given radius.
// True positions and heights are untouched.
UserDrop inject_position_noise(const UserDrop& drop, double radius_m, std::uint64_t seed);

OrientationAngles sample_orientation(OrientationMode mode, double elevation_lo,
                                     double elevation_hi, std::uint64_t seed);

// Re-sample every user's orientation in the drop.
UserDrop with_orientations(const UserDrop& drop, OrientationMode mode,
                           const ScenarioConfig& cfg, std::uint64_t seed);

// Scatterer field for the whole domain; count = round(density * area).
ScattererField build_scatterers(const ScenarioConfig& cfg, double density_per_m2,
                                std::uint64_t seed);

// One-to-one nearest-RRH pairing (greedy closest-pair matching).
// result[user] = rrh index.
std::vector<int> assign_users(const ScenarioConfig& cfg, const std::vector<Vec3>& positions);

}  // namespace cransim
