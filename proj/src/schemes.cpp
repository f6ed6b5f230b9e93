// SPDX-License-Identifier: Apache-2.0
#include "cransim/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cransim/errors.hpp"
#include "cransim/rng.hpp"
#include "cransim/rotation.hpp"

namespace cransim {

namespace {

constexpr std::uint64_t kRandomCqiTag = 0x52504b54u;  // "RPKT"
constexpr std::uint64_t kGeomCqiTag = 0x47454f4du;    // "GEOM"

std::vector<int> user_of_rrh(const std::vector<int>& rrh_of_user) {
    std::vector<int> inv(rrh_of_user.size(), -1);
    for (std::size_t u = 0; u < rrh_of_user.size(); ++u) {
        const int r = rrh_of_user[u];
        if (r < 0 || r >= static_cast<int>(rrh_of_user.size()) ||
            inv[static_cast<std::size_t>(r)] != -1)
            throw std::invalid_argument("assignment must be a user<->RRH bijection");
        inv[static_cast<std::size_t>(r)] = static_cast<int>(u);
    }
    return inv;
}

}  // namespace

double Allocation::sum_goodput() const {
    double s = 0.0;
    for (const AllocationDecision& d : decisions) s += d.realized_goodput;
    return s;
}

std::vector<double> realized_sinrs(const ScenarioConfig& cfg, const ChannelSet& channels,
                                   const std::vector<int>& rrh_of_user,
                                   const std::vector<BeamChoice>& choices,
                                   const Codebook& tx_cb, const Codebook& rx_cb) {
    const int n = channels.n_users;
    const double noise = cfg.noise_power_w();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        const CVec& filt = rx_cb.beam(choices[static_cast<std::size_t>(u)].rx_filter);
        LinkBudget budget;
        budget.noise_w = noise;
        for (int m = 0; m < n; ++m) {
            const ChannelMatrix& ch = channels.at(u, rrh_of_user[static_cast<std::size_t>(m)]);
            const double p = band_averaged_power(
                ch, tx_cb.beam(choices[static_cast<std::size_t>(m)].tx_beam), filt,
                cfg.tx_power_w, cfg.bandwidth_hz);
            if (m == u) {
                budget.signal_w = p;
            } else {
                budget.interference_w.push_back(p);
            }
        }
        out[static_cast<std::size_t>(u)] = sinr(budget);
    }
    return out;
}

Allocation evaluate_allocation(const ScenarioConfig& cfg, const ChannelSet& channels,
                               const std::vector<int>& rrh_of_user,
                               const std::vector<BeamChoice>& choices,
                               const std::vector<int>& cqis, const Codebook& tx_cb,
                               const Codebook& rx_cb, const McsTable& mcs) {
    const std::vector<double> sinrs =
        realized_sinrs(cfg, channels, rrh_of_user, choices, tx_cb, rx_cb);
    Allocation alloc;
    alloc.decisions.resize(sinrs.size());
    for (std::size_t u = 0; u < sinrs.size(); ++u) {
        AllocationDecision& d = alloc.decisions[u];
        d.user = static_cast<int>(u);
        d.rrh = rrh_of_user[u];
        d.tx_beam = choices[u].tx_beam;
        d.rx_filter = choices[u].rx_filter;
        d.cqi = cqis[u];
        const double b = mcs.bler(d.cqi, to_db(sinrs[u]));
        const double ps =
            packet_size_bits(d.cqi, mcs, cfg.bandwidth_hz, cfg.frame_duration_s, 0.0);
        d.realized_goodput = goodput_bps(ps, b, cfg.frame_duration_s);
    }
    return alloc;
}

Allocation csi_allocate(const ScenarioConfig& cfg, const ChannelSet& channels,
                        const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                        const Codebook& rx_cb, const McsTable& mcs) {
    const int n = channels.n_users;
    const double noise = cfg.noise_power_w();

    std::vector<std::vector<int>> tx_cand(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> rx_cand(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        const ChannelMatrix& serving = channels.at(u, rrh_of_user[static_cast<std::size_t>(u)]);
        tx_cand[static_cast<std::size_t>(u)] =
            tx_cb.candidate_beams(serving.aod_azimuth, cfg.candidate_tx_beams);
        rx_cand[static_cast<std::size_t>(u)] =
            rx_cb.candidate_beams(serving.aoa_azimuth, cfg.candidate_rx_filters);
    }

    // power[n][m][b][f]: power at user n through its filter candidate f, from
    // user m's serving RRH transmitting m's beam candidate b
    std::vector<std::vector<std::vector<std::vector<double>>>> power(
        static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        auto& by_m = power[static_cast<std::size_t>(u)];
        by_m.resize(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
            const ChannelMatrix& ch = channels.at(u, rrh_of_user[static_cast<std::size_t>(m)]);
            auto& by_b = by_m[static_cast<std::size_t>(m)];
            by_b.resize(tx_cand[static_cast<std::size_t>(m)].size());
            for (std::size_t b = 0; b < by_b.size(); ++b) {
                auto& by_f = by_b[b];
                by_f.resize(rx_cand[static_cast<std::size_t>(u)].size());
                for (std::size_t f = 0; f < by_f.size(); ++f) {
                    by_f[f] = band_averaged_power(
                        ch, tx_cb.beam(tx_cand[static_cast<std::size_t>(m)][b]),
                        rx_cb.beam(rx_cand[static_cast<std::size_t>(u)][f]), cfg.tx_power_w,
                        cfg.bandwidth_hz);
                }
            }
        }
    }

    // Joint search over beam combinations. Filters decouple: a user's filter
    // affects only its own SINR, so per combination each user takes its best
    // filter and the objective is the product of (1 + sinr) terms
    // (monotone-equivalent to the sum rate).
    std::vector<int> combo(static_cast<std::size_t>(n), 0);
    std::vector<int> filt(static_cast<std::size_t>(n), 0);
    std::vector<int> best_combo;
    std::vector<int> best_filt;
    double best_obj = -1.0;
    for (;;) {
        double obj = 1.0;
        for (int u = 0; u < n; ++u) {
            double best_gamma = -1.0;
            int best_f = 0;
            const std::size_t nf = rx_cand[static_cast<std::size_t>(u)].size();
            for (std::size_t f = 0; f < nf; ++f) {
                const auto& by_m = power[static_cast<std::size_t>(u)];
                double interf = 0.0;
                double sig = 0.0;
                for (int m = 0; m < n; ++m) {
                    const double p =
                        by_m[static_cast<std::size_t>(m)]
                            [static_cast<std::size_t>(combo[static_cast<std::size_t>(m)])][f];
                    if (m == u) {
                        sig = p;
                    } else {
                        interf += p;
                    }
                }
                const double gamma = sig / (noise + interf);
                if (gamma > best_gamma) {
                    best_gamma = gamma;
                    best_f = static_cast<int>(f);
                }
            }
            filt[static_cast<std::size_t>(u)] = best_f;
            obj *= 1.0 + best_gamma;
        }
        if (obj > best_obj) {
            best_obj = obj;
            best_combo = combo;
            best_filt = filt;
        }
        // odometer over the per-user beam candidate lists
        int pos = n - 1;
        while (pos >= 0) {
            if (++combo[static_cast<std::size_t>(pos)] <
                static_cast<int>(tx_cand[static_cast<std::size_t>(pos)].size()))
                break;
            combo[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    std::vector<BeamChoice> choices(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        choices[static_cast<std::size_t>(u)].tx_beam =
            tx_cand[static_cast<std::size_t>(u)]
           [static_cast<std::size_t>(best_combo[static_cast<std::size_t>(u)])];
        choices[static_cast<std::size_t>(u)].rx_filter =
            rx_cand[static_cast<std::size_t>(u)]
           [static_cast<std::size_t>(best_filt[static_cast<std::size_t>(u)])];
    }
    const std::vector<double> sinrs =
        realized_sinrs(cfg, channels, rrh_of_user, choices, tx_cb, rx_cb);
    std::vector<int> cqis(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        cqis[static_cast<std::size_t>(u)] =
            mcs.cqi_from_sinr_db(to_db(sinrs[static_cast<std::size_t>(u)]));
    return evaluate_allocation(cfg, channels, rrh_of_user, choices, cqis, tx_cb, rx_cb, mcs);
}

BeamGrid::BeamGrid(const ScenarioConfig& cfg, const Codebook& tx_cb, const Codebook& rx_cb,
                   double spacing_m, const ScattererField* field)
    : grid_cfg_(cfg), tx_cb_(tx_cb), rx_cb_(rx_cb), spacing_m_(spacing_m) {
    if (spacing_m <= 0.0 || spacing_m > cfg.domain_size_m)
        throw config_error("grid spacing must be in (0, domain size]");
    if (cfg.los_mode == LosMode::kNlos) {
        // no specular ray to expect: the grid maps positions to the best
        // beams for the (fixed) scatterer geometry instead
        if (field == nullptr)
            throw config_error("an NLOS beam grid needs the scatterer field");
        grid_field_ = *field;
    } else {
        grid_cfg_.los_mode = LosMode::kLos;  // the expected channel is specular-only
    }
    cells_per_side_ =
        static_cast<int>(std::floor(cfg.domain_size_m / spacing_m)) + 1;
}

int BeamGrid::cell_of(const Vec3& pos) const {
    const auto snap = [&](double v) {
        int i = static_cast<int>(std::llround(v / spacing_m_));
        return std::clamp(i, 0, cells_per_side_ - 1);
    };
    return snap(pos.y) * cells_per_side_ + snap(pos.x);
}

Vec3 BeamGrid::cell_center(int cell) const {
    const int j = cell / cells_per_side_;
    const int i = cell % cells_per_side_;
    return Vec3{static_cast<double>(i) * spacing_m_, static_cast<double>(j) * spacing_m_,
                grid_cfg_.rx_height_m};
}

std::vector<BeamChoice> BeamGrid::lookup(const std::vector<int>& cells,
                                         const std::vector<int>& rrh_of_user) const {
    std::vector<int> key = cells;
    key.insert(key.end(), rrh_of_user.begin(), rrh_of_user.end());
    {
        std::lock_guard<std::mutex> lock(*mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    UserDrop gd;
    for (int c : cells) gd.true_positions.push_back(cell_center(c));
    gd.reported_positions = gd.true_positions;
    gd.orientations.assign(cells.size(), OrientationAngles{});
    const ChannelSet chans = build_channels(grid_cfg_, gd, grid_field_);
    const Allocation alloc =
        csi_allocate(grid_cfg_, chans, rrh_of_user, tx_cb_, rx_cb_, McsTable::lte_default());
    std::vector<BeamChoice> choices(cells.size());
    for (const AllocationDecision& d : alloc.decisions) {
        choices[static_cast<std::size_t>(d.user)] = BeamChoice{d.tx_beam, d.rx_filter};
    }
    std::lock_guard<std::mutex> lock(*mutex_);
    auto [it, inserted] = cache_.emplace(std::move(key), std::move(choices));
    return it->second;
}

std::vector<BeamChoice> BeamGrid::lookup_positions(const std::vector<Vec3>& reported,
                                                   const std::vector<int>& rrh_of_user) const {
    std::vector<int> cells;
    cells.reserve(reported.size());
    for (const Vec3& p : reported) cells.push_back(cell_of(p));
    return lookup(cells, rrh_of_user);
}

double BeamGrid::combination_count() const {
    return std::pow(static_cast<double>(cells_per_side_) * cells_per_side_,
                    grid_cfg_.n_users);
}

std::size_t BeamGrid::cached_entries() const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return cache_.size();
}

BeamGrid build_beam_grid(const ScenarioConfig& cfg, const Codebook& tx_cb,
                         const Codebook& rx_cb, double spacing_m,
                         std::size_t max_entries, const ScattererField* field) {
    BeamGrid grid(cfg, tx_cb, rx_cb, spacing_m, field);
    const double combos = grid.combination_count();
    if (combos > static_cast<double>(max_entries)) {
        throw config_error(
            "eager beam grid would hold " + std::to_string(combos) +
            " combinations (limit " + std::to_string(max_entries) +
            "); use the lazy grid or a coarser spacing");
    }
    const int total_cells = grid.cells_per_side() * grid.cells_per_side();
    std::vector<int> cells(static_cast<std::size_t>(cfg.n_users), 0);
    for (;;) {
        std::vector<Vec3> centers;
        centers.reserve(cells.size());
        for (int c : cells) centers.push_back(grid.cell_center(c));
        grid.lookup(cells, assign_users(cfg, centers));
        int pos = cfg.n_users - 1;
        while (pos >= 0) {
            if (++cells[static_cast<std::size_t>(pos)] < total_cells) break;
            cells[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return grid;
}

std::vector<double> assemble_features(const ScenarioConfig& /*cfg*/, const UserDrop& drop,
                                      const std::vector<int>& rrh_of_user,
                                      const std::vector<BeamChoice>& choices, int user,
                                      FeatureMode mode) {
    const std::vector<int> inv = user_of_rrh(rrh_of_user);
    std::vector<double> x;
    x.reserve(4 + rrh_of_user.size() - 1 + (mode == FeatureMode::kWithOrientation ? 2 : 0));
    const Vec3& p = drop.reported_positions[static_cast<std::size_t>(user)];
    x.push_back(p.x);
    x.push_back(p.y);
    x.push_back(static_cast<double>(choices[static_cast<std::size_t>(user)].tx_beam));
    x.push_back(static_cast<double>(choices[static_cast<std::size_t>(user)].rx_filter));
    for (int r = 0; r < static_cast<int>(rrh_of_user.size()); ++r) {
        if (r == rrh_of_user[static_cast<std::size_t>(user)]) continue;
        const int other = inv[static_cast<std::size_t>(r)];
        x.push_back(static_cast<double>(choices[static_cast<std::size_t>(other)].tx_beam));
    }
    if (mode == FeatureMode::kWithOrientation) {
        const OrientationAngles& o = drop.orientations[static_cast<std::size_t>(user)];
        x.push_back(o.phi0);
        x.push_back(o.theta0);
    }
    return x;
}

std::vector<std::string> feature_names(const ScenarioConfig& cfg, FeatureMode mode) {
    std::vector<std::string> names = {"pos_x", "pos_y", "tx_beam", "rx_filter"};
    for (int i = 0; i + 1 < cfg.n_rrhs(); ++i) {
        names.push_back("intf_beam_" + std::to_string(i));
    }
    if (mode == FeatureMode::kWithOrientation) {
        names.push_back("orient_phi0");
        names.push_back("orient_theta0");
    }
    return names;
}

Allocation learning_allocate(const ScenarioConfig& cfg, const ForestModel& forest,
                             const BeamGrid& grid, const UserDrop& drop,
                             const ChannelSet& channels,
                             const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                             const Codebook& rx_cb, const McsTable& mcs,
                             FeatureMode features, FilterMitigation mitigation) {
    std::vector<BeamChoice> choices =
        grid.lookup_positions(drop.reported_positions, rrh_of_user);
    std::vector<int> cqis(choices.size());
    for (std::size_t u = 0; u < choices.size(); ++u) {
        const std::vector<double> x = assemble_features(
            cfg, drop, rrh_of_user, choices, static_cast<int>(u), features);
        cqis[u] = forest.predict(x);
    }
    if (mitigation == FilterMitigation::kRotate) {
        for (std::size_t u = 0; u < choices.size(); ++u) {
            choices[u].rx_filter =
                orientation_solution2(choices[u].rx_filter, drop.orientations[u], rx_cb);
        }
    }
    return evaluate_allocation(cfg, channels, rrh_of_user, choices, cqis, tx_cb, rx_cb, mcs);
}

Allocation random_packet_allocate(const ScenarioConfig& cfg, const BeamGrid& grid,
                                  const UserDrop& drop, const ChannelSet& channels,
                                  const std::vector<int>& rrh_of_user,
                                  const Codebook& tx_cb, const Codebook& rx_cb,
                                  const McsTable& mcs, std::uint64_t seed) {
    const std::vector<BeamChoice> choices =
        grid.lookup_positions(drop.reported_positions, rrh_of_user);
    Rng rng(derive_seed(seed, kRandomCqiTag));
    std::vector<int> cqis(choices.size());
    for (std::size_t u = 0; u < cqis.size(); ++u) {
        cqis[u] = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(mcs.size())));
    }
    return evaluate_allocation(cfg, channels, rrh_of_user, choices, cqis, tx_cb, rx_cb, mcs);
}

Allocation geometric_allocate(const ScenarioConfig& cfg, const UserDrop& drop,
                              const ChannelSet& channels,
                              const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                              const Codebook& rx_cb, const McsTable& mcs,
                              std::uint64_t seed) {
    const int n = drop.size();
    std::vector<BeamChoice> choices(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        const int r = rrh_of_user[static_cast<std::size_t>(u)];
        const Vec3& rrh = cfg.rrh_positions[static_cast<std::size_t>(r)];
        const Vec3& pos = drop.reported_positions[static_cast<std::size_t>(u)];
        choices[static_cast<std::size_t>(u)].tx_beam =
            tx_cb.nearest_beam(wrap_pi(azimuth(rrh, pos) - cfg.rrh_broadside(r)));
        // the user aims its filter at the serving RRH in its own frame
        const double d = distance(pos, rrh);
        const Vec3 dir = (rrh - pos) * (1.0 / d);
        const RotationMatrix rot =
            compose_rotation(drop.orientations[static_cast<std::size_t>(u)]);
        const SphericalAngles aim = angles_from_direction(rot.apply_transposed(dir));
        choices[static_cast<std::size_t>(u)].rx_filter = rx_cb.nearest_beam(aim.phi);
    }
    Rng rng(derive_seed(seed, kGeomCqiTag));
    std::vector<int> cqis(static_cast<std::size_t>(n));
    for (std::size_t u = 0; u < cqis.size(); ++u) {
        cqis[u] = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(mcs.size())));
    }
    return evaluate_allocation(cfg, channels, rrh_of_user, choices, cqis, tx_cb, rx_cb, mcs);
}

int orientation_solution2(int predicted_filter, const OrientationAngles& orientation,
                          const Codebook& rx_cb) {
    if (orientation.is_aligned()) return predicted_filter;
    const double global_angle = rx_cb.angle_of(predicted_filter);
    const RotationMatrix rot = compose_rotation(orientation);
    // assume a horizontal arrival: only the azimuth of the filter is known
    const SphericalAngles local = to_local_angles(rot, kPi / 2.0, global_angle);
    return rx_cb.nearest_beam(local.phi);
}

}  // namespace cransim
