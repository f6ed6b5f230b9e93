// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "cransim/channel.hpp"
#include "cransim/codebook.hpp"
#include "cransim/forest.hpp"
#include "cransim/link.hpp"
#include "cransim/scenario.hpp"

namespace cransim {

struct AllocationDecision {
    int user = -1;
    int rrh = -1;
    int tx_beam = -1;
    int rx_filter = -1;
    int cqi = 0;
    double realized_goodput = 0.0;  // bits/s, from the true channel
};

struct Allocation {
    std::vector<AllocationDecision> decisions;

    double sum_goodput() const;
};

struct BeamChoice {
    int tx_beam = -1;
    int rx_filter = -1;
};

// Per-user SINR (linear) under the given beam choices: the serving RRH's
// beam through the user's own filter against every other RRH's transmission
// through that same filter.
std::vector<double> realized_sinrs(const ScenarioConfig& cfg, const ChannelSet& channels,
                                   const std::vector<int>& rrh_of_user,
                                   const std::vector<BeamChoice>& choices,
                                   const Codebook& tx_cb, const Codebook& rx_cb);

// Fills CQI-dependent fields: BLER from the realized SINR, per-frame payload,
// goodput. The schedulers never grade themselves; this always runs on the
// true channels.
Allocation evaluate_allocation(const ScenarioConfig& cfg, const ChannelSet& channels,
                               const std::vector<int>& rrh_of_user,
                               const std::vector<BeamChoice>& choices,
                               const std::vector<int>& cqis, const Codebook& tx_cb,
                               const Codebook& rx_cb, const McsTable& mcs);

// Exhaustive joint search over per-link candidate sets (the nearest
// candidate_tx_beams transmit beams to each link's departure bearing, and the
// nearest candidate_rx_filters filters to the arrival bearing as seen in the
// device's own frame — pilots pass through the physical antennas), maximizing
// the sum rate; CQI assigned from the realized SINR. Serves both as the
// CSI-based comparison scheme and as the grid precomputation kernel.
Allocation csi_allocate(const ScenarioConfig& cfg, const ChannelSet& channels,
                        const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                        const Codebook& rx_cb, const McsTable& mcs);

// Position-quantized cache of the oracle's beam choices on the expected
// channel: specular-only and aligned under LOS; under NLOS the deterministic
// scatterer-field response at the grid point (there is no specular ray to
// expect). Entries are computed on first use and memoized per (cell
// combination, assignment); the eager constructor variant enumerates every
// combination up front and refuses oversized grids.
class BeamGrid {
public:
    BeamGrid(const ScenarioConfig& cfg, const Codebook& tx_cb, const Codebook& rx_cb,
             double spacing_m, const ScattererField* field = nullptr);

    int cells_per_side() const { return cells_per_side_; }
    double spacing() const { return spacing_m_; }
    int cell_of(const Vec3& pos) const;  // nearest lattice point
    Vec3 cell_center(int cell) const;

    // beam choices for the given cell combination, indexed by user
    std::vector<BeamChoice> lookup(const std::vector<int>& cells,
                                   const std::vector<int>& rrh_of_user) const;
    std::vector<BeamChoice> lookup_positions(const std::vector<Vec3>& reported,
                                             const std::vector<int>& rrh_of_user) const;

    // number of distinct cell combinations an eager build would store
    double combination_count() const;
    std::size_t cached_entries() const;

private:
    ScenarioConfig grid_cfg_;   // copy; LOS forced unless the scenario is NLOS
    ScattererField grid_field_;  // empty under LOS
    const Codebook& tx_cb_;
    const Codebook& rx_cb_;
    double spacing_m_ = 0.0;
    int cells_per_side_ = 0;
    mutable std::map<std::vector<int>, std::vector<BeamChoice>> cache_;
    // behind a pointer so the grid stays movable
    mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

// Eager variant: precomputes every combination; throws config_error with a
// size estimate when the combination count exceeds max_entries.
BeamGrid build_beam_grid(const ScenarioConfig& cfg, const Codebook& tx_cb,
                         const Codebook& rx_cb, double spacing_m,
                         std::size_t max_entries,
                         const ScattererField* field = nullptr);

enum class FeatureMode { kBase, kWithOrientation };

// [pos_x, pos_y, tx_beam, rx_filter, interferer beams ... (, phi0, theta0)]
std::vector<double> assemble_features(const ScenarioConfig& cfg, const UserDrop& drop,
                                      const std::vector<int>& rrh_of_user,
                                      const std::vector<BeamChoice>& choices, int user,
                                      FeatureMode mode);
std::vector<std::string> feature_names(const ScenarioConfig& cfg, FeatureMode mode);

enum class FilterMitigation { kNone, kRotate };

// Grid beams/filters at the reported positions, CQI from the forest.
// FilterMitigation::kRotate re-aims each user's filter for its actual
// orientation before the channel is evaluated.
Allocation learning_allocate(const ScenarioConfig& cfg, const ForestModel& forest,
                             const BeamGrid& grid, const UserDrop& drop,
                             const ChannelSet& channels,
                             const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                             const Codebook& rx_cb, const McsTable& mcs,
                             FeatureMode features = FeatureMode::kBase,
                             FilterMitigation mitigation = FilterMitigation::kNone);

// Grid beams/filters, CQI uniform over 1..15.
Allocation random_packet_allocate(const ScenarioConfig& cfg, const BeamGrid& grid,
                                  const UserDrop& drop, const ChannelSet& channels,
                                  const std::vector<int>& rrh_of_user,
                                  const Codebook& tx_cb, const Codebook& rx_cb,
                                  const McsTable& mcs, std::uint64_t seed);

// Bearing-pointed beams from the reported positions, CQI uniform over 1..15.
Allocation geometric_allocate(const ScenarioConfig& cfg, const UserDrop& drop,
                              const ChannelSet& channels,
                              const std::vector<int>& rrh_of_user, const Codebook& tx_cb,
                              const Codebook& rx_cb, const McsTable& mcs,
                              std::uint64_t seed);

// Re-aims a filter chosen for an aligned device: the filter's pointing angle
// is taken as a global bearing at horizontal elevation, rotated into the
// device's LCS, and re-quantized onto the filter codebook.
int orientation_solution2(int predicted_filter, const OrientationAngles& orientation,
                          const Codebook& rx_cb);

}  // namespace cransim
