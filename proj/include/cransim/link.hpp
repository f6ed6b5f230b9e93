// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cransim/scenario.hpp"

namespace cransim {

inline double to_db(double x) { return 10.0 * std::log10(x); }
inline double from_db(double x) { return std::pow(10.0, x / 10.0); }

// Everything that enters one user's SINR.
struct LinkBudget {
    double signal_w = 0.0;
    std::vector<double> interference_w;  // one entry per co-scheduled transmitter
    double noise_w = 1e-30;
};

// gamma = S / (N + sum I), linear
double sinr(const LinkBudget& budget);

// 15-level MCS table: spectral efficiency per CQI plus the SINR threshold at
// which the target block error rate is met. CQI 0 means no transmission.
class McsTable {
public:
    // LTE CQI efficiencies with thresholds from the Shannon-gap rule
    // thr = 10*log10(2^eff - 1) + gap.
    static McsTable lte_default();
    static McsTable from_efficiencies(const std::vector<double>& eff, double gap_db,
                                      double bler_at_threshold);
    static McsTable load(const std::string& path);
    void save(const std::string& path) const;

    int size() const { return static_cast<int>(efficiency_.size()); }
    // cqi in 0..size(); 0 yields zero efficiency
    double efficiency(int cqi) const;
    double threshold_db(int cqi) const;  // cqi in 1..size()
    double bler_at_threshold() const { return bler_at_threshold_; }

    // highest CQI whose threshold <= sinr_db; 0 if below all of them
    int cqi_from_sinr_db(double sinr_db) const;

    // waterfall error model: bler_at_threshold at the CQI's own threshold,
    // one decade per dB of margin, clamped to [0, 1]; CQI 0 always fails
    double bler(int cqi, double sinr_db) const;

private:
    std::vector<double> efficiency_;
    std::vector<double> threshold_db_;
    double bler_at_threshold_ = 0.1;
};

// payload bits carried by one frame at the given CQI
double packet_size_bits(int cqi, const McsTable& table, double bandwidth_hz,
                        double frame_s, double overhead_fraction);

// (1 - bler) * ps / tti
double goodput_bps(double ps_bits, double bler, double tti_s);

// Pilot numerology of one TTI. Position beacons are narrow-band and serve
// several users per symbol; CSI pilots are full-band, one symbol per user,
// with a guard symbol inserted after every `csi_guard_every` pilots.
struct OverheadConfig {
    int sym_total = 70;       // symbols per TTI
    int sc_total = 1200;      // subcarriers
    int sc_pos = 24;          // beacon width
    int users_per_beacon = 12;
    int sym_csi_per_user = 1;
    int csi_guard_every = 3;

    static OverheadConfig from_scenario(const ScenarioConfig& cfg);
};

// fraction of the TTI resource grid spent on position beacons
double overhead_position(const OverheadConfig& cfg, int n_users);
// fraction spent on full-band CSI pilots (plus guards)
double overhead_csi(const OverheadConfig& cfg, int n_users);

}  // namespace cransim
