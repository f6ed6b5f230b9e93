// SPDX-License-Identifier: Apache-2.0
#include "cransim/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cransim/errors.hpp"

namespace cransim {

namespace {
constexpr double kBlerDbPerDecade = 2.75;
}

double sinr(const LinkBudget& budget) {
    if (budget.noise_w <= 0.0) throw std::invalid_argument("noise power must be positive");
    double denom = budget.noise_w;
    for (double i : budget.interference_w) denom += i;
    return budget.signal_w / denom;
}

McsTable McsTable::from_efficiencies(const std::vector<double>& eff, double gap_db,
                                     double bler_at_threshold) {
    McsTable t;
    t.efficiency_ = eff;
    t.bler_at_threshold_ = bler_at_threshold;
    t.threshold_db_.reserve(eff.size());
    for (double e : eff) {
        // SINR needed to realize efficiency e with the given dB gap to capacity
        t.threshold_db_.push_back(to_db(std::pow(2.0, e) - 1.0) + gap_db);
    }
    for (std::size_t k = 1; k < eff.size(); ++k) {
        if (eff[k] <= eff[k - 1]) throw config_error("MCS efficiencies must increase");
        if (t.threshold_db_[k] <= t.threshold_db_[k - 1])
            throw config_error("MCS thresholds must increase");
    }
    if (bler_at_threshold <= 0.0 || bler_at_threshold >= 1.0)
        throw config_error("target BLER must lie in (0, 1)");
    return t;
}

McsTable McsTable::lte_default() {
    static const std::vector<double> kEff = {
        0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
        2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};
    return from_efficiencies(kEff, 3.0, 0.1);
}

McsTable McsTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open MCS table: " + path);
    std::string line;
    McsTable t;
    bool got_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!got_header) {
            std::string magic;
            int version = 0;
            ls >> magic >> version;
            if (magic != "mcs-table" || version != 1)
                throw parse_error("unsupported MCS table header: " + line);
            got_header = true;
            continue;
        }
        std::string key;
        ls >> key;
        if (key == "bler_at_threshold") {
            ls >> t.bler_at_threshold_;
            if (!ls) throw parse_error("bad bler_at_threshold line");
            continue;
        }
        // plain row: cqi efficiency threshold_db
        std::istringstream row(line);
        int cqi = 0;
        double eff = 0.0, thr = 0.0;
        row >> cqi >> eff >> thr;
        if (!row) throw parse_error("malformed MCS row: " + line);
        if (cqi != static_cast<int>(t.efficiency_.size()) + 1)
            throw parse_error("MCS rows must be contiguous from CQI 1");
        t.efficiency_.push_back(eff);
        t.threshold_db_.push_back(thr);
    }
    if (!got_header || t.efficiency_.empty()) throw parse_error("empty MCS table: " + path);
    for (std::size_t k = 1; k < t.efficiency_.size(); ++k) {
        if (t.efficiency_[k] <= t.efficiency_[k - 1] ||
            t.threshold_db_[k] <= t.threshold_db_[k - 1])
            throw parse_error("MCS table rows must be strictly increasing");
    }
    return t;
}

void McsTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write MCS table: " + path);
    out << "# columns: cqi efficiency_bits_per_s_hz sinr_threshold_db\n";
    out << "mcs-table 1\n";
    out << "bler_at_threshold " << bler_at_threshold_ << "\n";
    out.precision(10);
    for (int k = 0; k < size(); ++k) {
        out << (k + 1) << ' ' << efficiency_[static_cast<std::size_t>(k)] << ' '
            << threshold_db_[static_cast<std::size_t>(k)] << '\n';
    }
}

double McsTable::efficiency(int cqi) const {
    if (cqi <= 0) return 0.0;
    return efficiency_.at(static_cast<std::size_t>(cqi - 1));
}

double McsTable::threshold_db(int cqi) const {
    return threshold_db_.at(static_cast<std::size_t>(cqi - 1));
}

int McsTable::cqi_from_sinr_db(double sinr_db) const {
    int best = 0;
    for (int k = 0; k < size(); ++k) {
        if (threshold_db_[static_cast<std::size_t>(k)] <= sinr_db) best = k + 1;
    }
    return best;
}

double McsTable::bler(int cqi, double sinr_db) const {
    if (cqi <= 0) return 1.0;
    const double margin_db = sinr_db - threshold_db(cqi);
    // error rate falls one decade per kBlerDbPerDecade of margin; wideband
    // transmission averages frequency-selective fading, so the per-packet
    // waterfall is flatter than a narrowband curve
    const double b = bler_at_threshold_ * std::pow(10.0, -margin_db / kBlerDbPerDecade);
    return std::clamp(b, 0.0, 1.0);
}

double packet_size_bits(int cqi, const McsTable& table, double bandwidth_hz,
                        double frame_s, double overhead_fraction) {
    if (overhead_fraction < 0.0 || overhead_fraction >= 1.0)
        throw std::invalid_argument("overhead fraction must lie in [0, 1)");
    if (cqi <= 0) return 0.0;
    return table.efficiency(cqi) * bandwidth_hz * frame_s * (1.0 - overhead_fraction);
}

double goodput_bps(double ps_bits, double bler, double tti_s) {
    if (tti_s <= 0.0) throw std::invalid_argument("tti must be positive");
    return (1.0 - bler) * ps_bits / tti_s;
}

OverheadConfig OverheadConfig::from_scenario(const ScenarioConfig& cfg) {
    OverheadConfig oc;
    oc.sym_total = cfg.symbols_per_frame * cfg.frames_per_tti;
    oc.sc_total = cfg.subcarriers_total;
    oc.sc_pos = cfg.beacon_subcarriers;
    oc.users_per_beacon = cfg.users_per_beacon;
    oc.sym_csi_per_user = cfg.csi_symbols_per_user;
    oc.csi_guard_every = cfg.csi_guard_every;
    return oc;
}

double overhead_position(const OverheadConfig& cfg, int n_users) {
    if (n_users < 1) throw std::invalid_argument("need at least one user");
    const int beacon_symbols = (n_users + cfg.users_per_beacon - 1) / cfg.users_per_beacon;
    const double oh = static_cast<double>(beacon_symbols) * cfg.sc_pos /
                      (static_cast<double>(cfg.sym_total) * cfg.sc_total);
    if (oh > 1.0) throw config_error("position beaconing exceeds the TTI");
    return oh;
}

double overhead_csi(const OverheadConfig& cfg, int n_users) {
    if (n_users < 1) throw std::invalid_argument("need at least one user");
    const int pilot_symbols =
        n_users * cfg.sym_csi_per_user + n_users / cfg.csi_guard_every;
    const double oh = static_cast<double>(pilot_symbols) / cfg.sym_total;
    if (oh > 1.0) throw config_error("CSI sensing exceeds the TTI");
    return oh;
}

}  // namespace cransim
