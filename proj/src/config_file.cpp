// SPDX-License-Identifier: Apache-2.0
#include "cransim/config_file.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "cransim/errors.hpp"

namespace cransim {

namespace {

constexpr const char* kMagic = "cransim-config";
constexpr int kVersion = 1;
constexpr double kDegToRad = kPi / 180.0;

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Cursor {
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double as_double(const std::string& v) const {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("'" + v + "' is not a number");
        }
        if (used != v.size()) fail("'" + v + "' is not a number");
        return out;
    }

    long long as_int(const std::string& v) const {
        std::size_t used = 0;
        long long out = 0;
        try {
            out = std::stoll(v, &used);
        } catch (const std::exception&) {
            fail("'" + v + "' is not an integer");
        }
        if (used != v.size()) fail("'" + v + "' is not an integer");
        return out;
    }

    std::uint64_t as_u64(const std::string& v) const {
        std::size_t used = 0;
        unsigned long long out = 0;
        try {
            out = std::stoull(v, &used);
        } catch (const std::exception&) {
            fail("'" + v + "' is not an unsigned integer");
        }
        if (used != v.size()) fail("'" + v + "' is not an unsigned integer");
        return out;
    }

    std::vector<std::string> split_list(const std::string& v) const {
        std::vector<std::string> out;
        std::string item;
        std::istringstream is(v);
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list element");
            out.push_back(item);
        }
        if (out.empty()) fail("empty list");
        return out;
    }

    std::vector<double> as_doubles(const std::string& v) const {
        std::vector<double> out;
        for (const std::string& s : split_list(v)) out.push_back(as_double(s));
        return out;
    }

    std::vector<int> as_ints(const std::string& v) const {
        std::vector<int> out;
        for (const std::string& s : split_list(v)) out.push_back(static_cast<int>(as_int(s)));
        return out;
    }
};

}  // namespace

void RunConfig::validate() const {
    if (train_samples <= 0) throw config_error("train_samples must be positive");
    if (eval_drops <= 0) throw config_error("eval_drops must be positive");
    if (train_noise_radius_m <= 0.0)
        throw config_error("train_noise_radius_m must be positive");
    if (noise_radii.empty()) throw config_error("noise_radii must not be empty");
    for (double r : noise_radii)
        if (r < 0.0 || !std::isfinite(r))
            throw config_error("noise_radii entries must be finite and >= 0");
    if (scatterer_densities.empty())
        throw config_error("scatterer_densities must not be empty");
    for (double d : scatterer_densities)
        if (d < 0.0 || !std::isfinite(d))
            throw config_error("scatterer_densities entries must be finite and >= 0");
    if (overhead_user_counts.empty())
        throw config_error("overhead_user_counts must not be empty");
    for (int n : overhead_user_counts)
        if (n < 1) throw config_error("overhead_user_counts entries must be >= 1");
    if (dimension_tree_counts.empty() || dimension_depths.empty())
        throw config_error("dimensioning grids must not be empty");
    for (int n : dimension_tree_counts)
        if (n < 1) throw config_error("dimension_tree_counts entries must be >= 1");
    for (int n : dimension_depths)
        if (n < 1) throw config_error("dimension_depths entries must be >= 1");
}

RunConfig parse_run_config(std::istream& is, const std::string& origin) {
    RunConfig cfg;
    ScenarioConfig& sc = cfg.scenario;
    Cursor cur{origin, 0};

    using Handler = std::function<void(const Cursor&, const std::string&)>;
    const std::map<std::string, Handler> handlers = {
        // geometry
        {"domain_size_m", [&](const Cursor& c, const std::string& v) { sc.domain_size_m = c.as_double(v); }},
        {"rrh_inset_m", [&](const Cursor& c, const std::string& v) { sc.rrh_inset_m = c.as_double(v); }},
        {"n_users", [&](const Cursor& c, const std::string& v) { sc.n_users = static_cast<int>(c.as_int(v)); }},
        {"tx_height_m", [&](const Cursor& c, const std::string& v) { sc.tx_height_m = c.as_double(v); }},
        {"rx_height_m", [&](const Cursor& c, const std::string& v) { sc.rx_height_m = c.as_double(v); }},
        {"exclusion_radius_m", [&](const Cursor& c, const std::string& v) { sc.exclusion_radius_m = c.as_double(v); }},
        // radio
        {"carrier_hz", [&](const Cursor& c, const std::string& v) { sc.carrier_hz = c.as_double(v); }},
        {"bandwidth_hz", [&](const Cursor& c, const std::string& v) { sc.bandwidth_hz = c.as_double(v); }},
        {"n_tx", [&](const Cursor& c, const std::string& v) { sc.n_tx = static_cast<int>(c.as_int(v)); }},
        {"n_rx", [&](const Cursor& c, const std::string& v) { sc.n_rx = static_cast<int>(c.as_int(v)); }},
        {"tx_power_w", [&](const Cursor& c, const std::string& v) { sc.tx_power_w = c.as_double(v); }},
        {"frame_duration_s", [&](const Cursor& c, const std::string& v) { sc.frame_duration_s = c.as_double(v); }},
        {"tti_duration_s", [&](const Cursor& c, const std::string& v) { sc.tti_duration_s = c.as_double(v); }},
        {"user_speed_mps", [&](const Cursor& c, const std::string& v) { sc.user_speed_mps = c.as_double(v); }},
        {"noise_figure_db", [&](const Cursor& c, const std::string& v) { sc.noise_figure_db = c.as_double(v); }},
        // propagation
        {"los_mode", [&](const Cursor& c, const std::string& v) {
             if (v == "los") sc.los_mode = LosMode::kLos;
             else if (v == "nlos") sc.los_mode = LosMode::kNlos;
             else c.fail("los_mode must be 'los' or 'nlos'");
         }},
        {"scatterer_density_per_m2", [&](const Cursor& c, const std::string& v) { sc.scatterer_density_per_m2 = c.as_double(v); }},
        {"scatterer_gain_min", [&](const Cursor& c, const std::string& v) { sc.scatterer_gain_min = c.as_double(v); }},
        {"scatterer_gain_max", [&](const Cursor& c, const std::string& v) { sc.scatterer_gain_max = c.as_double(v); }},
        {"nlos_pathloss_exponent", [&](const Cursor& c, const std::string& v) { sc.nlos_pathloss_exponent = c.as_double(v); }},
        // codebooks and search
        {"tx_beam_step_deg", [&](const Cursor& c, const std::string& v) { sc.tx_beam_step_rad = c.as_double(v) * kDegToRad; }},
        {"rx_filter_step_deg", [&](const Cursor& c, const std::string& v) { sc.rx_filter_step_rad = c.as_double(v) * kDegToRad; }},
        {"candidate_tx_beams", [&](const Cursor& c, const std::string& v) { sc.candidate_tx_beams = static_cast<int>(c.as_int(v)); }},
        {"candidate_rx_filters", [&](const Cursor& c, const std::string& v) { sc.candidate_rx_filters = static_cast<int>(c.as_int(v)); }},
        {"grid_spacing_m", [&](const Cursor& c, const std::string& v) { sc.grid_spacing_m = c.as_double(v); }},
        // forest
        {"forest_trees", [&](const Cursor& c, const std::string& v) { sc.forest_trees = static_cast<int>(c.as_int(v)); }},
        {"forest_depth", [&](const Cursor& c, const std::string& v) { sc.forest_depth = static_cast<int>(c.as_int(v)); }},
        {"forest_mtry", [&](const Cursor& c, const std::string& v) { sc.forest_mtry = static_cast<int>(c.as_int(v)); }},
        {"positions_per_user", [&](const Cursor& c, const std::string& v) { sc.positions_per_user = static_cast<int>(c.as_int(v)); }},
        {"pool_ring_inner_m", [&](const Cursor& c, const std::string& v) { sc.pool_ring_inner_m = c.as_double(v); }},
        {"pool_ring_outer_m", [&](const Cursor& c, const std::string& v) { sc.pool_ring_outer_m = c.as_double(v); }},
        {"pool_margin_m", [&](const Cursor& c, const std::string& v) { sc.pool_margin_m = c.as_double(v); }},
        // orientation sampling
        {"elevation_band_lo_deg", [&](const Cursor& c, const std::string& v) { sc.elevation_band_lo_rad = c.as_double(v) * kDegToRad; }},
        {"elevation_band_hi_deg", [&](const Cursor& c, const std::string& v) { sc.elevation_band_hi_rad = c.as_double(v) * kDegToRad; }},
        // overhead numerology
        {"symbols_per_frame", [&](const Cursor& c, const std::string& v) { sc.symbols_per_frame = static_cast<int>(c.as_int(v)); }},
        {"frames_per_tti", [&](const Cursor& c, const std::string& v) { sc.frames_per_tti = static_cast<int>(c.as_int(v)); }},
        {"subcarriers_total", [&](const Cursor& c, const std::string& v) { sc.subcarriers_total = static_cast<int>(c.as_int(v)); }},
        {"beacon_subcarriers", [&](const Cursor& c, const std::string& v) { sc.beacon_subcarriers = static_cast<int>(c.as_int(v)); }},
        {"users_per_beacon", [&](const Cursor& c, const std::string& v) { sc.users_per_beacon = static_cast<int>(c.as_int(v)); }},
        {"csi_symbols_per_user", [&](const Cursor& c, const std::string& v) { sc.csi_symbols_per_user = static_cast<int>(c.as_int(v)); }},
        {"csi_guard_every", [&](const Cursor& c, const std::string& v) { sc.csi_guard_every = static_cast<int>(c.as_int(v)); }},
        {"class_support_warn_floor", [&](const Cursor& c, const std::string& v) { sc.class_support_warn_floor = c.as_double(v); }},
        {"rng_seed", [&](const Cursor& c, const std::string& v) { sc.rng_seed = c.as_u64(v); }},
        // experiment knobs
        {"train_samples", [&](const Cursor& c, const std::string& v) { cfg.train_samples = static_cast<int>(c.as_int(v)); }},
        {"eval_drops", [&](const Cursor& c, const std::string& v) { cfg.eval_drops = static_cast<int>(c.as_int(v)); }},
        {"train_noise_radius_m", [&](const Cursor& c, const std::string& v) { cfg.train_noise_radius_m = c.as_double(v); }},
        {"noise_radii", [&](const Cursor& c, const std::string& v) { cfg.noise_radii = c.as_doubles(v); }},
        {"scatterer_densities", [&](const Cursor& c, const std::string& v) { cfg.scatterer_densities = c.as_doubles(v); }},
        {"overhead_user_counts", [&](const Cursor& c, const std::string& v) { cfg.overhead_user_counts = c.as_ints(v); }},
        {"dimension_tree_counts", [&](const Cursor& c, const std::string& v) { cfg.dimension_tree_counts = c.as_ints(v); }},
        {"dimension_depths", [&](const Cursor& c, const std::string& v) { cfg.dimension_depths = c.as_ints(v); }},
    };

    bool versioned = false;
    std::set<std::string> seen;
    std::string raw;
    while (std::getline(is, raw)) {
        ++cur.line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (!versioned) {
            std::istringstream head(line);
            std::string magic;
            int version = 0;
            head >> magic >> version;
            if (magic != kMagic) cur.fail("expected version stamp '" + std::string(kMagic) + " 1'");
            if (!head || version != kVersion)
                cur.fail("unsupported config version (have " + std::to_string(version) +
                         ", want " + std::to_string(kVersion) + ")");
            std::string extra;
            if (head >> extra) cur.fail("trailing text after version stamp");
            versioned = true;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) cur.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) cur.fail("missing key");
        if (value.empty()) cur.fail("missing value for '" + key + "'");
        const auto it = handlers.find(key);
        if (it == handlers.end()) cur.fail("unknown key '" + key + "'");
        if (!seen.insert(key).second) cur.fail("duplicate key '" + key + "'");
        it->second(cur, value);
    }
    if (!versioned) throw parse_error(origin + ": empty config (missing version stamp)");

    cfg.scenario.finalize();
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open config file " + path);
    return parse_run_config(is, path);
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) os << ", ";
        if constexpr (std::is_same_v<T, double>) {
            os << num(xs[i]);
        } else {
            os << xs[i];
        }
    }
    return os.str();
}

}  // namespace

void save_run_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    const ScenarioConfig& sc = cfg.scenario;
    os << kMagic << " " << kVersion << "\n\n";
    os << "# geometry\n";
    os << "domain_size_m = " << num(sc.domain_size_m) << "\n";
    os << "rrh_inset_m = " << num(sc.rrh_inset_m) << "\n";
    os << "n_users = " << sc.n_users << "\n";
    os << "tx_height_m = " << num(sc.tx_height_m) << "\n";
    os << "rx_height_m = " << num(sc.rx_height_m) << "\n";
    os << "exclusion_radius_m = " << num(sc.exclusion_radius_m) << "\n\n";
    os << "# radio\n";
    os << "carrier_hz = " << num(sc.carrier_hz) << "\n";
    os << "bandwidth_hz = " << num(sc.bandwidth_hz) << "\n";
    os << "n_tx = " << sc.n_tx << "\n";
    os << "n_rx = " << sc.n_rx << "\n";
    os << "tx_power_w = " << num(sc.tx_power_w) << "\n";
    os << "frame_duration_s = " << num(sc.frame_duration_s) << "\n";
    os << "tti_duration_s = " << num(sc.tti_duration_s) << "\n";
    os << "user_speed_mps = " << num(sc.user_speed_mps) << "\n";
    os << "noise_figure_db = " << num(sc.noise_figure_db) << "\n\n";
    os << "# propagation\n";
    os << "los_mode = " << (sc.los_mode == LosMode::kLos ? "los" : "nlos") << "\n";
    os << "scatterer_density_per_m2 = " << num(sc.scatterer_density_per_m2) << "\n";
    os << "scatterer_gain_min = " << num(sc.scatterer_gain_min) << "\n";
    os << "scatterer_gain_max = " << num(sc.scatterer_gain_max) << "\n";
    os << "nlos_pathloss_exponent = " << num(sc.nlos_pathloss_exponent) << "\n\n";
    os << "# codebooks and allocation search\n";
    os << "tx_beam_step_deg = " << num(sc.tx_beam_step_rad / kDegToRad) << "\n";
    os << "rx_filter_step_deg = " << num(sc.rx_filter_step_rad / kDegToRad) << "\n";
    os << "candidate_tx_beams = " << sc.candidate_tx_beams << "\n";
    os << "candidate_rx_filters = " << sc.candidate_rx_filters << "\n";
    os << "grid_spacing_m = " << num(sc.grid_spacing_m) << "\n\n";
    os << "# random forest\n";
    os << "forest_trees = " << sc.forest_trees << "\n";
    os << "forest_depth = " << sc.forest_depth << "\n";
    os << "forest_mtry = " << sc.forest_mtry << "\n";
    os << "positions_per_user = " << sc.positions_per_user << "\n";
    os << "pool_ring_inner_m = " << num(sc.pool_ring_inner_m) << "\n";
    os << "pool_ring_outer_m = " << num(sc.pool_ring_outer_m) << "\n";
    os << "pool_margin_m = " << num(sc.pool_margin_m) << "\n\n";
    os << "# device orientation sampling\n";
    os << "elevation_band_lo_deg = " << num(sc.elevation_band_lo_rad / kDegToRad) << "\n";
    os << "elevation_band_hi_deg = " << num(sc.elevation_band_hi_rad / kDegToRad) << "\n\n";
    os << "# overhead numerology\n";
    os << "symbols_per_frame = " << sc.symbols_per_frame << "\n";
    os << "frames_per_tti = " << sc.frames_per_tti << "\n";
    os << "subcarriers_total = " << sc.subcarriers_total << "\n";
    os << "beacon_subcarriers = " << sc.beacon_subcarriers << "\n";
    os << "users_per_beacon = " << sc.users_per_beacon << "\n";
    os << "csi_symbols_per_user = " << sc.csi_symbols_per_user << "\n";
    os << "csi_guard_every = " << sc.csi_guard_every << "\n\n";
    os << "class_support_warn_floor = " << num(sc.class_support_warn_floor) << "\n";
    os << "rng_seed = " << sc.rng_seed << "\n\n";
    os << "# experiment\n";
    os << "train_samples = " << cfg.train_samples << "\n";
    os << "eval_drops = " << cfg.eval_drops << "\n";
    os << "train_noise_radius_m = " << num(cfg.train_noise_radius_m) << "\n";
    os << "noise_radii = " << join(cfg.noise_radii) << "\n";
    os << "scatterer_densities = " << join(cfg.scatterer_densities) << "\n";
    os << "overhead_user_counts = " << join(cfg.overhead_user_counts) << "\n";
    os << "dimension_tree_counts = " << join(cfg.dimension_tree_counts) << "\n";
    os << "dimension_depths = " << join(cfg.dimension_depths) << "\n";
}

}  // namespace cransim
