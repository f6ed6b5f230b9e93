// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cransim/scenario.hpp"

namespace cransim {

// Scenario plus the experiment-level knobs steered from a config file.
struct RunConfig {
    ScenarioConfig scenario;

    int train_samples = 20000;
    int eval_drops = 100;
    double train_noise_radius_m = 2.0;  // training-time position error radius
    std::vector<double> noise_radii = {0.5, 1.0, 2.0, 3.0, 5.0};
    std::vector<double> scatterer_densities = {0.0025, 0.005, 0.01};
    std::vector<int> overhead_user_counts = {1, 5, 10, 15, 20, 25, 30};
    std::vector<int> dimension_tree_counts = {5, 10, 50, 100};
    std::vector<int> dimension_depths = {3, 5, 10};

    void validate() const;  // throws config_error
};

// Line-oriented `key = value` file. The first significant line must be the
// version stamp `cransim-config 1`; `#` starts a comment; list values are
// comma-separated. Unknown and duplicate keys are errors.
RunConfig parse_run_config(std::istream& is, const std::string& origin);
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace cransim
