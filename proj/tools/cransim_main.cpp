// SPDX-License-Identifier: Apache-2.0
//
// cransim — downlink cloud-RAN allocation testbed.
//
// Subcommands generate training data, train the forest, evaluate the
// allocation schemes against the CSI search, and sweep overhead, position
// error, scatterer density and forest dimensions.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cransim/config_file.hpp"
#include "cransim/errors.hpp"
#include "cransim/experiment.hpp"
#include "cransim/rng.hpp"

namespace {

using namespace cransim;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool serial = false;

    ExecMode exec() const { return serial ? ExecMode::kSerial : ExecMode::kParallel; }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "run configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    auto* seed = cmd->add_option("--seed", o.seed, "master RNG seed");
    cmd->callback([&o, seed]() { o.seed_given = seed->count() > 0; });
    cmd->add_flag("--serial", o.serial, "run single-threaded");
}

RunConfig load_config(const CommonOpts& o) {
    RunConfig rc;
    if (!o.config_path.empty()) {
        rc = load_run_config(o.config_path);
    } else {
        rc.scenario.finalize();
        rc.validate();
    }
    if (o.seed_given) rc.scenario.rng_seed = o.seed;
    return rc;
}

std::filesystem::path out_file(const CommonOpts& o, const std::string& name) {
    std::filesystem::create_directories(o.out_dir);
    return std::filesystem::path(o.out_dir) / name;
}

TrainOptions train_options(const RunConfig& rc, ExecMode exec) {
    TrainOptions t;
    t.n_samples = rc.train_samples;
    t.seed = rc.scenario.rng_seed;
    t.exec = exec;
    return t;
}

EvalOptions eval_options(const RunConfig& rc, ExecMode exec) {
    EvalOptions e;
    e.n_drops = rc.eval_drops;
    e.seed = rc.scenario.rng_seed;
    e.exec = exec;
    return e;
}

void write_table_files(const CommonOpts& o, const std::string& stem,
                       const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
    write_csv(out_file(o, stem + ".csv").string(), header, rows);
    std::ofstream txt(out_file(o, stem + ".txt"));
    write_text_table(txt, header, rows);
    std::cout << "wrote " << (std::filesystem::path(o.out_dir) / (stem + ".csv")).string()
              << " and " << stem << ".txt\n";
}

ForestModel obtain_model(const RunConfig& rc, const SimContext& ctx,
                         const std::string& model_path, ExecMode exec) {
    if (!model_path.empty()) {
        std::cout << "loading model " << model_path << "\n";
        return ForestModel::load(model_path);
    }
    std::cout << "training " << rc.scenario.forest_trees << "-tree model on "
              << rc.train_samples << " samples\n";
    const Dataset data =
        generate_training_data(ctx, ctx.scatterers, train_options(rc, exec));
    return train_model(ctx, data, rc.scenario.rng_seed, exec, &std::cerr);
}

// --- subcommands ---

int cmd_gen_data(const CommonOpts& o, int samples_override, double noise_radius,
                 bool random_orient, bool orient_features) {
    RunConfig rc = load_config(o);
    if (samples_override > 0) rc.train_samples = samples_override;
    SimContext ctx(rc.scenario, McsTable::lte_default());
    TrainOptions t = train_options(rc, o.exec());
    t.noise_radius_m = noise_radius;
    t.orientation = random_orient ? OrientationMode::kRandom : OrientationMode::kAligned;
    t.features = orient_features ? FeatureMode::kWithOrientation : FeatureMode::kBase;
    const Dataset data = generate_training_data(ctx, ctx.scatterers, t);
    const std::string path = out_file(o, "dataset.csv").string();
    save_dataset(data, feature_names(ctx.cfg, t.features), path);

    int max_label = 0;
    for (const LabeledSample& s : data) max_label = std::max(max_label, s.label);
    const std::vector<int> hist = class_histogram(data, max_label + 1);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < hist.size(); ++c) {
        rows.push_back({std::to_string(c), std::to_string(hist[c]),
                        format_double(100.0 * hist[c] / static_cast<double>(data.size()), 2)});
    }
    write_text_table(std::cout, {"label", "count", "share_pct"}, rows);
    std::cout << "wrote " << path << " (" << data.size() << " samples)\n";
    return 0;
}

int cmd_train(const CommonOpts& o, const std::string& data_path,
              const std::string& model_path, int samples_override) {
    RunConfig rc = load_config(o);
    if (samples_override > 0) rc.train_samples = samples_override;
    SimContext ctx(rc.scenario, McsTable::lte_default());
    Dataset data;
    if (!data_path.empty()) {
        data = load_dataset(data_path);
        std::cout << "loaded " << data.size() << " samples from " << data_path << "\n";
    } else {
        data = generate_training_data(ctx, ctx.scatterers, train_options(rc, o.exec()));
        std::cout << "generated " << data.size() << " samples\n";
    }
    const ForestModel model =
        train_model(ctx, data, rc.scenario.rng_seed, o.exec(), &std::cerr);
    const std::string path =
        model_path.empty() ? out_file(o, "model.forest").string() : model_path;
    model.save(path);
    std::cout << "trained " << model.tree_count() << " trees (depth <= "
              << model.max_depth() << ", training accuracy "
              << format_double(model.accuracy(data), 4) << "); wrote " << path << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& mode, const std::string& model_path,
             int drops_override) {
    RunConfig rc = load_config(o);
    if (drops_override > 0) rc.eval_drops = drops_override;

    if (mode == "compare") {
        SimContext ctx(rc.scenario, McsTable::lte_default());
        const ForestModel model = obtain_model(rc, ctx, model_path, o.exec());
        const SchemeComparisonResult r =
            run_scheme_comparison(ctx, model, eval_options(rc, o.exec()));
        write_table_files(
            o, "scheme_comparison", {"scheme", "mean_goodput_bps", "ratio_to_csi"},
            {{"csi", format_double(r.csi_bps, 1), "1.0000"},
             {"learning", format_double(r.learning_bps, 1), format_double(r.learning_ratio(), 4)},
             {"random_packet", format_double(r.random_packet_bps, 1), format_double(r.random_ratio(), 4)},
             {"geometric", format_double(r.geometric_bps, 1), format_double(r.geometric_ratio(), 4)}});
        return 0;
    }
    if (mode == "orientation") {
        SimContext ctx(rc.scenario, McsTable::lte_default());
        const OrientationResult r = run_orientation_study(ctx, train_options(rc, o.exec()),
                                                          eval_options(rc, o.exec()));
        write_table_files(
            o, "orientation", {"condition", "ratio_to_csi"},
            {{"aligned_reference", format_double(r.aligned_ratio, 4)},
             {"unmitigated", format_double(r.unmitigated_ratio, 4)},
             {"retrained_with_rotations", format_double(r.sol1_ratio, 4)},
             {"filter_reaiming", format_double(r.sol2_ratio, 4)},
             {"orientation_features", format_double(r.sol3_ratio, 4)}});
        return 0;
    }
    if (mode == "nlos") {
        rc.scenario.los_mode = LosMode::kNlos;
        SimContext ctx(rc.scenario, McsTable::lte_default());
        const NlosResult r = run_nlos(ctx, rc.noise_radii, rc.train_noise_radius_m,
                                      train_options(rc, o.exec()), eval_options(rc, o.exec()));
        std::vector<std::vector<std::string>> rows;
        std::vector<std::pair<double, double>> clean_xy, noisy_xy;
        for (const NoiseRow& row : r.noise.rows) {
            rows.push_back({format_double(row.radius_m, 2), format_double(row.csi_bps, 1),
                            format_double(row.clean_bps, 1), format_double(row.noisy_bps, 1),
                            format_double(row.clean_ratio(), 4),
                            format_double(row.noisy_ratio(), 4)});
            clean_xy.emplace_back(row.radius_m, row.clean_ratio());
            noisy_xy.emplace_back(row.radius_m, row.noisy_ratio());
        }
        write_table_files(o, "nlos",
                          {"radius_m", "csi_bps", "clean_bps", "noisy_bps", "clean_ratio",
                           "noisy_ratio"},
                          rows);
        write_xy_series(out_file(o, "nlos_clean_ratio.dat").string(), clean_xy,
                        "position error radius (m) vs clean-trained ratio, NLOS");
        write_xy_series(out_file(o, "nlos_noisy_ratio.dat").string(), noisy_xy,
                        "position error radius (m) vs noisy-trained ratio, NLOS");
        std::cout << "NLOS ratio without position error: " << format_double(r.base_ratio, 4)
                  << "\n";
        return 0;
    }
    throw config_error("unknown eval mode '" + mode +
                       "' (expected compare, orientation or nlos)");
}

int cmd_sweep(const CommonOpts& o, const std::string& mode, const std::string& model_path,
              int drops_override) {
    RunConfig rc = load_config(o);
    if (drops_override > 0) rc.eval_drops = drops_override;
    SimContext ctx(rc.scenario, McsTable::lte_default());

    if (mode == "overhead") {
        const ForestModel model = obtain_model(rc, ctx, model_path, o.exec());
        const SchemeComparisonResult base =
            run_scheme_comparison(ctx, model, eval_options(rc, o.exec()));
        const std::vector<OverheadRow> rows =
            run_overhead_sweep(ctx, base, rc.overhead_user_counts);
        std::vector<std::vector<std::string>> cells;
        std::vector<std::pair<double, double>> ratio_xy, pos_xy, csi_xy;
        for (const OverheadRow& row : rows) {
            cells.push_back({std::to_string(row.n_users),
                             format_double(row.oh_position, 6), format_double(row.oh_csi, 6),
                             format_double(row.eff_learning_bps, 1),
                             format_double(row.eff_csi_bps, 1),
                             format_double(row.eff_ratio(), 4)});
            ratio_xy.emplace_back(row.n_users, row.eff_ratio());
            pos_xy.emplace_back(row.n_users, row.oh_position);
            csi_xy.emplace_back(row.n_users, row.oh_csi);
        }
        write_table_files(o, "overhead",
                          {"n_users", "oh_position", "oh_csi", "eff_learning_bps",
                           "eff_csi_bps", "eff_ratio"},
                          cells);
        write_xy_series(out_file(o, "overhead_eff_ratio.dat").string(), ratio_xy,
                        "user count vs overhead-adjusted goodput ratio");
        write_xy_series(out_file(o, "overhead_position.dat").string(), pos_xy,
                        "user count vs position-beacon overhead fraction");
        write_xy_series(out_file(o, "overhead_csi.dat").string(), csi_xy,
                        "user count vs CSI-pilot overhead fraction");
        return 0;
    }
    if (mode == "noise") {
        const NoiseStudyResult r =
            run_position_noise(ctx, rc.noise_radii, rc.train_noise_radius_m,
                               train_options(rc, o.exec()), eval_options(rc, o.exec()));
        std::vector<std::vector<std::string>> rows;
        std::vector<std::pair<double, double>> clean_xy, noisy_xy;
        for (const NoiseRow& row : r.rows) {
            rows.push_back({format_double(row.radius_m, 2), format_double(row.csi_bps, 1),
                            format_double(row.clean_bps, 1), format_double(row.noisy_bps, 1),
                            format_double(row.clean_ratio(), 4),
                            format_double(row.noisy_ratio(), 4)});
            clean_xy.emplace_back(row.radius_m, row.clean_ratio());
            noisy_xy.emplace_back(row.radius_m, row.noisy_ratio());
        }
        write_table_files(o, "position_noise",
                          {"radius_m", "csi_bps", "clean_bps", "noisy_bps", "clean_ratio",
                           "noisy_ratio"},
                          rows);
        write_xy_series(out_file(o, "noise_clean_ratio.dat").string(), clean_xy,
                        "position error radius (m) vs clean-trained ratio");
        write_xy_series(out_file(o, "noise_noisy_ratio.dat").string(), noisy_xy,
                        "position error radius (m) vs noisy-trained ratio");
        return 0;
    }
    if (mode == "scatterers") {
        const std::vector<DensityRow> rows = run_scatterer_sweep(
            ctx, rc.scatterer_densities, train_options(rc, o.exec()),
            eval_options(rc, o.exec()));
        std::vector<std::vector<std::string>> cells;
        std::vector<std::pair<double, double>> xy;
        for (const DensityRow& row : rows) {
            cells.push_back({format_double(row.density_per_m2, 6),
                             format_double(row.csi_bps, 1),
                             format_double(row.learning_bps, 1),
                             format_double(row.ratio(), 4)});
            xy.emplace_back(row.density_per_m2, row.ratio());
        }
        write_table_files(o, "scatterer_sweep",
                          {"density_per_m2", "csi_bps", "learning_bps", "ratio"}, cells);
        write_xy_series(out_file(o, "scatterer_ratio.dat").string(), xy,
                        "scatterer density (1/m^2) vs goodput ratio");
        return 0;
    }
    throw config_error("unknown sweep mode '" + mode +
                       "' (expected overhead, noise or scatterers)");
}

int cmd_dimension(const CommonOpts& o, int samples_override, bool full_grid) {
    RunConfig rc = load_config(o);
    if (samples_override > 0) rc.train_samples = samples_override;
    if (full_grid) rc.dimension_tree_counts = {5, 10, 50, 100, 200, 300};
    SimContext ctx(rc.scenario, McsTable::lte_default());
    const DimensioningResult r =
        run_dimensioning(ctx, train_options(rc, o.exec()), rc.dimension_tree_counts,
                         rc.dimension_depths);
    std::vector<std::vector<std::string>> rows;
    for (const DimensionRow& row : r.rows) {
        rows.push_back({std::to_string(row.t_n), std::to_string(row.t_d),
                        format_double(row.train_accuracy, 4),
                        format_double(row.test_accuracy, 4)});
    }
    write_table_files(o, "dimension", {"trees", "depth", "train_acc", "test_acc"}, rows);
    for (int d : rc.dimension_depths) {
        std::vector<std::pair<double, double>> xy;
        for (const DimensionRow& row : r.rows)
            if (row.t_d == d) xy.emplace_back(row.t_n, row.test_accuracy);
        write_xy_series(out_file(o, "dimension_depth" + std::to_string(d) + ".dat").string(),
                        xy, "tree count vs test accuracy at depth " + std::to_string(d));
    }
    std::cout << "split: " << r.train_size << " train / " << r.test_size << " test\n";
    return 0;
}

int cmd_report(const CommonOpts& o) {
    const std::vector<std::string> stems = {"scheme_comparison", "overhead",
                                            "position_noise",    "scatterer_sweep",
                                            "orientation",       "nlos",
                                            "dimension"};
    bool any = false;
    std::ostringstream report;
    for (const std::string& stem : stems) {
        const std::filesystem::path csv = std::filesystem::path(o.out_dir) / (stem + ".csv");
        std::ifstream in(csv);
        if (!in) continue;
        any = true;
        std::vector<std::vector<std::string>> rows;
        std::string line;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (!cells.empty()) rows.push_back(cells);
        }
        if (rows.empty()) continue;
        report << "== " << stem << " ==\n";
        const std::vector<std::string> header = rows.front();
        rows.erase(rows.begin());
        write_text_table(report, header, rows);
        report << "\n";
    }
    if (!any) {
        std::cerr << "error: no result tables under " << o.out_dir << "\n";
        return 1;
    }
    std::cout << report.str();
    std::ofstream txt(out_file(o, "report.txt"));
    txt << report.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"downlink cloud-RAN resource allocation testbed"};
    app.require_subcommand(1);

    CommonOpts gen_o, train_o, eval_o, sweep_o, dim_o, report_o;
    int gen_samples = 0;
    double gen_noise = 0.0;
    bool gen_orient = false, gen_orient_features = false;
    std::string train_data, train_model_path;
    int train_samples = 0;
    std::string eval_mode = "compare", eval_model;
    int eval_drops = 0;
    std::string sweep_mode = "overhead", sweep_model;
    int sweep_drops = 0;
    int dim_samples = 0;
    bool dim_full = false;

    CLI::App* gen = app.add_subcommand("gen-data", "generate a labeled training set");
    add_common(gen, gen_o);
    gen->add_option("--samples", gen_samples, "number of samples");
    gen->add_option("--noise-radius", gen_noise, "reported-position error radius (m)");
    gen->add_flag("--random-orientation", gen_orient, "sample device orientations");
    gen->add_flag("--orientation-features", gen_orient_features,
                  "append orientation angles to the features");

    CLI::App* train = app.add_subcommand("train", "train the forest model");
    add_common(train, train_o);
    train->add_option("--data", train_data, "existing dataset CSV (else generated)")
        ->check(CLI::ExistingFile);
    train->add_option("--model", train_model_path, "model output path");
    train->add_option("--samples", train_samples, "samples to generate when no --data");

    CLI::App* eval = app.add_subcommand("eval", "evaluate allocation schemes");
    add_common(eval, eval_o);
    eval->add_option("--mode", eval_mode, "compare | orientation | nlos");
    eval->add_option("--model", eval_model, "trained model (else trained in place)")
        ->check(CLI::ExistingFile);
    eval->add_option("--drops", eval_drops, "evaluation drops");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweeps");
    add_common(sweep, sweep_o);
    sweep->add_option("--mode", sweep_mode, "overhead | noise | scatterers");
    sweep->add_option("--model", sweep_model, "trained model (else trained in place)")
        ->check(CLI::ExistingFile);
    sweep->add_option("--drops", sweep_drops, "evaluation drops");

    CLI::App* dim = app.add_subcommand("dimension", "forest dimensioning study");
    add_common(dim, dim_o);
    dim->add_option("--samples", dim_samples, "dataset size");
    dim->add_flag("--full", dim_full, "extend the tree-count grid to 300");

    CLI::App* report = app.add_subcommand("report", "combine result tables");
    add_common(report, report_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_data(gen_o, gen_samples, gen_noise, gen_orient,
                                gen_orient_features);
        if (train->parsed())
            return cmd_train(train_o, train_data, train_model_path, train_samples);
        if (eval->parsed()) return cmd_eval(eval_o, eval_mode, eval_model, eval_drops);
        if (sweep->parsed()) return cmd_sweep(sweep_o, sweep_mode, sweep_model, sweep_drops);
        if (dim->parsed()) return cmd_dimension(dim_o, dim_samples, dim_full);
        if (report->parsed()) return cmd_report(report_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
