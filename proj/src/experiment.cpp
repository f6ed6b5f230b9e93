// SPDX-License-Identifier: Apache-2.0
#include "cransim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cransim/channel.hpp"
#include "cransim/errors.hpp"
#include "cransim/rng.hpp"

namespace cransim {

namespace {

// seed-stream tags; arbitrary distinct constants
constexpr std::uint64_t kTrainTag = 0x5452414eu;        // "TRAN"
constexpr std::uint64_t kEvalTag = 0x4556414cu;         // "EVAL"
constexpr std::uint64_t kTrainNoiseTag = 0x544e4f49u;   // "TNOI"
constexpr std::uint64_t kEvalNoiseTag = 0x454e4f49u;    // "ENOI"
constexpr std::uint64_t kTrainOrientTag = 0x544f5249u;  // "TORI"
constexpr std::uint64_t kEvalOrientTag = 0x454f5249u;   // "EORI"
constexpr std::uint64_t kSchemeDropTag = 0x53434845u;   // "SCHE"
constexpr std::uint64_t kForestTag = 0x46525354u;       // "FRST"
constexpr std::uint64_t kVariantTag = 0x54565254u;      // "TVRT"
constexpr std::uint64_t kSplitTag = 0x53504c54u;        // "SPLT"

TrainOptions variant(const TrainOptions& base, std::uint64_t index) {
    TrainOptions v = base;
    v.seed = derive_seed(base.seed, kVariantTag, index);
    return v;
}

ForestModel train_variant(const SimContext& ctx, const ScattererField& field,
                          const TrainOptions& opt) {
    const Dataset data = generate_training_data(ctx, field, opt);
    return train_model(ctx, data, opt.seed, opt.exec);
}

}  // namespace

SimContext::SimContext(const ScenarioConfig& finalized_cfg, McsTable mcs_table)
    : cfg(finalized_cfg),
      tx_cb(cfg.n_tx, cfg.tx_beam_step_rad),
      rx_cb(cfg.n_rx, cfg.rx_filter_step_rad),
      mcs(std::move(mcs_table)),
      scatterers(build_scatterers(cfg, cfg.scatterer_density_per_m2, cfg.rng_seed)),
      pool(build_position_pool(cfg, cfg.rng_seed)),
      grid(cfg, tx_cb, rx_cb, cfg.grid_spacing_m, &scatterers) {}

Dataset generate_training_data(const SimContext& ctx, const ScattererField& scatterers,
                               const TrainOptions& opt) {
    if (opt.n_samples <= 0) throw config_error("n_samples must be positive");
    const int users = ctx.cfg.n_users;
    const int n_drops = (opt.n_samples + users - 1) / users;
    Dataset data(static_cast<std::size_t>(n_drops) * static_cast<std::size_t>(users));

    parallel_for(n_drops, opt.exec, [&](int d) {
        UserDrop drop = drop_from_pool(
            ctx.pool, derive_seed(opt.seed, kTrainTag, static_cast<std::uint64_t>(d)));
        if (opt.noise_radius_m > 0.0) {
            drop = inject_position_noise(
                drop, opt.noise_radius_m,
                derive_seed(opt.seed, kTrainNoiseTag, static_cast<std::uint64_t>(d)));
            drop.reported_positions = snap_to_pool(ctx.pool, drop.reported_positions);
        }
        if (opt.orientation == OrientationMode::kRandom) {
            drop = with_orientations(
                drop, OrientationMode::kRandom, ctx.cfg,
                derive_seed(opt.seed, kTrainOrientTag, static_cast<std::uint64_t>(d)));
        }
        const std::vector<int> assignment = assign_users(ctx.cfg, drop.reported_positions);
        const std::vector<BeamChoice> choices =
            ctx.grid.lookup_positions(drop.reported_positions, assignment);
        const ChannelSet channels = build_channels(ctx.cfg, drop, scatterers);
        // the label is what the exhaustive search realizes, not what the grid
        // beams realize: the learner imitates the reference scheme
        const Allocation oracle =
            csi_allocate(ctx.cfg, channels, assignment, ctx.tx_cb, ctx.rx_cb, ctx.mcs);
        for (int u = 0; u < users; ++u) {
            LabeledSample& s =
                data[static_cast<std::size_t>(d) * static_cast<std::size_t>(users) +
                     static_cast<std::size_t>(u)];
            s.features = assemble_features(ctx.cfg, drop, assignment, choices, u,
                                           opt.features);
            s.label = oracle.decisions[static_cast<std::size_t>(u)].cqi;
        }
    });
    data.resize(static_cast<std::size_t>(opt.n_samples));
    return data;
}

ForestModel train_model(const SimContext& ctx, const Dataset& data, std::uint64_t seed,
                        ExecMode exec, std::ostream* log) {
    ForestModel model =
        ForestModel::train(data, ctx.cfg.forest_trees, ctx.cfg.forest_depth,
                           ctx.cfg.forest_mtry, derive_seed(seed, kForestTag), exec);
    if (log != nullptr) {
        const std::vector<int> hist = class_histogram(data, model.n_classes());
        const double n = static_cast<double>(data.size());
        for (std::size_t c = 0; c < hist.size(); ++c) {
            const double share = static_cast<double>(hist[c]) / n;
            if (hist[c] > 0 && share < ctx.cfg.class_support_warn_floor) {
                *log << "warning: label " << c << " holds only "
                     << format_double(100.0 * share, 3)
                     << "% of the training set; its predictions may be unreliable\n";
            }
        }
    }
    return model;
}

std::vector<double> mean_goodputs(const SimContext& ctx,
                                  const std::vector<Contender>& contenders,
                                  const EvalOptions& opt) {
    if (opt.n_drops <= 0) throw config_error("n_drops must be positive");
    for (const Contender& c : contenders) {
        if (c.kind == Contender::Kind::kLearning && c.forest == nullptr)
            throw std::invalid_argument("learning contender needs a model");
    }
    const ScattererField& field =
        opt.scatterers != nullptr ? *opt.scatterers : ctx.scatterers;

    std::vector<double> sums(contenders.size(), 0.0);
    std::vector<std::vector<double>> per_drop(
        static_cast<std::size_t>(opt.n_drops),
        std::vector<double>(contenders.size(), 0.0));

    parallel_for(opt.n_drops, opt.exec, [&](int d) {
        UserDrop drop = drop_from_pool(
            ctx.pool, derive_seed(opt.seed, kEvalTag, static_cast<std::uint64_t>(d)));
        if (opt.noise_radius_m > 0.0) {
            drop = inject_position_noise(
                drop, opt.noise_radius_m,
                derive_seed(opt.seed, kEvalNoiseTag, static_cast<std::uint64_t>(d)));
            drop.reported_positions = snap_to_pool(ctx.pool, drop.reported_positions);
        }
        if (opt.orientation == OrientationMode::kRandom) {
            drop = with_orientations(
                drop, OrientationMode::kRandom, ctx.cfg,
                derive_seed(opt.seed, kEvalOrientTag, static_cast<std::uint64_t>(d)));
        }
        const std::vector<int> assignment = assign_users(ctx.cfg, drop.reported_positions);
        const ChannelSet channels = build_channels(ctx.cfg, drop, field);
        const std::uint64_t scheme_seed =
            derive_seed(opt.seed, kSchemeDropTag, static_cast<std::uint64_t>(d));
        for (std::size_t i = 0; i < contenders.size(); ++i) {
            const Contender& c = contenders[i];
            Allocation alloc;
            switch (c.kind) {
                case Contender::Kind::kCsi:
                    alloc = csi_allocate(ctx.cfg, channels, assignment, ctx.tx_cb,
                                         ctx.rx_cb, ctx.mcs);
                    break;
                case Contender::Kind::kLearning:
                    alloc = learning_allocate(ctx.cfg, *c.forest, ctx.grid, drop, channels,
                                              assignment, ctx.tx_cb, ctx.rx_cb, ctx.mcs,
                                              c.features, c.mitigation);
                    break;
                case Contender::Kind::kRandomPacket:
                    alloc = random_packet_allocate(ctx.cfg, ctx.grid, drop, channels,
                                                   assignment, ctx.tx_cb, ctx.rx_cb,
                                                   ctx.mcs, scheme_seed);
                    break;
                case Contender::Kind::kGeometric:
                    alloc = geometric_allocate(ctx.cfg, drop, channels, assignment,
                                               ctx.tx_cb, ctx.rx_cb, ctx.mcs, scheme_seed);
                    break;
            }
            per_drop[static_cast<std::size_t>(d)][i] = alloc.sum_goodput();
        }
    });
    for (const std::vector<double>& row : per_drop)
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += row[i];
    for (double& s : sums) s /= static_cast<double>(opt.n_drops);
    return sums;
}

SchemeComparisonResult run_scheme_comparison(const SimContext& ctx,
                                             const ForestModel& forest,
                                             const EvalOptions& opt) {
    std::vector<Contender> cs(4);
    cs[0].kind = Contender::Kind::kCsi;
    cs[1].kind = Contender::Kind::kLearning;
    cs[1].forest = &forest;
    cs[2].kind = Contender::Kind::kRandomPacket;
    cs[3].kind = Contender::Kind::kGeometric;
    const std::vector<double> means = mean_goodputs(ctx, cs, opt);
    SchemeComparisonResult r;
    r.csi_bps = means[0];
    r.learning_bps = means[1];
    r.random_packet_bps = means[2];
    r.geometric_bps = means[3];
    r.n_drops = opt.n_drops;
    return r;
}

std::vector<OverheadRow> run_overhead_sweep(const SimContext& ctx,
                                            const SchemeComparisonResult& base,
                                            const std::vector<int>& user_counts) {
    const OverheadConfig oh = OverheadConfig::from_scenario(ctx.cfg);
    std::vector<OverheadRow> rows;
    rows.reserve(user_counts.size());
    for (int n : user_counts) {
        OverheadRow row;
        row.n_users = n;
        row.oh_position = overhead_position(oh, n);
        row.oh_csi = overhead_csi(oh, n);
        row.eff_learning_bps = base.learning_bps * (1.0 - row.oh_position);
        row.eff_csi_bps = base.csi_bps * (1.0 - row.oh_csi);
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<NoiseRow> noise_rows(const SimContext& ctx, const std::vector<double>& radii,
                                 const ForestModel& clean, const ForestModel& noisy,
                                 FeatureMode features, const EvalOptions& eval_opt) {
    std::vector<double> all_radii{0.0};
    for (double r : radii)
        if (r > 0.0) all_radii.push_back(r);

    std::vector<Contender> cs(3);
    cs[0].kind = Contender::Kind::kCsi;
    cs[1].kind = Contender::Kind::kLearning;
    cs[1].forest = &clean;
    cs[1].features = features;
    cs[2].kind = Contender::Kind::kLearning;
    cs[2].forest = &noisy;
    cs[2].features = features;

    std::vector<NoiseRow> rows;
    rows.reserve(all_radii.size());
    for (double r : all_radii) {
        EvalOptions opt = eval_opt;
        opt.noise_radius_m = r;
        const std::vector<double> means = mean_goodputs(ctx, cs, opt);
        NoiseRow row;
        row.radius_m = r;
        row.csi_bps = means[0];
        row.clean_bps = means[1];
        row.noisy_bps = means[2];
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

NoiseStudyResult run_position_noise(const SimContext& ctx, const std::vector<double>& radii,
                                    double train_radius_m, const TrainOptions& train_opt,
                                    const EvalOptions& eval_opt) {
    if (train_radius_m <= 0.0)
        throw config_error("training position-error radius must be positive");
    TrainOptions clean_opt = variant(train_opt, 0);
    clean_opt.noise_radius_m = 0.0;
    TrainOptions noisy_opt = variant(train_opt, 1);
    noisy_opt.noise_radius_m = train_radius_m;

    const ScattererField& field =
        eval_opt.scatterers != nullptr ? *eval_opt.scatterers : ctx.scatterers;
    const ForestModel clean = train_variant(ctx, field, clean_opt);
    const ForestModel noisy = train_variant(ctx, field, noisy_opt);

    NoiseStudyResult result;
    result.train_noise_radius_m = train_radius_m;
    result.rows = noise_rows(ctx, radii, clean, noisy, train_opt.features, eval_opt);
    return result;
}

std::vector<DensityRow> run_scatterer_sweep(const SimContext& ctx,
                                            const std::vector<double>& densities,
                                            const TrainOptions& train_opt,
                                            const EvalOptions& eval_opt) {
    std::vector<DensityRow> rows;
    rows.reserve(densities.size());
    for (std::size_t i = 0; i < densities.size(); ++i) {
        const double density = densities[i];
        if (density < 0.0) throw config_error("scatterer density must be >= 0");
        const ScattererField field =
            build_scatterers(ctx.cfg, density, ctx.cfg.rng_seed);
        const ForestModel model =
            train_variant(ctx, field, variant(train_opt, 100 + i));

        std::vector<Contender> cs(2);
        cs[0].kind = Contender::Kind::kCsi;
        cs[1].kind = Contender::Kind::kLearning;
        cs[1].forest = &model;
        cs[1].features = train_opt.features;
        EvalOptions opt = eval_opt;
        opt.scatterers = &field;
        const std::vector<double> means = mean_goodputs(ctx, cs, opt);

        DensityRow row;
        row.density_per_m2 = density;
        row.csi_bps = means[0];
        row.learning_bps = means[1];
        rows.push_back(row);
    }
    return rows;
}

OrientationResult run_orientation_study(const SimContext& ctx, const TrainOptions& train_opt,
                                        const EvalOptions& eval_opt) {
    TrainOptions aligned_opt = variant(train_opt, 10);
    aligned_opt.orientation = OrientationMode::kAligned;
    aligned_opt.features = FeatureMode::kBase;
    TrainOptions sol1_opt = variant(train_opt, 11);
    sol1_opt.orientation = OrientationMode::kRandom;
    sol1_opt.features = FeatureMode::kBase;
    TrainOptions sol3_opt = variant(train_opt, 12);
    sol3_opt.orientation = OrientationMode::kRandom;
    sol3_opt.features = FeatureMode::kWithOrientation;

    const ForestModel aligned_model = train_variant(ctx, ctx.scatterers, aligned_opt);
    const ForestModel sol1_model = train_variant(ctx, ctx.scatterers, sol1_opt);
    const ForestModel sol3_model = train_variant(ctx, ctx.scatterers, sol3_opt);

    std::vector<Contender> cs(5);
    cs[0].kind = Contender::Kind::kCsi;
    cs[1].kind = Contender::Kind::kLearning;  // unmitigated
    cs[1].forest = &aligned_model;
    cs[2].kind = Contender::Kind::kLearning;  // retrained with rotations
    cs[2].forest = &sol1_model;
    cs[3].kind = Contender::Kind::kLearning;  // filter re-aimed at run time
    cs[3].forest = &aligned_model;
    cs[3].mitigation = FilterMitigation::kRotate;
    cs[4].kind = Contender::Kind::kLearning;  // orientation as features
    cs[4].forest = &sol3_model;
    cs[4].features = FeatureMode::kWithOrientation;

    EvalOptions rotated = eval_opt;
    rotated.orientation = OrientationMode::kRandom;
    const std::vector<double> means = mean_goodputs(ctx, cs, rotated);

    OrientationResult result;
    result.unmitigated_ratio = means[1] / means[0];
    result.sol1_ratio = means[2] / means[0];
    result.sol2_ratio = means[3] / means[0];
    result.sol3_ratio = means[4] / means[0];

    std::vector<Contender> base(2);
    base[0].kind = Contender::Kind::kCsi;
    base[1].kind = Contender::Kind::kLearning;
    base[1].forest = &aligned_model;
    EvalOptions aligned_eval = eval_opt;
    aligned_eval.orientation = OrientationMode::kAligned;
    const std::vector<double> ref = mean_goodputs(ctx, base, aligned_eval);
    result.aligned_ratio = ref[1] / ref[0];
    return result;
}

NlosResult run_nlos(const SimContext& nlos_ctx, const std::vector<double>& radii,
                    double train_radius_m, const TrainOptions& train_opt,
                    const EvalOptions& eval_opt) {
    if (nlos_ctx.cfg.los_mode != LosMode::kNlos)
        throw config_error("run_nlos expects a context configured for NLOS propagation");
    NlosResult result;
    result.noise = run_position_noise(nlos_ctx, radii, train_radius_m, train_opt, eval_opt);
    result.base_ratio = result.noise.rows.front().clean_ratio();
    return result;
}

DimensioningResult run_dimensioning(const SimContext& ctx, const TrainOptions& opt,
                                    const std::vector<int>& tree_counts,
                                    const std::vector<int>& depths) {
    const Dataset data = generate_training_data(ctx, ctx.scatterers, opt);
    const DatasetSplit split =
        split_dataset(data, 0.8, 0.0, derive_seed(opt.seed, kSplitTag));
    DimensioningResult result;
    result.train_size = static_cast<int>(split.train.size());
    result.test_size = static_cast<int>(split.test.size());
    result.rows = dimensioning_sweep(split.train, split.test, tree_counts, depths,
                                     ctx.cfg.forest_mtry,
                                     derive_seed(opt.seed, kForestTag), opt.exec);
    return result;
}

std::string format_double(double v, int precision) {
    std::ostringstream os;
    os << std::setprecision(precision) << std::fixed << v;
    return os.str();
}

void write_text_table(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    const auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            os << std::setw(static_cast<int>(width[c])) << cells[c];
            os << (c + 1 == cells.size() ? "\n" : "  ");
        }
    };
    emit(header);
    for (const auto& row : rows) emit(row);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    const auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            os << cells[c] << (c + 1 == cells.size() ? "\n" : ",");
        }
    };
    emit(header);
    for (const auto& row : rows) emit(row);
}

void write_xy_series(const std::string& path,
                     const std::vector<std::pair<double, double>>& points,
                     const std::string& comment) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    if (!comment.empty()) os << "# " << comment << "\n";
    os << std::setprecision(10);
    for (const auto& [x, y] : points) os << x << " " << y << "\n";
}

}  // namespace cransim
