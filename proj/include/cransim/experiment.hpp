// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cransim/forest.hpp"
#include "cransim/parallel.hpp"
#include "cransim/schemes.hpp"

namespace cransim {

// Everything that stays fixed across drops: geometry, codebooks, MCS table,
// the default scatterer field, the per-user position pool and the beam grid.
// Non-movable because the grid keeps references to the codebooks.
struct SimContext {
    ScenarioConfig cfg;
    Codebook tx_cb;
    Codebook rx_cb;
    McsTable mcs;
    ScattererField scatterers;
    PositionPool pool;
    BeamGrid grid;

    SimContext(const ScenarioConfig& finalized_cfg, McsTable mcs_table);
    SimContext(const SimContext&) = delete;
    SimContext& operator=(const SimContext&) = delete;
};

// Knobs for one training-set generation pass. Each sample is one user in a
// pooled drop: features carry the grid beams looked up at the reported
// positions, the label is the CQI the exhaustive search realizes on the
// true channel of that drop.
struct TrainOptions {
    int n_samples = 20000;
    double noise_radius_m = 0.0;  // reported = true + disc error
    OrientationMode orientation = OrientationMode::kAligned;
    FeatureMode features = FeatureMode::kBase;
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::kParallel;
};

Dataset generate_training_data(const SimContext& ctx, const ScattererField& scatterers,
                               const TrainOptions& opt);

// Forest with the configured shape; logs a warning per class whose share of
// the labels is below cfg.class_support_warn_floor (when log != nullptr).
ForestModel train_model(const SimContext& ctx, const Dataset& data, std::uint64_t seed,
                        ExecMode exec = ExecMode::kParallel, std::ostream* log = nullptr);

// One scheme entered into a drop-by-drop comparison. All contenders in a
// call see the identical drops and channels.
struct Contender {
    enum class Kind { kCsi, kLearning, kRandomPacket, kGeometric };

    Kind kind = Kind::kCsi;
    const ForestModel* forest = nullptr;  // kLearning only
    FeatureMode features = FeatureMode::kBase;
    FilterMitigation mitigation = FilterMitigation::kNone;
};

struct EvalOptions {
    int n_drops = 100;
    double noise_radius_m = 0.0;
    OrientationMode orientation = OrientationMode::kAligned;
    const ScattererField* scatterers = nullptr;  // nullptr -> ctx.scatterers
    std::uint64_t seed = 1;
    ExecMode exec = ExecMode::kParallel;
};

// Mean sum goodput (bits/s) per contender over the sampled drops.
std::vector<double> mean_goodputs(const SimContext& ctx,
                                  const std::vector<Contender>& contenders,
                                  const EvalOptions& opt);

struct SchemeComparisonResult {
    double csi_bps = 0.0;
    double learning_bps = 0.0;
    double random_packet_bps = 0.0;
    double geometric_bps = 0.0;
    int n_drops = 0;

    double learning_ratio() const { return learning_bps / csi_bps; }
    double random_ratio() const { return random_packet_bps / csi_bps; }
    double geometric_ratio() const { return geometric_bps / csi_bps; }
};

SchemeComparisonResult run_scheme_comparison(const SimContext& ctx,
                                             const ForestModel& forest,
                                             const EvalOptions& opt);

// Overhead model applied to the measured goodputs: the position-based scheme
// pays beacon overhead, the CSI scheme pays full-band pilot overhead, both
// growing with the hypothetical user count n.
struct OverheadRow {
    int n_users = 0;
    double oh_position = 0.0;
    double oh_csi = 0.0;
    double eff_learning_bps = 0.0;
    double eff_csi_bps = 0.0;

    double eff_ratio() const { return eff_learning_bps / eff_csi_bps; }
};

std::vector<OverheadRow> run_overhead_sweep(const SimContext& ctx,
                                            const SchemeComparisonResult& base,
                                            const std::vector<int>& user_counts);

// Clean-trained vs noisy-trained model under growing position error.
struct NoiseRow {
    double radius_m = 0.0;
    double csi_bps = 0.0;
    double clean_bps = 0.0;  // model trained on exact positions
    double noisy_bps = 0.0;  // model trained with training-time position error

    double clean_ratio() const { return clean_bps / csi_bps; }
    double noisy_ratio() const { return noisy_bps / csi_bps; }
};

struct NoiseStudyResult {
    double train_noise_radius_m = 0.0;
    std::vector<NoiseRow> rows;  // radius 0 first
};

NoiseStudyResult run_position_noise(const SimContext& ctx, const std::vector<double>& radii,
                                    double train_radius_m, const TrainOptions& train_opt,
                                    const EvalOptions& eval_opt);

// Ratio to the CSI scheme across scatterer densities; a fresh model is
// trained per density on the same field the evaluation uses.
struct DensityRow {
    double density_per_m2 = 0.0;
    double csi_bps = 0.0;
    double learning_bps = 0.0;

    double ratio() const { return learning_bps / csi_bps; }
};

std::vector<DensityRow> run_scatterer_sweep(const SimContext& ctx,
                                            const std::vector<double>& densities,
                                            const TrainOptions& train_opt,
                                            const EvalOptions& eval_opt);

// Device-orientation study: all ratios are to the CSI scheme on the same
// randomly rotated drops. sol1 retrains with rotations present, sol2 re-aims
// the aligned-trained model's filters, sol3 adds the orientation angles as
// features.
struct OrientationResult {
    double aligned_ratio = 0.0;  // sanity reference, aligned drops
    double unmitigated_ratio = 0.0;
    double sol1_ratio = 0.0;
    double sol2_ratio = 0.0;
    double sol3_ratio = 0.0;
};

OrientationResult run_orientation_study(const SimContext& ctx, const TrainOptions& train_opt,
                                        const EvalOptions& eval_opt);

// Non-line-of-sight variant: scatterer paths only. Call with a context whose
// config selects NLOS propagation.
struct NlosResult {
    double base_ratio = 0.0;  // learning / csi without position error
    NoiseStudyResult noise;
};

NlosResult run_nlos(const SimContext& nlos_ctx, const std::vector<double>& radii,
                    double train_radius_m, const TrainOptions& train_opt,
                    const EvalOptions& eval_opt);

struct DimensioningResult {
    std::vector<DimensionRow> rows;
    int train_size = 0;
    int test_size = 0;
};

DimensioningResult run_dimensioning(const SimContext& ctx, const TrainOptions& opt,
                                    const std::vector<int>& tree_counts,
                                    const std::vector<int>& depths);

// --- report helpers ---

std::string format_double(double v, int precision = 4);

// column-aligned table
void write_text_table(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// two-column (x y) series for plotting tools; `comment` lands in a # header
void write_xy_series(const std::string& path,
                     const std::vector<std::pair<double, double>>& points,
                     const std::string& comment);

}  // namespace cransim
