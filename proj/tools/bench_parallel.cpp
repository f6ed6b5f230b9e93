// SPDX-License-Identifier: Apache-2.0
//
// Times the serial and the OpenMP execution paths on the two hot kernels
// (forest training, drop evaluation) and checks that both produce identical
// results.

#include <chrono>
#include <iostream>

#include "cransim/experiment.hpp"

using namespace cransim;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    ScenarioConfig cfg;
    cfg.finalize();
    SimContext ctx(cfg, McsTable::lte_default());

    TrainOptions topt;
    topt.n_samples = 4000;
    topt.seed = cfg.rng_seed;

    std::cout << "generating " << topt.n_samples << " training samples (serial)\n";
    topt.exec = ExecMode::kSerial;
    auto t0 = std::chrono::steady_clock::now();
    const Dataset data_serial = generate_training_data(ctx, ctx.scatterers, topt);
    const double gen_serial = seconds_since(t0);

    std::cout << "generating " << topt.n_samples << " training samples (parallel)\n";
    topt.exec = ExecMode::kParallel;
    t0 = std::chrono::steady_clock::now();
    const Dataset data_parallel = generate_training_data(ctx, ctx.scatterers, topt);
    const double gen_parallel = seconds_since(t0);

    bool same_data = data_serial.size() == data_parallel.size();
    for (std::size_t i = 0; same_data && i < data_serial.size(); ++i) {
        same_data = data_serial[i].label == data_parallel[i].label &&
                    data_serial[i].features == data_parallel[i].features;
    }

    t0 = std::chrono::steady_clock::now();
    const ForestModel forest_serial = ForestModel::train(
        data_serial, cfg.forest_trees, cfg.forest_depth, cfg.forest_mtry, 7,
        ExecMode::kSerial);
    const double train_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ForestModel forest_parallel = ForestModel::train(
        data_serial, cfg.forest_trees, cfg.forest_depth, cfg.forest_mtry, 7,
        ExecMode::kParallel);
    const double train_parallel = seconds_since(t0);

    const bool same_model = forest_serial.serialize() == forest_parallel.serialize();

    EvalOptions eopt;
    eopt.n_drops = 200;
    eopt.seed = cfg.rng_seed;
    std::vector<Contender> cs(2);
    cs[0].kind = Contender::Kind::kCsi;
    cs[1].kind = Contender::Kind::kLearning;
    cs[1].forest = &forest_serial;

    eopt.exec = ExecMode::kSerial;
    t0 = std::chrono::steady_clock::now();
    const std::vector<double> eval_serial = mean_goodputs(ctx, cs, eopt);
    const double drops_serial = seconds_since(t0);

    eopt.exec = ExecMode::kParallel;
    t0 = std::chrono::steady_clock::now();
    const std::vector<double> eval_parallel = mean_goodputs(ctx, cs, eopt);
    const double drops_parallel = seconds_since(t0);

    const bool same_eval = eval_serial == eval_parallel;

    std::cout.setf(std::ios::fixed);
    std::cout.precision(3);
    std::cout << "\nkernel            serial[s]  parallel[s]  speedup  identical\n";
    std::cout << "data generation   " << gen_serial << "      " << gen_parallel
              << "        " << gen_serial / gen_parallel << "    "
              << (same_data ? "yes" : "NO") << "\n";
    std::cout << "forest training   " << train_serial << "      " << train_parallel
              << "        " << train_serial / train_parallel << "    "
              << (same_model ? "yes" : "NO") << "\n";
    std::cout << "drop evaluation   " << drops_serial << "      " << drops_parallel
              << "        " << drops_serial / drops_parallel << "    "
              << (same_eval ? "yes" : "NO") << "\n";

    if (!same_data || !same_model || !same_eval) {
        std::cerr << "error: serial and parallel paths disagree\n";
        return 1;
    }
    return 0;
}
