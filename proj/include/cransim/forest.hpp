// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cransim/parallel.hpp"

namespace cransim {

struct LabeledSample {
    std::vector<double> features;
    int label = 0;
};

using Dataset = std::vector<LabeledSample>;

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;   // child node indices within the tree's node array
    int right = -1;
    int leaf_class = -1;

    bool is_leaf() const { return leaf_class >= 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // preorder, root first

    int predict(const std::vector<double>& x) const;
    int depth() const;
};

// Multi-class random forest: bootstrap-resampled CART trees with Gini
// splits over a random feature subset per node, majority voting at
// prediction. Training is bit-deterministic: each tree consumes its own
// RNG stream derived from the master seed, so serial and parallel runs
// build the identical model.
class ForestModel {
public:
    static ForestModel train(const Dataset& data, int t_n, int t_d, int m_try,
                             std::uint64_t seed, ExecMode mode = ExecMode::kParallel);

    int predict(const std::vector<double>& x) const;  // vote ties -> lower class
    double accuracy(const Dataset& data) const;

    std::string serialize() const;
    static ForestModel deserialize(const std::string& text);
    void save(const std::string& path) const;
    static ForestModel load(const std::string& path);

    int arity() const { return arity_; }
    int n_classes() const { return n_classes_; }
    int tree_count() const { return static_cast<int>(trees_.size()); }
    int max_depth() const { return t_d_; }
    int m_try() const { return m_try_; }
    std::uint64_t train_seed() const { return seed_; }
    // true when the training labels were a single class
    bool degenerate() const { return degenerate_; }
    const Tree& tree(int i) const { return trees_[static_cast<std::size_t>(i)]; }

private:
    std::vector<Tree> trees_;
    int arity_ = 0;
    int n_classes_ = 0;
    int t_d_ = 0;
    int m_try_ = 0;
    std::uint64_t seed_ = 0;
    bool degenerate_ = false;
};

// label counts, indices 0..n_classes-1
std::vector<int> class_histogram(const Dataset& data, int n_classes);

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
};

// deterministic shuffle then partition by the given fractions
DatasetSplit split_dataset(const Dataset& data, double train_frac, double val_frac,
                           std::uint64_t seed);

struct DimensionRow {
    int t_n = 0;
    int t_d = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

// one forest per (t_n, t_d) grid cell, scored on both sets
std::vector<DimensionRow> dimensioning_sweep(const Dataset& train, const Dataset& test,
                                             const std::vector<int>& tree_counts,
                                             const std::vector<int>& depths, int m_try,
                                             std::uint64_t seed,
                                             ExecMode mode = ExecMode::kParallel);

// reads/writes the comma-separated dataset format (header row, label last)
void save_dataset(const Dataset& data, const std::vector<std::string>& feature_names,
                  const std::string& path);
Dataset load_dataset(const std::string& path, std::vector<std::string>* feature_names = nullptr);

}  // namespace cransim
