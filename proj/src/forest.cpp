// SPDX-License-Identifier: Apache-2.0
#include "cransim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cransim/errors.hpp"
#include "cransim/rng.hpp"

namespace cransim {

namespace {

constexpr std::uint64_t kTreeTag = 0x54524545u;  // "TREE"
constexpr double kMinImpurityGain = 1e-12;

int majority_class(const std::vector<int>& counts) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)])
            best = c;  // strict: ties stay at the lower class
    }
    return best;
}

double gini_from_counts(const std::vector<int>& counts, int n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (int c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return 1.0 - sq / (static_cast<double>(n) * static_cast<double>(n));
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double weighted_impurity = 0.0;
};

struct TreeBuilder {
    const Dataset& data;
    int n_classes;
    int t_d;
    int m_try;
    Rng& rng;
    std::vector<TreeNode>& nodes;

    // scratch reused across nodes
    std::vector<std::pair<double, int>> sorted;

    SplitChoice best_split(const std::vector<int>& idx, const std::vector<int>& feats) {
        const int n = static_cast<int>(idx.size());
        SplitChoice best;
        std::vector<int> left_counts(static_cast<std::size_t>(n_classes));
        std::vector<int> right_counts(static_cast<std::size_t>(n_classes));
        for (int f : feats) {
            sorted.clear();
            sorted.reserve(static_cast<std::size_t>(n));
            for (int i : idx) {
                const LabeledSample& s = data[static_cast<std::size_t>(i)];
                sorted.emplace_back(s.features[static_cast<std::size_t>(f)], s.label);
            }
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;  // constant feature
            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::fill(right_counts.begin(), right_counts.end(), 0);
            for (const auto& p : sorted) ++right_counts[static_cast<std::size_t>(p.second)];
            // running sums of squared counts let each candidate cost O(1)
            double left_sq = 0.0;
            double right_sq = 0.0;
            for (int c : right_counts)
                right_sq += static_cast<double>(c) * static_cast<double>(c);
            for (int i = 0; i < n - 1; ++i) {
                const int lbl = sorted[static_cast<std::size_t>(i)].second;
                const double lc = left_counts[static_cast<std::size_t>(lbl)];
                const double rc = right_counts[static_cast<std::size_t>(lbl)];
                left_sq += 2.0 * lc + 1.0;
                right_sq -= 2.0 * rc - 1.0;
                ++left_counts[static_cast<std::size_t>(lbl)];
                --right_counts[static_cast<std::size_t>(lbl)];
                const double v = sorted[static_cast<std::size_t>(i)].first;
                const double v_next = sorted[static_cast<std::size_t>(i + 1)].first;
                if (v == v_next) continue;  // threshold must separate distinct values
                const double nl = static_cast<double>(i + 1);
                const double nr = static_cast<double>(n - i - 1);
                const double gl = 1.0 - left_sq / (nl * nl);
                const double gr = 1.0 - right_sq / (nr * nr);
                const double weighted = (nl * gl + nr * gr) / static_cast<double>(n);
                if (!best.found || weighted < best.weighted_impurity) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (v + v_next);
                    best.weighted_impurity = weighted;
                }
            }
        }
        return best;
    }

    std::vector<int> sample_features(int arity) {
        std::vector<int> all(static_cast<std::size_t>(arity));
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < m_try; ++i) {
            const std::size_t j = static_cast<std::size_t>(i) +
                                  rng.uniform_index(static_cast<std::size_t>(arity - i));
            std::swap(all[static_cast<std::size_t>(i)], all[j]);
        }
        all.resize(static_cast<std::size_t>(m_try));
        return all;
    }

    int build(std::vector<int>& idx, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        std::vector<int> counts(static_cast<std::size_t>(n_classes));
        for (int i : idx) ++counts[static_cast<std::size_t>(data[static_cast<std::size_t>(i)].label)];
        const int n = static_cast<int>(idx.size());
        const double node_gini = gini_from_counts(counts, n);
        const bool forced_leaf = depth >= t_d || n < 2 || node_gini == 0.0;
        SplitChoice split;
        if (!forced_leaf) {
            const int arity = static_cast<int>(data.front().features.size());
            split = best_split(idx, sample_features(arity));
            if (split.found && split.weighted_impurity > node_gini - kMinImpurityGain)
                split.found = false;  // no useful decrease: stop here
        }
        if (forced_leaf || !split.found) {
            nodes[static_cast<std::size_t>(id)].leaf_class = majority_class(counts);
            return id;
        }
        std::vector<int> left_idx;
        std::vector<int> right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (int i : idx) {
            const double v = data[static_cast<std::size_t>(i)]
                                 .features[static_cast<std::size_t>(split.feature)];
            (v < split.threshold ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        nodes[static_cast<std::size_t>(id)].feature = split.feature;
        nodes[static_cast<std::size_t>(id)].threshold = split.threshold;
        const int l = build(left_idx, depth + 1);
        const int r = build(right_idx, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }
};

Tree train_tree(const Dataset& data, int n_classes, int t_d, int m_try,
                std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = data.size();
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = static_cast<int>(rng.uniform_index(n));  // bootstrap, same size
    Tree t;
    TreeBuilder builder{data, n_classes, t_d, m_try, rng, t.nodes, {}};
    builder.build(idx, 0);
    return t;
}

}  // namespace

int Tree::predict(const std::vector<double>& x) const {
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(at)];
        at = x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(at)].leaf_class;
}

int Tree::depth() const {
    // iterative preorder with depth tracking
    int max_d = 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        max_d = std::max(max_d, d);
        const TreeNode& nd = nodes[static_cast<std::size_t>(id)];
        if (!nd.is_leaf()) {
            stack.emplace_back(nd.left, d + 1);
            stack.emplace_back(nd.right, d + 1);
        }
    }
    return max_d;
}

ForestModel ForestModel::train(const Dataset& data, int t_n, int t_d, int m_try,
                               std::uint64_t seed, ExecMode mode) {
    if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
    if (t_n < 1 || t_d < 1) throw std::invalid_argument("need t_n >= 1 and t_d >= 1");
    const int arity = static_cast<int>(data.front().features.size());
    if (m_try < 1 || m_try > arity)
        throw std::invalid_argument("m_try must lie in [1, feature arity]");
    int max_label = 0;
    for (const LabeledSample& s : data) {
        if (static_cast<int>(s.features.size()) != arity)
            throw std::invalid_argument("inconsistent feature arity in dataset");
        if (s.label < 0) throw std::invalid_argument("labels must be non-negative");
        max_label = std::max(max_label, s.label);
    }
    ForestModel m;
    m.arity_ = arity;
    m.n_classes_ = max_label + 1;
    m.t_d_ = t_d;
    m.m_try_ = m_try;
    m.seed_ = seed;
    bool single_class = true;
    for (const LabeledSample& s : data) {
        if (s.label != data.front().label) {
            single_class = false;
            break;
        }
    }
    m.degenerate_ = single_class;
    m.trees_.resize(static_cast<std::size_t>(t_n));
    std::vector<Tree>& trees = m.trees_;
    const int n_classes = m.n_classes_;
    parallel_for(t_n, mode, [&](int i) {
        trees[static_cast<std::size_t>(i)] = train_tree(
            data, n_classes, t_d, m_try,
            derive_seed(seed, kTreeTag, static_cast<std::uint64_t>(i)));
    });
    return m;
}

int ForestModel::predict(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != arity_)
        throw std::invalid_argument("feature vector arity does not match model");
    std::vector<int> votes(static_cast<std::size_t>(n_classes_));
    for (const Tree& t : trees_) ++votes[static_cast<std::size_t>(t.predict(x))];
    return majority_class(votes);
}

double ForestModel::accuracy(const Dataset& data) const {
    if (data.empty()) throw std::invalid_argument("cannot score an empty dataset");
    int correct = 0;
    for (const LabeledSample& s : data) {
        if (predict(s.features) == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string ForestModel::serialize() const {
    std::ostringstream out;
    out << "forest-model 1\n";
    out << "arity " << arity_ << "\n";
    out << "classes " << n_classes_ << "\n";
    out << "trees " << tree_count() << "\n";
    out << "depth " << t_d_ << "\n";
    out << "mtry " << m_try_ << "\n";
    out << "seed " << seed_ << "\n";
    out << "degenerate " << (degenerate_ ? 1 : 0) << "\n";
    out << std::setprecision(17);
    for (int i = 0; i < tree_count(); ++i) {
        const Tree& t = trees_[static_cast<std::size_t>(i)];
        out << "tree " << i << ' ' << t.nodes.size() << "\n";
        for (const TreeNode& nd : t.nodes) {
            if (nd.is_leaf()) {
                out << "l " << nd.leaf_class << "\n";
            } else {
                out << "n " << nd.feature << ' ' << nd.threshold << ' ' << nd.left << ' '
                    << nd.right << "\n";
            }
        }
    }
    return out.str();
}

namespace {

[[noreturn]] void model_error(int line, const std::string& what) {
    throw parse_error("model file line " + std::to_string(line) + ": " + what);
}

}  // namespace

ForestModel ForestModel::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty()) return true;
        }
        return false;
    };
    auto expect_kv = [&](const std::string& key) -> long long {
        if (!next_line()) model_error(line_no, "unexpected end of file");
        std::istringstream ls(line);
        std::string k;
        long long v = 0;
        ls >> k >> v;
        if (!ls || k != key) model_error(line_no, "expected '" + key + " <value>'");
        return v;
    };
    if (!next_line()) model_error(line_no, "empty model file");
    {
        std::istringstream ls(line);
        std::string magic;
        int version = 0;
        ls >> magic >> version;
        if (!ls || magic != "forest-model") model_error(line_no, "bad magic");
        if (version != 1)
            model_error(line_no, "unsupported version " + std::to_string(version));
    }
    ForestModel m;
    m.arity_ = static_cast<int>(expect_kv("arity"));
    m.n_classes_ = static_cast<int>(expect_kv("classes"));
    const int t_n = static_cast<int>(expect_kv("trees"));
    m.t_d_ = static_cast<int>(expect_kv("depth"));
    m.m_try_ = static_cast<int>(expect_kv("mtry"));
    m.seed_ = static_cast<std::uint64_t>(expect_kv("seed"));
    m.degenerate_ = expect_kv("degenerate") != 0;
    if (m.arity_ < 1 || m.n_classes_ < 1 || t_n < 1)
        model_error(line_no, "invalid header values");
    m.trees_.reserve(static_cast<std::size_t>(t_n));
    for (int i = 0; i < t_n; ++i) {
        if (!next_line()) model_error(line_no, "missing tree " + std::to_string(i));
        std::istringstream ls(line);
        std::string k;
        int tree_id = -1;
        std::size_t node_count = 0;
        ls >> k >> tree_id >> node_count;
        if (!ls || k != "tree" || tree_id != i || node_count == 0)
            model_error(line_no, "bad tree header");
        Tree t;
        t.nodes.reserve(node_count);
        for (std::size_t nd_i = 0; nd_i < node_count; ++nd_i) {
            if (!next_line()) model_error(line_no, "truncated tree node list");
            std::istringstream ns(line);
            std::string tag;
            ns >> tag;
            TreeNode nd;
            if (tag == "l") {
                ns >> nd.leaf_class;
                if (!ns || nd.leaf_class < 0 || nd.leaf_class >= m.n_classes_)
                    model_error(line_no, "bad leaf class");
            } else if (tag == "n") {
                ns >> nd.feature >> nd.threshold >> nd.left >> nd.right;
                if (!ns || nd.feature < 0 || nd.feature >= m.arity_)
                    model_error(line_no, "bad internal node");
                if (nd.left <= 0 || nd.right <= 0 ||
                    nd.left >= static_cast<int>(node_count) ||
                    nd.right >= static_cast<int>(node_count))
                    model_error(line_no, "child index out of range");
            } else {
                model_error(line_no, "unknown node tag '" + tag + "'");
            }
            t.nodes.push_back(nd);
        }
        m.trees_.push_back(std::move(t));
    }
    return m;
}

void ForestModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write model file: " + path);
    out << serialize();
    if (!out) throw parse_error("write failed for model file: " + path);
}

ForestModel ForestModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

std::vector<int> class_histogram(const Dataset& data, int n_classes) {
    std::vector<int> h(static_cast<std::size_t>(n_classes));
    for (const LabeledSample& s : data) {
        if (s.label >= 0 && s.label < n_classes) ++h[static_cast<std::size_t>(s.label)];
    }
    return h;
}

DatasetSplit split_dataset(const Dataset& data, double train_frac, double val_frac,
                           std::uint64_t seed) {
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
        throw std::invalid_argument("split fractions must be non-negative and sum <= 1");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x53484c46u));  // "SHLF"
    for (std::size_t i = data.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    const std::size_t n_train = static_cast<std::size_t>(train_frac * static_cast<double>(data.size()));
    const std::size_t n_val = static_cast<std::size_t>(val_frac * static_cast<double>(data.size()));
    DatasetSplit out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const LabeledSample& s = data[order[i]];
        if (i < n_train) {
            out.train.push_back(s);
        } else if (i < n_train + n_val) {
            out.validation.push_back(s);
        } else {
            out.test.push_back(s);
        }
    }
    return out;
}

std::vector<DimensionRow> dimensioning_sweep(const Dataset& train, const Dataset& test,
                                             const std::vector<int>& tree_counts,
                                             const std::vector<int>& depths, int m_try,
                                             std::uint64_t seed, ExecMode mode) {
    std::vector<DimensionRow> rows;
    for (int t_n : tree_counts) {
        for (int t_d : depths) {
            const ForestModel m = ForestModel::train(train, t_n, t_d, m_try, seed, mode);
            DimensionRow r;
            r.t_n = t_n;
            r.t_d = t_d;
            r.train_accuracy = m.accuracy(train);
            r.test_accuracy = m.accuracy(test);
            rows.push_back(r);
        }
    }
    return rows;
}

void save_dataset(const Dataset& data, const std::vector<std::string>& feature_names,
                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write dataset: " + path);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        out << feature_names[i] << ',';
    }
    out << "label\n";
    for (const LabeledSample& s : data) {
        if (s.features.size() != feature_names.size())
            throw std::invalid_argument("sample arity does not match feature names");
        for (double f : s.features) out << f << ',';
        out << s.label << '\n';
    }
    if (!out) throw parse_error("write failed for dataset: " + path);
}

Dataset load_dataset(const std::string& path, std::vector<std::string>* feature_names) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty dataset file: " + path);
    std::vector<std::string> names;
    {
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) names.push_back(col);
    }
    if (names.empty() || names.back() != "label")
        throw parse_error("dataset header must end with 'label': " + path);
    names.pop_back();
    if (feature_names) *feature_names = names;
    Dataset data;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        LabeledSample s;
        s.features.reserve(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (!std::getline(ls, cell, ','))
                throw parse_error("dataset line " + std::to_string(line_no) + ": too few columns");
            s.features.push_back(std::stod(cell));
        }
        if (!std::getline(ls, cell, ','))
            throw parse_error("dataset line " + std::to_string(line_no) + ": missing label");
        s.label = std::stoi(cell);
        data.push_back(std::move(s));
    }
    return data;
}

}  // namespace cransim
