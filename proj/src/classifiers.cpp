#include "coopal/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "coopal/error.hpp"

namespace coopal {

ClassifierKind ClassifierKind::tree_fine() {
    ClassifierKind k;
    k.family = Family::TreeFine;
    k.max_depth = 0;
    k.min_leaf = 1;
    return k;
}

ClassifierKind ClassifierKind::tree_medium(int max_depth) {
    ClassifierKind k;
    k.family = Family::TreeMedium;
    k.max_depth = max_depth;
    k.min_leaf = 1;
    return k;
}

ClassifierKind ClassifierKind::linear_ovr(int epochs, double learning_rate, double l2) {
    ClassifierKind k;
    k.family = Family::LinearOvR;
    k.epochs = epochs;
    k.learning_rate = learning_rate;
    k.l2 = l2;
    return k;
}

ClassifierKind ClassifierKind::kernel_ovr(int epochs, double gamma) {
    ClassifierKind k;
    k.family = Family::KernelOvR;
    k.epochs = epochs;
    k.kernel_gamma = gamma;
    return k;
}

ClassifierKind ClassifierKind::weighted_knn(int kk) {
    ClassifierKind k;
    k.family = Family::WeightedKnn;
    k.k = kk;
    return k;
}

void ClassifierKind::validate() const {
    switch (family) {
        case Family::TreeFine:
        case Family::TreeMedium:
            if (max_depth < 0) throw ValidationError("tree max_depth must be >= 0");
            if (min_leaf < 1) throw ValidationError("tree min_leaf must be >= 1");
            break;
        case Family::LinearOvR:
            if (epochs < 1) throw ValidationError("linear epochs must be >= 1");
            if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
            if (l2 < 0.0) throw ValidationError("l2 must be >= 0");
            break;
        case Family::KernelOvR:
            if (epochs < 1) throw ValidationError("kernel epochs must be >= 1");
            if (kernel_gamma < 0.0) throw ValidationError("kernel_gamma must be >= 0");
            break;
        case Family::WeightedKnn:
            if (k < 1) throw ValidationError("knn k must be >= 1");
            break;
    }
}

std::string ClassifierKind::name() const {
    switch (family) {
        case Family::TreeFine: return "tree_fine";
        case Family::TreeMedium: return "tree_medium";
        case Family::LinearOvR: return "linear_ovr";
        case Family::KernelOvR: return "kernel_ovr";
        case Family::WeightedKnn: return "weighted_knn";
    }
    throw InternalError("unhandled classifier family");
}

Label Model::predict(const FeatureVector& x) const {
    if (static_cast<int>(x.size()) != num_features_) {
        throw ValidationError("predict: expected " + std::to_string(num_features_) +
                              " features, got " + std::to_string(x.size()));
    }
    return do_predict(x);
}

std::vector<TrainingExample> TrainingSet::combined() const {
    std::vector<TrainingExample> all;
    all.reserve(base.size() + online.size());
    all.insert(all.end(), base.begin(), base.end());
    all.insert(all.end(), online.begin(), online.end());
    return all;
}

namespace {

void check_training_data(std::span<const TrainingExample> data) {
    if (data.empty()) throw ValidationError("train: empty training set");
    const std::size_t d = data.front().first.size();
    if (d == 0) throw ValidationError("train: zero-dimensional features");
    std::set<int> classes;
    for (const auto& [x, y] : data) {
        if (x.size() != d) {
            throw ValidationError("train: inconsistent feature length (" + std::to_string(x.size()) +
                                  " vs " + std::to_string(d) + ")");
        }
        classes.insert(y.class_index);
    }
    if (classes.size() < 2) throw ValidationError("train: need at least 2 classes present");
}

int max_class_index(std::span<const TrainingExample> data) {
    int m = 0;
    for (const auto& [x, y] : data) m = std::max(m, y.class_index);
    return m;
}

Label majority_label(const std::vector<int>& counts) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(counts.size()); ++k) {
        if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)]) best = k;
    }
    return Label{best};
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - b[f];
        s += d * d;
    }
    return s;
}

// Per-feature standardization fitted on the training data; linear and kernel
// models learn on z-scores so step sizes behave across feature magnitudes.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> inv_std;

    void fit(std::span<const TrainingExample> data) {
        const std::size_t d = data.front().first.size();
        mean.assign(d, 0.0);
        inv_std.assign(d, 1.0);
        for (const auto& [x, y] : data) {
            for (std::size_t f = 0; f < d; ++f) mean[f] += x[f];
        }
        for (auto& m : mean) m /= static_cast<double>(data.size());
        std::vector<double> var(d, 0.0);
        for (const auto& [x, y] : data) {
            for (std::size_t f = 0; f < d; ++f) {
                const double c = x[f] - mean[f];
                var[f] += c * c;
            }
        }
        for (std::size_t f = 0; f < d; ++f) {
            const double sd = std::sqrt(var[f] / static_cast<double>(data.size()));
            inv_std[f] = sd > 1e-12 ? 1.0 / sd : 1.0;
        }
    }

    FeatureVector apply(const FeatureVector& x) const {
        FeatureVector z(x.size());
        for (std::size_t f = 0; f < x.size(); ++f) z[f] = (x[f] - mean[f]) * inv_std[f];
        return z;
    }
};

// ---------------------------------------------------------------------------
// CART-style decision tree, Gini impurity, midpoint thresholds.

class DecisionTreeModel final : public Model {
public:
    DecisionTreeModel(ClassifierKind kind, std::span<const TrainingExample> data)
        : Model(kind, static_cast<int>(data.front().first.size()), max_class_index(data) + 1) {
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), 0);
        root_ = build(data, idx, 0);
    }

protected:
    Label do_predict(const FeatureVector& x) const override {
        int node = root_;
        while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
            const auto& n = nodes_[static_cast<std::size_t>(node)];
            node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes_[static_cast<std::size_t>(node)].label;
    }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        Label label{0};

        bool is_leaf() const { return feature < 0; }
    };

    static double gini(const std::vector<int>& counts, int total) {
        if (total == 0) return 0.0;
        double g = 1.0;
        for (const int c : counts) {
            const double p = static_cast<double>(c) / total;
            g -= p * p;
        }
        return g;
    }

    int build(std::span<const TrainingExample> data, std::vector<std::size_t>& idx, int depth) {
        std::vector<int> counts(static_cast<std::size_t>(num_classes()), 0);
        for (const std::size_t i : idx) ++counts[static_cast<std::size_t>(data[i].second.class_index)];

        const int total = static_cast<int>(idx.size());
        const bool pure = std::count(counts.begin(), counts.end(), total) == 1;
        const bool depth_capped = kind().max_depth > 0 && depth >= kind().max_depth;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = gini(counts, total);

        if (!pure && !depth_capped && total >= 2 * kind().min_leaf) {
            for (int f = 0; f < num_features(); ++f) {
                std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                    const double va = data[a].first[static_cast<std::size_t>(f)];
                    const double vb = data[b].first[static_cast<std::size_t>(f)];
                    return va < vb || (va == vb && a < b);
                });
                std::vector<int> left_counts(static_cast<std::size_t>(num_classes()), 0);
                std::vector<int> right_counts = counts;
                for (int i = 0; i + 1 < total; ++i) {
                    const int cls = data[idx[static_cast<std::size_t>(i)]].second.class_index;
                    ++left_counts[static_cast<std::size_t>(cls)];
                    --right_counts[static_cast<std::size_t>(cls)];
                    const double v = data[idx[static_cast<std::size_t>(i)]].first[static_cast<std::size_t>(f)];
                    const double next = data[idx[static_cast<std::size_t>(i + 1)]].first[static_cast<std::size_t>(f)];
                    if (v == next) continue;
                    const int nl = i + 1;
                    const int nr = total - nl;
                    if (nl < kind().min_leaf || nr < kind().min_leaf) continue;
                    const double impurity =
                        (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / total;
                    if (impurity + 1e-12 < best_impurity) {
                        best_impurity = impurity;
                        best_feature = f;
                        best_threshold = 0.5 * (v + next);
                    }
                }
            }
        }

        if (best_feature < 0) {
            Node leaf;
            leaf.label = majority_label(counts);
            nodes_.push_back(leaf);
            return static_cast<int>(nodes_.size()) - 1;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (const std::size_t i : idx) {
            if (data[i].first[static_cast<std::size_t>(best_feature)] <= best_threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }
        const int left = build(data, left_idx, depth + 1);
        const int right = build(data, right_idx, depth + 1);
        Node n;
        n.feature = best_feature;
        n.threshold = best_threshold;
        n.left = left;
        n.right = right;
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    std::vector<Node> nodes_;
    int root_ = 0;
};

// ---------------------------------------------------------------------------
// One-vs-rest linear classifiers, regularized hinge loss, subgradient descent
// in fixed sample order with a 1/(1+epoch) learning-rate schedule.

class LinearOvrModel final : public Model {
public:
    LinearOvrModel(ClassifierKind kind, std::span<const TrainingExample> data)
        : Model(kind, static_cast<int>(data.front().first.size()), max_class_index(data) + 1) {
        scaler_.fit(data);
        std::vector<FeatureVector> z;
        z.reserve(data.size());
        for (const auto& [x, y] : data) z.push_back(scaler_.apply(x));

        const std::size_t d = z.front().size();
        weights_.assign(static_cast<std::size_t>(num_classes()), std::vector<double>(d, 0.0));
        bias_.assign(static_cast<std::size_t>(num_classes()), 0.0);

        for (int cls = 0; cls < num_classes(); ++cls) {
            auto& w = weights_[static_cast<std::size_t>(cls)];
            auto& b = bias_[static_cast<std::size_t>(cls)];
            for (int epoch = 0; epoch < kind.epochs; ++epoch) {
                const double lr = kind.learning_rate / (1.0 + epoch);
                for (std::size_t i = 0; i < z.size(); ++i) {
                    const double y = data[i].second.class_index == cls ? 1.0 : -1.0;
                    double margin = b;
                    for (std::size_t f = 0; f < d; ++f) margin += w[f] * z[i][f];
                    margin *= y;
                    const double shrink = 1.0 - lr * kind.l2;
                    for (auto& wf : w) wf *= shrink;
                    if (margin < 1.0) {
                        for (std::size_t f = 0; f < d; ++f) w[f] += lr * y * z[i][f];
                        b += lr * y;
                    }
                }
            }
        }
    }

protected:
    Label do_predict(const FeatureVector& x) const override {
        const FeatureVector z = scaler_.apply(x);
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int cls = 0; cls < num_classes(); ++cls) {
            double s = bias_[static_cast<std::size_t>(cls)];
            const auto& w = weights_[static_cast<std::size_t>(cls)];
            for (std::size_t f = 0; f < z.size(); ++f) s += w[f] * z[f];
            if (s > best_score) {
                best_score = s;
                best = cls;
            }
        }
        return Label{best};
    }

private:
    Standardizer scaler_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> bias_;
};

// ---------------------------------------------------------------------------
// One-vs-rest kernel perceptrons with an RBF kernel.

class KernelOvrModel final : public Model {
public:
    KernelOvrModel(ClassifierKind kind, std::span<const TrainingExample> data)
        : Model(kind, static_cast<int>(data.front().first.size()), max_class_index(data) + 1) {
        scaler_.fit(data);
        points_.reserve(data.size());
        for (const auto& [x, y] : data) points_.push_back(scaler_.apply(x));
        gamma_ = kind.kernel_gamma > 0.0 ? kind.kernel_gamma
                                         : 1.0 / static_cast<double>(num_features());

        const std::size_t n = points_.size();
        std::vector<double> kernel(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            kernel[i * n + i] = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double kij = std::exp(-gamma_ * squared_distance(points_[i], points_[j]));
                kernel[i * n + j] = kij;
                kernel[j * n + i] = kij;
            }
        }

        coeff_.assign(static_cast<std::size_t>(num_classes()), std::vector<double>(n, 0.0));
        for (int cls = 0; cls < num_classes(); ++cls) {
            auto& alpha = coeff_[static_cast<std::size_t>(cls)];
            for (int epoch = 0; epoch < kind.epochs; ++epoch) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double y = data[i].second.class_index == cls ? 1.0 : -1.0;
                    double score = 0.0;
                    for (std::size_t j = 0; j < n; ++j) score += alpha[j] * kernel[j * n + i];
                    if (y * score <= 0.0) alpha[i] += y;
                }
            }
        }
        // drop non-support points so prediction skips them cheaply
        support_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            bool used = false;
            for (const auto& alpha : coeff_) used = used || alpha[i] != 0.0;
            if (used) support_.push_back(i);
        }
    }

protected:
    Label do_predict(const FeatureVector& x) const override {
        const FeatureVector z = scaler_.apply(x);
        std::vector<double> scores(static_cast<std::size_t>(num_classes()), 0.0);
        for (const std::size_t i : support_) {
            const double k = std::exp(-gamma_ * squared_distance(points_[i], z));
            for (int cls = 0; cls < num_classes(); ++cls) {
                scores[static_cast<std::size_t>(cls)] += coeff_[static_cast<std::size_t>(cls)][i] * k;
            }
        }
        int best = 0;
        for (int cls = 1; cls < num_classes(); ++cls) {
            if (scores[static_cast<std::size_t>(cls)] > scores[static_cast<std::size_t>(best)]) {
                best = cls;
            }
        }
        return Label{best};
    }

private:
    Standardizer scaler_;
    std::vector<FeatureVector> points_;
    std::vector<std::vector<double>> coeff_;
    std::vector<std::size_t> support_;
    double gamma_ = 1.0;
};

// ---------------------------------------------------------------------------
// Distance-weighted kNN (inverse squared distance).

class WeightedKnnModel final : public Model {
public:
    WeightedKnnModel(ClassifierKind kind, std::span<const TrainingExample> data)
        : Model(kind, static_cast<int>(data.front().first.size()), max_class_index(data) + 1),
          data_(data.begin(), data.end()) {}

protected:
    Label do_predict(const FeatureVector& x) const override {
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(kind().k), data_.size());
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i) {
            dist.emplace_back(squared_distance(data_[i].first, x), i);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<double> scores(static_cast<std::size_t>(num_classes()), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const double w = 1.0 / (dist[i].first + 1e-12);
            scores[static_cast<std::size_t>(data_[dist[i].second].second.class_index)] += w;
        }
        int best = 0;
        for (int cls = 1; cls < num_classes(); ++cls) {
            if (scores[static_cast<std::size_t>(cls)] > scores[static_cast<std::size_t>(best)]) {
                best = cls;
            }
        }
        return Label{best};
    }

private:
    std::vector<TrainingExample> data_;
};

}  // namespace

ModelPtr train(const ClassifierKind& kind, std::span<const TrainingExample> data,
               std::uint64_t /*seed*/) {
    kind.validate();
    check_training_data(data);
    switch (kind.family) {
        case ClassifierKind::Family::TreeFine:
        case ClassifierKind::Family::TreeMedium:
            return std::make_shared<DecisionTreeModel>(kind, data);
        case ClassifierKind::Family::LinearOvR:
            return std::make_shared<LinearOvrModel>(kind, data);
        case ClassifierKind::Family::KernelOvR:
            return std::make_shared<KernelOvrModel>(kind, data);
        case ClassifierKind::Family::WeightedKnn:
            return std::make_shared<WeightedKnnModel>(kind, data);
    }
    throw InternalError("unhandled classifier family");
}

double measure_accuracy(const Model& model, std::span<const TrainingExample> eval_set) {
    if (eval_set.empty()) throw ValidationError("measure_accuracy: empty evaluation set");
    int hits = 0;
    for (const auto& [x, y] : eval_set) {
        if (model.predict(x) == y) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(eval_set.size());
}

ModelPtr retrain_with(const Model& model, const TrainingSet& training, std::uint64_t seed) {
    const auto all = training.combined();
    return train(model.kind(), all, seed);
}

}  // namespace coopal
