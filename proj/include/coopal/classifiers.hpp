#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coopal/types.hpp"

namespace coopal {

using TrainingExample = std::pair<FeatureVector, Label>;

// The five heterogeneous labeler families. Hyperparameters double as the
// quality knobs that give vehicles their different accuracy levels.
struct ClassifierKind {
    enum class Family { TreeFine, TreeMedium, LinearOvR, KernelOvR, WeightedKnn };

    Family family = Family::TreeFine;
    int max_depth = 0;          // trees; 0 = unlimited
    int min_leaf = 1;           // trees
    int epochs = 40;            // linear / kernel
    double learning_rate = 0.1; // linear
    double l2 = 1e-4;           // linear
    double kernel_gamma = 0.0;  // kernel; 0 = auto (1/d)
    int k = 10;                 // knn

    static ClassifierKind tree_fine();
    static ClassifierKind tree_medium(int max_depth = 4);
    static ClassifierKind linear_ovr(int epochs = 40, double learning_rate = 0.1, double l2 = 1e-4);
    static ClassifierKind kernel_ovr(int epochs = 3, double gamma = 0.0);
    static ClassifierKind weighted_knn(int k = 10);

    void validate() const;
    std::string name() const;
};

// A trained multi-class model. Immutable once built; share freely.
class Model {
public:
    virtual ~Model() = default;

    Label predict(const FeatureVector& x) const;

    int num_features() const { return num_features_; }
    int num_classes() const { return num_classes_; }
    const ClassifierKind& kind() const { return kind_; }

protected:
    Model(ClassifierKind kind, int num_features, int num_classes)
        : kind_(kind), num_features_(num_features), num_classes_(num_classes) {}

    virtual Label do_predict(const FeatureVector& x) const = 0;

private:
    ClassifierKind kind_;
    int num_features_;
    int num_classes_;
};

using ModelPtr = std::shared_ptr<const Model>;

// Offline history plus the online samples appended by selection.
struct TrainingSet {
    std::vector<TrainingExample> base;
    std::vector<TrainingExample> online;

    std::vector<TrainingExample> combined() const;
};

// A vehicle's classifier with its measured offline accuracy A_j.
struct LabelerProfile {
    VehicleId id = 0;
    ClassifierKind kind;
    ModelPtr model;
    double offline_accuracy = 0.0;
};

ModelPtr train(const ClassifierKind& kind, std::span<const TrainingExample> data,
               std::uint64_t seed);

// Fraction of predictions matching the evaluation labels.
double measure_accuracy(const Model& model, std::span<const TrainingExample> eval_set);

// Full retraining from base plus online with the model's own kind.
ModelPtr retrain_with(const Model& model, const TrainingSet& training, std::uint64_t seed);

}  // namespace coopal
