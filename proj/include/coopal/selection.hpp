#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coopal/classifiers.hpp"
#include "coopal/integration.hpp"
#include "coopal/types.hpp"

namespace coopal {

enum class SelectionPolicy { QDS, RS, MVQS };

const char* selection_policy_name(SelectionPolicy p);
SelectionPolicy selection_policy_from_name(const std::string& name);

// Integrated event candidates with selected/remaining bookkeeping.
class CandidatePool {
public:
    explicit CandidatePool(std::vector<AggregatedSample> candidates);

    const std::vector<AggregatedSample>& candidates() const { return candidates_; }
    const AggregatedSample& at(std::size_t i) const { return candidates_[i]; }
    std::size_t size() const { return candidates_.size(); }

    bool is_selected(std::size_t i) const { return selected_[i]; }
    std::size_t remaining_count() const { return remaining_; }
    void mark_selected(std::size_t i);

    // classes that still have at least one remaining candidate
    std::vector<Label> available_classes() const;
    bool class_has_remaining(Label k) const;

private:
    std::vector<AggregatedSample> candidates_;
    std::vector<bool> selected_;
    std::size_t remaining_ = 0;
};

struct SelectionStep {
    std::size_t candidate_index = 0;
    int online_size = 0;            // selected samples so far
    int training_vectors = 0;       // feature vectors appended so far
    double accuracy = 0.0;          // classification accuracy after retraining
};

struct SelectionOutcome {
    std::vector<std::size_t> chosen;
    int n_star = 0;
    double achieved_accuracy = 0.0;
    bool target_met = false;
    std::vector<SelectionStep> trajectory;
};

// Mean quality of the selected samples.
double quality_score(std::span<const double> qualities);

// Shannon entropy (bits) of the empirical class proportions; empty -> 0.
double diversity_score(std::span<const Label> selected_labels, int num_classes);

// The class whose one-sample extension of current_labels maximizes the
// diversity score, restricted to available classes; ties break to the lowest
// class index. Equivalent to picking a least-represented available class.
Label select_class(std::span<const Label> current_labels, std::span<const Label> available_classes,
                   int num_classes);

// Remaining candidate of class k_star with maximum quality; ties -> lowest index.
std::size_t select_sample(const CandidatePool& pool, Label k_star);

// Quality-Diversity Selection: alternate class choice and sample choice, add
// to the online set, retrain, and stop once the accuracy target alpha is met
// (or the pool / step budget runs out).
SelectionOutcome qds_run(CandidatePool& pool, const LabelerProfile& learner, TrainingSet& training,
                         std::span<const TrainingExample> test_set, double alpha, int max_steps,
                         std::uint64_t seed);

// Same loop over a seeded uniform random order.
SelectionOutcome baseline_rs(CandidatePool& pool, const LabelerProfile& learner,
                             TrainingSet& training, std::span<const TrainingExample> test_set,
                             double alpha, int max_steps, std::uint64_t seed);

// Same loop in globally descending quality order, no class balancing.
SelectionOutcome baseline_mvqs(CandidatePool& pool, const LabelerProfile& learner,
                               TrainingSet& training, std::span<const TrainingExample> test_set,
                               double alpha, int max_steps, std::uint64_t seed);

SelectionOutcome run_selection(SelectionPolicy policy, CandidatePool& pool,
                               const LabelerProfile& learner, TrainingSet& training,
                               std::span<const TrainingExample> test_set, double alpha,
                               int max_steps, std::uint64_t seed);

}  // namespace coopal
