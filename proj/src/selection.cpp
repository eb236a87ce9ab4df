#include "coopal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "coopal/error.hpp"
#include "coopal/rng.hpp"

namespace coopal {

const char* selection_policy_name(SelectionPolicy p) {
    switch (p) {
        case SelectionPolicy::QDS: return "qds";
        case SelectionPolicy::RS: return "rs";
        case SelectionPolicy::MVQS: return "mvqs";
    }
    throw InternalError("unhandled SelectionPolicy");
}

SelectionPolicy selection_policy_from_name(const std::string& name) {
    if (name == "qds") return SelectionPolicy::QDS;
    if (name == "rs") return SelectionPolicy::RS;
    if (name == "mvqs") return SelectionPolicy::MVQS;
    throw ValidationError("unknown selection policy '" + name + "' (expected qds|rs|mvqs)");
}

CandidatePool::CandidatePool(std::vector<AggregatedSample> candidates)
    : candidates_(std::move(candidates)),
      selected_(candidates_.size(), false),
      remaining_(candidates_.size()) {}

void CandidatePool::mark_selected(std::size_t i) {
    if (i >= candidates_.size() || selected_[i]) {
        throw InternalError("mark_selected: bad candidate index");
    }
    selected_[i] = true;
    --remaining_;
}

std::vector<Label> CandidatePool::available_classes() const {
    std::vector<int> seen;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        if (!selected_[i]) seen.push_back(candidates_[i].label.class_index);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    std::vector<Label> classes;
    classes.reserve(seen.size());
    for (const int k : seen) classes.push_back(Label{k});
    return classes;
}

bool CandidatePool::class_has_remaining(Label k) const {
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        if (!selected_[i] && candidates_[i].label == k) return true;
    }
    return false;
}

double quality_score(std::span<const double> qualities) {
    if (qualities.empty()) throw ValidationError("quality_score: empty selection");
    const double sum = std::accumulate(qualities.begin(), qualities.end(), 0.0);
    return sum / static_cast<double>(qualities.size());
}

double diversity_score(std::span<const Label> selected_labels, int num_classes) {
    if (num_classes < 1) throw ValidationError("diversity_score: num_classes must be >= 1");
    if (selected_labels.empty()) return 0.0;
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const Label& l : selected_labels) ++counts[static_cast<std::size_t>(l.class_index)];
    const double n = static_cast<double>(selected_labels.size());
    double h = 0.0;
    for (const int c : counts) {
        if (c == 0) continue;
        const double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

Label select_class(std::span<const Label> current_labels, std::span<const Label> available_classes,
                   int num_classes) {
    if (available_classes.empty()) throw ValidationError("select_class: no available classes");
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const Label& l : current_labels) ++counts[static_cast<std::size_t>(l.class_index)];

    // adding to the least-represented class maximizes the one-step entropy
    // (entropy is Schur-concave), so no entropy evaluation is needed
    Label best = available_classes.front();
    for (const Label& k : available_classes) {
        const int ck = counts[static_cast<std::size_t>(k.class_index)];
        const int cb = counts[static_cast<std::size_t>(best.class_index)];
        if (ck < cb || (ck == cb && k.class_index < best.class_index)) best = k;
    }
    return best;
}

std::size_t select_sample(const CandidatePool& pool, Label k_star) {
    std::size_t best = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.is_selected(i) || !(pool.at(i).label == k_star)) continue;
        if (best == pool.size() || pool.at(i).quality > pool.at(best).quality) best = i;
    }
    if (best == pool.size()) {
        throw ValidationError("select_sample: no remaining candidate of the requested class");
    }
    return best;
}

namespace {

// One policy = one way to pick the next candidate index.
using NextCandidate = std::function<std::size_t(const CandidatePool&, std::span<const Label>)>;

SelectionOutcome selection_loop(CandidatePool& pool, const LabelerProfile& learner,
                                TrainingSet& training, std::span<const TrainingExample> test_set,
                                double alpha, int max_steps, std::uint64_t seed,
                                const NextCandidate& next) {
    if (pool.size() == 0) throw ValidationError("selection: empty candidate pool");
    if (test_set.empty()) throw ValidationError("selection: empty test set");
    if (!learner.model) throw ValidationError("selection: learner has no trained model");
    if (max_steps < 0) max_steps = static_cast<int>(pool.size());

    SelectionOutcome out;
    std::vector<Label> chosen_labels;
    ModelPtr model = learner.model;
    double accuracy = measure_accuracy(*model, test_set);

    while (static_cast<int>(out.chosen.size()) < max_steps && pool.remaining_count() > 0) {
        const std::size_t idx = next(pool, chosen_labels);
        pool.mark_selected(idx);
        const AggregatedSample& picked = pool.at(idx);
        for (const FeatureVector& x : picked.data) {
            training.online.emplace_back(x, picked.label);
        }
        chosen_labels.push_back(picked.label);
        out.chosen.push_back(idx);

        model = retrain_with(*model, training,
                             derive_seed(seed, 0x5E1EC7 + out.chosen.size()));
        accuracy = measure_accuracy(*model, test_set);

        SelectionStep step;
        step.candidate_index = idx;
        step.online_size = static_cast<int>(out.chosen.size());
        step.training_vectors = static_cast<int>(training.online.size());
        step.accuracy = accuracy;
        out.trajectory.push_back(step);

        if (accuracy >= alpha) break;
    }

    out.n_star = static_cast<int>(out.chosen.size());
    out.achieved_accuracy = accuracy;
    out.target_met = accuracy >= alpha;
    return out;
}

}  // namespace

SelectionOutcome qds_run(CandidatePool& pool, const LabelerProfile& learner, TrainingSet& training,
                         std::span<const TrainingExample> test_set, double alpha, int max_steps,
                         std::uint64_t seed) {
    int num_classes = 1;
    for (const auto& c : pool.candidates()) {
        num_classes = std::max(num_classes, c.label.class_index + 1);
    }
    const auto next = [num_classes](const CandidatePool& p, std::span<const Label> chosen) {
        const auto available = p.available_classes();
        const Label k_star = select_class(chosen, available, num_classes);
        return select_sample(p, k_star);
    };
    return selection_loop(pool, learner, training, test_set, alpha, max_steps, seed, next);
}

SelectionOutcome baseline_rs(CandidatePool& pool, const LabelerProfile& learner,
                             TrainingSet& training, std::span<const TrainingExample> test_set,
                             double alpha, int max_steps, std::uint64_t seed) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x7A2D0));
    rng.shuffle(order);
    std::size_t cursor = 0;
    const auto next = [order, cursor](const CandidatePool& p,
                                      std::span<const Label>) mutable -> std::size_t {
        while (cursor < order.size() && p.is_selected(order[cursor])) ++cursor;
        if (cursor >= order.size()) throw InternalError("baseline_rs: order exhausted");
        return order[cursor++];
    };
    return selection_loop(pool, learner, training, test_set, alpha, max_steps, seed, next);
}

SelectionOutcome baseline_mvqs(CandidatePool& pool, const LabelerProfile& learner,
                               TrainingSet& training, std::span<const TrainingExample> test_set,
                               double alpha, int max_steps, std::uint64_t seed) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&pool](std::size_t a, std::size_t b) {
        return pool.at(a).quality > pool.at(b).quality;
    });
    std::size_t cursor = 0;
    const auto next = [order, cursor](const CandidatePool& p,
                                      std::span<const Label>) mutable -> std::size_t {
        while (cursor < order.size() && p.is_selected(order[cursor])) ++cursor;
        if (cursor >= order.size()) throw InternalError("baseline_mvqs: order exhausted");
        return order[cursor++];
    };
    return selection_loop(pool, learner, training, test_set, alpha, max_steps, seed, next);
}

SelectionOutcome run_selection(SelectionPolicy policy, CandidatePool& pool,
                               const LabelerProfile& learner, TrainingSet& training,
                               std::span<const TrainingExample> test_set, double alpha,
                               int max_steps, std::uint64_t seed) {
    switch (policy) {
        case SelectionPolicy::QDS:
            return qds_run(pool, learner, training, test_set, alpha, max_steps, seed);
        case SelectionPolicy::RS:
            return baseline_rs(pool, learner, training, test_set, alpha, max_steps, seed);
        case SelectionPolicy::MVQS:
            return baseline_mvqs(pool, learner, training, test_set, alpha, max_steps, seed);
    }
    throw InternalError("unhandled SelectionPolicy");
}

}  // namespace coopal
