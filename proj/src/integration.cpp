#include "coopal/integration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "coopal/error.hpp"

namespace coopal {

namespace {

constexpr double kLogOddsClamp = 1e-6;

int max_class(std::span<const Contribution> contribs) {
    int m = 0;
    for (const auto& c : contribs) m = std::max(m, c.label.class_index);
    return m;
}

void require_nonempty(std::span<const Contribution> contribs, const char* op) {
    if (contribs.empty()) throw ValidationError(std::string(op) + ": no contributions");
}

}  // namespace

const char* integration_method_name(IntegrationMethod m) {
    switch (m) {
        case IntegrationMethod::MV: return "mv";
        case IntegrationMethod::WMV: return "wmv";
        case IntegrationMethod::WMVLikelihood: return "wmv_likelihood";
        case IntegrationMethod::WA: return "wa";
    }
    throw InternalError("unhandled IntegrationMethod");
}

IntegrationMethod integration_method_from_name(const std::string& name) {
    if (name == "mv") return IntegrationMethod::MV;
    if (name == "wmv") return IntegrationMethod::WMV;
    if (name == "wmv_likelihood") return IntegrationMethod::WMVLikelihood;
    if (name == "wa") return IntegrationMethod::WA;
    throw ValidationError("unknown integration method '" + name +
                          "' (expected mv|wmv|wmv_likelihood|wa)");
}

WaWeights WaWeights::make(double a, double b) {
    if (a < 0.0 || b < 0.0 || a + b <= 0.0) {
        throw ValidationError("WA weights must be non-negative with a + b > 0");
    }
    const double sum = a + b;
    return WaWeights{a / sum, b / sum};
}

double freshness(Timestamp t_ego, Timestamp t_j, double decay) {
    if (!(decay > 0.0)) throw ValidationError("freshness: decay must be > 0");
    if (t_ego <= t_j) return 0.0;
    return std::exp(-(t_ego - t_j) / decay);
}

double correctness_probability(double f, double accuracy) {
    if (f < 0.0 || f > 1.0) throw ValidationError("correctness_probability: freshness outside [0, 1]");
    if (accuracy < 0.0 || accuracy > 1.0) {
        throw ValidationError("correctness_probability: accuracy outside [0, 1]");
    }
    return f * accuracy;
}

IntegrationResult integrate_mv(std::span<const Contribution> contribs) {
    require_nonempty(contribs, "integrate_mv");
    std::vector<int> counts(static_cast<std::size_t>(max_class(contribs)) + 1, 0);
    for (const auto& c : contribs) ++counts[static_cast<std::size_t>(c.label.class_index)];
    int best = 0;
    for (int k = 1; k < static_cast<int>(counts.size()); ++k) {
        if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)]) best = k;
    }
    const double quality = static_cast<double>(counts[static_cast<std::size_t>(best)]) /
                           static_cast<double>(contribs.size());
    return IntegrationResult{Label{best}, quality};
}

IntegrationResult integrate_wmv_votes(std::span<const WeightedVote> raw, WmvVariant variant) {
    if (raw.empty()) throw ValidationError("integrate_wmv: no contributions");

    // class -> correctness probabilities of its voters, zero-p votes dropped
    std::map<int, std::vector<double>> votes;
    for (const auto& v : raw) {
        if (v.p > 1.0 || v.p < 0.0) throw ValidationError("integrate_wmv: p outside [0, 1]");
        if (v.p > 0.0) votes[v.label.class_index].push_back(v.p);
    }

    if (votes.empty()) {
        // every contribution was stale or worthless; fall back to the lowest
        // voted class with zero quality
        int lowest = raw.front().label.class_index;
        for (const auto& v : raw) lowest = std::min(lowest, v.label.class_index);
        return IntegrationResult{Label{lowest}, 0.0};
    }

    if (variant == WmvVariant::Product) {
        int best = -1;
        double best_score = 0.0;
        for (const auto& [cls, ps] : votes) {
            double score = 1.0;
            for (const double p : ps) score *= p;
            if (best < 0 || score > best_score) {
                best = cls;
                best_score = score;
            }
        }
        return IntegrationResult{Label{best}, best_score};
    }

    // log-odds sum with clamping, quality via softmax over voted classes
    int best = -1;
    double best_score = 0.0;
    std::vector<double> scores;
    for (const auto& [cls, ps] : votes) {
        double score = 0.0;
        for (double p : ps) {
            p = std::clamp(p, kLogOddsClamp, 1.0 - kLogOddsClamp);
            score += std::log(p / (1.0 - p));
        }
        scores.push_back(score);
        if (best < 0 || score > best_score) {
            best = cls;
            best_score = score;
        }
    }
    double denom = 0.0;
    for (const double s : scores) denom += std::exp(s - best_score);
    return IntegrationResult{Label{best}, 1.0 / denom};
}

IntegrationResult integrate_wmv(std::span<const Contribution> contribs, Timestamp t_ego,
                                double decay, WmvVariant variant) {
    require_nonempty(contribs, "integrate_wmv");
    std::vector<WeightedVote> votes;
    votes.reserve(contribs.size());
    for (const auto& c : contribs) {
        votes.push_back(WeightedVote{
            c.label, correctness_probability(freshness(t_ego, c.time, decay), c.accuracy)});
    }
    return integrate_wmv_votes(votes, variant);
}

namespace detail {

std::vector<double> wa_class_scores(std::span<const Label> labels, std::span<const double> lambdas,
                                    int num_classes) {
    std::vector<double> scores(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        scores[static_cast<std::size_t>(labels[i].class_index)] += std::exp(lambdas[i]);
    }
    return scores;
}

}  // namespace detail

IntegrationResult integrate_wa_lambdas(std::span<const Label> labels,
                                       std::span<const double> lambdas) {
    if (labels.empty() || labels.size() != lambdas.size()) {
        throw ValidationError("integrate_wa: need equally many labels and lambdas, non-empty");
    }
    int num_classes = 1;
    for (const Label& l : labels) num_classes = std::max(num_classes, l.class_index + 1);
    const auto scores = detail::wa_class_scores(labels, lambdas, num_classes);
    int best = 0;
    double total = 0.0;
    for (int k = 0; k < static_cast<int>(scores.size()); ++k) {
        total += scores[static_cast<std::size_t>(k)];
        if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(best)]) best = k;
    }
    return IntegrationResult{Label{best}, scores[static_cast<std::size_t>(best)] / total};
}

IntegrationResult integrate_wa(std::span<const Contribution> contribs, Timestamp t_ego,
                               double decay, WaWeights weights) {
    require_nonempty(contribs, "integrate_wa");
    std::vector<Label> labels;
    std::vector<double> lambdas;
    labels.reserve(contribs.size());
    lambdas.reserve(contribs.size());
    for (const auto& c : contribs) {
        labels.push_back(c.label);
        lambdas.push_back(weights.a * freshness(t_ego, c.time, decay) + weights.b * c.accuracy);
    }
    return integrate_wa_lambdas(labels, lambdas);
}

IntegrationResult integrate(IntegrationMethod method, std::span<const Contribution> contribs,
                            Timestamp t_ego, double decay, WaWeights weights) {
    switch (method) {
        case IntegrationMethod::MV: return integrate_mv(contribs);
        case IntegrationMethod::WMV:
            return integrate_wmv(contribs, t_ego, decay, WmvVariant::Product);
        case IntegrationMethod::WMVLikelihood:
            return integrate_wmv(contribs, t_ego, decay, WmvVariant::Likelihood);
        case IntegrationMethod::WA: return integrate_wa(contribs, t_ego, decay, weights);
    }
    throw InternalError("unhandled IntegrationMethod");
}

double labeling_accuracy(std::span<const Label> aggregates, std::span<const Label> ground_truth) {
    if (aggregates.empty() || aggregates.size() != ground_truth.size()) {
        throw ValidationError("labeling_accuracy: need equal non-zero label counts, got " +
                              std::to_string(aggregates.size()) + " and " +
                              std::to_string(ground_truth.size()));
    }
    int hits = 0;
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
        if (aggregates[i] == ground_truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(aggregates.size());
}

}  // namespace coopal
