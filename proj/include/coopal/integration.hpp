#pragma once

#include <span>
#include <string>
#include <vector>

#include "coopal/types.hpp"

namespace coopal {

// One labeler's vote for an event: its label, when it observed the segment,
// and its measured offline accuracy A_j.
struct Contribution {
    VehicleId labeler = 0;
    Label label{0};
    Timestamp time = 0.0;
    double accuracy = 0.0;
};

enum class IntegrationMethod { MV, WMV, WMVLikelihood, WA };

const char* integration_method_name(IntegrationMethod m);
IntegrationMethod integration_method_from_name(const std::string& name);

enum class WmvVariant { Product, Likelihood };

// Relative importance of freshness (a) vs labeler accuracy (b) in WA;
// normalized so a + b = 1.
struct WaWeights {
    double a = 0.5;
    double b = 0.5;

    static WaWeights make(double a, double b);
};

struct IntegrationResult {
    Label label{0};
    double quality = 0.0;  // in [0, 1]
};

// The event as stored in the candidate pool: all data vectors available at
// the ego, the integrated label, and its quality indicator.
struct AggregatedSample {
    std::vector<FeatureVector> data;
    Label label{0};
    double quality = 0.0;
    IntegrationMethod method = IntegrationMethod::MV;
};

// A label with its correctness probability p = f * A.
struct WeightedVote {
    Label label{0};
    double p = 0.0;
};

// exp(-(t_ego - t_j)/decay) for strictly past data, otherwise 0.
double freshness(Timestamp t_ego, Timestamp t_j, double decay);

double correctness_probability(double freshness, double accuracy);

IntegrationResult integrate_mv(std::span<const Contribution> contribs);

// Weighted majority voting over explicit correctness probabilities.
// Product takes the per-class product of its voters' p; Likelihood sums
// clamped log-odds. Votes with p <= 0 cannot make their class a candidate.
IntegrationResult integrate_wmv_votes(std::span<const WeightedVote> votes, WmvVariant variant);

// Same, with p computed from each contribution's freshness and accuracy.
IntegrationResult integrate_wmv(std::span<const Contribution> contribs, Timestamp t_ego,
                                double decay, WmvVariant variant);

// Weighted average over explicit per-vote weighting coefficients lambda.
IntegrationResult integrate_wa_lambdas(std::span<const Label> labels,
                                       std::span<const double> lambdas);

// Same, with lambda = a * freshness + b * accuracy per contribution.
IntegrationResult integrate_wa(std::span<const Contribution> contribs, Timestamp t_ego,
                               double decay, WaWeights weights);

IntegrationResult integrate(IntegrationMethod method, std::span<const Contribution> contribs,
                            Timestamp t_ego, double decay, WaWeights weights);

// Fraction of aggregate labels matching ground truth.
double labeling_accuracy(std::span<const Label> aggregates, std::span<const Label> ground_truth);

namespace detail {

// Per-class sums of exp(lambda); exposed so the argmax invariance under a
// common shift of all lambdas is testable directly.
std::vector<double> wa_class_scores(std::span<const Label> labels, std::span<const double> lambdas,
                                    int num_classes);

}  // namespace detail

}  // namespace coopal
