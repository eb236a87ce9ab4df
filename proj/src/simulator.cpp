#include "coopal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coopal/error.hpp"
#include "coopal/rng.hpp"

namespace coopal {

void LoadModel::validate() const {
    if (label_bytes == 0) throw ValidationError("load_model.label_bytes must be > 0");
    if (feature_bytes_per_dim == 0) {
        throw ValidationError("load_model.feature_bytes_per_dim must be > 0");
    }
}

Dataset DatasetSource::load() const {
    if (!csv_path.empty()) {
        return load_csv(csv_path, LabelColumn::from_string(label_column), has_header,
                        min_max_scale);
    }
    return synthesize(classes, features, per_class, spread, seed);
}

std::vector<ProfileSpec> RunSpec::default_profiles() {
    return {
        ProfileSpec{ClassifierKind::tree_fine(), 0.05},
        ProfileSpec{ClassifierKind::tree_medium(), 0.10},
        ProfileSpec{ClassifierKind::linear_ovr(), 0.20},
        ProfileSpec{ClassifierKind::kernel_ovr(), 0.10},
        ProfileSpec{ClassifierKind::weighted_knn(), 0.15},
    };
}

void RunSpec::validate() const {
    if (offline_size < 1) throw ValidationError("offline_size must be >= 1");
    if (test_size == 0 || test_size < -1) throw ValidationError("test_size must be >= 1 (or -1 for 20%)");
    if (!(offline_eval_fraction > 0.0) || !(offline_eval_fraction < 1.0)) {
        throw ValidationError("offline_eval_fraction must lie in (0, 1)");
    }
    if (profiles.empty()) throw ValidationError("profiles must not be empty");
    for (const auto& p : profiles) {
        p.kind.validate();
        if (p.data_noise_sigma < 0.0) throw ValidationError("data_noise_sigma must be >= 0");
    }
    if (ego_profile < 0 || ego_profile >= static_cast<int>(profiles.size())) {
        throw ValidationError("ego_profile index out of range");
    }
    if (delta_max < 0.0) throw ValidationError("delta_max must be >= 0");
    if (!(decay > 0.0)) throw ValidationError("decay must be > 0");
    if (!(alpha > 0.0) || alpha > 1.0) throw ValidationError("alpha must lie in (0, 1]");
    if (max_steps < -1) throw ValidationError("max_steps must be >= 0 (or -1 for pool size)");
    if (max_events < -1) throw ValidationError("max_events must be >= 0 (or -1 for all)");
    load.validate();
}

FleetTopology build_topology(std::vector<FleetVehicle> vehicles, int num_segments,
                             double delta_max, std::uint64_t seed) {
    if (vehicles.empty()) throw ValidationError("build_topology: need at least the ego vehicle");
    if (num_segments < 0) throw ValidationError("build_topology: num_segments must be >= 0");
    if (delta_max < 0.0) throw ValidationError("build_topology: delta_max must be >= 0");

    FleetTopology topo;
    topo.ego = std::move(vehicles.front());
    topo.neighbors.assign(std::make_move_iterator(vehicles.begin() + 1),
                          std::make_move_iterator(vehicles.end()));
    topo.seed = seed;

    Rng rng(derive_seed(seed, 0x70B0));
    topo.ego_times.reserve(static_cast<std::size_t>(num_segments));
    topo.neighbor_times.reserve(static_cast<std::size_t>(num_segments));
    for (int s = 0; s < num_segments; ++s) {
        topo.ego_times.push_back(static_cast<Timestamp>(s + 1));
        std::vector<Timestamp> ts;
        ts.reserve(topo.neighbors.size());
        for (std::size_t j = 0; j < topo.neighbors.size(); ++j) {
            // delta in (0, delta_max], so neighbors saw the segment earlier
            const double delta = delta_max * (1.0 - rng.next_double());
            ts.push_back(topo.ego_times.back() - delta);
        }
        topo.neighbor_times.push_back(std::move(ts));
    }
    return topo;
}

CooperationEvent generate_event(const FleetTopology& topology, const FeatureVector& pool_data,
                                Label ground_truth, SegmentId segment, Mode mode) {
    if (segment >= topology.num_segments()) {
        throw ValidationError("generate_event: segment " + std::to_string(segment) +
                              " not scheduled (have " + std::to_string(topology.num_segments()) +
                              ")");
    }
    if (!topology.ego.profile.model) {
        throw ValidationError("generate_event: ego has no trained model");
    }

    CooperationEvent ev;
    ev.segment = segment;
    ev.mode = mode;
    ev.ground_truth = ground_truth;
    ev.ego_sample = Sample{pool_data, topology.ego.profile.model->predict(pool_data),
                           topology.ego_times[segment], kEgoVehicle};

    for (std::size_t j = 0; j < topology.num_neighbors(); ++j) {
        const FleetVehicle& nb = topology.neighbors[j];
        NeighborPayload payload;
        payload.source = static_cast<VehicleId>(j + 1);
        payload.time = topology.neighbor_times[segment][j];
        if (mode == Mode::Labels || mode == Mode::Samples) {
            payload.label = nb.profile.model->predict(pool_data);
        }
        if (mode == Mode::Data || mode == Mode::Samples) {
            // per-(segment, neighbor) stream keeps views identical across modes
            Rng noise(derive_seed(derive_seed(topology.seed, 0xDA7A000ULL + segment), j));
            FeatureVector view = pool_data;
            for (auto& v : view) v += nb.data_noise_sigma * noise.next_normal();
            payload.view = std::move(view);
        }
        ev.neighbor_payloads.push_back(std::move(payload));
    }
    return ev;
}

std::vector<Contribution> event_contributions(const CooperationEvent& event,
                                              const FleetTopology& topology) {
    std::vector<Contribution> contribs;
    contribs.reserve(event.neighbor_payloads.size() + 1);
    contribs.push_back(Contribution{kEgoVehicle, event.ego_sample.label, event.ego_sample.time,
                                    topology.ego.profile.offline_accuracy});
    for (const auto& payload : event.neighbor_payloads) {
        if (event.mode == Mode::Data) {
            // ego labels the received view with its own model
            contribs.push_back(Contribution{payload.source,
                                            topology.ego.profile.model->predict(*payload.view),
                                            payload.time, topology.ego.profile.offline_accuracy});
        } else {
            const FleetVehicle& nb = topology.neighbors[payload.source - 1];
            contribs.push_back(Contribution{payload.source, *payload.label, payload.time,
                                            nb.profile.offline_accuracy});
        }
    }
    return contribs;
}

std::vector<FeatureVector> event_training_vectors(const CooperationEvent& event) {
    std::vector<FeatureVector> vectors;
    vectors.push_back(event.ego_sample.data);
    if (event.mode != Mode::Labels) {
        for (const auto& payload : event.neighbor_payloads) vectors.push_back(*payload.view);
    }
    return vectors;
}

std::uint64_t account_load(const CooperationEvent& event, Mode mode, const LoadModel& load) {
    const std::uint64_t neighbors = event.neighbor_payloads.size();
    const std::uint64_t feature_bytes =
        static_cast<std::uint64_t>(event.ego_sample.data.size()) * load.feature_bytes_per_dim;
    std::uint64_t per_neighbor = load.header_bytes;
    switch (mode) {
        case Mode::Labels: per_neighbor += load.label_bytes; break;
        case Mode::Data: per_neighbor += feature_bytes; break;
        case Mode::Samples: per_neighbor += load.label_bytes + feature_bytes; break;
    }
    return neighbors * per_neighbor;
}

namespace {

// Stratified eval/train split of the offline history; the eval part feeds
// the A_j measurement.
void split_offline(const Dataset& ds, const std::vector<std::size_t>& offline, double eval_fraction,
                   std::vector<TrainingExample>& train, std::vector<TrainingExample>& eval) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.num_classes));
    for (const std::size_t i : offline) {
        by_class[static_cast<std::size_t>(ds.labels[i].class_index)].push_back(i);
    }
    for (const auto& members : by_class) {
        const int n = static_cast<int>(members.size());
        int take = static_cast<int>(std::lround(eval_fraction * n));
        take = std::clamp(take, n > 1 ? 1 : 0, n > 1 ? n - 1 : 0);
        for (int i = 0; i < n; ++i) {
            auto ex = std::make_pair(ds.features[members[static_cast<std::size_t>(i)]],
                                     ds.labels[members[static_cast<std::size_t>(i)]]);
            if (i < take) {
                eval.push_back(std::move(ex));
            } else {
                train.push_back(std::move(ex));
            }
        }
    }
    if (eval.empty() || train.size() < 2) {
        throw ValidationError("offline history too small to split for accuracy measurement");
    }
}

}  // namespace

RunMetrics run_experiment(const RunSpec& spec) {
    spec.validate();

    const Dataset ds = spec.dataset.load();
    const int test_size =
        spec.test_size > 0 ? spec.test_size : std::max(1, static_cast<int>(ds.size() / 5));
    const Partition part =
        make_partition(ds, spec.offline_size, test_size, derive_seed(spec.seed, 10));

    std::vector<TrainingExample> offline_train;
    std::vector<TrainingExample> offline_eval;
    split_offline(ds, part.offline, spec.offline_eval_fraction, offline_train, offline_eval);

    // one vehicle per profile spec; ego first, then neighbors in spec order
    std::vector<FleetVehicle> vehicles;
    std::vector<double> accuracies(spec.profiles.size(), 0.0);
    vehicles.reserve(spec.profiles.size());
    {
        std::vector<FleetVehicle> all;
        for (std::size_t p = 0; p < spec.profiles.size(); ++p) {
            FleetVehicle v;
            v.data_noise_sigma = spec.profiles[p].data_noise_sigma;
            v.profile.kind = spec.profiles[p].kind;
            v.profile.model =
                train(spec.profiles[p].kind, offline_train, derive_seed(spec.seed, 20 + p));
            v.profile.offline_accuracy = measure_accuracy(*v.profile.model, offline_eval);
            accuracies[p] = v.profile.offline_accuracy;
            all.push_back(std::move(v));
        }
        vehicles.push_back(std::move(all[static_cast<std::size_t>(spec.ego_profile)]));
        vehicles.front().profile.id = kEgoVehicle;
        VehicleId next_id = 1;
        for (std::size_t p = 0; p < all.size(); ++p) {
            if (static_cast<int>(p) == spec.ego_profile) continue;
            all[p].profile.id = next_id++;
            vehicles.push_back(std::move(all[p]));
        }
    }

    std::size_t num_events = part.online_pool.size();
    if (spec.max_events >= 0) num_events = std::min(num_events, static_cast<std::size_t>(spec.max_events));

    const FleetTopology topo = build_topology(std::move(vehicles), static_cast<int>(num_events),
                                              spec.delta_max, derive_seed(spec.seed, 30));

    std::vector<AggregatedSample> candidates;
    std::vector<Label> truths;
    std::vector<std::uint64_t> event_bytes;
    candidates.reserve(num_events);
    for (std::size_t s = 0; s < num_events; ++s) {
        const std::size_t row = part.online_pool[s];
        const CooperationEvent ev = generate_event(topo, ds.features[row], ds.labels[row],
                                                   static_cast<SegmentId>(s), spec.mode);
        const auto contribs = event_contributions(ev, topo);
        const IntegrationResult res = integrate(spec.method, contribs, ev.ego_sample.time,
                                                spec.decay, spec.wa_weights);
        candidates.push_back(AggregatedSample{event_training_vectors(ev), res.label, res.quality,
                                              spec.method});
        truths.push_back(ev.ground_truth);
        event_bytes.push_back(account_load(ev, spec.mode, spec.load));
    }

    double la = 0.0;
    if (!candidates.empty()) {
        std::vector<Label> agg;
        agg.reserve(candidates.size());
        for (const auto& c : candidates) agg.push_back(c.label);
        la = labeling_accuracy(agg, truths);
    }

    std::vector<TrainingExample> test_set;
    test_set.reserve(part.test.size());
    for (const std::size_t i : part.test) test_set.emplace_back(ds.features[i], ds.labels[i]);

    RunMetrics metrics;
    metrics.offline_accuracies = accuracies;

    const auto make_row = [&](int step, double acc, std::uint64_t bytes) {
        MetricsRow row;
        row.step = step;
        row.online_size = step;
        row.mode = spec.mode;
        row.method = spec.method;
        row.policy = spec.policy;
        row.seed = spec.seed;
        row.labeling_accuracy = la;
        row.classification_accuracy = acc;
        row.cum_bytes = bytes;
        return row;
    };

    const double offline_accuracy = measure_accuracy(*topo.ego.profile.model, test_set);
    metrics.rows.push_back(make_row(0, offline_accuracy, 0));

    if (candidates.empty() || spec.max_steps == 0) return metrics;

    CandidatePool pool(std::move(candidates));
    TrainingSet training;
    training.base = offline_train;
    metrics.outcome = run_selection(spec.policy, pool, topo.ego.profile, training, test_set,
                                    spec.alpha, spec.max_steps, derive_seed(spec.seed, 40));

    std::uint64_t cum_bytes = 0;
    for (const SelectionStep& step : metrics.outcome.trajectory) {
        cum_bytes += event_bytes[step.candidate_index];
        metrics.rows.push_back(make_row(step.online_size, step.accuracy, cum_bytes));
    }
    return metrics;
}

}  // namespace coopal
