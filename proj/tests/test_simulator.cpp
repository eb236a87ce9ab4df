#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "coopal/error.hpp"
#include "coopal/integration.hpp"
#include "coopal/simulator.hpp"

using namespace coopal;

namespace {

// Four neighbors plus the ego, all trained on one small separable dataset.
std::vector<FleetVehicle> make_fleet(std::uint64_t seed, double spread = 0.3,
                                     std::size_t vehicles = 5) {
    const Dataset ds = synthesize(4, 6, 30, spread, 11);
    const Partition p = make_partition(ds, 60, 30, seed);
    std::vector<TrainingExample> offline;
    for (const std::size_t i : p.offline) offline.emplace_back(ds.features[i], ds.labels[i]);
    std::vector<TrainingExample> eval;
    for (const std::size_t i : p.test) eval.emplace_back(ds.features[i], ds.labels[i]);

    const std::vector<ClassifierKind> kinds = {
        ClassifierKind::weighted_knn(3), ClassifierKind::tree_fine(), ClassifierKind::tree_medium(),
        ClassifierKind::linear_ovr(), ClassifierKind::kernel_ovr()};
    std::vector<FleetVehicle> fleet;
    for (std::size_t v = 0; v < vehicles; ++v) {
        FleetVehicle fv;
        fv.profile.id = static_cast<VehicleId>(v);
        fv.profile.kind = kinds[v % kinds.size()];
        fv.profile.model = train(fv.profile.kind, offline, seed + v);
        fv.profile.offline_accuracy = measure_accuracy(*fv.profile.model, eval);
        fv.data_noise_sigma = 0.1 * static_cast<double>(v);
        fleet.push_back(std::move(fv));
    }
    return fleet;
}

RunSpec small_spec(std::uint64_t seed) {
    RunSpec spec;
    spec.dataset.classes = 4;
    spec.dataset.features = 6;
    spec.dataset.per_class = 40;
    spec.dataset.spread = 0.8;
    spec.dataset.seed = 11;
    spec.offline_size = 40;
    spec.test_size = 40;
    spec.profiles = RunSpec::default_profiles();
    spec.ego_profile = 4;
    spec.max_events = 30;
    spec.max_steps = 10;
    spec.alpha = 1.0;
    spec.seed = seed;
    return spec;
}

FeatureVector probe_vector() { return FeatureVector{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}; }

}  // namespace

TEST_CASE("build_topology keeps neighbor observations strictly in the past") {
    auto fleet = make_fleet(1);
    const FleetTopology topo = build_topology(std::move(fleet), 50, 2.0, 9);
    REQUIRE(topo.num_segments() == 50);
    REQUIRE(topo.num_neighbors() == 4);
    for (std::size_t s = 0; s < topo.num_segments(); ++s) {
        if (s > 0) CHECK(topo.ego_times[s] > topo.ego_times[s - 1]);
        for (std::size_t j = 0; j < topo.num_neighbors(); ++j) {
            const double f = freshness(topo.ego_times[s], topo.neighbor_times[s][j], 1.0);
            CHECK(f >= std::exp(-2.0));
            CHECK(f < 1.0);
            CHECK(f > 0.0);
        }
    }
}

TEST_CASE("a tiny delta_max makes every contribution almost fresh") {
    auto fleet = make_fleet(1);
    const FleetTopology topo = build_topology(std::move(fleet), 20, 1e-9, 9);
    for (std::size_t s = 0; s < topo.num_segments(); ++s) {
        for (std::size_t j = 0; j < topo.num_neighbors(); ++j) {
            CHECK(freshness(topo.ego_times[s], topo.neighbor_times[s][j], 1.0) ==
                  doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("build_topology is deterministic per seed and rejects negative delta") {
    const FleetTopology a = build_topology(make_fleet(1), 20, 2.0, 9);
    const FleetTopology b = build_topology(make_fleet(1), 20, 2.0, 9);
    CHECK(a.neighbor_times == b.neighbor_times);
    CHECK(a.ego_times == b.ego_times);
    const FleetTopology c = build_topology(make_fleet(1), 20, 2.0, 10);
    CHECK(a.neighbor_times != c.neighbor_times);
    CHECK_THROWS_AS(build_topology(make_fleet(1), 20, -0.5, 9), ValidationError);
}

TEST_CASE("labels mode ships exactly one label per neighbor") {
    const FleetTopology topo = build_topology(make_fleet(1), 10, 2.0, 9);
    const CooperationEvent ev = generate_event(topo, probe_vector(), Label{0}, 3, Mode::Labels);
    REQUIRE(ev.neighbor_payloads.size() == 4);
    for (const auto& p : ev.neighbor_payloads) {
        CHECK(p.label.has_value());
        CHECK_FALSE(p.view.has_value());
    }
    // plus the ego's own sample
    CHECK(ev.ego_sample.source == kEgoVehicle);
    const auto contribs = event_contributions(ev, topo);
    CHECK(contribs.size() == 5);
}

TEST_CASE("data mode with zero noise ships the ego's own view") {
    auto fleet = make_fleet(1);
    for (auto& v : fleet) v.data_noise_sigma = 0.0;
    const FleetTopology topo = build_topology(std::move(fleet), 10, 2.0, 9);
    const CooperationEvent ev = generate_event(topo, probe_vector(), Label{0}, 3, Mode::Data);
    for (const auto& p : ev.neighbor_payloads) {
        CHECK_FALSE(p.label.has_value());
        REQUIRE(p.view.has_value());
        CHECK(*p.view == probe_vector());
    }
    CHECK(event_training_vectors(ev).size() == 5);
}

TEST_CASE("samples mode payload is the union of labels and data payloads") {
    const FleetTopology topo = build_topology(make_fleet(1), 10, 2.0, 9);
    const FeatureVector x = probe_vector();
    const CooperationEvent labels_ev = generate_event(topo, x, Label{0}, 5, Mode::Labels);
    const CooperationEvent data_ev = generate_event(topo, x, Label{0}, 5, Mode::Data);
    const CooperationEvent samples_ev = generate_event(topo, x, Label{0}, 5, Mode::Samples);

    REQUIRE(samples_ev.neighbor_payloads.size() == labels_ev.neighbor_payloads.size());
    for (std::size_t j = 0; j < samples_ev.neighbor_payloads.size(); ++j) {
        const auto& s = samples_ev.neighbor_payloads[j];
        REQUIRE(s.label.has_value());
        REQUIRE(s.view.has_value());
        CHECK(*s.label == *labels_ev.neighbor_payloads[j].label);
        CHECK(*s.view == *data_ev.neighbor_payloads[j].view);  // same derived noise stream
    }
}

TEST_CASE("generate_event rejects unscheduled segments") {
    const FleetTopology topo = build_topology(make_fleet(1), 4, 2.0, 9);
    CHECK_THROWS_AS(generate_event(topo, probe_vector(), Label{0}, 4, Mode::Labels),
                    ValidationError);
}

TEST_CASE("account_load follows the declared byte model") {
    const FleetTopology topo = build_topology(make_fleet(1), 10, 2.0, 9);
    LoadModel load;  // defaults: 8 / 8 / 16

    // d = 6 here, so data mode is 4 * (16 + 48)
    const CooperationEvent ev6 = generate_event(topo, probe_vector(), Label{0}, 0, Mode::Labels);
    CHECK(account_load(ev6, Mode::Labels, load) == 4 * (16 + 8));
    CHECK(account_load(ev6, Mode::Data, load) == 4 * (16 + 48));
    CHECK(account_load(ev6, Mode::Samples, load) == 4 * (16 + 8 + 48));

    // the 18-feature scale: -> 640 bytes in data mode
    CooperationEvent ev18 = ev6;
    ev18.ego_sample.data.assign(18, 0.0);
    CHECK(account_load(ev18, Mode::Labels, load) == 96);
    CHECK(account_load(ev18, Mode::Data, load) == 640);

    CooperationEvent no_neighbors = ev6;
    no_neighbors.neighbor_payloads.clear();
    for (const Mode m : {Mode::Labels, Mode::Data, Mode::Samples}) {
        CHECK(account_load(no_neighbors, m, load) == 0);
    }
}

TEST_CASE("mode payload bytes dominate in the expected order") {
    const FleetTopology topo = build_topology(make_fleet(1), 10, 2.0, 9);
    const CooperationEvent ev = generate_event(topo, probe_vector(), Label{0}, 0, Mode::Labels);
    LoadModel load;
    for (const std::uint64_t label_bytes : {1ULL, 8ULL, 48ULL}) {
        load.label_bytes = label_bytes;
        if (load.label_bytes <= 6 * load.feature_bytes_per_dim) {
            CHECK(account_load(ev, Mode::Labels, load) <= account_load(ev, Mode::Data, load));
        }
        CHECK(account_load(ev, Mode::Data, load) <= account_load(ev, Mode::Samples, load));
    }
}

TEST_CASE("run_experiment with zero events yields only the baseline row") {
    RunSpec spec = small_spec(3);
    spec.max_events = 0;
    const RunMetrics m = run_experiment(spec);
    REQUIRE(m.rows.size() == 1);
    CHECK(m.rows[0].step == 0);
    CHECK(m.rows[0].online_size == 0);
    CHECK(m.rows[0].cum_bytes == 0);
    CHECK(m.rows[0].classification_accuracy > 0.0);
}

TEST_CASE("run_experiment is deterministic for a fixed seed") {
    const RunMetrics a = run_experiment(small_spec(7));
    const RunMetrics b = run_experiment(small_spec(7));
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].classification_accuracy == b.rows[i].classification_accuracy);
        CHECK(a.rows[i].labeling_accuracy == b.rows[i].labeling_accuracy);
        CHECK(a.rows[i].cum_bytes == b.rows[i].cum_bytes);
    }
}

TEST_CASE("labels-mode cumulative bytes grow by 96 per step at the 18-feature scale") {
    RunSpec spec = small_spec(5);
    spec.dataset.features = 18;
    spec.dataset.spread = 3.0;  // hard enough that the run cannot stop early
    spec.mode = Mode::Labels;
    const RunMetrics m = run_experiment(spec);
    REQUIRE(m.rows.size() > 3);
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        CHECK(m.rows[i].cum_bytes == 96ULL * i);
    }
}

TEST_CASE("cumulative bytes equal the sum of per-event loads") {
    for (const Mode mode : {Mode::Labels, Mode::Data, Mode::Samples}) {
        RunSpec spec = small_spec(9);
        spec.mode = mode;
        const RunMetrics m = run_experiment(spec);
        const std::uint64_t per_event = [&]() -> std::uint64_t {
            LoadModel load;
            const std::uint64_t feature_bytes = 6 * load.feature_bytes_per_dim;
            switch (mode) {
                case Mode::Labels: return 4 * (load.header_bytes + load.label_bytes);
                case Mode::Data: return 4 * (load.header_bytes + feature_bytes);
                case Mode::Samples:
                    return 4 * (load.header_bytes + load.label_bytes + feature_bytes);
            }
            return 0;
        }();
        for (std::size_t i = 0; i < m.rows.size(); ++i) {
            CHECK(m.rows[i].cum_bytes == per_event * i);
            CHECK(m.rows[i].online_size == static_cast<int>(i));
        }
    }
}

TEST_CASE("freshness stays positive for every generated neighbor contribution") {
    RunSpec spec = small_spec(13);
    spec.delta_max = 2.0;
    const Dataset ds = spec.dataset.load();
    const Partition p = make_partition(ds, spec.offline_size, spec.test_size, 1);
    const FleetTopology topo = build_topology(make_fleet(2), 20, spec.delta_max, 31);
    for (std::size_t s = 0; s < topo.num_segments(); ++s) {
        const CooperationEvent ev =
            generate_event(topo, ds.features[p.online_pool[s]], Label{0},
                           static_cast<SegmentId>(s), Mode::Samples);
        const auto contribs = event_contributions(ev, topo);
        for (std::size_t c = 1; c < contribs.size(); ++c) {  // skip the ego's own
            CHECK(freshness(ev.ego_sample.time, contribs[c].time, 1.0) > 0.0);
        }
    }
}

TEST_CASE("run_experiment validates its spec") {
    RunSpec spec = small_spec(1);
    spec.alpha = 1.5;
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
    spec = small_spec(1);
    spec.ego_profile = 9;
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
    spec = small_spec(1);
    spec.offline_eval_fraction = 1.0;
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
}
