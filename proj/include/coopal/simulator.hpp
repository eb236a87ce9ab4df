#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopal/classifiers.hpp"
#include "coopal/dataset.hpp"
#include "coopal/integration.hpp"
#include "coopal/selection.hpp"
#include "coopal/types.hpp"

namespace coopal {

// Bytes received at the ego per payload item.
struct LoadModel {
    std::uint64_t label_bytes = 8;
    std::uint64_t feature_bytes_per_dim = 8;
    std::uint64_t header_bytes = 16;

    void validate() const;
};

// A neighbor's classifier plus the data-mode noise level of its sensor view.
struct FleetVehicle {
    LabelerProfile profile;
    double data_noise_sigma = 0.1;
};

// Ego plus neighbors with per-(segment, vehicle) observation times. Neighbors
// always observed a segment strictly before the ego reaches it, so their
// freshness is positive.
struct FleetTopology {
    FleetVehicle ego;
    std::vector<FleetVehicle> neighbors;
    std::vector<Timestamp> ego_times;                    // per segment, increasing
    std::vector<std::vector<Timestamp>> neighbor_times;  // [segment][neighbor]
    std::uint64_t seed = 0;

    std::size_t num_segments() const { return ego_times.size(); }
    std::size_t num_neighbors() const { return neighbors.size(); }
};

// What one neighbor shipped for one event; which fields are set depends on
// the mode (Labels -> label, Data -> view, Samples -> both).
struct NeighborPayload {
    VehicleId source = 0;
    Timestamp time = 0.0;
    std::optional<Label> label;
    std::optional<FeatureVector> view;
};

struct CooperationEvent {
    SegmentId segment = 0;
    Mode mode = Mode::Labels;
    Sample ego_sample;
    std::vector<NeighborPayload> neighbor_payloads;
    Label ground_truth{0};  // used only by metrics, never by learners
};

struct MetricsRow {
    int step = 0;
    int online_size = 0;
    Mode mode = Mode::Labels;
    IntegrationMethod method = IntegrationMethod::WA;
    SelectionPolicy policy = SelectionPolicy::QDS;
    std::uint64_t seed = 0;
    double labeling_accuracy = 0.0;
    double classification_accuracy = 0.0;
    std::uint64_t cum_bytes = 0;
};

struct RunMetrics {
    std::vector<MetricsRow> rows;
    SelectionOutcome outcome;
    std::vector<double> offline_accuracies;  // A_j per profile, ego included
};

// Dataset source: a CSV file or synthetic generation parameters.
struct DatasetSource {
    std::string csv_path;  // empty -> synthetic
    std::string label_column = "-1";  // index or header name; -1 = last column
    bool has_header = true;
    bool min_max_scale = false;

    int classes = 4;
    int features = 18;
    int per_class = 200;
    double spread = 1.0;
    std::uint64_t seed = 7;

    Dataset load() const;
};

struct ProfileSpec {
    ClassifierKind kind;
    double data_noise_sigma = 0.1;
};

// Everything one deterministic run needs. The cli module builds these from a
// RunConfig, one per (mode, method, policy, seed) grid cell.
struct RunSpec {
    DatasetSource dataset;
    int offline_size = 100;            // M
    int test_size = -1;                // Omega; -1 = 20% of the dataset
    double offline_eval_fraction = 0.25;
    std::vector<ProfileSpec> profiles;
    int ego_profile = 4;
    double delta_max = 2.0;
    Mode mode = Mode::Labels;
    IntegrationMethod method = IntegrationMethod::WA;
    WaWeights wa_weights;
    double decay = 1.0;
    SelectionPolicy policy = SelectionPolicy::QDS;
    double alpha = 0.95;
    int max_steps = -1;                // -1 = pool size
    int max_events = -1;               // -1 = whole online pool
    LoadModel load;
    std::uint64_t seed = 1;

    static std::vector<ProfileSpec> default_profiles();
    void validate() const;
};

FleetTopology build_topology(std::vector<FleetVehicle> vehicles /* [0] = ego */, int num_segments,
                             double delta_max, std::uint64_t seed);

// One road-segment event for one pool sample under the given mode. Noise for
// data views is derived from (topology seed, segment, neighbor), so payloads
// replay identically across modes.
CooperationEvent generate_event(const FleetTopology& topology, const FeatureVector& pool_data,
                                Label ground_truth, SegmentId segment, Mode mode);

// The label votes available to the ego for integration.
std::vector<Contribution> event_contributions(const CooperationEvent& event,
                                              const FleetTopology& topology);

// The feature vectors available at the ego for training (ego view plus, in
// data/samples mode, every received view).
std::vector<FeatureVector> event_training_vectors(const CooperationEvent& event);

std::uint64_t account_load(const CooperationEvent& event, Mode mode, const LoadModel& load);

RunMetrics run_experiment(const RunSpec& spec);

}  // namespace coopal
