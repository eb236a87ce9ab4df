#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "coopal/error.hpp"

namespace coopal {

using VehicleId = std::uint32_t;
using SegmentId = std::uint32_t;

// The ego vehicle is always id 0; neighbors are 1..J.
inline constexpr VehicleId kEgoVehicle = 0;

// Dense class index in [0, K). The dataset loader owns the name<->index map.
struct Label {
    int class_index = 0;

    friend auto operator<=>(const Label&, const Label&) = default;
};

using FeatureVector = std::vector<double>;

// Unitless simulation time; freshness decay fixes the scale.
using Timestamp = double;

struct Sample {
    FeatureVector data;
    Label label;
    Timestamp time = 0.0;
    VehicleId source = kEgoVehicle;
};

// What neighbors transmit: labels only, raw data only, or both.
enum class Mode { Labels, Data, Samples };

inline Label label_from_index(int k, int num_classes) {
    if (k < 0 || k >= num_classes) {
        throw ValidationError("label index " + std::to_string(k) + " out of range [0, " +
                              std::to_string(num_classes) + ")");
    }
    return Label{k};
}

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Labels: return "labels";
        case Mode::Data: return "data";
        case Mode::Samples: return "samples";
    }
    throw InternalError("unhandled Mode");
}

inline Mode mode_from_name(const std::string& name) {
    if (name == "labels") return Mode::Labels;
    if (name == "data") return Mode::Data;
    if (name == "samples") return Mode::Samples;
    throw ValidationError("unknown mode '" + name + "' (expected labels|data|samples)");
}

}  // namespace coopal
