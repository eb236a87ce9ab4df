#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coopal/types.hpp"

namespace coopal {

// Immutable tabular classification dataset. Labels are dense indices into
// class_names, assigned in first-appearance order by the loader.
struct Dataset {
    std::vector<FeatureVector> features;
    std::vector<Label> labels;
    int num_classes = 0;
    int num_features = 0;
    std::vector<std::string> class_names;

    std::size_t size() const { return features.size(); }
};

// Disjoint index sets over a Dataset: offline history (M), selection pool,
// and the held-out test set (Omega).
struct Partition {
    std::vector<std::size_t> offline;
    std::vector<std::size_t> online_pool;
    std::vector<std::size_t> test;
};

// Label column addressed either by zero-based index or by header name.
struct LabelColumn {
    int index = -1;        // used when name is empty
    std::string name;      // requires has_header

    static LabelColumn by_index(int i) { return LabelColumn{i, {}}; }
    static LabelColumn by_name(std::string n) { return LabelColumn{-1, std::move(n)}; }
    // "3" -> index 3, anything else -> name
    static LabelColumn from_string(const std::string& s);
};

Dataset load_csv(const std::string& path, const LabelColumn& label_column,
                 bool has_header = true, bool min_max_scale = false);

void write_csv(const Dataset& ds, const std::string& path, bool with_header = true);

// Gaussian class clusters with distinct per-class means; `spread` is the
// per-dimension standard deviation. Deterministic for a fixed seed.
Dataset synthesize(int num_classes, int num_features, int per_class, double spread,
                   std::uint64_t seed);

// Stratified disjoint split: offline gets M, test gets Omega, the remainder
// becomes the online pool. Deterministic per seed.
Partition make_partition(const Dataset& ds, int offline_size, int test_size,
                         std::uint64_t seed);

// Single-sample CSV form used for persisting samples with their timestamps:
// f0,...,f{d-1},label_index,time,source. Doubles round-trip bit-exactly.
std::string format_sample_row(const Sample& s);
Sample parse_sample_row(const std::string& row, int num_features, int num_classes);

}  // namespace coopal
