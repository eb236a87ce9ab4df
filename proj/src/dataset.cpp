#include "coopal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "coopal/error.hpp"
#include "coopal/rng.hpp"

namespace coopal {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& what) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\r')) --last;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric " + what + " '" +
                         cell + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

}  // namespace

LabelColumn LabelColumn::from_string(const std::string& s) {
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return by_index(std::stoi(s));
    }
    return by_name(s);
}

Dataset load_csv(const std::string& path, const LabelColumn& label_column, bool has_header,
                 bool min_max_scale) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open '" + path + "'");

    std::string line;
    std::size_t line_no = 0;
    int label_idx = label_column.index;

    if (has_header) {
        if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");
        ++line_no;
        const auto header = split_row(line);
        if (!label_column.name.empty()) {
            label_idx = -1;
            for (std::size_t c = 0; c < header.size(); ++c) {
                if (trim(header[c]) == label_column.name) {
                    label_idx = static_cast<int>(c);
                    break;
                }
            }
            if (label_idx < 0) {
                throw ParseError("'" + path + "': label column '" + label_column.name +
                                 "' not found in header");
            }
        }
    } else if (!label_column.name.empty()) {
        throw ValidationError("label column by name requires a header row");
    }

    Dataset ds;
    std::unordered_map<std::string, int> name_to_index;
    std::size_t arity = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (arity == 0) {
            arity = cells.size();
            if (arity < 2) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": need at least one feature and a label column");
            }
            if (label_idx < 0) label_idx = static_cast<int>(arity) - 1;
            if (label_idx >= static_cast<int>(arity)) {
                throw ParseError("label column index " + std::to_string(label_idx) +
                                 " out of range for " + std::to_string(arity) + " columns");
            }
            ds.num_features = static_cast<int>(arity) - 1;
        } else if (cells.size() != arity) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(arity) + " columns, got " +
                             std::to_string(cells.size()));
        }

        FeatureVector x;
        x.reserve(arity - 1);
        for (std::size_t c = 0; c < arity; ++c) {
            if (static_cast<int>(c) == label_idx) continue;
            x.push_back(parse_number(cells[c], line_no, "feature"));
        }

        const std::string name = trim(cells[static_cast<std::size_t>(label_idx)]);
        auto [it, inserted] = name_to_index.try_emplace(name, ds.num_classes);
        if (inserted) {
            ++ds.num_classes;
            ds.class_names.push_back(name);
        }
        ds.features.push_back(std::move(x));
        ds.labels.push_back(Label{it->second});
    }

    if (ds.features.empty()) throw ParseError("'" + path + "': no data rows");
    if (ds.num_classes < 2) {
        throw ParseError("'" + path + "': need at least 2 classes, found " +
                         std::to_string(ds.num_classes));
    }

    if (min_max_scale) {
        const int d = ds.num_features;
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (const auto& x : ds.features) {
            for (int f = 0; f < d; ++f) {
                lo[f] = std::min(lo[f], x[f]);
                hi[f] = std::max(hi[f], x[f]);
            }
        }
        for (auto& x : ds.features) {
            for (int f = 0; f < d; ++f) {
                const double range = hi[f] - lo[f];
                x[f] = range > 0.0 ? (x[f] - lo[f]) / range : 0.0;
            }
        }
    }
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path, bool with_header) {
    std::ofstream out(path);
    if (!out.is_open()) throw IoError("cannot write '" + path + "'");
    if (with_header) {
        for (int f = 0; f < ds.num_features; ++f) out << 'f' << f << ',';
        out << "class\n";
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (const double v : ds.features[i]) out << format_double(v) << ',';
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i].class_index)] << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

Dataset synthesize(int num_classes, int num_features, int per_class, double spread,
                   std::uint64_t seed) {
    if (num_classes < 2) throw ValidationError("synthesize: num_classes must be >= 2");
    if (num_features < 1) throw ValidationError("synthesize: num_features must be >= 1");
    if (per_class < 1) throw ValidationError("synthesize: per_class must be >= 1");
    if (!(spread > 0.0)) throw ValidationError("synthesize: spread must be > 0");

    constexpr double kMeanRange = 4.0;

    Rng mean_rng(derive_seed(seed, 1));
    std::vector<FeatureVector> means(static_cast<std::size_t>(num_classes));
    for (int k = 0; k < num_classes; ++k) {
        auto& mu = means[static_cast<std::size_t>(k)];
        mu.resize(static_cast<std::size_t>(num_features));
        for (auto& v : mu) v = kMeanRange * mean_rng.next_double();
        // guarantee distinct means even in tiny dimensions
        mu[0] += static_cast<double>(k) * 1e-6;
    }

    Dataset ds;
    ds.num_classes = num_classes;
    ds.num_features = num_features;
    for (int k = 0; k < num_classes; ++k) ds.class_names.push_back("class_" + std::to_string(k));
    ds.features.reserve(static_cast<std::size_t>(num_classes) * per_class);
    ds.labels.reserve(ds.features.capacity());

    Rng noise_rng(derive_seed(seed, 2));
    for (int k = 0; k < num_classes; ++k) {
        for (int n = 0; n < per_class; ++n) {
            FeatureVector x(static_cast<std::size_t>(num_features));
            for (int f = 0; f < num_features; ++f) {
                x[static_cast<std::size_t>(f)] =
                    means[static_cast<std::size_t>(k)][static_cast<std::size_t>(f)] +
                    spread * noise_rng.next_normal();
            }
            ds.features.push_back(std::move(x));
            ds.labels.push_back(Label{k});
        }
    }
    return ds;
}

namespace {

// Largest-remainder apportionment of `total` across class counts, capped by
// availability; any shortfall spills to classes that still have capacity.
std::vector<int> stratified_counts(const std::vector<int>& available, int total) {
    const int classes = static_cast<int>(available.size());
    const double pool = static_cast<double>(std::accumulate(available.begin(), available.end(), 0));
    std::vector<int> take(static_cast<std::size_t>(classes), 0);
    if (pool <= 0.0 || total <= 0) return take;

    std::vector<double> remainder(static_cast<std::size_t>(classes), 0.0);
    int assigned = 0;
    for (int k = 0; k < classes; ++k) {
        const double exact = total * available[static_cast<std::size_t>(k)] / pool;
        take[static_cast<std::size_t>(k)] =
            std::min(available[static_cast<std::size_t>(k)], static_cast<int>(exact));
        remainder[static_cast<std::size_t>(k)] = exact - std::floor(exact);
        assigned += take[static_cast<std::size_t>(k)];
    }
    while (assigned < total) {
        int best = -1;
        for (int k = 0; k < classes; ++k) {
            if (take[static_cast<std::size_t>(k)] >= available[static_cast<std::size_t>(k)]) continue;
            if (best < 0 || remainder[static_cast<std::size_t>(k)] >
                                remainder[static_cast<std::size_t>(best)]) {
                best = k;
            }
        }
        if (best < 0) break;  // every class exhausted
        ++take[static_cast<std::size_t>(best)];
        remainder[static_cast<std::size_t>(best)] = -1.0;
        ++assigned;
    }
    return take;
}

}  // namespace

Partition make_partition(const Dataset& ds, int offline_size, int test_size, std::uint64_t seed) {
    if (offline_size < 1) throw ValidationError("partition: offline_size must be >= 1");
    if (test_size < 1) throw ValidationError("partition: test_size must be >= 1");
    if (static_cast<std::size_t>(offline_size) + static_cast<std::size_t>(test_size) > ds.size()) {
        throw ValidationError("partition: offline_size + test_size = " +
                              std::to_string(offline_size + test_size) + " exceeds dataset size " +
                              std::to_string(ds.size()));
    }

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.num_classes));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_class[static_cast<std::size_t>(ds.labels[i].class_index)].push_back(i);
    }
    Rng rng(derive_seed(seed, 3));
    for (auto& idx : by_class) rng.shuffle(idx);

    std::vector<int> available(by_class.size());
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        available[k] = static_cast<int>(by_class[k].size());
    }
    const std::vector<int> offline_take = stratified_counts(available, offline_size);
    std::vector<int> left(available);
    for (std::size_t k = 0; k < left.size(); ++k) left[k] -= offline_take[k];
    const std::vector<int> test_take = stratified_counts(left, test_size);

    Partition p;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        const auto& idx = by_class[k];
        std::size_t cur = 0;
        for (int n = 0; n < offline_take[k]; ++n) p.offline.push_back(idx[cur++]);
        for (int n = 0; n < test_take[k]; ++n) p.test.push_back(idx[cur++]);
        while (cur < idx.size()) p.online_pool.push_back(idx[cur++]);
    }
    // deterministic presentation order independent of class grouping
    Rng order_rng(derive_seed(seed, 4));
    order_rng.shuffle(p.offline);
    order_rng.shuffle(p.test);
    order_rng.shuffle(p.online_pool);
    return p;
}

std::string format_sample_row(const Sample& s) {
    std::string row;
    for (const double v : s.data) {
        row += format_double(v);
        row += ',';
    }
    row += std::to_string(s.label.class_index);
    row += ',';
    row += format_double(s.time);
    row += ',';
    row += std::to_string(s.source);
    return row;
}

Sample parse_sample_row(const std::string& row, int num_features, int num_classes) {
    const auto cells = split_row(row);
    const std::size_t expected = static_cast<std::size_t>(num_features) + 3;
    if (cells.size() != expected) {
        throw ParseError("sample row: expected " + std::to_string(expected) + " cells, got " +
                         std::to_string(cells.size()));
    }
    Sample s;
    s.data.reserve(static_cast<std::size_t>(num_features));
    for (int f = 0; f < num_features; ++f) {
        s.data.push_back(parse_number(cells[static_cast<std::size_t>(f)], 1, "feature"));
    }
    const int label = static_cast<int>(parse_number(cells[cells.size() - 3], 1, "label"));
    s.label = label_from_index(label, num_classes);
    s.time = parse_number(cells[cells.size() - 2], 1, "time");
    s.source = static_cast<VehicleId>(parse_number(cells[cells.size() - 1], 1, "source"));
    return s;
}

}  // namespace coopal
