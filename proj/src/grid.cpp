#include "coopal/grid.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "coopal/error.hpp"

namespace coopal {

const char* const kCombinedCsvHeader =
    "step,online_size,mode,method,policy,seed,labeling_accuracy,classification_accuracy,cum_bytes";

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Cell {
    Mode mode;
    IntegrationMethod method;
    SelectionPolicy policy;
    std::vector<RunMetrics> per_seed;

    std::string name() const {
        return std::string(mode_name(mode)) + "_" + integration_method_name(method) + "_" +
               selection_policy_name(policy);
    }
};

unsigned worker_count() {
    if (const char* env = std::getenv("COOPAL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void write_cell_csv(const Cell& cell, const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw IoError("cannot write '" + path + "'");
    out << "step,online_size,mode,method,policy,num_seeds,labeling_accuracy,"
           "classification_accuracy,cum_bytes\n";

    std::size_t max_rows = 0;
    for (const auto& m : cell.per_seed) max_rows = std::max(max_rows, m.rows.size());
    for (std::size_t r = 0; r < max_rows; ++r) {
        int present = 0;
        double la = 0.0, acc = 0.0, bytes = 0.0;
        int step = 0, online = 0;
        for (const auto& m : cell.per_seed) {
            if (r >= m.rows.size()) continue;  // seed terminated earlier
            const MetricsRow& row = m.rows[r];
            ++present;
            step = row.step;
            online = row.online_size;
            la += row.labeling_accuracy;
            acc += row.classification_accuracy;
            bytes += static_cast<double>(row.cum_bytes);
        }
        out << step << ',' << online << ',' << mode_name(cell.mode) << ','
            << integration_method_name(cell.method) << ',' << selection_policy_name(cell.policy)
            << ',' << present << ',' << format_double(la / present) << ','
            << format_double(acc / present) << ',' << format_double(bytes / present) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row) {
    std::string line;
    line += std::to_string(row.step);
    line += ',';
    line += std::to_string(row.online_size);
    line += ',';
    line += mode_name(row.mode);
    line += ',';
    line += integration_method_name(row.method);
    line += ',';
    line += selection_policy_name(row.policy);
    line += ',';
    line += std::to_string(row.seed);
    line += ',';
    line += format_double(row.labeling_accuracy);
    line += ',';
    line += format_double(row.classification_accuracy);
    line += ',';
    line += std::to_string(row.cum_bytes);
    return line;
}

std::vector<std::string> run_grid(const RunConfig& config, const std::string& output_dir) {
    if (config.modes.empty() || config.methods.empty() || config.policies.empty()) {
        throw ValidationError("run_grid: empty grid");
    }
    if (config.seeds.empty()) throw ValidationError("run_grid: no seeds");

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + output_dir + "': " + ec.message());

    std::vector<Cell> cells;
    for (const Mode mode : config.modes) {
        for (const IntegrationMethod method : config.methods) {
            for (const SelectionPolicy policy : config.policies) {
                cells.push_back(Cell{mode, method, policy, {}});
            }
        }
    }
    for (auto& cell : cells) cell.per_seed.resize(config.seeds.size());

    // flatten (cell, seed) into independent work items
    struct Item {
        std::size_t cell;
        std::size_t seed_pos;
    };
    std::vector<Item> items;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t s = 0; s < config.seeds.size(); ++s) items.push_back(Item{c, s});
    }

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(items.size()));

    const auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= items.size()) return;
            const Item item = items[i];
            try {
                const Cell& cell = cells[item.cell];
                const RunSpec spec = config.cell_spec(cell.mode, cell.method, cell.policy,
                                                      config.seeds[item.seed_pos]);
                cells[item.cell].per_seed[item.seed_pos] = run_experiment(spec);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                cursor.store(items.size());
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<std::string> written;
    for (const Cell& cell : cells) {
        const std::string path = output_dir + "/" + cell.name() + ".csv";
        write_cell_csv(cell, path);
        written.push_back(path);
    }

    const std::string combined_path = output_dir + "/combined.csv";
    std::ofstream combined(combined_path);
    if (!combined.is_open()) throw IoError("cannot write '" + combined_path + "'");
    combined << kCombinedCsvHeader << '\n';
    for (const Cell& cell : cells) {
        for (const auto& metrics : cell.per_seed) {
            for (const MetricsRow& row : metrics.rows) {
                combined << format_metrics_row(row) << '\n';
            }
        }
    }
    if (!combined) throw IoError("write failed for '" + combined_path + "'");
    written.push_back(combined_path);
    return written;
}

}  // namespace coopal
