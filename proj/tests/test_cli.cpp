#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coopal/config.hpp"
#include "coopal/error.hpp"
#include "coopal/grid.hpp"

using namespace coopal;

namespace {

const char* kMinimalConfig = R"({
  "dataset": {"synthetic": {"classes": 4, "features": 6, "per_class": 30, "spread": 0.8, "seed": 11}},
  "seeds": [1, 2]
})";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir.string();
}

RunConfig small_config() {
    RunConfig cfg = parse_config_text(kMinimalConfig);
    cfg.base.offline_size = 40;
    cfg.base.test_size = 30;
    cfg.base.max_events = 12;
    cfg.base.max_steps = 4;
    cfg.base.alpha = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("a minimal config gets the documented defaults") {
    const RunConfig cfg = parse_config_text(kMinimalConfig);
    CHECK(cfg.base.wa_weights.a == 0.5);
    CHECK(cfg.base.wa_weights.b == 0.5);
    CHECK(cfg.base.alpha == 0.95);
    CHECK(cfg.base.decay == 1.0);
    CHECK(cfg.base.delta_max == 2.0);
    CHECK(cfg.base.load.label_bytes == 8);
    CHECK(cfg.base.load.feature_bytes_per_dim == 8);
    CHECK(cfg.base.load.header_bytes == 16);
    CHECK(cfg.base.profiles.size() == 5);  // ego + J = 4 neighbors
    CHECK(cfg.base.ego_profile == 4);
    CHECK(cfg.base.offline_size == 100);
    CHECK(cfg.modes.size() == 1);
    CHECK(cfg.methods.size() == 1);
    CHECK(cfg.policies.size() == 1);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("config validation names the offending field") {
    const std::string bad_alpha = R"({
      "dataset": {"synthetic": {}}, "seeds": [1], "alpha": 1.5
    })";
    try {
        parse_config_text(bad_alpha);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
        CHECK(std::string(e.what()).find("(0, 1]") != std::string::npos);
    }
}

TEST_CASE("unknown fields are rejected at every level") {
    const std::string top = R"({"dataset": {"synthetic": {}}, "seeds": [1], "turbo": true})";
    CHECK_THROWS_AS(parse_config_text(top), ParseError);

    const std::string nested =
        R"({"dataset": {"synthetic": {"classez": 4}}, "seeds": [1]})";
    try {
        parse_config_text(nested);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("classez") != std::string::npos);
    }
}

TEST_CASE("config rejects structural problems") {
    CHECK_THROWS_AS(parse_config_text("not json"), ParseError);
    CHECK_THROWS_AS(parse_config_text(R"({"seeds": [1]})"), ParseError);  // no dataset
    CHECK_THROWS_AS(parse_config_text(R"({"dataset": {"synthetic": {}}})"), ParseError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"dataset": {"synthetic": {}}, "seeds": []})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"dataset": {"synthetic": {}}, "seeds": [1], "modes": []})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"dataset": {"csv": {"path": "x"}, "synthetic": {}}, "seeds": [1]})"),
        ParseError);
}

TEST_CASE("profiles parse with per-kind hyperparameters") {
    const std::string text = R"({
      "dataset": {"synthetic": {}},
      "seeds": [1],
      "profiles": [
        {"kind": "tree_medium", "max_depth": 2, "noise_sigma": 0.3},
        {"kind": "weighted_knn", "k": 5}
      ],
      "ego_profile": 1
    })";
    const RunConfig cfg = parse_config_text(text);
    REQUIRE(cfg.base.profiles.size() == 2);
    CHECK(cfg.base.profiles[0].kind.max_depth == 2);
    CHECK(cfg.base.profiles[0].data_noise_sigma == 0.3);
    CHECK(cfg.base.profiles[1].kind.k == 5);
    CHECK(cfg.base.ego_profile == 1);

    const std::string bad_kind = R"({
      "dataset": {"synthetic": {}}, "seeds": [1],
      "profiles": [{"kind": "oracle"}]
    })";
    CHECK_THROWS_AS(parse_config_text(bad_kind), ParseError);
}

TEST_CASE("grid writes one CSV per cell plus the combined file") {
    RunConfig cfg = small_config();
    cfg.modes = {Mode::Labels, Mode::Data, Mode::Samples};
    cfg.methods = {IntegrationMethod::WA};
    cfg.policies = {SelectionPolicy::QDS, SelectionPolicy::RS, SelectionPolicy::MVQS};
    cfg.seeds = {1};

    const std::string out = temp_dir("coopal_grid_cells");
    const auto written = run_grid(cfg, out);
    CHECK(written.size() == 10);  // 9 cells + combined
    for (const auto& path : written) CHECK(std::filesystem::exists(path));
    CHECK(written.back() == out + "/combined.csv");

    const std::string combined = slurp(written.back());
    CHECK(combined.rfind(std::string(kCombinedCsvHeader) + "\n", 0) == 0);
    std::filesystem::remove_all(out);
}

TEST_CASE("rerunning a grid yields byte-identical outputs") {
    RunConfig cfg = small_config();
    cfg.modes = {Mode::Labels, Mode::Samples};
    cfg.policies = {SelectionPolicy::QDS, SelectionPolicy::RS};

    const std::string out_a = temp_dir("coopal_grid_a");
    const std::string out_b = temp_dir("coopal_grid_b");
    const auto written_a = run_grid(cfg, out_a);
    const auto written_b = run_grid(cfg, out_b);
    REQUIRE(written_a.size() == written_b.size());
    for (std::size_t i = 0; i < written_a.size(); ++i) {
        CHECK(slurp(written_a[i]) == slurp(written_b[i]));
    }
    std::filesystem::remove_all(out_a);
    std::filesystem::remove_all(out_b);
}

TEST_CASE("duplicate seeds produce identical per-seed blocks") {
    RunConfig cfg = small_config();
    cfg.seeds = {7, 7};
    const std::string out = temp_dir("coopal_grid_dup");
    const auto written = run_grid(cfg, out);
    const std::string combined = slurp(written.back());

    // split combined rows by seed column; both blocks must match except for
    // the seed value itself, which is identical anyway
    std::vector<std::string> rows;
    std::stringstream ss(combined);
    std::string line;
    std::getline(ss, line);  // header
    while (std::getline(ss, line)) rows.push_back(line);
    REQUIRE(rows.size() % 2 == 0);
    const std::size_t half = rows.size() / 2;
    for (std::size_t i = 0; i < half; ++i) CHECK(rows[i] == rows[half + i]);
    std::filesystem::remove_all(out);
}

TEST_CASE("the combined CSV schema is stable") {
    CHECK(std::string(kCombinedCsvHeader) ==
          "step,online_size,mode,method,policy,seed,labeling_accuracy,"
          "classification_accuracy,cum_bytes");
    MetricsRow row;
    row.step = 3;
    row.online_size = 3;
    row.mode = Mode::Data;
    row.method = IntegrationMethod::MV;
    row.policy = SelectionPolicy::RS;
    row.seed = 42;
    row.labeling_accuracy = 0.5;
    row.classification_accuracy = 0.25;
    row.cum_bytes = 1024;
    CHECK(format_metrics_row(row) == "3,3,data,mv,rs,42,0.5,0.25,1024");
}

TEST_CASE("run_grid rejects an empty grid") {
    RunConfig cfg = small_config();
    cfg.modes.clear();
    CHECK_THROWS_AS(run_grid(cfg, temp_dir("coopal_grid_empty")), ValidationError);
}
