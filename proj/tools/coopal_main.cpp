#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coopal/config.hpp"
#include "coopal/dataset.hpp"
#include "coopal/error.hpp"
#include "coopal/grid.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_override,
                std::int64_t seed_override) {
    coopal::RunConfig config = coopal::parse_config(config_path);
    if (seed_override >= 0) {
        config.seeds = {static_cast<std::uint64_t>(seed_override)};
    }
    const std::string out_dir = out_override.empty() ? config.output_dir : out_override;
    const auto written = coopal::run_grid(config, out_dir);
    for (const auto& path : written) std::cout << path << '\n';
    return 0;
}

int validate_command(const std::string& config_path) {
    const coopal::RunConfig config = coopal::parse_config(config_path);
    std::cout << "ok: " << config.modes.size() << " mode(s) x " << config.methods.size()
              << " method(s) x " << config.policies.size() << " policy(ies) x "
              << config.seeds.size() << " seed(s)\n";
    return 0;
}

int synth_command(int classes, int features, int per_class, double spread, std::uint64_t seed,
                  const std::string& out_path) {
    const coopal::Dataset ds = coopal::synthesize(classes, features, per_class, spread, seed);
    coopal::write_csv(ds, out_path);
    std::cout << out_path << ": " << ds.size() << " rows, " << ds.num_features << " features, "
              << ds.num_classes << " classes\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative active-learning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::int64_t seed_override = -1;

    CLI::App* run = app.add_subcommand("run", "Run the experiment grid from a config file");
    run->add_option("--config", config_path, "JSON config path")->required();
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    run->add_option("--seed-override", seed_override, "Replace the config seed list with one seed");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config file");
    validate->add_option("--config", validate_path, "JSON config path")->required();

    int classes = 4;
    int features = 18;
    int per_class = 200;
    double spread = 1.0;
    std::uint64_t seed = 7;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    synth->add_option("--classes", classes, "Number of classes");
    synth->add_option("--features", features, "Number of features");
    synth->add_option("--per-class", per_class, "Samples per class");
    synth->add_option("--spread", spread, "Cluster standard deviation");
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_command(config_path, out_dir, seed_override);
        if (validate->parsed()) return validate_command(validate_path);
        if (synth->parsed()) return synth_command(classes, features, per_class, spread, seed, synth_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // normalize usage errors to the validation exit code
    } catch (const coopal::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const coopal::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
