#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coopal/simulator.hpp"

namespace coopal {

// A parsed experiment configuration: one RunSpec template plus the grid axes
// (modes x methods x policies) and the seed list.
struct RunConfig {
    RunSpec base;
    std::vector<Mode> modes{Mode::Labels};
    std::vector<IntegrationMethod> methods{IntegrationMethod::WA};
    std::vector<SelectionPolicy> policies{SelectionPolicy::QDS};
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";

    RunSpec cell_spec(Mode mode, IntegrationMethod method, SelectionPolicy policy,
                      std::uint64_t seed) const;
};

// Strict parsing: unknown fields are errors, errors name the offending field.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

}  // namespace coopal
