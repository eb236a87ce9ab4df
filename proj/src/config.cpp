#include "coopal/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopal/error.hpp"

namespace coopal {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            throw ParseError("config: unknown field '" + where + key + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError("config: field '" + key + "' has the wrong type");
    }
}

ClassifierKind parse_kind(const json& p, const std::string& where) {
    const std::string kind = get_or<std::string>(p, "kind", "");
    if (kind == "tree_fine") {
        reject_unknown(p, {"kind", "min_leaf", "noise_sigma"}, where);
        ClassifierKind k = ClassifierKind::tree_fine();
        k.min_leaf = get_or<int>(p, "min_leaf", k.min_leaf);
        return k;
    }
    if (kind == "tree_medium") {
        reject_unknown(p, {"kind", "max_depth", "min_leaf", "noise_sigma"}, where);
        ClassifierKind k = ClassifierKind::tree_medium(get_or<int>(p, "max_depth", 4));
        k.min_leaf = get_or<int>(p, "min_leaf", k.min_leaf);
        return k;
    }
    if (kind == "linear_ovr") {
        reject_unknown(p, {"kind", "epochs", "learning_rate", "l2", "noise_sigma"}, where);
        return ClassifierKind::linear_ovr(get_or<int>(p, "epochs", 40),
                                          get_or<double>(p, "learning_rate", 0.1),
                                          get_or<double>(p, "l2", 1e-4));
    }
    if (kind == "kernel_ovr") {
        reject_unknown(p, {"kind", "epochs", "gamma", "noise_sigma"}, where);
        return ClassifierKind::kernel_ovr(get_or<int>(p, "epochs", 3),
                                          get_or<double>(p, "gamma", 0.0));
    }
    if (kind == "weighted_knn") {
        reject_unknown(p, {"kind", "k", "noise_sigma"}, where);
        return ClassifierKind::weighted_knn(get_or<int>(p, "k", 10));
    }
    throw ParseError("config: field '" + where + "kind' must be one of "
                     "tree_fine|tree_medium|linear_ovr|kernel_ovr|weighted_knn, got '" +
                     kind + "'");
}

DatasetSource parse_dataset(const json& d) {
    reject_unknown(d, {"csv", "synthetic"}, "dataset.");
    if (d.contains("csv") == d.contains("synthetic")) {
        throw ParseError("config: 'dataset' needs exactly one of 'csv' or 'synthetic'");
    }
    DatasetSource src;
    if (d.contains("csv")) {
        const json& c = d.at("csv");
        reject_unknown(c, {"path", "label_column", "has_header", "min_max_scale"}, "dataset.csv.");
        src.csv_path = get_or<std::string>(c, "path", "");
        if (src.csv_path.empty()) throw ParseError("config: 'dataset.csv.path' is required");
        src.label_column = get_or<std::string>(c, "label_column", "-1");
        src.has_header = get_or<bool>(c, "has_header", true);
        src.min_max_scale = get_or<bool>(c, "min_max_scale", false);
    } else {
        const json& s = d.at("synthetic");
        reject_unknown(s, {"classes", "features", "per_class", "spread", "seed"},
                       "dataset.synthetic.");
        src.classes = get_or<int>(s, "classes", 4);
        src.features = get_or<int>(s, "features", 18);
        src.per_class = get_or<int>(s, "per_class", 200);
        src.spread = get_or<double>(s, "spread", 1.0);
        src.seed = get_or<std::uint64_t>(s, "seed", 7);
    }
    return src;
}

}  // namespace

RunSpec RunConfig::cell_spec(Mode mode, IntegrationMethod method, SelectionPolicy policy,
                             std::uint64_t seed) const {
    RunSpec spec = base;
    spec.mode = mode;
    spec.method = method;
    spec.policy = policy;
    spec.seed = seed;
    return spec;
}

RunConfig parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("config: top level must be an object");

    reject_unknown(root,
                   {"dataset", "offline_size", "test_size", "offline_eval_fraction", "profiles",
                    "ego_profile", "delta_max", "modes", "methods", "policies", "wa_weights",
                    "decay", "alpha", "max_steps", "max_events", "load_model", "seeds",
                    "output_dir"},
                   "");

    RunConfig cfg;
    if (!root.contains("dataset")) throw ParseError("config: 'dataset' is required");
    cfg.base.dataset = parse_dataset(root.at("dataset"));

    cfg.base.offline_size = get_or<int>(root, "offline_size", 100);
    cfg.base.test_size = get_or<int>(root, "test_size", -1);
    cfg.base.offline_eval_fraction = get_or<double>(root, "offline_eval_fraction", 0.25);

    if (root.contains("profiles")) {
        const json& ps = root.at("profiles");
        if (!ps.is_array() || ps.empty()) {
            throw ParseError("config: 'profiles' must be a non-empty array");
        }
        cfg.base.profiles.clear();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const std::string where = "profiles[" + std::to_string(i) + "].";
            ProfileSpec spec;
            spec.kind = parse_kind(ps.at(i), where);
            spec.data_noise_sigma = get_or<double>(ps.at(i), "noise_sigma", 0.1);
            cfg.base.profiles.push_back(spec);
        }
    } else {
        cfg.base.profiles = RunSpec::default_profiles();
    }
    cfg.base.ego_profile =
        get_or<int>(root, "ego_profile", static_cast<int>(cfg.base.profiles.size()) - 1);
    cfg.base.delta_max = get_or<double>(root, "delta_max", 2.0);

    if (root.contains("modes")) {
        cfg.modes.clear();
        for (const auto& m : root.at("modes")) cfg.modes.push_back(mode_from_name(m.get<std::string>()));
    }
    if (root.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : root.at("methods")) {
            cfg.methods.push_back(integration_method_from_name(m.get<std::string>()));
        }
    }
    if (root.contains("policies")) {
        cfg.policies.clear();
        for (const auto& p : root.at("policies")) {
            cfg.policies.push_back(selection_policy_from_name(p.get<std::string>()));
        }
    }
    if (cfg.modes.empty() || cfg.methods.empty() || cfg.policies.empty()) {
        throw ValidationError("config: grid axes 'modes'/'methods'/'policies' must be non-empty");
    }

    if (root.contains("wa_weights")) {
        const json& w = root.at("wa_weights");
        reject_unknown(w, {"a", "b"}, "wa_weights.");
        cfg.base.wa_weights = WaWeights::make(get_or<double>(w, "a", 0.5), get_or<double>(w, "b", 0.5));
    }
    cfg.base.decay = get_or<double>(root, "decay", 1.0);
    cfg.base.alpha = get_or<double>(root, "alpha", 0.95);
    if (!(cfg.base.alpha > 0.0) || cfg.base.alpha > 1.0) {
        throw ValidationError("config: field 'alpha' must lie in (0, 1]");
    }
    cfg.base.max_steps = get_or<int>(root, "max_steps", -1);
    cfg.base.max_events = get_or<int>(root, "max_events", -1);

    if (root.contains("load_model")) {
        const json& l = root.at("load_model");
        reject_unknown(l, {"label_bytes", "feature_bytes_per_dim", "header_bytes"}, "load_model.");
        cfg.base.load.label_bytes = get_or<std::uint64_t>(l, "label_bytes", 8);
        cfg.base.load.feature_bytes_per_dim = get_or<std::uint64_t>(l, "feature_bytes_per_dim", 8);
        cfg.base.load.header_bytes = get_or<std::uint64_t>(l, "header_bytes", 16);
    }

    if (!root.contains("seeds")) throw ParseError("config: 'seeds' is required");
    for (const auto& s : root.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
    if (cfg.seeds.empty()) throw ValidationError("config: 'seeds' must be non-empty");

    cfg.output_dir = get_or<std::string>(root, "output_dir", "out");

    // validate the full template once with concrete grid values
    cfg.cell_spec(cfg.modes.front(), cfg.methods.front(), cfg.policies.front(), cfg.seeds.front())
        .validate();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace coopal
