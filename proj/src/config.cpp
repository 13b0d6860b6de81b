#include "mifi/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace mifi {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

SynthConfig synth_from_json(const json& j, const std::string& where, bool& seed_set) {
    static const std::set<std::string> known = {
        "n-classes",     "n-drivers",  "clips-per-driver-per-class",
        "dims",          "noise-std",  "driver-std",
        "view-correlation", "hard-margin-scale", "hard-classes",
        "view-ambiguity", "ambiguity-residual", "seed"};
    if (!j.is_object()) throw ConfigError("'synth' must be an object in " + where);
    reject_unknown_keys(j, known, where + ".synth");

    SynthConfig s;
    if (j.contains("n-classes")) s.n_classes = get_as<int>(j, "n-classes", where);
    if (j.contains("n-drivers")) s.n_drivers = get_as<int>(j, "n-drivers", where);
    if (j.contains("clips-per-driver-per-class")) {
        s.clips_per_driver_per_class = get_as<int>(j, "clips-per-driver-per-class", where);
    }
    if (j.contains("dims")) {
        auto dims = get_as<std::vector<std::uint64_t>>(j, "dims", where);
        if (dims.size() != 4) throw ConfigError("synth dims must have 4 entries in " + where);
        for (std::size_t i = 0; i < 4; ++i) s.dims[i] = static_cast<std::size_t>(dims[i]);
    }
    if (j.contains("noise-std")) s.noise_std = get_as<double>(j, "noise-std", where);
    if (j.contains("driver-std")) s.driver_std = get_as<double>(j, "driver-std", where);
    if (j.contains("view-correlation")) {
        s.view_correlation = get_as<double>(j, "view-correlation", where);
    }
    if (j.contains("hard-margin-scale")) {
        s.hard_margin_scale = get_as<double>(j, "hard-margin-scale", where);
    }
    if (j.contains("ambiguity-residual")) {
        s.ambiguity_residual = get_as<double>(j, "ambiguity-residual", where);
    }
    if (j.contains("hard-classes")) {
        for (int k : get_as<std::vector<int>>(j, "hard-classes", where)) {
            s.hard_classes.insert(k);
        }
    }
    if (j.contains("view-ambiguity")) {
        const json& amb = j.at("view-ambiguity");
        if (!amb.is_object()) {
            throw ConfigError("synth view-ambiguity must be an object in " + where);
        }
        for (const auto& [key, pairs] : amb.items()) {
            if (key.rfind("cam", 0) != 0) {
                throw ConfigError("view-ambiguity key must be camN, got '" + key + "'");
            }
            int v;
            try {
                v = std::stoi(key.substr(3));
            } catch (const std::exception&) {
                throw ConfigError("view-ambiguity key must be camN, got '" + key + "'");
            }
            std::vector<std::pair<int, int>> out;
            try {
                for (const auto& p : pairs.get<std::vector<std::vector<int>>>()) {
                    if (p.size() != 2) {
                        throw ConfigError("ambiguity pairs must have 2 classes in " + where);
                    }
                    out.emplace_back(p[0], p[1]);
                }
            } catch (const json::exception& e) {
                throw ConfigError("bad view-ambiguity in " + where + ": " + e.what());
            }
            s.view_ambiguity[v] = std::move(out);
        }
    }
    if (j.contains("seed")) {
        s.seed = get_as<std::uint64_t>(j, "seed", where);
        seed_set = true;
    }
    return s;
}

json synth_to_json(const SynthConfig& s) {
    json amb = json::object();
    for (const auto& [v, pairs] : s.view_ambiguity) {
        json list = json::array();
        for (const auto& [a, b] : pairs) list.push_back({a, b});
        amb["cam" + std::to_string(v)] = list;
    }
    return json{{"n-classes", s.n_classes},
                {"n-drivers", s.n_drivers},
                {"clips-per-driver-per-class", s.clips_per_driver_per_class},
                {"dims", {s.dims[0], s.dims[1], s.dims[2], s.dims[3]}},
                {"noise-std", s.noise_std},
                {"driver-std", s.driver_std},
                {"view-correlation", s.view_correlation},
                {"hard-margin-scale", s.hard_margin_scale},
                {"ambiguity-residual", s.ambiguity_residual},
                {"hard-classes", std::vector<int>(s.hard_classes.begin(), s.hard_classes.end())},
                {"view-ambiguity", amb},
                {"seed", s.seed}};
}

} // namespace

double RunConfig::lambda1_value() const {
    if (lambda1) return *lambda1;
    return loss == "asl" ? 1.0 : 0.0;
}

double RunConfig::lambda2_value() const { return lambda2 ? *lambda2 : 4.0; }

void RunConfig::validate() const {
    if (loss != "ce" && loss != "fl" && loss != "asl" && loss != "casl") {
        throw ConfigError("unknown loss '" + loss + "' (expected ce|fl|asl|casl)");
    }
    fusion_mode_from_name(fusion); // throws ConfigError on bad name
    if (view < 0 || view > 2) throw ConfigError("view must be 0 (fused), 1, or 2");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch-size must be >= 1");
    if (train_drivers < 0 || val_drivers < 0 || test_drivers < 0) {
        throw ConfigError("driver split counts must be non-negative");
    }
    try {
        loss_kind();
        sgd_config().validate();
        if (dataset.empty()) synth_config().validate();
    } catch (const InvalidInputError& e) {
        throw ConfigError(e.what());
    }
}

LossKind RunConfig::loss_kind() const {
    if (loss == "ce") return LossKind::ce();
    if (loss == "fl") return LossKind::fl(gamma_fl);
    if (loss == "asl") return LossKind::asl(lambda1_value(), lambda2_value());
    if (loss == "casl") {
        CaslConfig c;
        c.beta = beta;
        c.gamma = gamma;
        c.lambda1 = lambda1_value();
        c.lambda2 = lambda2_value();
        c.total_epochs = epochs;
        c.validate();
        return LossKind::cyclical(c);
    }
    throw ConfigError("unknown loss '" + loss + "'");
}

SgdConfig RunConfig::sgd_config() const {
    SgdConfig s;
    s.lr0 = lr;
    s.decay_epochs = decay_epochs;
    s.epochs = epochs;
    s.batch_size = batch_size;
    return s;
}

SplitSpec RunConfig::split_spec() const {
    return {train_drivers, val_drivers, test_drivers, seed};
}

SynthConfig RunConfig::synth_config() const {
    SynthConfig s = synth;
    if (!synth_seed_set) s.seed = seed;
    return s;
}

RunConfig config_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + origin + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": config must be a JSON object");

    static const std::set<std::string> known = {
        "fusion",  "loss",         "beta",       "gamma",        "lambda1",
        "lambda2", "gamma-fl",     "lr",         "epochs",       "decay-epochs",
        "batch-size", "seed",      "dataset",    "out",          "view",
        "train-drivers", "val-drivers", "test-drivers", "synth"};
    reject_unknown_keys(j, known, origin);

    RunConfig c;
    if (j.contains("fusion")) c.fusion = get_as<std::string>(j, "fusion", origin);
    if (j.contains("loss")) c.loss = get_as<std::string>(j, "loss", origin);
    if (j.contains("beta")) c.beta = get_as<double>(j, "beta", origin);
    if (j.contains("gamma")) c.gamma = get_as<double>(j, "gamma", origin);
    if (j.contains("lambda1")) c.lambda1 = get_as<double>(j, "lambda1", origin);
    if (j.contains("lambda2")) c.lambda2 = get_as<double>(j, "lambda2", origin);
    if (j.contains("gamma-fl")) c.gamma_fl = get_as<double>(j, "gamma-fl", origin);
    if (j.contains("lr")) c.lr = get_as<double>(j, "lr", origin);
    if (j.contains("epochs")) c.epochs = get_as<int>(j, "epochs", origin);
    if (j.contains("decay-epochs")) {
        c.decay_epochs = get_as<std::vector<int>>(j, "decay-epochs", origin);
    }
    if (j.contains("batch-size")) c.batch_size = get_as<int>(j, "batch-size", origin);
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", origin);
    if (j.contains("dataset")) c.dataset = get_as<std::string>(j, "dataset", origin);
    if (j.contains("out")) c.out = get_as<std::string>(j, "out", origin);
    if (j.contains("view")) c.view = get_as<int>(j, "view", origin);
    if (j.contains("train-drivers")) c.train_drivers = get_as<int>(j, "train-drivers", origin);
    if (j.contains("val-drivers")) c.val_drivers = get_as<int>(j, "val-drivers", origin);
    if (j.contains("test-drivers")) c.test_drivers = get_as<int>(j, "test-drivers", origin);
    if (j.contains("synth")) {
        c.synth = synth_from_json(j.at("synth"), origin, c.synth_seed_set);
    }
    return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text, path.string());
}

std::string config_to_json(const RunConfig& config) {
    json j{{"fusion", config.fusion},
           {"loss", config.loss},
           {"beta", config.beta},
           {"gamma", config.gamma},
           {"lambda1", config.lambda1_value()},
           {"lambda2", config.lambda2_value()},
           {"gamma-fl", config.gamma_fl},
           {"lr", config.lr},
           {"epochs", config.epochs},
           {"decay-epochs", config.decay_epochs},
           {"batch-size", config.batch_size},
           {"seed", config.seed},
           {"dataset", config.dataset},
           // "out" is deliberately not serialized: the artifact destination is
           // not part of the experiment, so saved configs are location-free
           {"view", config.view},
           {"train-drivers", config.train_drivers},
           {"val-drivers", config.val_drivers},
           {"test-drivers", config.test_drivers}};
    SynthConfig s = config.synth_config(); // freeze the resolved synth seed
    j["synth"] = synth_to_json(s);
    return j.dump(2);
}

} // namespace mifi
