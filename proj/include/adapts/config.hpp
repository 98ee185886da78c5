#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "run.hpp"

namespace adapts {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment settings on top of a RunConfig: the round-count grid for the
// dishonesty curve, expressed as log2 bounds.
struct ExperimentConfig {
    RunConfig run;
    int t_min_log2 = 10;
    int t_max_log2 = 16;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& section, const std::string& key,
                           const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + ": not a number: '" + value + "'");
    }
}

inline long parse_long(const std::string& section, const std::string& key,
                       const std::string& value) {
    try {
        std::size_t pos = 0;
        long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + ": not an integer: '" + value + "'");
    }
}

inline bool parse_bool(const std::string& section, const std::string& key,
                       const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config: [" + section + "] " + key + ": expected true or false, got '" +
                      value + "'");
}

inline Vec parse_vec(const std::string& section, const std::string& key, const std::string& value) {
    Vec out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(section, key, tok));
    if (out.empty()) throw ConfigError("config: [" + section + "] " + key + ": empty vector");
    return out;
}

inline Mat parse_mat(const std::string& section, const std::string& key, const std::string& value) {
    Mat out;
    std::string row;
    std::istringstream in(value);
    while (std::getline(in, row, '|')) {
        row = trim(row);
        if (row.empty()) throw ConfigError("config: [" + section + "] " + key + ": empty matrix row");
        out.push_back(parse_vec(section, key, row));
    }
    if (out.empty()) throw ConfigError("config: [" + section + "] " + key + ": empty matrix");
    return out;
}

}  // namespace detail

// Raw sectioned key-value text. Lines are `[section]` or `key = value`; blank
// lines and full-line comments starting with '#' or ';' are skipped.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

inline ConfigSections parse_config_text(const std::string& text) {
    ConfigSections sections;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
            current = detail::trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            sections[current];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        auto [it, inserted] = sections[current].emplace(key, value);
        (void)it;
        if (!inserted)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + current + "]");
    }
    return sections;
}

namespace detail {

// Tracks which keys a section consumed so leftovers can be rejected.
class SectionReader {
  public:
    SectionReader(const ConfigSections& sections, const std::string& name) : name_(name) {
        auto it = sections.find(name);
        if (it != sections.end()) entries_ = &it->second;
    }

    bool has(const std::string& key) const { return entries_ && entries_->count(key) > 0; }

    std::string get(const std::string& key) {
        used_.insert(key);
        return entries_->at(key);
    }

    void finish() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_) {
            (void)value;
            if (used_.count(key) == 0)
                throw ConfigError("config: unknown key '" + key + "' in [" + name_ + "]");
        }
    }

    const std::string& name() const { return name_; }

  private:
    std::string name_;
    const std::map<std::string, std::string>* entries_ = nullptr;
    std::set<std::string> used_;
};

}  // namespace detail

// Validates sections/keys and assembles the typed configuration. Every
// recognized section and key is listed here; anything else is an error.
inline ExperimentConfig interpret_config(const ConfigSections& sections) {
    static const std::set<std::string> known_sections = {"model",    "population", "mechanism",
                                                         "behavior", "run",        "experiment"};
    for (const auto& [name, entries] : sections) {
        (void)entries;
        if (known_sections.count(name) == 0)
            throw ConfigError("config: unknown section [" + name + "]");
    }

    ExperimentConfig cfg;

    detail::SectionReader model(sections, "model");
    if (!model.has("omega_weights") || !model.has("likelihood"))
        throw ConfigError("config: [model] requires omega_weights and likelihood");
    Vec weights = detail::parse_vec("model", "omega_weights", model.get("omega_weights"));
    Mat likelihood = detail::parse_mat("model", "likelihood", model.get("likelihood"));
    double wsum = 0.0;
    for (double& v : weights) wsum += v;
    if (!(wsum > 0.0)) throw ConfigError("config: [model] omega_weights need a positive sum");
    for (double& v : weights) v /= wsum;
    for (Vec& row : likelihood) {
        double rsum = 0.0;
        for (double v : row) rsum += v;
        if (!(rsum > 0.0)) throw ConfigError("config: [model] likelihood rows need a positive sum");
        for (double& v : row) v /= rsum;
    }
    try {
        cfg.run.model = make_world_model(std::move(weights), std::move(likelihood));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [model] invalid: ") + e.what());
    }
    model.finish();
    const std::size_t m = cfg.run.model.num_signals();

    detail::SectionReader pop(sections, "population");
    if (pop.has("k"))
        cfg.run.population.k =
            static_cast<std::size_t>(detail::parse_long("population", "k", pop.get("k")));
    if (pop.has("epsilon"))
        cfg.run.population.epsilon = detail::parse_double("population", "epsilon", pop.get("epsilon"));
    if (pop.has("noise")) {
        std::string v = pop.get("noise");
        if (v == "unbiased")
            cfg.run.population.noise_kind = NoiseKind::Unbiased;
        else if (v == "biased")
            cfg.run.population.noise_kind = NoiseKind::Biased;
        else
            throw ConfigError("config: [population] noise: expected unbiased or biased, got '" + v +
                              "'");
    }
    if (pop.has("biased_table"))
        cfg.run.population.biased_table =
            detail::parse_vec("population", "biased_table", pop.get("biased_table"));
    pop.finish();

    detail::SectionReader mech(sections, "mechanism");
    if (mech.has("gamma")) cfg.run.gamma = detail::parse_double("mechanism", "gamma", mech.get("gamma"));
    if (mech.has("c")) cfg.run.c = detail::parse_double("mechanism", "c", mech.get("c"));
    if (mech.has("unit_scale"))
        cfg.run.unit_scale = detail::parse_bool("mechanism", "unit_scale", mech.get("unit_scale"));
    if (mech.has("indicator")) {
        std::string v = mech.get("indicator");
        if (v == "plain")
            cfg.run.indicator = IndicatorVariant::Plain;
        else if (v == "biased")
            cfg.run.indicator = IndicatorVariant::Biased;
        else if (v == "regularized")
            cfg.run.indicator = IndicatorVariant::Regularized;
        else
            throw ConfigError("config: [mechanism] indicator: expected plain, biased or regularized, got '" +
                              v + "'");
    }
    if (mech.has("lambda"))
        cfg.run.lambda = detail::parse_double("mechanism", "lambda", mech.get("lambda"));
    mech.finish();

    detail::SectionReader beh(sections, "behavior");
    if (beh.has("model")) {
        std::string v = beh.get("model");
        if (v == "canonical-switching")
            cfg.run.behavior = BehaviorModel::CanonicalSwitching;
        else if (v == "best-response")
            cfg.run.behavior = BehaviorModel::BestResponse;
        else if (v == "smooth-mixture")
            cfg.run.behavior = BehaviorModel::SmoothMixture;
        else
            throw ConfigError(
                "config: [behavior] model: expected canonical-switching, best-response or "
                "smooth-mixture, got '" +
                v + "'");
    }
    if (beh.has("mixture_width"))
        cfg.run.mixture_width =
            detail::parse_double("behavior", "mixture_width", beh.get("mixture_width"));
    beh.finish();

    detail::SectionReader run(sections, "run");
    if (run.has("rounds"))
        cfg.run.rounds = static_cast<std::size_t>(detail::parse_long("run", "rounds", run.get("rounds")));
    if (run.has("pinned_arm")) cfg.run.pinned_arm = detail::parse_long("run", "pinned_arm", run.get("pinned_arm"));
    if (run.has("record_rounds"))
        cfg.run.record_rounds = detail::parse_bool("run", "record_rounds", run.get("record_rounds"));
    run.finish();

    detail::SectionReader exp(sections, "experiment");
    if (exp.has("t_min_log2"))
        cfg.t_min_log2 = static_cast<int>(detail::parse_long("experiment", "t_min_log2", exp.get("t_min_log2")));
    if (exp.has("t_max_log2"))
        cfg.t_max_log2 = static_cast<int>(detail::parse_long("experiment", "t_max_log2", exp.get("t_max_log2")));
    exp.finish();

    if (cfg.run.population.k < 2) throw ConfigError("config: [population] k must be at least 2");
    if (!(cfg.run.population.epsilon >= 0.0) || !(cfg.run.population.epsilon < 1.0))
        throw ConfigError("config: [population] epsilon must lie in [0,1)");
    try {
        cfg.run.population.validate(m);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [population] invalid: ") + e.what());
    }
    if (!(cfg.run.gamma > 0.0) || !(cfg.run.gamma < 1.0))
        throw ConfigError("config: [mechanism] gamma must lie in (0,1)");
    if (!(cfg.run.c > 0.0)) throw ConfigError("config: [mechanism] c must be positive");
    if (!(cfg.run.lambda >= 0.0)) throw ConfigError("config: [mechanism] lambda must be >= 0");
    if (!(cfg.run.mixture_width > 0.0))
        throw ConfigError("config: [behavior] mixture_width must be positive");
    if (cfg.t_min_log2 < 1 || cfg.t_max_log2 < cfg.t_min_log2 || cfg.t_max_log2 > 30)
        throw ConfigError("config: [experiment] t_min_log2/t_max_log2 out of range");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return interpret_config(parse_config_text(buf.str()));
}

}  // namespace adapts
