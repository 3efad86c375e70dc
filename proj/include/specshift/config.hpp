#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specshift/analysis.hpp"
#include "specshift/errors.hpp"
#include "specshift/generators.hpp"
#include "specshift/hilbert.hpp"
#include "specshift/measures.hpp"
#include "specshift/words.hpp"

namespace specshift {

using nlohmann::json;

/// A parsed subshift description: one of the three generator families.
struct SubshiftSpec {
    std::variant<SftGraph, Substitution, ContinuedFraction> generator;
    std::string kind;  // sft | substitution | sturmian

    const SftGraph& sft() const {
        if (!std::holds_alternative<SftGraph>(generator))
            throw validation_error("config: this operation needs an sft subshift");
        return std::get<SftGraph>(generator);
    }
    const Substitution& substitution() const {
        if (!std::holds_alternative<Substitution>(generator))
            throw validation_error("config: this operation needs a substitution subshift");
        return std::get<Substitution>(generator);
    }
    const ContinuedFraction& sturmian() const {
        if (!std::holds_alternative<ContinuedFraction>(generator))
            throw validation_error("config: this operation needs a sturmian subshift");
        return std::get<ContinuedFraction>(generator);
    }
};

inline SubshiftSpec parse_subshift(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw validation_error("config: subshift must be an object with a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "sft") {
        int vertices = 0;
        std::vector<SftGraph::Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 3)
                throw validation_error("config: sft edge must be [label, from, to]");
            const std::string label = e.at(0).get<std::string>();
            if (label.size() != 1)
                throw validation_error("config: edge labels must be single characters");
            SftGraph::Edge edge{label[0], e.at(1).get<int>(), e.at(2).get<int>()};
            vertices = std::max({vertices, edge.from, edge.to});
            edges.push_back(edge);
        }
        return {SftGraph::from_edges(vertices, std::move(edges)), "sft"};
    }
    if (type == "substitution") {
        std::map<char, std::string> rules;
        for (const auto& [key, val] : j.at("rules").items()) {
            if (key.size() != 1) throw validation_error("config: substitution letters must be single characters");
            rules[key[0]] = val.get<std::string>();
        }
        return {Substitution::from_rules(std::move(rules)), "substitution"};
    }
    if (type == "sturmian") {
        if (j.contains("preset")) {
            const std::string preset = j.at("preset").get<std::string>();
            if (preset != "unbounded")
                throw validation_error("config: unknown sturmian preset: " + preset);
            const int n_max = j.value("n_max", 4);
            return {ContinuedFraction::unbounded_quotients(n_max), "sturmian"};
        }
        std::vector<mpz_class> quotients;
        for (const auto& q : j.at("partial_quotients")) quotients.emplace_back(q.get<long>());
        return {ContinuedFraction(std::move(quotients)), "sturmian"};
    }
    throw validation_error("config: unknown subshift type: " + type);
}

inline LanguageTable build_table(const SubshiftSpec& spec, int max_level) {
    if (std::holds_alternative<SftGraph>(spec.generator)) {
        const auto& g = spec.sft();
        return build_language([&](int n) { return g.factors(n); }, max_level);
    }
    if (std::holds_alternative<Substitution>(spec.generator)) {
        const auto& sub = spec.substitution();
        return build_language([&](int n) { return sub.factors(n); }, max_level);
    }
    const auto& cf = spec.sturmian();
    return build_language([&](int n) { return sturmian_factors(cf, n); }, max_level);
}

/// Measure attachment per the configured source; "auto" picks the exact
/// source of the family (parry for sft, interval for sturmian, empirical
/// sampling for substitutions).
inline MeasureAssignment build_measure(const SubshiftSpec& spec, const LanguageTable& table,
                                       const std::string& source, std::size_t sample_length,
                                       std::uint64_t seed) {
    std::string kind = source;
    if (kind == "auto")
        kind = spec.kind == "sft" ? "parry" : (spec.kind == "sturmian" ? "interval" : "empirical");
    if (kind == "parry") {
        const auto& g = spec.sft();
        return parry_measure(g, perron(g), table);
    }
    if (kind == "interval") return sturmian_measure(spec.sturmian(), table);
    if (kind == "empirical") {
        std::string sample;
        if (spec.kind == "substitution") {
            sample = spec.substitution().sample_prefix(sample_length);
        } else if (spec.kind == "sft") {
            const auto& g = spec.sft();
            sample = sample_max_entropy_path(g, perron(g), sample_length, seed);
        } else {
            sample = sturmian_sample_prefix(spec.sturmian(), sample_length);
        }
        return empirical_measure(sample, table);
    }
    throw validation_error("config: unknown measure source: " + kind);
}

inline AlphaSequence parse_alpha(const json& j, int max_level) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "linear") return AlphaSequence::linear(max_level);
        if (s == "quadratic") return AlphaSequence::quadratic(max_level);
        throw validation_error("config: unknown alpha spec: " + s);
    }
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& x : j) v.push_back(x.get<double>());
        if (static_cast<int>(v.size()) < max_level + 1)
            throw validation_error("config: explicit alpha list shorter than the truncation");
        return AlphaSequence::custom(std::move(v));
    }
    throw validation_error("config: alpha must be a keyword or a list");
}

struct RunConfig {
    json raw;
    std::optional<SubshiftSpec> subshift;
    std::string measure_source = "auto";
    int max_level = 6;
    json alpha = json("linear");
    std::string experiment;
    json params = json::object();
    std::string out_csv;
    std::string out_json;
    std::uint64_t seed = 1;
    std::size_t sample_length = 1000000;

    const SubshiftSpec& shift() const {
        if (!subshift) throw validation_error("config: this operation needs a subshift");
        return *subshift;
    }
};

inline RunConfig parse_run_config(const json& j) {
    RunConfig c;
    c.raw = j;
    if (j.contains("subshift")) c.subshift = parse_subshift(j.at("subshift"));
    c.measure_source = j.value("measure", std::string("auto"));
    c.max_level = j.value("max_level", 6);
    if (c.max_level < 2) throw validation_error("config: max_level must be >= 2");
    if (j.contains("alpha")) c.alpha = j.at("alpha");
    c.experiment = j.value("experiment", std::string());
    if (j.contains("params")) c.params = j.at("params");
    c.out_csv = j.value("out_csv", std::string());
    c.out_json = j.value("out_json", std::string());
    c.seed = j.value("seed", static_cast<std::uint64_t>(1));
    c.sample_length = j.value("sample_length", static_cast<std::size_t>(1000000));
    return c;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

} // namespace specshift
