#pragma once

#include "bundlex/io.hpp"
#include "bundlex/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bundlex {

struct GeneratorConfig {
    std::size_t agents = 4;
    std::size_t max_endowment = 2;
    std::size_t total_objects = 0;  // when non-zero, endowment sizes are a random split of this many objects
    std::uint64_t seed = 1;
    bool strongly = false;
    double p_attractive = 0.3;
    double p_bearable = 0.3;  // non-endowed objects only; endowed ones are bearable unless attractive
};

namespace detail {

inline std::string padded(const std::string& prefix, std::size_t k, std::size_t total) {
    auto digits = std::to_string(total).size();
    auto s = std::to_string(k);
    return prefix + std::string(digits - s.size(), '0') + s;
}

}  // namespace detail

/// Seeded random market and trichotomous profile; the same config always yields the same document.
inline Document generate_document(const GeneratorConfig& cfg) {
    if (cfg.agents == 0) throw input_error("need at least one agent");
    if (cfg.total_objects == 0 && cfg.max_endowment == 0) throw input_error("max endowment must be positive");
    if (cfg.total_objects != 0 && cfg.total_objects < cfg.agents)
        throw input_error("every agent needs at least one object");
    if (cfg.p_attractive < 0 || cfg.p_bearable < 0 || cfg.p_attractive + cfg.p_bearable > 1)
        throw input_error("preference probabilities must be non-negative and sum to at most 1");

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> sizes(cfg.agents, 1);
    if (cfg.total_objects == 0) {
        std::uniform_int_distribution<std::size_t> size(1, cfg.max_endowment);
        for (auto& s : sizes) s = size(rng);
    } else {
        std::uniform_int_distribution<std::size_t> who(0, cfg.agents - 1);
        for (std::size_t k = cfg.agents; k < cfg.total_objects; ++k) ++sizes[who(rng)];
    }
    std::size_t total = 0;
    for (auto s : sizes) total += s;

    RawInstance raw;
    std::size_t next = 1;
    for (std::size_t i = 0; i < cfg.agents; ++i) {
        auto name = detail::padded("a", i + 1, cfg.agents);
        raw.agents.push_back(name);
        for (std::size_t k = 0; k < sizes[i]; ++k) {
            auto obj = detail::padded("o", next++, total);
            raw.objects.push_back(obj);
            raw.endowments[name].push_back(obj);
        }
    }

    Document doc;
    doc.instance = validate_instance(raw);
    const auto& inst = doc.instance;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    TrichotomousProfile prefs;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        TrichotomousPreference p{inst.empty_set(), inst.empty_set()};
        for (ObjectIndex o = 0; o < inst.num_objects(); ++o) {
            double x = coin(rng);
            if (x < cfg.p_attractive)
                p.attractive.set(o);
            else if (inst.endowment(i).test(o) || (!cfg.strongly && x < cfg.p_attractive + cfg.p_bearable))
                p.bearable.set(o);
        }
        if (cfg.strongly) p.bearable = inst.endowment(i) - p.attractive;
        prefs.push_back(std::move(p));
    }
    doc.marginal = to_marginal(prefs);
    doc.trichotomous = std::move(prefs);
    doc.meta = Json{{"generator", "bundlex"},
                    {"seed", cfg.seed},
                    {"agents", cfg.agents},
                    {"max_endowment", cfg.max_endowment},
                    {"total_objects", cfg.total_objects},
                    {"strongly_trichotomous", cfg.strongly}};
    return doc;
}

}  // namespace bundlex
