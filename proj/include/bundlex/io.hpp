#pragma once

#include "bundlex/audits.hpp"
#include "bundlex/cycles.hpp"
#include "bundlex/mechanism.hpp"
#include "bundlex/model.hpp"
#include "bundlex/responsive.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bundlex {

using Json = nlohmann::ordered_json;

/// An instance file: market, optional preference profile, free-form metadata.
struct Document {
    Instance instance;
    std::optional<MarginalProfile> marginal;
    std::optional<TrichotomousProfile> trichotomous;
    Json meta;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw input_error(what);
}

inline std::vector<std::string> string_list(const Json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        require(e.is_string(), what + " must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline void only_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    require(j.is_object(), what + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        require(ok, "unknown field '" + key + "' in " + what);
    }
}

}  // namespace detail

inline Json set_to_json(const Instance& inst, const ObjectSet& s) {
    Json out = Json::array();
    for_each_member(s, [&](ObjectIndex o) { out.push_back(inst.object_name(o)); });
    return out;
}

inline ObjectSet set_from_json(const Instance& inst, const Json& j, const std::string& what) {
    ObjectSet s(inst.num_objects());
    for (const auto& name : detail::string_list(j, what)) {
        auto o = inst.object(name);
        detail::require(!s.test(o), "object '" + name + "' listed twice in " + what);
        s.set(o);
    }
    return s;
}

inline std::string rational_to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Json extension_to_json(const Instance& inst, const ResponsiveExtension& ext) {
    Json out = Json::object();
    for (ObjectIndex o = 0; o < ext.utility.size(); ++o) out[inst.object_name(o)] = rational_to_string(ext.utility[o]);
    return out;
}

inline Json trichotomous_to_json(const Instance& inst, const TrichotomousPreference& p) {
    return Json{{"attractive", set_to_json(inst, p.attractive)}, {"bearable", set_to_json(inst, p.bearable)}};
}

inline Json marginal_to_json(const Instance& inst, const MarginalPreference& p) {
    Json classes = Json::array();
    for (const auto& c : p.classes()) classes.push_back(set_to_json(inst, c));
    return Json{{"classes", classes}};
}

inline Json matching_to_json(const Instance& inst, const Matching& m) {
    Json out = Json::object();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) out[inst.agent_name(i)] = set_to_json(inst, m[i]);
    return out;
}

inline Matching matching_from_json(const Instance& inst, const Json& j) {
    detail::require(j.is_object(), "matching must be an object mapping agents to object lists");
    Matching m;
    m.bundles.assign(inst.num_agents(), inst.empty_set());
    std::vector<bool> seen(inst.num_agents(), false);
    for (const auto& [agent, bundle] : j.items()) {
        auto i = inst.agent(agent);
        m.bundles[i] = set_from_json(inst, bundle, "bundle of '" + agent + "'");
        seen[i] = true;
    }
    for (AgentIndex i = 0; i < inst.num_agents(); ++i)
        detail::require(seen[i], "matching has no bundle for '" + inst.agent_name(i) + "'");
    validate_matching(inst, m);
    return m;
}

inline Document document_from_json(const Json& j) {
    detail::only_keys(j, {"agents", "objects", "endowments", "preferences", "meta"}, "instance");
    detail::require(j.contains("agents") && j.contains("endowments"), "instance needs 'agents' and 'endowments'");
    RawInstance raw;
    raw.agents = detail::string_list(j["agents"], "'agents'");
    const auto& own = j["endowments"];
    detail::require(own.is_object(), "'endowments' must be an object");
    for (const auto& [agent, objects] : own.items())
        raw.endowments[agent] = detail::string_list(objects, "endowment of '" + agent + "'");
    if (j.contains("objects")) {
        raw.objects = detail::string_list(j["objects"], "'objects'");
    } else {
        for (const auto& [_, objects] : raw.endowments) raw.objects.insert(raw.objects.end(), objects.begin(), objects.end());
    }

    Document doc;
    doc.instance = validate_instance(raw);
    const auto& inst = doc.instance;
    if (j.contains("meta")) doc.meta = j["meta"];
    if (!j.contains("preferences")) return doc;

    const auto& prefs = j["preferences"];
    detail::require(prefs.is_object(), "'preferences' must be an object");
    for (const auto& [agent, _] : prefs.items()) inst.agent(agent);
    MarginalProfile marginal;
    TrichotomousProfile tri;
    bool all_tri = true;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto& name = inst.agent_name(i);
        detail::require(prefs.contains(name), "no preference for agent '" + name + "'");
        const auto& p = prefs[name];
        const std::string what = "preference of '" + name + "'";
        detail::only_keys(p, {"attractive", "bearable", "classes"}, what);
        if (p.contains("classes")) {
            detail::require(!p.contains("attractive") && !p.contains("bearable"),
                            what + " mixes 'classes' with attractive/bearable sets");
            const auto& cj = p["classes"];
            detail::require(cj.is_array(), what + ": 'classes' must be an array of object lists");
            std::vector<ObjectSet> classes;
            ObjectSet rest = full_set(inst.num_objects());
            for (const auto& c : cj) {
                classes.push_back(set_from_json(inst, c, what));
                detail::require(!classes.back().intersects(~rest), what + " lists an object in two classes");
                rest -= classes.back();
            }
            if (rest.any()) classes.push_back(rest);
            marginal.emplace_back(classes);
            all_tri = false;
        } else {
            detail::require(p.contains("attractive"), what + " needs 'attractive' (and optionally 'bearable')");
            TrichotomousPreference t{set_from_json(inst, p["attractive"], what),
                                     p.contains("bearable") ? set_from_json(inst, p["bearable"], what)
                                                            : inst.empty_set()};
            check_trichotomous(inst, i, t);
            marginal.push_back(to_marginal(t));
            tri.push_back(std::move(t));
        }
    }
    if (all_tri) {
        doc.trichotomous = std::move(tri);
    } else {
        TrichotomousProfile converted;
        try {
            for (AgentIndex i = 0; i < inst.num_agents(); ++i)
                converted.push_back(to_trichotomous(marginal[i], inst.endowment(i)));
            doc.trichotomous = std::move(converted);
        } catch (const input_error&) {
        }
    }
    doc.marginal = std::move(marginal);
    return doc;
}

inline Json document_to_json(const Document& doc) {
    const auto& inst = doc.instance;
    Json j;
    j["agents"] = inst.agent_names();
    j["objects"] = inst.object_names();
    Json own = Json::object();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) own[inst.agent_name(i)] = set_to_json(inst, inst.endowment(i));
    j["endowments"] = own;
    if (doc.trichotomous || doc.marginal) {
        Json prefs = Json::object();
        for (AgentIndex i = 0; i < inst.num_agents(); ++i)
            prefs[inst.agent_name(i)] = doc.trichotomous ? trichotomous_to_json(inst, (*doc.trichotomous)[i])
                                                         : marginal_to_json(inst, (*doc.marginal)[i]);
        j["preferences"] = prefs;
    }
    if (!doc.meta.is_null()) j["meta"] = doc.meta;
    return j;
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw input_error(source + ": " + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline Document read_document(const std::string& path) { return document_from_json(read_json_file(path)); }

inline Json counts_to_json(const Instance& inst, const std::vector<std::size_t>& counts) {
    Json out = Json::object();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) out[inst.agent_name(i)] = counts[i];
    return out;
}

inline Json agent_list_to_json(const Instance& inst, const std::vector<AgentIndex>& agents) {
    Json out = Json::array();
    for (auto i : agents) out.push_back(inst.agent_name(i));
    return out;
}

inline Json sets_to_json(const Instance& inst, const AgentSets& sets) {
    Json out = Json::object();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) out[inst.agent_name(i)] = set_to_json(inst, sets[i]);
    return out;
}

inline Json trace_to_json(const Instance& inst, const MechanismTrace& trace) {
    Json rounds = Json::array();
    for (const auto& r : trace.rounds) {
        Json jr;
        jr["round"] = r.round;
        jr["matching"] = matching_to_json(inst, r.mu);
        jr["promises"] = r.promises.empty() ? Json(nullptr) : counts_to_json(inst, r.promises);
        jr["non_improvable"] = agent_list_to_json(inst, r.non_improvable);
        jr["bearable"] = sets_to_json(inst, r.bearable);
        jr["bearable_bar"] = sets_to_json(inst, r.bearable_bar);
        rounds.push_back(std::move(jr));
    }
    Json elicited = Json::object();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i)
        elicited[inst.agent_name(i)] = trace.elicited_at[i] ? Json(*trace.elicited_at[i]) : Json(nullptr);
    Json j;
    j["rounds"] = rounds;
    j["elicited_at"] = elicited;
    j["final"] = matching_to_json(inst, trace.final);
    j["final_promises"] = counts_to_json(inst, trace.final_promises);
    j["flow_queries"] = trace.flow_queries;
    return j;
}

inline Json cycle_to_json(const Instance& inst, const Cycle& c) {
    Json out = Json::array();
    for (const auto& [i, o] : c.steps) out.push_back(Json{{"agent", inst.agent_name(i)}, {"receives", inst.object_name(o)}});
    return out;
}

inline Json manipulation_to_json(const Instance& inst, const ManipulationWitness& w) {
    Json j;
    j["agent"] = inst.agent_name(w.agent);
    j["truthful"] = trichotomous_to_json(inst, w.truthful);
    j["misreport"] = trichotomous_to_json(inst, w.misreport);
    j["truthful_bundle"] = set_to_json(inst, w.truthful_bundle);
    j["misreport_bundle"] = set_to_json(inst, w.misreport_bundle);
    j["certificate"] = extension_to_json(inst, w.certificate);
    return j;
}

inline Json block_to_json(const Instance& inst, const BlockWitness& w) {
    Json j;
    j["coalition"] = agent_list_to_json(inst, w.coalition);
    Json re = Json::object();
    for (std::size_t k = 0; k < w.coalition.size(); ++k) re[inst.agent_name(w.coalition[k])] = set_to_json(inst, w.reallocation[k]);
    j["reallocation"] = re;
    Json certs = Json::object();
    for (std::size_t k = 0; k < w.certificates.size(); ++k)
        certs[inst.agent_name(w.coalition[k])] =
            w.certificates[k] ? extension_to_json(inst, *w.certificates[k]) : Json(nullptr);
    j["certificates"] = certs;
    return j;
}

}  // namespace bundlex
