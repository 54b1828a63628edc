#include "rmdp/mdp_json.hpp"

#include "rmdp/errors.hpp"

#include <cmath>
#include <limits>

namespace rmdp {

using nlohmann::json;

namespace {

template <class T>
T field(const json& obj, const char* key) {
    if (!obj.contains(key)) throw DataError(std::string("mdp json: missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("mdp json: bad field '") + key + "': " + e.what());
    }
}

} // namespace

MdpSpec mdp_from_json(const json& doc) {
    if (!doc.is_object()) throw DataError("mdp json: top level must be an object");
    MdpSpec spec;
    spec.n_states = field<std::size_t>(doc, "n_states");
    spec.n_actions = field<std::size_t>(doc, "n_actions");
    spec.discount = field<double>(doc, "discount");

    const auto rows = field<std::vector<std::vector<double>>>(doc, "utility");
    if (rows.size() != spec.n_states) throw DataError("mdp json: utility needs one row per state");
    for (const auto& row : rows) {
        if (row.size() != spec.n_actions)
            throw DataError("mdp json: utility rows need one entry per action");
        spec.utility.insert(spec.utility.end(), row.begin(), row.end());
    }

    const std::size_t cells = spec.n_states * spec.n_actions;
    std::vector<std::optional<TransitionSet>> slots(cells);
    for (const auto& entry : field<json>(doc, "transitions")) {
        const auto s = field<std::size_t>(entry, "state");
        const auto a = field<std::size_t>(entry, "action");
        if (s >= spec.n_states || a >= spec.n_actions)
            throw DataError("mdp json: transition refers to an unknown state or action");
        auto& slot = slots[s * spec.n_actions + a];
        if (slot) throw DataError("mdp json: duplicate transition entry");

        auto targets = field<std::vector<std::size_t>>(entry, "targets");
        try {
            Distribution center(field<std::vector<double>>(entry, "center"));
            AmbiguitySet set = entry.contains("radius")
                                   ? AmbiguitySet::with_radius(std::move(center),
                                                               entry.at("radius").is_null()
                                                                   ? std::numeric_limits<double>::infinity()
                                                                   : field<double>(entry, "radius"))
                                   : AmbiguitySet::calibrated(std::move(center),
                                                              field<std::size_t>(entry, "n_obs"),
                                                              field<double>(entry, "confidence"));
            slot = TransitionSet{std::move(targets), std::move(set)};
        } catch (const InvalidArgument& e) {
            throw DataError(std::string("mdp json: ") + e.what());
        }
    }
    for (auto& slot : slots) {
        if (!slot) throw DataError("mdp json: every (state, action) needs a transition entry");
        spec.transitions.push_back(std::move(*slot));
    }
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("mdp json: ") + e.what());
    }
    return spec;
}

json mdp_to_json(const MdpSpec& spec) {
    json doc;
    doc["n_states"] = spec.n_states;
    doc["n_actions"] = spec.n_actions;
    doc["discount"] = spec.discount;
    json rows = json::array();
    for (std::size_t s = 0; s < spec.n_states; ++s) {
        json row = json::array();
        for (std::size_t a = 0; a < spec.n_actions; ++a) row.push_back(spec.u(s, a));
        rows.push_back(std::move(row));
    }
    doc["utility"] = std::move(rows);
    json transitions = json::array();
    for (std::size_t s = 0; s < spec.n_states; ++s) {
        for (std::size_t a = 0; a < spec.n_actions; ++a) {
            const auto& t = spec.transition(s, a);
            json entry{{"state", s}, {"action", a}, {"targets", t.targets}};
            entry["center"] = std::vector<double>(t.set.center.probs().begin(),
                                                  t.set.center.probs().end());
            // JSON has no infinity; null marks the whole simplex
            if (std::isinf(t.set.radius))
                entry["radius"] = nullptr;
            else
                entry["radius"] = t.set.radius;
            if (t.set.n_obs) entry["n_obs"] = *t.set.n_obs;
            if (t.set.confidence) entry["confidence"] = *t.set.confidence;
            transitions.push_back(std::move(entry));
        }
    }
    doc["transitions"] = std::move(transitions);
    return doc;
}

} // namespace rmdp
