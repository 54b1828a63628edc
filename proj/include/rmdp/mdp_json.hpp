#pragma once

#include "rmdp/mdp.hpp"

#include "json.hpp"

namespace rmdp {

/**
 * JSON shape of an MdpSpec:
 *
 *   { "n_states": 2, "n_actions": 1, "discount": 0.9,
 *     "utility": [[u(0,0), ...], [u(1,0), ...]],
 *     "transitions": [ { "state": 0, "action": 0, "targets": [0, 1],
 *                        "center": [0.5, 0.5], "radius": 0.1 }, ... ] }
 *
 * A transition may give "n_obs" and "confidence" instead of "radius", in
 * which case the radius is calibrated. Every (state, action) pair must appear
 * exactly once. Throws DataError on malformed documents.
 */
MdpSpec mdp_from_json(const nlohmann::json& doc);
nlohmann::json mdp_to_json(const MdpSpec& spec);

} // namespace rmdp
