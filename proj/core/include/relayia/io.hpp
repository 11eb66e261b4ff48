#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "relayia/aligner.hpp"
#include "relayia/channel.hpp"

namespace relayia {

/// {"M", "N", "uplink": [4 matrices as arrays of rows of [re, im]],
///  "downlink": [...]}. The loader validates shapes.
nlohmann::json channels_to_json(const ChannelSet& channels);
ChannelSet channels_from_json(const nlohmann::json& j);

/// {"topology", "M", "N", "d", "power_scale",
///  "beams": [{"src", "dst", "matrix": rows of [re, im]}, ...]}
nlohmann::json beams_to_json(const BeamformerSet& beams);
BeamformerSet beams_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace relayia
