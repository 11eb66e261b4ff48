#include "relayia/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace relayia {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("matrix_from_json: expected an array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw std::invalid_argument("matrix_from_json: ragged rows");
        for (int c = 0; c < cols; ++c) {
            const auto& entry = j[r][c];
            if (!entry.is_array() || entry.size() != 2)
                throw std::invalid_argument("matrix_from_json: entries must be [re, im]");
            m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

json channels_to_json(const ChannelSet& channels) {
    json j;
    j["M"] = channels.config.M;
    j["N"] = channels.config.N;
    j["uplink"] = json::array();
    j["downlink"] = json::array();
    for (int k = 0; k < AntennaConfig::K; ++k) {
        j["uplink"].push_back(matrix_to_json(channels.uplink[k]));
        j["downlink"].push_back(matrix_to_json(channels.downlink[k]));
    }
    return j;
}

ChannelSet channels_from_json(const json& j) {
    ChannelSet cs;
    cs.config = {j.at("M").get<int>(), j.at("N").get<int>()};
    if (!cs.config.valid()) throw std::invalid_argument("channels_from_json: invalid M, N");
    const auto& up = j.at("uplink");
    const auto& down = j.at("downlink");
    if (up.size() != AntennaConfig::K || down.size() != AntennaConfig::K)
        throw std::invalid_argument("channels_from_json: expected 4 uplink and 4 downlink matrices");
    for (int k = 0; k < AntennaConfig::K; ++k) {
        cs.uplink[k] = matrix_from_json(up[k]);
        cs.downlink[k] = matrix_from_json(down[k]);
        if (cs.uplink[k].rows() != cs.config.N || cs.uplink[k].cols() != cs.config.M)
            throw std::invalid_argument("channels_from_json: uplink shape mismatch");
        if (cs.downlink[k].rows() != cs.config.M || cs.downlink[k].cols() != cs.config.N)
            throw std::invalid_argument("channels_from_json: downlink shape mismatch");
    }
    return cs;
}

json beams_to_json(const BeamformerSet& beams) {
    json j;
    j["topology"] = to_string(beams.topology);
    j["M"] = beams.M;
    j["d"] = beams.d;
    j["power_scale"] = beams.power_scale;
    j["beams"] = json::array();
    for (std::size_t i = 0; i < beams.order.size(); ++i)
        j["beams"].push_back({{"src", beams.order[i].src},
                              {"dst", beams.order[i].dst},
                              {"matrix", matrix_to_json(beams.mats[i])}});
    return j;
}

BeamformerSet beams_from_json(const json& j) {
    BeamformerSet beams;
    beams.topology = topology_from_string(j.at("topology").get<std::string>());
    beams.M = j.at("M").get<int>();
    beams.d = j.at("d").get<int>();
    beams.power_scale = j.value("power_scale", 1.0);
    for (const auto& b : j.at("beams")) {
        beams.order.push_back({b.at("src").get<int>(), b.at("dst").get<int>()});
        Matrix m = matrix_from_json(b.at("matrix"));
        if (m.rows() != beams.M || m.cols() != beams.d)
            throw std::invalid_argument("beams_from_json: beamformer shape mismatch");
        beams.mats.push_back(std::move(m));
    }
    if (beams.order != messages(beams.topology))
        throw std::invalid_argument("beams_from_json: message set does not match topology");
    return beams;
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

}  // namespace relayia
