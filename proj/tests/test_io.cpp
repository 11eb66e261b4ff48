#include <doctest.h>

#include <cstdio>
#include <nlohmann/json.hpp>

#include "relayia/aligner.hpp"
#include "relayia/io.hpp"

using namespace relayia;

TEST_SUITE_BEGIN("io");

TEST_CASE("channel JSON round-trip is exact") {
    const ChannelSet cs = generate_generic({3, 7}, 11);
    const ChannelSet back = channels_from_json(channels_to_json(cs));
    CHECK(back.config.M == 3);
    CHECK(back.config.N == 7);
    for (int k = 1; k <= 4; ++k) {
        CHECK(back.up(k) == cs.up(k));
        CHECK(back.down(k) == cs.down(k));
    }
}

TEST_CASE("beamformer JSON round-trip is exact") {
    const ChannelSet cs = load_fixture(Topology::AllUnicast);
    const BeamformerSet beams = solve_scheme(cs, Topology::AllUnicast, 1, 5);
    const BeamformerSet back = beams_from_json(beams_to_json(beams));
    CHECK(back.topology == beams.topology);
    CHECK(back.d == beams.d);
    REQUIRE(back.order == beams.order);
    for (std::size_t i = 0; i < beams.mats.size(); ++i) CHECK(back.mats[i] == beams.mats[i]);
}

TEST_CASE("malformed documents are rejected") {
    nlohmann::json j = channels_to_json(generate_generic({2, 5}, 1));
    j["uplink"].erase(3);
    CHECK_THROWS_AS(channels_from_json(j), std::invalid_argument);

    nlohmann::json bad = nlohmann::json::array({nlohmann::json::array({1.0, 2.0})});
    CHECK_THROWS_AS(matrix_from_json(bad), std::invalid_argument);
}

TEST_CASE("save and load through a file") {
    const std::string path = "io_roundtrip_tmp.json";
    const ChannelSet cs = generate_generic({2, 5}, 9);
    save_json(channels_to_json(cs), path);
    const ChannelSet back = channels_from_json(load_json(path));
    CHECK(back.up(1) == cs.up(1));
    std::remove(path.c_str());
}

TEST_SUITE_END();
