#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "relayia/aligner.hpp"
#include "relayia/channel.hpp"

namespace relayia {

/// Identity-block channel construction for exact pairwise alignment on a
/// 6*m1-antenna relay: H_k = [H'_k  R_k] with fixed identity-block
/// patterns H'_k and random fill R_k of width M - 3*m1.
struct BlockFixture {
    int m1 = 0;
    ChannelSet channels;
};

/// Throws std::invalid_argument when M < 3*m1.
BlockFixture construct_block_fixture(int m1, int M, std::uint64_t seed);

/// The scheme attached to the block fixture: each user transmits with
/// V_k = [I_{3m1}; 0], split into three m1-column beamformers per message
/// (destinations ascending). Alignment residuals are identically zero.
BeamformerSet block_fixture_beamformers(const BlockFixture& fixture);

enum class SchemeRoute { StackedNullSpace, PairwiseIntersection };

/// Antenna reduction plus beamformer construction achieving floor(d*)
/// symbols per message without symbol extensions.
struct FeasibilityResult {
    ChannelSet reduced;
    BeamformerSet beams;
    int d = 0;
    SchemeRoute route = SchemeRoute::StackedNullSpace;
};

/// Generates generic channels at (M, N), reduces antennas per regime and
/// solves at d = floor(d*). Throws when floor(d*) = 0 or on a degenerate
/// draw that fails verification.
FeasibilityResult feasibility_scheme(Topology topology, int M, int N, std::uint64_t seed);

/// Same reduction and solve applied to caller-provided channels.
FeasibilityResult feasibility_scheme(const ChannelSet& channels, Topology topology);

/// Rank evidence attached to a probe verdict.
struct ProbeEvidence {
    int user_cap_needed = 0;    // streams*d, must be <= M for any scheme
    bool stacked_route = false; // streams*d <= M and (2*streams+1)*d <= N
    bool pairwise_route = false;// pairs*d <= N and 2M - pairs*d >= d
    std::string detail;
};

struct ProbeVerdict {
    bool feasible = false;
    ProbeEvidence evidence;
    std::optional<BeamformerSet> beams;
    std::optional<ChannelSet> reduced;
};

/// Attempts the applicable construction at DoF demand d and returns the
/// verdict with the violated rank condition, or a verified beamformer
/// set.
ProbeVerdict probe_infeasibility(const ChannelSet& channels, Topology topology, int d);

}  // namespace relayia
