#include "relayia/feasibility.hpp"

#include <stdexcept>

#include "relayia/dof.hpp"

namespace relayia {

namespace {

// Identity-block positions (block-row per block-column) of the four
// users' H'_k patterns on the 6 x 3 block grid.
constexpr int kBlockRows[4][3] = {
    {0, 1, 2},  // user 1
    {0, 3, 4},  // user 2
    {1, 3, 5},  // user 3
    {2, 4, 5},  // user 4
};

}  // namespace

BlockFixture construct_block_fixture(int m1, int M, std::uint64_t seed) {
    if (m1 < 1) throw std::invalid_argument("construct_block_fixture: m1 must be positive");
    if (M < 3 * m1) throw std::invalid_argument("construct_block_fixture: M < 3*m1");
    const int N = 6 * m1;

    BlockFixture fixture;
    fixture.m1 = m1;
    fixture.channels.config = {M, N};
    for (int k = 0; k < AntennaConfig::K; ++k) {
        Matrix H = Matrix::Zero(N, M);
        for (int b = 0; b < 3; ++b)
            H.block(kBlockRows[k][b] * m1, b * m1, m1, m1) = Matrix::Identity(m1, m1);
        if (M > 3 * m1)
            H.rightCols(M - 3 * m1) = random_gaussian(N, M - 3 * m1, seed + 17 * k + 1);
        fixture.channels.uplink[k] = H;
        fixture.channels.downlink[k] = H.transpose();
    }
    return fixture;
}

BeamformerSet block_fixture_beamformers(const BlockFixture& fixture) {
    const int m1 = fixture.m1;
    const int M = fixture.channels.config.M;

    BeamformerSet beams;
    beams.topology = Topology::AllUnicast;
    beams.M = M;
    beams.d = m1;
    beams.order = messages(Topology::AllUnicast);
    for (const MessageId& m : beams.order) {
        // user k's three m1-column slices of [I_{3m1}; 0], destinations ascending
        int slot = 0;
        for (int dst = 1; dst <= kUserCount; ++dst) {
            if (dst == m.src) continue;
            if (dst == m.dst) break;
            ++slot;
        }
        Matrix V = Matrix::Zero(M, m1);
        V.block(slot * m1, 0, m1, m1) = Matrix::Identity(m1, m1);
        beams.mats.push_back(std::move(V));
    }
    return beams;
}

FeasibilityResult feasibility_scheme(const ChannelSet& channels, Topology topology) {
    const int M = channels.config.M;
    const int N = channels.config.N;
    const DofProfile profile = classify(topology, M, N);
    const int d = static_cast<int>(profile.feasible_floor);
    if (d < 1) throw std::invalid_argument("feasibility_scheme: floor(d*) = 0, nothing to achieve");

    const int streams = streams_per_user(topology);
    const int pairs = 2 * streams;

    FeasibilityResult result;
    result.d = d;
    if (2 * M <= N || profile.regime == Regime::MLow || profile.regime == Regime::NLow) {
        // reduce both sides to the exact low-transition ratio, stacked solve
        result.route = SchemeRoute::StackedNullSpace;
        result.reduced = reduce_antennas(channels, streams * d, (2 * streams + 1) * d);
    } else {
        // keep users, reduce the relay to the span of the pairwise subspaces
        result.route = SchemeRoute::PairwiseIntersection;
        result.reduced = reduce_antennas(channels, M, pairs * d);
    }
    result.beams = solve_scheme(result.reduced, topology, d, /*seed=*/d + 1);

    const SeparabilityReport report =
        verify_pair_separability(result.reduced, result.beams, topology);
    if (!report.all_ok)
        throw std::runtime_error("feasibility_scheme: degenerate draw failed separability");
    return result;
}

FeasibilityResult feasibility_scheme(Topology topology, int M, int N, std::uint64_t seed) {
    return feasibility_scheme(generate_generic({M, N}, seed), topology);
}

ProbeVerdict probe_infeasibility(const ChannelSet& channels, Topology topology, int d) {
    if (d < 1) throw std::invalid_argument("probe_infeasibility: d must be positive");
    const int M = channels.config.M;
    const int N = channels.config.N;
    const int streams = streams_per_user(topology);
    const int pairs = 2 * streams;

    ProbeVerdict verdict;
    verdict.evidence.user_cap_needed = streams * d;
    verdict.evidence.stacked_route = streams * d <= M && (2 * streams + 1) * d <= N;
    verdict.evidence.pairwise_route = pairs * d <= N && 2 * M - pairs * d >= d;

    if (streams * d > M) {
        verdict.evidence.detail = "single-user cap violated: " + std::to_string(streams * d) +
                                  " streams demanded of " + std::to_string(M) + " user antennas";
        return verdict;
    }

    if (verdict.evidence.stacked_route) {
        ChannelSet reduced = reduce_antennas(channels, streams * d, (2 * streams + 1) * d);
        BeamformerSet beams = solve_scheme(reduced, topology, d, d + 1);
        if (verify_pair_separability(reduced, beams, topology).all_ok) {
            verdict.feasible = true;
            verdict.evidence.detail = "stacked null-space construction verified";
            verdict.beams = std::move(beams);
            verdict.reduced = std::move(reduced);
            return verdict;
        }
        verdict.evidence.detail = "stacked construction failed separability (degenerate draw)";
        return verdict;
    }

    if (verdict.evidence.pairwise_route) {
        ChannelSet reduced = N > pairs * d ? reduce_antennas(channels, M, pairs * d) : channels;
        BeamformerSet beams = solve_scheme(reduced, topology, d, d + 1);
        if (verify_pair_separability(reduced, beams, topology).all_ok) {
            verdict.feasible = true;
            verdict.evidence.detail = "pairwise intersection construction verified";
            verdict.beams = std::move(beams);
            verdict.reduced = std::move(reduced);
            return verdict;
        }
        verdict.evidence.detail = "pairwise construction failed joint-rank verification";
        return verdict;
    }

    if (pairs * d > N)
        verdict.evidence.detail = "joint pair span " + std::to_string(pairs * d) +
                                  " exceeds " + std::to_string(N) + " relay dimensions and the " +
                                  "stacked system needs " + std::to_string((2 * streams + 1) * d) +
                                  " of them";
    else
        verdict.evidence.detail = "intersection dimension 2M-N below demand and stacked ratio unreachable";
    return verdict;
}

}  // namespace relayia
