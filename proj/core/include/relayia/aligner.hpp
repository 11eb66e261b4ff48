#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "relayia/channel.hpp"
#include "relayia/topology.hpp"

namespace relayia {

/// Stacked block matrix of the inter-user alignment equations.
///
/// For AllUnicast at (3b, 7b) the matrix is 35b x 36b (5 row-block
/// equations, 12 column blocks of width M). For MultipleUnicast at
/// (2b, 5b) it is 15b x 16b (3 equations, 8 column blocks).
struct AlignmentSystem {
    Topology topology = Topology::AllUnicast;
    Matrix stacked;
    std::vector<MessageId> layout;  // column-block order
    int block_cols = 0;             // M, width of each column block
    int symbols_per_message = 0;    // b
};

/// Per-message M x d transmit beamformers, stored in messages(topology)
/// order.
struct BeamformerSet {
    Topology topology = Topology::AllUnicast;
    int M = 0;
    int d = 0;
    std::vector<MessageId> order;
    std::vector<Matrix> mats;
    double power_scale = 1.0;

    const Matrix& at(const MessageId& m) const;
    Matrix& at(const MessageId& m);
};

/// The seven relay-side image vectors F_1..F_7 (columns grouped into G)
/// for the all-unicast scheme at ratio 3/7.
struct RelayBasis {
    std::vector<Matrix> F;  // 7 blocks, each N x d
    Matrix G;               // N x 7d
    int rank = 0;
};

struct PairSeparability {
    MessageId a, b;
    int interference_rank = 0;
    int rank_with_a = 0;
    int rank_with_b = 0;
    double margin = 0.0;  // retained/discarded singular value ratio
    bool ill_conditioned = false;
    bool ok = false;
};

struct SeparabilityReport {
    int d = 0;
    int expected_interference_rank = 0;
    std::vector<PairSeparability> pairs;
    bool all_ok = false;
};

/// Builds the stacked alignment system. Requires channels at the exact
/// low-transition ratio (M = 3d, N = 7d for AllUnicast; M = 2d, N = 5d
/// for MultipleUnicast); throws std::invalid_argument otherwise.
AlignmentSystem build_system(const ChannelSet& channels, Topology topology, int d);

/// Null-space solve of the stacked system. For d = 1 the direction is
/// unique up to a complex scalar; for d > 1, d independent null-space
/// samples are assembled per message block (resampled if any block comes
/// out column-rank deficient). Columns are rescaled so that the largest
/// per-user transmit covariance trace equals `power`.
BeamformerSet solve_beamformers(const AlignmentSystem& system, const ChannelSet& channels,
                                std::uint64_t seed, double power = 1.0);

/// G = [H2 V21, H3 V31, H3 V32, H3 V34, H4 V41, H4 V42, H4 V43].
/// AllUnicast at ratio 3/7 only; throws on rank deficiency below N.
RelayBasis relay_basis(const ChannelSet& channels, const BeamformerSet& beams);

/// For every pairwise couple, checks that the relay images of all other
/// messages span exactly N - d dimensions and that each pair member's
/// image raises the rank by d. Failures are report entries, not errors.
SeparabilityReport verify_pair_separability(const ChannelSet& channels, const BeamformerSet& beams,
                                            Topology topology, double tol = kRankTol);

/// Orthonormal basis of col(H_i) intersected with col(H_j). Empty matrix
/// when the intersection is trivial.
Matrix intersection_subspace(const Matrix& H_i, const Matrix& H_j, double tol = kRankTol);

/// Pairwise (one-to-one) construction: for each couple, d common
/// directions are drawn in the column-space intersection and V_ij, V_ji
/// are solved so that H_i V_ij = H_j V_ji spans them. Requires
/// 2M - N >= d; the joint relay span of all couples is verified to be
/// (number of couples) * d and directions are resampled on failure.
BeamformerSet solve_one_to_one(const ChannelSet& channels, Topology topology, int d,
                               std::uint64_t seed = 0, double power = 1.0);

/// Residual of the dependent multiple-unicast alignment equation
/// H1 V13 + H2 V23 + H3 V31 + H3 V32, relative to the beamformer scale.
/// Exactly the sum of the first two solved equations minus the third, so
/// it must vanish on any solution of the stacked system.
double redundancy_identity_residual(const ChannelSet& channels, const BeamformerSet& beams);

/// Max alignment-equation residual relative to the beamformer norms.
double alignment_residual(const ChannelSet& channels, const BeamformerSet& beams);

/// Picks the construction matching the channel shape: stacked null-space
/// solve at the exact low ratio, pairwise intersections otherwise.
BeamformerSet solve_scheme(const ChannelSet& channels, Topology topology, int d,
                           std::uint64_t seed, double power = 1.0);

}  // namespace relayia
