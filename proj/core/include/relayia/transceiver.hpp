#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "relayia/aligner.hpp"
#include "relayia/channel.hpp"

namespace relayia {

/// Unit-variance symbol block per active message, d entries each.
using SymbolMap = std::map<MessageId, Vector>;

/// Per-pair relay receive filters U_p (N x d, orthonormal columns,
/// orthogonal to every non-pair message image) and the effective d x d
/// coefficients of the two pair members.
struct RelayCombiner {
    Topology topology = Topology::AllUnicast;
    int d = 0;
    std::vector<Matrix> U;        // per pair
    std::vector<Matrix> coeff_a;  // U^H H_i V_ij for pair member (i,j)
    std::vector<Matrix> coeff_b;  // U^H H_j V_ji for pair member (j,i)
};

/// Phase-2 construction from the reciprocal solve on transposed downlink
/// channels: relay precoders T_p and user-side receive filters (the
/// reciprocal transmit beamformers, used conjugated).
struct DownlinkDesign {
    Topology topology = Topology::AllUnicast;
    int d = 0;
    std::vector<Matrix> T;          // per pair, N x d, orthonormal columns
    BeamformerSet receive_filters;  // reciprocal beams; filter for s_{pair(i,j)} at user j is conj(V~_ji)
};

/// Relay transmit vector for one channel use plus the per-pair amplitude
/// actually applied (needed by the decoder).
struct RelayForward {
    Vector x;
    std::vector<double> gain;
};

struct SimResult {
    Topology topology = Topology::AllUnicast;
    std::vector<double> power_dB;
    std::vector<MessageId> order;
    // mean_rate[p][m]: mean rate of message m at power point p, bits per use
    std::vector<std::vector<double>> mean_rate;
    std::vector<double> slope;  // per message, bits per 3.01 dB, top-half fit
    double max_decode_error = 0.0;
    int trials = 0;
};

/// Builds the per-pair zero-forcing combiners. Throws when the beams fail
/// pair separability (non-pair leakage above tol or pair coefficients
/// rank deficient).
RelayCombiner relay_combiners(const ChannelSet& channels, const BeamformerSet& beams,
                              Topology topology, double tol = 1e-9);

/// Uplink superposition: X_k = sum_j V_kj u_kj, with the per-user power
/// constraint checked against `power` (beams carry their scaling from the
/// solve); unit-variance AWGN added when noise_seed is set.
Vector phase1(const ChannelSet& channels, const BeamformerSet& beams, const SymbolMap& symbols,
              std::optional<std::uint64_t> noise_seed, double power);

/// s_p = U_p^H y for every pair.
std::vector<Vector> relay_resolve(const RelayCombiner& combiner, const Vector& observation);

/// Reciprocal solve on transposed downlink channels; d is inferred from
/// the channel shape (same feasible demand as phase 1).
DownlinkDesign phase2_design(const ChannelSet& channels, Topology topology, std::uint64_t seed,
                             int d);

/// X_R = sum_p gain_p T_p s_p. The relay power budget is split equally
/// across pairs; each gain normalizes against the statistical variance of
/// s_p implied by the combiner coefficients.
RelayForward relay_transmit(const DownlinkDesign& design, const RelayCombiner& combiner,
                            const std::vector<Vector>& s, double power);

/// Filters each user observation, inverts the pair-combination channel,
/// subtracts the user's own symbol contribution and returns per-message
/// estimates. Throws when an effective coefficient matrix is singular at
/// tolerance.
SymbolMap user_decode(const DownlinkDesign& design, const RelayCombiner& combiner,
                      const ChannelSet& channels, const std::array<Vector, 4>& user_observations,
                      const SymbolMap& own_symbols, const std::vector<double>& gains);

/// Monte-Carlo rate estimate across a transmit-power grid. Each trial
/// draws fresh channels, runs the two-phase design and evaluates the
/// post-cancellation Shannon rate per message analytically; the slope is
/// a least-squares fit over the top half of the grid.
SimResult simulate(const AntennaConfig& config, Topology topology,
                   const std::vector<double>& power_grid_dB, int trials, std::uint64_t seed);

}  // namespace relayia
