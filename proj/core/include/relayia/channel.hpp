#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>

#include "relayia/topology.hpp"

namespace relayia {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default relative tolerance for numeric rank decisions.
inline constexpr double kRankTol = 1e-10;

/// Antenna configuration: M antennas per user, N at the relay, 4 users.
struct AntennaConfig {
    int M = 0;
    int N = 0;
    static constexpr int K = kUserCount;
    bool valid() const { return M >= 1 && N >= 1; }
};

/// Per-user uplink (N x M) and downlink (M x N) channel matrices.
/// Index 0..3 corresponds to user 1..4.
struct ChannelSet {
    AntennaConfig config;
    std::array<Matrix, 4> uplink;
    std::array<Matrix, 4> downlink;

    const Matrix& up(int user) const { return uplink[user - 1]; }
    const Matrix& down(int user) const { return downlink[user - 1]; }
};

/// Numeric rank: singular values above tol * sigma_max * max(rows, cols).
int numeric_rank(const Matrix& m, double tol = kRankTol);

/// i.i.d. CN(0,1) entries, deterministic per seed. Every matrix is
/// regenerated (bounded retries) on the measure-zero rank-deficient draw.
ChannelSet generate_generic(const AntennaConfig& config, std::uint64_t seed);

/// The integer channel matrices used for the full-rank certificates:
/// four 7x3 uplinks for AllUnicast, four 5x2 uplinks for MultipleUnicast.
/// Downlink is filled as the transpose of uplink.
ChannelSet load_fixture(Topology topology);

/// Keep the leading reduced_N x reduced_M uplink (and transposed downlink)
/// submatrices. Throws std::invalid_argument on a dimension violation.
ChannelSet reduce_antennas(const ChannelSet& channels, int reduced_M, int reduced_N);

/// Seeded complex Gaussian matrix, entries CN(0,1).
Matrix random_gaussian(int rows, int cols, std::uint64_t seed);

}  // namespace relayia
