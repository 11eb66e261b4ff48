#include "relayia/channel.hpp"

#include <Eigen/SVD>
#include <random>
#include <stdexcept>

namespace relayia {

namespace {

constexpr int kRegenerateCap = 16;

Matrix gaussian(int rows, int cols, std::mt19937_64& rng) {
    // CN(0,1): real and imaginary parts each N(0, 1/2)
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = Complex(normal(rng), normal(rng));
    return m;
}

Matrix int_matrix(std::initializer_list<std::initializer_list<int>> rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (int v : row) m(r, c++) = Complex(v, 0);
        ++r;
    }
    return m;
}

}  // namespace

int numeric_rank(const Matrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("numeric_rank: empty matrix");
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cutoff = tol * s(0) * static_cast<double>(std::max(m.rows(), m.cols()));
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) ++rank;
    return rank;
}

Matrix random_gaussian(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return gaussian(rows, cols, rng);
}

ChannelSet generate_generic(const AntennaConfig& config, std::uint64_t seed) {
    if (!config.valid()) throw std::invalid_argument("generate_generic: invalid config");
    std::mt19937_64 rng(seed);
    ChannelSet cs;
    cs.config = config;
    const int full_up = std::min(config.N, config.M);
    for (int k = 0; k < AntennaConfig::K; ++k) {
        int attempts = 0;
        do {
            cs.uplink[k] = gaussian(config.N, config.M, rng);
            if (++attempts > kRegenerateCap)
                throw std::runtime_error("generate_generic: persistent rank-deficient draws");
        } while (numeric_rank(cs.uplink[k]) != full_up);
        attempts = 0;
        do {
            cs.downlink[k] = gaussian(config.M, config.N, rng);
            if (++attempts > kRegenerateCap)
                throw std::runtime_error("generate_generic: persistent rank-deficient draws");
        } while (numeric_rank(cs.downlink[k]) != full_up);
    }
    return cs;
}

ChannelSet load_fixture(Topology topology) {
    ChannelSet cs;
    if (topology == Topology::AllUnicast) {
        cs.config = {3, 7};
        cs.uplink[0] = int_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
        cs.uplink[1] = int_matrix({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
        cs.uplink[2] = int_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {1, 0, 0}});
        cs.uplink[3] = int_matrix({{0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}});
    } else {
        cs.config = {2, 5};
        cs.uplink[0] = int_matrix({{1, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}});
        cs.uplink[1] = int_matrix({{0, 0}, {0, 0}, {1, 0}, {0, 1}, {0, 0}});
        cs.uplink[2] = int_matrix({{0, 1}, {1, 1}, {0, 0}, {1, 0}, {0, 1}});
        cs.uplink[3] = int_matrix({{0, 1}, {0, 0}, {0, 1}, {0, 0}, {1, 0}});
    }
    for (int k = 0; k < AntennaConfig::K; ++k) cs.downlink[k] = cs.uplink[k].transpose();
    return cs;
}

ChannelSet reduce_antennas(const ChannelSet& channels, int reduced_M, int reduced_N) {
    if (reduced_M < 1 || reduced_N < 1 || reduced_M > channels.config.M ||
        reduced_N > channels.config.N)
        throw std::invalid_argument("reduce_antennas: dimensions out of range");
    ChannelSet out;
    out.config = {reduced_M, reduced_N};
    for (int k = 0; k < AntennaConfig::K; ++k) {
        out.uplink[k] = channels.uplink[k].topLeftCorner(reduced_N, reduced_M);
        out.downlink[k] = channels.downlink[k].topLeftCorner(reduced_M, reduced_N);
    }
    return out;
}

}  // namespace relayia
