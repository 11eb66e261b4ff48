#include "relayia/aligner.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace relayia {

namespace {

constexpr int kResampleCap = 8;

/// Participants of each alignment equation (user = message source).
const std::vector<std::vector<MessageId>>& equations(Topology t) {
    static const std::vector<std::vector<MessageId>> y = {
        {{1, 2}, {2, 1}, {3, 4}, {4, 3}},
        {{1, 3}, {3, 1}, {3, 4}, {4, 3}},
        {{1, 4}, {4, 1}, {3, 4}, {4, 3}},
        {{2, 3}, {3, 2}, {3, 4}, {4, 3}},
        {{2, 4}, {4, 2}, {3, 4}, {4, 3}},
    };
    static const std::vector<std::vector<MessageId>> x = {
        {{2, 3}, {2, 4}, {3, 2}, {4, 2}},
        {{1, 3}, {1, 4}, {3, 1}, {4, 1}},
        {{1, 4}, {2, 4}, {4, 1}, {4, 2}},
    };
    return t == Topology::AllUnicast ? y : x;
}

int column_index(const std::vector<MessageId>& layout, const MessageId& m) {
    const auto it = std::find(layout.begin(), layout.end(), m);
    if (it == layout.end()) throw std::invalid_argument("message not in layout: " + to_string(m));
    return static_cast<int>(it - layout.begin());
}

Matrix gaussian_seeded(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = Complex(normal(rng), normal(rng));
    return m;
}

int svd_rank(const Eigen::VectorXd& sv, double tol, int max_dim) {
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = tol * sv(0) * max_dim;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

void scale_to_power(BeamformerSet& beams, double power) {
    double max_trace = 0.0;
    for (int user = 1; user <= kUserCount; ++user) {
        double trace = 0.0;
        for (std::size_t i = 0; i < beams.order.size(); ++i)
            if (beams.order[i].src == user) trace += beams.mats[i].squaredNorm();
        max_trace = std::max(max_trace, trace);
    }
    if (max_trace == 0.0) return;
    const double alpha = std::sqrt(power / max_trace);
    for (auto& m : beams.mats) m *= alpha;
    beams.power_scale = alpha;
}

Matrix relay_image(const ChannelSet& channels, const BeamformerSet& beams, const MessageId& m) {
    return channels.up(m.src) * beams.at(m);
}

}  // namespace

const Matrix& BeamformerSet::at(const MessageId& m) const {
    return mats[column_index(order, m)];
}

Matrix& BeamformerSet::at(const MessageId& m) {
    return mats[column_index(order, m)];
}

AlignmentSystem build_system(const ChannelSet& channels, Topology topology, int d) {
    const int streams = streams_per_user(topology);
    const int M = channels.config.M;
    const int N = channels.config.N;
    if (d < 1 || M != streams * d || N != (2 * streams + 1) * d)
        throw std::invalid_argument("build_system: channels not at the alignment ratio for d");

    AlignmentSystem sys;
    sys.topology = topology;
    sys.layout = messages(topology);
    sys.block_cols = M;
    sys.symbols_per_message = d;

    const auto& eqs = equations(topology);
    sys.stacked = Matrix::Zero(static_cast<int>(eqs.size()) * N,
                               static_cast<int>(sys.layout.size()) * M);
    for (std::size_t e = 0; e < eqs.size(); ++e)
        for (const MessageId& m : eqs[e])
            sys.stacked.block(static_cast<int>(e) * N, column_index(sys.layout, m) * M, N, M) +=
                channels.up(m.src);
    return sys;
}

BeamformerSet solve_beamformers(const AlignmentSystem& system, const ChannelSet& channels,
                                std::uint64_t seed, double power) {
    const int rows = static_cast<int>(system.stacked.rows());
    const int cols = static_cast<int>(system.stacked.cols());
    const int M = system.block_cols;
    const int d = system.symbols_per_message;

    Eigen::BDCSVD<Matrix> svd(system.stacked, Eigen::ComputeFullV);
    const int rank = svd_rank(svd.singularValues(), kRankTol, std::max(rows, cols));
    if (rank < rows)
        throw std::runtime_error("solve_beamformers: stacked matrix is row-rank deficient");
    const int nullity = cols - rank;
    if (nullity < d)
        throw std::runtime_error("solve_beamformers: null space smaller than symbol demand");
    const Matrix null_basis = svd.matrixV().rightCols(nullity);

    BeamformerSet beams;
    beams.topology = system.topology;
    beams.M = M;
    beams.d = d;
    beams.order = system.layout;

    std::mt19937_64 rng(seed);
    for (int attempt = 0;; ++attempt) {
        const Matrix coords = gaussian_seeded(nullity, d, rng);
        const Matrix W = null_basis * coords;  // cols x d, columns in the null space
        beams.mats.clear();
        bool full_rank = true;
        for (std::size_t i = 0; i < beams.order.size(); ++i) {
            Matrix block = W.block(static_cast<int>(i) * M, 0, M, d);
            if (numeric_rank(block) != d) full_rank = false;
            beams.mats.push_back(std::move(block));
        }
        if (full_rank) break;
        if (attempt >= kResampleCap)
            throw std::runtime_error("solve_beamformers: column-rank-deficient assembly persisted");
    }
    scale_to_power(beams, power);
    return beams;
}

RelayBasis relay_basis(const ChannelSet& channels, const BeamformerSet& beams) {
    if (beams.topology != Topology::AllUnicast)
        throw std::invalid_argument("relay_basis: defined for the all-unicast scheme only");
    static const std::vector<MessageId> order = {{2, 1}, {3, 1}, {3, 2}, {3, 4},
                                                 {4, 1}, {4, 2}, {4, 3}};
    RelayBasis basis;
    const int N = channels.config.N;
    basis.G.resize(N, static_cast<int>(order.size()) * beams.d);
    int col = 0;
    for (const MessageId& m : order) {
        Matrix img = relay_image(channels, beams, m);
        basis.G.middleCols(col, beams.d) = img;
        basis.F.push_back(std::move(img));
        col += beams.d;
    }
    basis.rank = numeric_rank(basis.G);
    if (basis.rank < N)
        throw std::runtime_error("relay_basis: degenerate draw, rank " + std::to_string(basis.rank));
    return basis;
}

SeparabilityReport verify_pair_separability(const ChannelSet& channels, const BeamformerSet& beams,
                                            Topology topology, double tol) {
    const auto& msgs = messages(topology);
    const auto& pairs = message_pairs(topology);
    const int N = channels.config.N;
    const int d = beams.d;

    std::vector<Matrix> images;
    images.reserve(msgs.size());
    for (const MessageId& m : msgs) images.push_back(relay_image(channels, beams, m));

    SeparabilityReport report;
    report.d = d;
    report.expected_interference_rank = N - d;
    report.all_ok = true;

    for (const auto& [a, b] : pairs) {
        PairSeparability pr;
        pr.a = a;
        pr.b = b;
        Matrix interference(N, static_cast<int>(msgs.size() - 2) * d);
        int col = 0;
        for (std::size_t i = 0; i < msgs.size(); ++i) {
            if (msgs[i] == a || msgs[i] == b) continue;
            interference.middleCols(col, d) = images[i];
            col += d;
        }
        Eigen::BDCSVD<Matrix> svd(interference);
        const auto& sv = svd.singularValues();
        const int max_dim = static_cast<int>(std::max(interference.rows(), interference.cols()));
        pr.interference_rank = svd_rank(sv, tol, max_dim);
        if (pr.interference_rank > 0 && pr.interference_rank < sv.size()) {
            const double discarded = sv(pr.interference_rank);
            pr.margin = discarded > 0.0 ? sv(pr.interference_rank - 1) / discarded
                                        : std::numeric_limits<double>::infinity();
        } else {
            pr.margin = std::numeric_limits<double>::infinity();
        }
        pr.ill_conditioned = pr.margin < 1e6;

        Matrix with_a(N, interference.cols() + d);
        with_a << interference, images[column_index(msgs, a)];
        Matrix with_b(N, interference.cols() + d);
        with_b << interference, images[column_index(msgs, b)];
        pr.rank_with_a = numeric_rank(with_a, tol);
        pr.rank_with_b = numeric_rank(with_b, tol);

        pr.ok = pr.interference_rank == N - d && pr.rank_with_a == N && pr.rank_with_b == N;
        report.all_ok = report.all_ok && pr.ok && !pr.ill_conditioned;
        report.pairs.push_back(pr);
    }
    return report;
}

Matrix intersection_subspace(const Matrix& H_i, const Matrix& H_j, double tol) {
    if (H_i.rows() != H_j.rows())
        throw std::invalid_argument("intersection_subspace: row-count mismatch");
    const int N = static_cast<int>(H_i.rows());
    const int Mi = static_cast<int>(H_i.cols());
    const int Mj = static_cast<int>(H_j.cols());

    Matrix joint(N, Mi + Mj);
    joint << H_i, -H_j;
    Eigen::BDCSVD<Matrix> svd(joint, Eigen::ComputeFullV);
    const int rank = svd_rank(svd.singularValues(), tol, std::max(N, Mi + Mj));
    const int dim = numeric_rank(H_i, tol) + numeric_rank(H_j, tol) - rank;
    if (dim <= 0) return Matrix(N, 0);

    // Null vectors [a; b] of [H_i, -H_j] give H_i a = H_j b in the intersection.
    const Matrix null_basis = svd.matrixV().rightCols(Mi + Mj - rank);
    const Matrix span = H_i * null_basis.topRows(Mi);
    Eigen::BDCSVD<Matrix> basis_svd(span, Eigen::ComputeThinU);
    return basis_svd.matrixU().leftCols(dim);
}

BeamformerSet solve_one_to_one(const ChannelSet& channels, Topology topology, int d,
                               std::uint64_t seed, double power) {
    const auto& pairs = message_pairs(topology);
    const int N = channels.config.N;

    BeamformerSet beams;
    beams.topology = topology;
    beams.M = channels.config.M;
    beams.d = d;
    beams.order = messages(topology);
    beams.mats.assign(beams.order.size(), Matrix::Zero(beams.M, std::max(d, 0)));
    if (d == 0) return beams;

    std::vector<Matrix> bases;
    for (const auto& [a, b] : pairs) {
        Matrix basis = intersection_subspace(channels.up(a.src), channels.up(b.src));
        if (basis.cols() < d)
            throw std::runtime_error("solve_one_to_one: intersection dimension " +
                                     std::to_string(basis.cols()) + " below demand " +
                                     std::to_string(d));
        bases.push_back(std::move(basis));
    }

    std::mt19937_64 rng(seed);
    for (int attempt = 0;; ++attempt) {
        Matrix joint(N, static_cast<int>(pairs.size()) * d);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto& [a, b] = pairs[p];
            const Matrix target = bases[p] * gaussian_seeded(static_cast<int>(bases[p].cols()), d, rng);
            beams.at(a) = channels.up(a.src).completeOrthogonalDecomposition().solve(target);
            beams.at(b) = channels.up(b.src).completeOrthogonalDecomposition().solve(target);
            joint.middleCols(static_cast<int>(p) * d, d) = target;
        }
        if (numeric_rank(joint) == static_cast<int>(pairs.size()) * d) break;
        if (attempt >= kResampleCap)
            throw std::runtime_error("solve_one_to_one: joint relay span stayed rank deficient");
    }
    scale_to_power(beams, power);
    return beams;
}

double alignment_residual(const ChannelSet& channels, const BeamformerSet& beams) {
    const Topology topology = beams.topology;
    const int streams = streams_per_user(topology);
    double scale = 0.0;
    for (const MessageId& m : beams.order)
        scale = std::max(scale, relay_image(channels, beams, m).norm());
    if (scale == 0.0) scale = 1.0;

    const bool stacked_shape = channels.config.M == streams * beams.d &&
                               channels.config.N == (2 * streams + 1) * beams.d;
    double worst = 0.0;
    if (stacked_shape) {
        for (const auto& eq : equations(topology)) {
            Matrix sum = Matrix::Zero(channels.config.N, beams.d);
            for (const MessageId& m : eq) sum += relay_image(channels, beams, m);
            worst = std::max(worst, sum.norm());
        }
    } else {
        for (const auto& [a, b] : message_pairs(topology)) {
            const Matrix diff = relay_image(channels, beams, a) - relay_image(channels, beams, b);
            worst = std::max(worst, diff.norm());
        }
    }
    return worst / scale;
}

double redundancy_identity_residual(const ChannelSet& channels, const BeamformerSet& beams) {
    if (beams.topology != Topology::MultipleUnicast)
        throw std::invalid_argument("redundancy_identity_residual: multiple-unicast only");
    const Matrix residual =
        relay_image(channels, beams, {1, 3}) + relay_image(channels, beams, {2, 3}) +
        relay_image(channels, beams, {3, 1}) + relay_image(channels, beams, {3, 2});
    double scale = 0.0;
    for (const MessageId& m : beams.order)
        scale = std::max(scale, relay_image(channels, beams, m).norm());
    return residual.norm() / (scale > 0.0 ? scale : 1.0);
}

BeamformerSet solve_scheme(const ChannelSet& channels, Topology topology, int d,
                           std::uint64_t seed, double power) {
    const int streams = streams_per_user(topology);
    const int M = channels.config.M;
    const int N = channels.config.N;
    if (M == streams * d && N == (2 * streams + 1) * d)
        return solve_beamformers(build_system(channels, topology, d), channels, seed, power);
    const int pairs = static_cast<int>(message_pairs(topology).size());
    if (pairs * d <= N && 2 * M - N >= d)
        return solve_one_to_one(channels, topology, d, seed, power);
    throw std::invalid_argument("solve_scheme: no construction applies at this shape");
}

}  // namespace relayia
