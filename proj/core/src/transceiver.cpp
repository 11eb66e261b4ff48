#include "relayia/transceiver.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "relayia/dof.hpp"
#include "relayia/feasibility.hpp"

namespace relayia {

namespace {

constexpr double kDbPerDoubling = 10.0 * 0.3010299956639812;  // 10*log10(2)

Vector gaussian_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
    return v;
}

Matrix inverse_checked(const Matrix& m, const char* what) {
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(1e-9);
    if (!lu.isInvertible())
        throw std::runtime_error(std::string(what) + ": effective coefficient below tolerance");
    return lu.inverse();
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RelayCombiner relay_combiners(const ChannelSet& channels, const BeamformerSet& beams,
                              Topology topology, double tol) {
    const auto& msgs = messages(topology);
    const auto& pairs = message_pairs(topology);
    const int N = channels.config.N;
    const int d = beams.d;

    std::vector<Matrix> images;
    for (const MessageId& m : msgs) images.push_back(channels.up(m.src) * beams.at(m));

    RelayCombiner combiner;
    combiner.topology = topology;
    combiner.d = d;

    for (const auto& [a, b] : pairs) {
        Matrix interference(N, static_cast<int>(msgs.size() - 2) * d);
        int col = 0;
        double scale = 0.0;
        for (std::size_t i = 0; i < msgs.size(); ++i) {
            if (msgs[i] == a || msgs[i] == b) continue;
            interference.middleCols(col, d) = images[i];
            scale = std::max(scale, images[i].norm());
            col += d;
        }
        Eigen::BDCSVD<Matrix> svd(interference, Eigen::ComputeFullU);
        Matrix U = svd.matrixU().rightCols(d);
        if ((U.adjoint() * interference).norm() > tol * std::max(scale, 1.0))
            throw std::runtime_error("relay_combiners: non-pair leakage above tolerance for pair " +
                                     to_string(a) + "/" + to_string(b));
        Matrix ca = U.adjoint() * images[static_cast<std::size_t>(
                                     std::find(msgs.begin(), msgs.end(), a) - msgs.begin())];
        Matrix cb = U.adjoint() * images[static_cast<std::size_t>(
                                     std::find(msgs.begin(), msgs.end(), b) - msgs.begin())];
        if (numeric_rank(ca) != d || numeric_rank(cb) != d)
            throw std::runtime_error("relay_combiners: pair coefficients rank deficient for " +
                                     to_string(a) + "/" + to_string(b));
        combiner.U.push_back(std::move(U));
        combiner.coeff_a.push_back(std::move(ca));
        combiner.coeff_b.push_back(std::move(cb));
    }
    return combiner;
}

Vector phase1(const ChannelSet& channels, const BeamformerSet& beams, const SymbolMap& symbols,
              std::optional<std::uint64_t> noise_seed, double power) {
    if (power <= 0.0) throw std::invalid_argument("phase1: power must be positive");
    for (int user = 1; user <= kUserCount; ++user) {
        double trace = 0.0;
        for (std::size_t i = 0; i < beams.order.size(); ++i)
            if (beams.order[i].src == user) trace += beams.mats[i].squaredNorm();
        if (trace > power * (1.0 + 1e-9))
            throw std::invalid_argument("phase1: beams exceed the per-user power constraint");
    }
    const int N = channels.config.N;
    Vector y = Vector::Zero(N);
    for (std::size_t i = 0; i < beams.order.size(); ++i) {
        const MessageId& m = beams.order[i];
        const auto it = symbols.find(m);
        if (it == symbols.end() || it->second.size() != beams.d)
            throw std::invalid_argument("phase1: missing or mis-sized symbol block for " +
                                        to_string(m));
        y += channels.up(m.src) * (beams.mats[i] * it->second);
    }
    if (noise_seed) {
        std::mt19937_64 rng(*noise_seed);
        y += gaussian_vector(N, rng);
    }
    return y;
}

std::vector<Vector> relay_resolve(const RelayCombiner& combiner, const Vector& observation) {
    std::vector<Vector> s;
    s.reserve(combiner.U.size());
    for (const Matrix& U : combiner.U) s.push_back(U.adjoint() * observation);
    return s;
}

DownlinkDesign phase2_design(const ChannelSet& channels, Topology topology, std::uint64_t seed,
                             int d) {
    ChannelSet reciprocal;
    reciprocal.config = channels.config;
    for (int k = 0; k < AntennaConfig::K; ++k) {
        reciprocal.uplink[k] = channels.downlink[k].transpose();
        reciprocal.downlink[k] = channels.uplink[k].transpose();
    }
    DownlinkDesign design;
    design.topology = topology;
    design.d = d;
    design.receive_filters = solve_scheme(reciprocal, topology, d, seed);
    const RelayCombiner reciprocal_combiner =
        relay_combiners(reciprocal, design.receive_filters, topology);
    for (const Matrix& U : reciprocal_combiner.U) design.T.push_back(U.conjugate());
    return design;
}

RelayForward relay_transmit(const DownlinkDesign& design, const RelayCombiner& combiner,
                            const std::vector<Vector>& s, double power) {
    if (power <= 0.0) throw std::invalid_argument("relay_transmit: power must be positive");
    const std::size_t pairs = design.T.size();
    if (s.size() != pairs) throw std::invalid_argument("relay_transmit: pair count mismatch");

    RelayForward fwd;
    fwd.x = Vector::Zero(design.T.empty() ? 0 : design.T[0].rows());
    for (std::size_t p = 0; p < pairs; ++p) {
        // E[s_p s_p^H] = A A^H + B B^H + I for unit-power symbols and unit noise
        const double variance = combiner.coeff_a[p].squaredNorm() +
                                combiner.coeff_b[p].squaredNorm() + design.d;
        const double gain = std::sqrt(power / (static_cast<double>(pairs) * variance));
        fwd.x += gain * (design.T[p] * s[p]);
        fwd.gain.push_back(gain);
    }
    return fwd;
}

SymbolMap user_decode(const DownlinkDesign& design, const RelayCombiner& combiner,
                      const ChannelSet& channels, const std::array<Vector, 4>& user_observations,
                      const SymbolMap& own_symbols, const std::vector<double>& gains) {
    const auto& pairs = message_pairs(design.topology);
    SymbolMap estimates;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& [a, b] = pairs[p];
        const double gain = gains.at(p);

        auto decode_member = [&](const MessageId& desired, const MessageId& own,
                                 const Matrix& coeff_desired, const Matrix& coeff_own) {
            const int user = desired.dst;
            // the phase-1 beamformer of the user's own pair symbol, conjugated,
            // isolates this pair's combination
            const Matrix& filter = design.receive_filters.at(own);
            const Matrix effective =
                filter.transpose() * channels.down(user) * design.T[p];  // d x d
            const Vector filtered = filter.transpose() * user_observations[user - 1];
            const Vector s_est =
                inverse_checked(gain * effective, "user_decode") * filtered;
            const auto own_it = own_symbols.find(own);
            if (own_it == own_symbols.end())
                throw std::invalid_argument("user_decode: missing own symbols for " +
                                            to_string(own));
            const Vector cleaned = s_est - coeff_own * own_it->second;
            estimates[desired] = inverse_checked(coeff_desired, "user_decode") * cleaned;
        };

        decode_member(a, b, combiner.coeff_a[p], combiner.coeff_b[p]);
        decode_member(b, a, combiner.coeff_b[p], combiner.coeff_a[p]);
    }
    return estimates;
}

SimResult simulate(const AntennaConfig& config, Topology topology,
                   const std::vector<double>& power_grid_dB, int trials, std::uint64_t seed) {
    if (power_grid_dB.size() < 2)
        throw std::invalid_argument("simulate: need at least two power points for a slope");
    if (trials < 1) throw std::invalid_argument("simulate: trials must be positive");
    if (classify(topology, config.M, config.N).feasible_floor < 1)
        throw std::invalid_argument("simulate: configuration has no integer DoF to demand");

    const auto& pairs_list = message_pairs(topology);
    SimResult result;
    result.topology = topology;
    result.power_dB = power_grid_dB;
    result.order = messages(topology);
    result.trials = trials;
    result.mean_rate.assign(power_grid_dB.size(),
                            std::vector<double>(result.order.size(), 0.0));

    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = sub_seed(seed, static_cast<std::uint64_t>(t));
        const ChannelSet channels = generate_generic(config, trial_seed);
        const FeasibilityResult scheme = feasibility_scheme(channels, topology);
        const int d = scheme.d;
        const RelayCombiner combiner =
            relay_combiners(scheme.reduced, scheme.beams, topology);
        const DownlinkDesign design =
            phase2_design(scheme.reduced, topology, sub_seed(trial_seed, 1), d);

        // noise-free end-to-end decode check at unit power
        {
            std::mt19937_64 sym_rng(sub_seed(trial_seed, 2));
            SymbolMap symbols;
            for (const MessageId& m : result.order) symbols[m] = gaussian_vector(d, sym_rng);
            const Vector y_relay = phase1(scheme.reduced, scheme.beams, symbols, std::nullopt, 1.0);
            const auto s = relay_resolve(combiner, y_relay);
            const RelayForward fwd = relay_transmit(design, combiner, s, 1.0);
            std::array<Vector, 4> user_obs;
            for (int k = 1; k <= kUserCount; ++k) user_obs[k - 1] = scheme.reduced.down(k) * fwd.x;
            const SymbolMap est =
                user_decode(design, combiner, scheme.reduced, user_obs, symbols, fwd.gain);
            for (const MessageId& m : result.order)
                result.max_decode_error =
                    std::max(result.max_decode_error, (est.at(m) - symbols.at(m)).norm());
        }

        // analytic per-message rates across the grid; beams were solved at
        // unit power, so coefficients scale with sqrt(P)
        for (std::size_t pi = 0; pi < power_grid_dB.size(); ++pi) {
            const double P = std::pow(10.0, power_grid_dB[pi] / 10.0);
            for (std::size_t p = 0; p < pairs_list.size(); ++p) {
                const Matrix A = std::sqrt(P) * combiner.coeff_a[p];
                const Matrix B = std::sqrt(P) * combiner.coeff_b[p];
                const double variance = A.squaredNorm() + B.squaredNorm() + d;
                const double gain2 =
                    P / (static_cast<double>(pairs_list.size()) * variance);

                auto rate_of = [&](const MessageId& desired, const MessageId& own,
                                   const Matrix& coeff) {
                    const Matrix& filter = design.receive_filters.at(own);
                    const Matrix C =
                        filter.transpose() * scheme.reduced.down(desired.dst) * design.T[p];
                    const Matrix signal = gain2 * (C * coeff) * (C * coeff).adjoint();
                    const Matrix noise = gain2 * C * C.adjoint() +
                                         filter.transpose() * filter.conjugate();
                    const double num = std::abs(Eigen::FullPivLU<Matrix>(noise + signal)
                                                    .determinant());
                    const double den = std::abs(Eigen::FullPivLU<Matrix>(noise).determinant());
                    return std::log2(num / den);
                };

                const auto& [a, b] = pairs_list[p];
                const auto ia = std::find(result.order.begin(), result.order.end(), a) -
                                result.order.begin();
                const auto ib = std::find(result.order.begin(), result.order.end(), b) -
                                result.order.begin();
                result.mean_rate[pi][static_cast<std::size_t>(ia)] +=
                    rate_of(a, b, A) / trials;
                result.mean_rate[pi][static_cast<std::size_t>(ib)] +=
                    rate_of(b, a, B) / trials;
            }
        }
    }

    // least-squares slope over the top half of the grid, in bits per 3.01 dB
    const std::size_t n = power_grid_dB.size();
    const std::size_t start = std::min(n / 2, n - 2);
    result.slope.assign(result.order.size(), 0.0);
    for (std::size_t m = 0; m < result.order.size(); ++m) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double count = static_cast<double>(n - start);
        for (std::size_t pi = start; pi < n; ++pi) {
            const double x = power_grid_dB[pi] / kDbPerDoubling;  // log2(P)
            sx += x;
            sy += result.mean_rate[pi][m];
            sxx += x * x;
            sxy += x * result.mean_rate[pi][m];
        }
        result.slope[m] = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
    return result;
}

}  // namespace relayia
