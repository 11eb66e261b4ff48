// Release gate: one line per criterion, nonzero exit if any fails.

#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "relayia/aligner.hpp"
#include "relayia/channel.hpp"
#include "relayia/dof.hpp"
#include "relayia/feasibility.hpp"
#include "relayia/transceiver.hpp"

using namespace relayia;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix col3(double a, double b, double c) {
    Matrix m(3, 1);
    m << Complex(a), Complex(b), Complex(c);
    return m;
}

Matrix col2(double a, double b) {
    Matrix m(2, 1);
    m << Complex(a), Complex(b);
    return m;
}

double scalar_normalized_error(const BeamformerSet& solved, const std::vector<Matrix>& expected) {
    Complex scalar(0.0, 0.0);
    for (std::size_t i = 0; i < expected.size() && scalar == Complex(0.0, 0.0); ++i)
        for (int r = 0; r < expected[i].rows() && scalar == Complex(0.0, 0.0); ++r)
            if (expected[i](r, 0) != Complex(0.0, 0.0))
                scalar = solved.mats[i](r, 0) / expected[i](r, 0);
    double err = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i)
        err = std::max(err, (solved.mats[i] / scalar - expected[i]).cwiseAbs().maxCoeff());
    return err;
}

Outcome criterion_fixture_y() {
    const auto t0 = std::chrono::steady_clock::now();
    const ChannelSet cs = load_fixture(Topology::AllUnicast);
    const BeamformerSet beams =
        solve_beamformers(build_system(cs, Topology::AllUnicast, 1), cs, 3);
    const double elapsed = seconds_since(t0);
    const std::vector<Matrix> expected = {
        col3(1, 0, 0),  col3(0, 1, 0),  col3(0, 0, -1), col3(1, -1, 0),
        col3(0, -1, 0), col3(0, 0, 1),  col3(0, 1, -1), col3(0, 1, 0),
        col3(1, 0, 1),  col3(1, 1, -1), col3(0, 1, -1), col3(0, -1, 0)};
    const double err = scalar_normalized_error(beams, expected);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max entry error %.2e after scalar normalization, %.3f s",
                  err, elapsed);
    return {err <= 1e-9 && elapsed < 1.0, buf};
}

Outcome criterion_fixture_x() {
    const ChannelSet cs = load_fixture(Topology::MultipleUnicast);
    const BeamformerSet beams =
        solve_beamformers(build_system(cs, Topology::MultipleUnicast, 1), cs, 3);
    const std::vector<Matrix> expected = {col2(0, -1), col2(-1, 0), col2(0, -1), col2(-1, 0),
                                          col2(0, 1),  col2(1, -1), col2(-1, 0), col2(1, 1)};
    const double err = scalar_normalized_error(beams, expected);
    const double shared =
        (beams.at({1, 3}) / beams.at({1, 3}).norm() - beams.at({2, 3}) / beams.at({2, 3}).norm())
            .norm();
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "max entry error %.2e, shared-destination block mismatch %.2e", err, shared);
    return {err <= 1e-9 && shared <= 1e-9, buf};
}

Outcome criterion_rank_certificates() {
    const ChannelSet y = load_fixture(Topology::AllUnicast);
    const AlignmentSystem sy = build_system(y, Topology::AllUnicast, 1);
    const int rank_y = numeric_rank(sy.stacked);
    const double det_y =
        std::abs(Eigen::FullPivLU<Matrix>(Matrix(sy.stacked * sy.stacked.adjoint()))
                     .determinant());

    const ChannelSet x = load_fixture(Topology::MultipleUnicast);
    const AlignmentSystem sx = build_system(x, Topology::MultipleUnicast, 1);
    const int rank_x = numeric_rank(sx.stacked);
    const double det_x =
        std::abs(Eigen::FullPivLU<Matrix>(Matrix(sx.stacked * sx.stacked.adjoint()))
                     .determinant());

    const BeamformerSet beams = solve_scheme(y, Topology::AllUnicast, 1, 3);
    const RelayBasis basis = relay_basis(y, beams);
    const double det_g = std::abs(Eigen::FullPivLU<Matrix>(basis.G).determinant());

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "stacked ranks %d/35 and %d/15, Gram dets %.1e/%.1e, rank(G)=%d |det(G)|=%.2e",
                  rank_y, rank_x, det_y, det_x, basis.rank, det_g);
    return {rank_y == 35 && rank_x == 15 && det_y > 1e-6 && det_x > 1e-6 && basis.rank == 7 &&
                det_g > 1e-9,
            buf};
}

Outcome criterion_separability() {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        {
            const ChannelSet cs = generate_generic({3, 7}, seed);
            const BeamformerSet beams = solve_scheme(cs, Topology::AllUnicast, 1, seed + 1);
            const SeparabilityReport r = verify_pair_separability(cs, beams, Topology::AllUnicast);
            if (!r.all_ok) ++failures;
            for (const auto& p : r.pairs)
                if (p.interference_rank != 6 || p.rank_with_a != 7 || p.rank_with_b != 7)
                    ++failures;
        }
        {
            const ChannelSet cs = generate_generic({2, 5}, seed);
            const BeamformerSet beams = solve_scheme(cs, Topology::MultipleUnicast, 1, seed + 1);
            const SeparabilityReport r =
                verify_pair_separability(cs, beams, Topology::MultipleUnicast);
            if (!r.all_ok) ++failures;
            for (const auto& p : r.pairs)
                if (p.interference_rank != 4 || p.rank_with_a != 5 || p.rank_with_b != 5)
                    ++failures;
        }
    }
    return {failures == 0, std::to_string(failures) + " failures over 100 seeds x 2 topologies"};
}

Outcome criterion_one_to_one() {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        {
            const ChannelSet cs = generate_generic({7, 12}, seed);
            const BeamformerSet beams = solve_one_to_one(cs, Topology::AllUnicast, 2, seed);
            const double res = alignment_residual(cs, beams);
            worst = std::max(worst, res);
            Matrix joint(12, 12);
            int col = 0;
            for (const auto& [a, b] : message_pairs(Topology::AllUnicast)) {
                joint.middleCols(col, 2) = cs.up(a.src) * beams.at(a);
                col += 2;
            }
            if (res > 1e-9 || numeric_rank(joint) != 12) ++failures;
        }
        {
            const ChannelSet cs = generate_generic({5, 8}, seed);
            const BeamformerSet beams = solve_one_to_one(cs, Topology::MultipleUnicast, 2, seed);
            const double res = alignment_residual(cs, beams);
            worst = std::max(worst, res);
            Matrix joint(8, 8);
            int col = 0;
            for (const auto& [a, b] : message_pairs(Topology::MultipleUnicast)) {
                joint.middleCols(col, 2) = cs.up(a.src) * beams.at(a);
                col += 2;
            }
            if (res > 1e-9 || numeric_rank(joint) != 8) ++failures;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d failures, worst alignment residual %.2e", failures, worst);
    return {failures == 0, buf};
}

Outcome criterion_dof_grid() {
    for (int M = 1; M <= 64; ++M)
        for (int N = 1; N <= 64; ++N) {
            {
                const Rational d = dof_y(M, N);
                const Rational c = counting_bound(Topology::AllUnicast, M, N);
                const bool corner = (7 * M == 3 * N) || (12 * M == 7 * N);
                if (!(d <= c) || (d == c) != corner)
                    return {false, "all-unicast bound violated at M=" + std::to_string(M) +
                                       " N=" + std::to_string(N)};
            }
            {
                const Rational d = dof_x(M, N);
                const Rational c = counting_bound(Topology::MultipleUnicast, M, N);
                const bool corner = (5 * M == 2 * N) || (8 * M == 5 * N);
                if (!(d <= c) || (d == c) != corner)
                    return {false, "multiple-unicast bound violated at M=" + std::to_string(M) +
                                       " N=" + std::to_string(N)};
            }
            for (int q = 1; q <= 8; ++q)
                if (dof_y(q * M, q * N) != Rational(q) * dof_y(M, N) ||
                    dof_x(q * M, q * N) != Rational(q) * dof_x(M, N))
                    return {false, "scaling identity broken at M=" + std::to_string(M) +
                                       " N=" + std::to_string(N) + " q=" + std::to_string(q)};
        }
    return {true, "64x64 grid, equality only at the corner ratios, scaling exact for q <= 8"};
}

Outcome criterion_feasibility_boundary() {
    const auto t0 = std::chrono::steady_clock::now();
    long feasible_checks = 0, infeasible_checks = 0;
    for (Topology t : {Topology::AllUnicast, Topology::MultipleUnicast})
        for (int M = 1; M <= 24; ++M)
            for (int N = 1; N <= 24; ++N) {
                const int floor_d = static_cast<int>(classify(t, M, N).feasible_floor);
                for (std::uint64_t seed = 0; seed < 20; ++seed) {
                    const ChannelSet cs = generate_generic({M, N}, 1000 + seed);
                    if (floor_d >= 1) {
                        if (!probe_infeasibility(cs, t, floor_d).feasible)
                            return {false, "floor demand refused at M=" + std::to_string(M) +
                                               " N=" + std::to_string(N) +
                                               " seed=" + std::to_string(seed)};
                        ++feasible_checks;
                    }
                    if (probe_infeasibility(cs, t, floor_d + 1).feasible)
                        return {false, "above-floor demand accepted at M=" + std::to_string(M) +
                                           " N=" + std::to_string(N)};
                    ++infeasible_checks;
                }
            }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%ld feasible and %ld infeasible probes on the 24x24 grid, %.1f s",
                  feasible_checks, infeasible_checks, seconds_since(t0));
    return {seconds_since(t0) < 600.0, buf};
}

double end_to_end_error(Topology t, int M, int N, std::uint64_t seed) {
    const FeasibilityResult scheme = feasibility_scheme(t, M, N, seed);
    const RelayCombiner combiner = relay_combiners(scheme.reduced, scheme.beams, t);
    const DownlinkDesign design = phase2_design(scheme.reduced, t, seed + 1000, scheme.d);

    std::mt19937_64 rng(seed + 2000);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    SymbolMap symbols;
    for (const MessageId& m : messages(t)) {
        Vector v(scheme.d);
        for (int i = 0; i < scheme.d; ++i) v(i) = Complex(normal(rng), normal(rng));
        symbols[m] = v;
    }

    const Vector y = phase1(scheme.reduced, scheme.beams, symbols, std::nullopt, 1.0);
    const RelayForward fwd =
        relay_transmit(design, combiner, relay_resolve(combiner, y), 1.0);
    std::array<Vector, 4> obs;
    for (int k = 1; k <= 4; ++k) obs[k - 1] = scheme.reduced.down(k) * fwd.x;
    const SymbolMap est = user_decode(design, combiner, scheme.reduced, obs, symbols, fwd.gain);

    double err = 0.0;
    for (const auto& [m, truth] : symbols) err = std::max(err, (est.at(m) - truth).norm());
    return err;
}

Outcome criterion_end_to_end() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        worst = std::max(worst, end_to_end_error(Topology::AllUnicast, 3, 7, seed));
        worst = std::max(worst, end_to_end_error(Topology::MultipleUnicast, 2, 5, seed));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst symbol error %.2e over 100 seeds x 2 topologies",
                  worst);
    return {worst <= 1e-8, buf};
}

Outcome criterion_slope() {
    const std::vector<double> grid = {30.0, 40.0, 50.0, 60.0};
    double lo = 1.0, hi = 1.0;
    for (Topology t : {Topology::AllUnicast, Topology::MultipleUnicast}) {
        const int M = t == Topology::AllUnicast ? 3 : 2;
        const int N = t == Topology::AllUnicast ? 7 : 5;
        const SimResult r = simulate({M, N}, t, grid, 200, 2024);
        for (double s : r.slope) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (r.max_decode_error > 1e-8)
            return {false, "decode check failed during simulation"};
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "fitted slopes in [%.3f, %.3f] bits per 3.01 dB", lo, hi);
    return {lo >= 0.9 && hi <= 1.1, buf};
}

Outcome criterion_redundant_equation() {
    double worst = 0.0;
    {
        const ChannelSet cs = load_fixture(Topology::MultipleUnicast);
        worst = redundancy_identity_residual(
            cs, solve_scheme(cs, Topology::MultipleUnicast, 1, 3));
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ChannelSet cs = generate_generic({2, 5}, seed);
        worst = std::max(worst,
                         redundancy_identity_residual(
                             cs, solve_scheme(cs, Topology::MultipleUnicast, 1, seed + 1)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst dependent-equation residual %.2e", worst);
    return {worst <= 1e-9, buf};
}

Outcome criterion_block_fixture() {
    for (int m1 : {1, 2, 3}) {
        const BlockFixture fixture = construct_block_fixture(m1, 3 * m1, 42);
        const BeamformerSet beams = block_fixture_beamformers(fixture);
        if (alignment_residual(fixture.channels, beams) != 0.0)
            return {false, "nonzero residual at m1=" + std::to_string(m1)};
        const SeparabilityReport r =
            verify_pair_separability(fixture.channels, beams, Topology::AllUnicast);
        if (!r.all_ok)
            return {false, "separability failed at m1=" + std::to_string(m1)};
        for (const auto& p : r.pairs)
            if (p.interference_rank != 5 * m1)
                return {false, "unexpected interference dimension at m1=" + std::to_string(m1)};
    }
    return {true, "exact zero residuals and clean separability at m1 = 1, 2, 3"};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {"fixture beamformer reproduction (all-unicast)", criterion_fixture_y},
        {"fixture beamformer reproduction (multiple-unicast)", criterion_fixture_x},
        {"full-rank certificates", criterion_rank_certificates},
        {"separability suite", criterion_separability},
        {"one-to-one suite", criterion_one_to_one},
        {"DoF formula grid", criterion_dof_grid},
        {"feasibility boundary", criterion_feasibility_boundary},
        {"end-to-end decoding", criterion_end_to_end},
        {"DoF slope", criterion_slope},
        {"redundant-equation identity", criterion_redundant_equation},
        {"identity-block fixture", criterion_block_fixture},
    };

    int failed = 0;
    int index = 0;
    for (const Entry& entry : entries) {
        ++index;
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2d %-52s %s  (%s)\n", index, entry.name,
                    outcome.ok ? "PASS" : "FAIL", outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.ok) ++failed;
    }
    if (failed) std::printf("%d criterion(s) failed\n", failed);
    return failed ? 1 : 0;
}
