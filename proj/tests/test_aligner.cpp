#include <doctest.h>

#include <Eigen/LU>
#include <complex>
#include <vector>

#include "relayia/aligner.hpp"

using namespace relayia;

namespace {

// per-entry error after dividing out one global complex scalar
double scalar_normalized_error(const BeamformerSet& solved,
                               const std::vector<Matrix>& expected) {
    REQUIRE(solved.mats.size() == expected.size());
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

std::vector<Matrix> y_reference() {
    // order: u12 u13 u14 u21 u23 u24 u31 u32 u34 u41 u42 u43
    return {col3(1, 0, 0),  col3(0, 1, 0),  col3(0, 0, -1), col3(1, -1, 0),
            col3(0, -1, 0), col3(0, 0, 1),  col3(0, 1, -1), col3(0, 1, 0),
            col3(1, 0, 1),  col3(1, 1, -1), col3(0, 1, -1), col3(0, -1, 0)};
}

std::vector<Matrix> x_reference() {
    // order: u13 u14 u23 u24 u31 u32 u41 u42
    return {col2(0, -1), col2(-1, 0), col2(0, -1), col2(-1, 0),
            col2(0, 1),  col2(1, -1), col2(-1, 0), col2(1, 1)};
}

}  // namespace

TEST_SUITE_BEGIN("aligner");

TEST_CASE("stacked system shapes at the low-transition ratio") {
    const AlignmentSystem sy = build_system(generate_generic({3, 7}, 1), Topology::AllUnicast, 1);
    CHECK(sy.stacked.rows() == 35);
    CHECK(sy.stacked.cols() == 36);
    CHECK(sy.layout == messages(Topology::AllUnicast));

    const AlignmentSystem sx =
        build_system(generate_generic({2, 5}, 1), Topology::MultipleUnicast, 1);
    CHECK(sx.stacked.rows() == 15);
    CHECK(sx.stacked.cols() == 16);

    const AlignmentSystem sy2 = build_system(generate_generic({6, 14}, 1), Topology::AllUnicast, 2);
    CHECK(sy2.stacked.rows() == 70);
    CHECK(sy2.stacked.cols() == 72);

    CHECK_THROWS_AS(build_system(generate_generic({4, 7}, 1), Topology::AllUnicast, 1),
                    std::invalid_argument);
}

TEST_CASE("all-unicast fixture reproduces the reference beamformers") {
    const ChannelSet cs = load_fixture(Topology::AllUnicast);
    const AlignmentSystem system = build_system(cs, Topology::AllUnicast, 1);

    // full row rank by SVD and by determinant of the Gram matrix
    CHECK(numeric_rank(system.stacked) == 35);
    const Matrix gram = system.stacked * system.stacked.adjoint();
    CHECK(std::abs(Eigen::FullPivLU<Matrix>(gram).determinant()) > 1e-6);

    const BeamformerSet beams = solve_beamformers(system, cs, 3);
    CHECK(scalar_normalized_error(beams, y_reference()) <= 1e-9);
    CHECK(alignment_residual(cs, beams) <= 1e-12);
}

TEST_CASE("multiple-unicast fixture reproduces the reference beamformers") {
    const ChannelSet cs = load_fixture(Topology::MultipleUnicast);
    const AlignmentSystem system = build_system(cs, Topology::MultipleUnicast, 1);

    CHECK(numeric_rank(system.stacked) == 15);
    const Matrix gram = system.stacked * system.stacked.adjoint();
    CHECK(std::abs(Eigen::FullPivLU<Matrix>(gram).determinant()) > 1e-6);

    const BeamformerSet beams = solve_beamformers(system, cs, 3);
    CHECK(scalar_normalized_error(beams, x_reference()) <= 1e-9);
    CHECK(alignment_residual(cs, beams) <= 1e-12);

    // the shared-destination couples collapse: [V13 V14] = [V23 V24]
    const Matrix v1 = beams.at({1, 3}) / beams.at({1, 3}).norm();
    const Matrix v2 = beams.at({2, 3}) / beams.at({2, 3}).norm();
    CHECK((v1 - v2).norm() <= 1e-9);
}

TEST_CASE("relay basis has full rank at the fixture") {
    const ChannelSet cs = load_fixture(Topology::AllUnicast);
    const BeamformerSet beams = solve_scheme(cs, Topology::AllUnicast, 1, 3);
    const RelayBasis basis = relay_basis(cs, beams);
    CHECK(basis.rank == 7);
    CHECK(basis.G.rows() == 7);
    CHECK(basis.G.cols() == 7);
    CHECK(std::abs(Eigen::FullPivLU<Matrix>(basis.G).determinant()) > 1e-9);
}

TEST_CASE("uniqueness up to a scalar at d = 1") {
    const ChannelSet cs = generate_generic({3, 7}, 21);
    const AlignmentSystem system = build_system(cs, Topology::AllUnicast, 1);
    const BeamformerSet a = solve_beamformers(system, cs, 1);
    const BeamformerSet b = solve_beamformers(system, cs, 99);
    const Complex scalar = b.mats[0](0, 0) / a.mats[0](0, 0);
    for (std::size_t i = 0; i < a.mats.size(); ++i)
        CHECK((b.mats[i] - scalar * a.mats[i]).norm() <= 1e-9 * a.mats[i].norm());
}

TEST_CASE("generic separability at the transition ratio") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        {
            const ChannelSet cs = generate_generic({3, 7}, seed);
            const BeamformerSet beams = solve_scheme(cs, Topology::AllUnicast, 1, seed + 1);
            const SeparabilityReport report =
                verify_pair_separability(cs, beams, Topology::AllUnicast);
            CHECK(report.all_ok);
            CHECK(report.pairs.size() == 6);
            for (const auto& p : report.pairs) {
                CHECK(p.interference_rank == 6);
                CHECK(p.rank_with_a == 7);
                CHECK(p.rank_with_b == 7);
            }
        }
        {
            const ChannelSet cs = generate_generic({2, 5}, seed);
            const BeamformerSet beams = solve_scheme(cs, Topology::MultipleUnicast, 1, seed + 1);
            const SeparabilityReport report =
                verify_pair_separability(cs, beams, Topology::MultipleUnicast);
            CHECK(report.all_ok);
            CHECK(report.pairs.size() == 4);
        }
    }
}

TEST_CASE("dependent multiple-unicast equation vanishes on every solution") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelSet cs = generate_generic({2, 5}, seed);
        const BeamformerSet beams = solve_scheme(cs, Topology::MultipleUnicast, 1, seed + 1);
        CHECK(redundancy_identity_residual(cs, beams) <= 1e-9);
    }
    const ChannelSet fixture = load_fixture(Topology::MultipleUnicast);
    const BeamformerSet beams = solve_scheme(fixture, Topology::MultipleUnicast, 1, 3);
    CHECK(redundancy_identity_residual(fixture, beams) <= 1e-9);
}

TEST_CASE("column-space intersections") {
    // disjoint coordinate planes in C^4: trivial intersection
    Matrix a = Matrix::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    Matrix b = Matrix::Zero(4, 2);
    b(2, 0) = 1.0;
    b(3, 1) = 1.0;
    CHECK(intersection_subspace(a, b).cols() == 0);

    // shared first axis
    b(0, 0) = 1.0;
    b(2, 0) = 0.0;
    const Matrix basis = intersection_subspace(a, b);
    REQUIRE(basis.cols() == 1);
    CHECK(std::abs(basis.col(0).cwiseAbs()(0) - 1.0) <= 1e-12);
}

TEST_CASE("one-to-one construction above the transition ratio") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        {
            const ChannelSet cs = generate_generic({7, 12}, seed);
            const BeamformerSet beams = solve_one_to_one(cs, Topology::AllUnicast, 2, seed);
            CHECK(alignment_residual(cs, beams) <= 1e-9);
            Matrix joint(12, 12);
            int col = 0;
            for (const auto& [a, b] : message_pairs(Topology::AllUnicast)) {
                joint.middleCols(col, 2) = cs.up(a.src) * beams.at(a);
                col += 2;
            }
            CHECK(numeric_rank(joint) == 12);
        }
        {
            const ChannelSet cs = generate_generic({5, 8}, seed);
            const BeamformerSet beams = solve_one_to_one(cs, Topology::MultipleUnicast, 2, seed);
            CHECK(alignment_residual(cs, beams) <= 1e-9);
            Matrix joint(8, 8);
            int col = 0;
            for (const auto& [a, b] : message_pairs(Topology::MultipleUnicast)) {
                joint.middleCols(col, 2) = cs.up(a.src) * beams.at(a);
                col += 2;
            }
            CHECK(numeric_rank(joint) == 8);
        }
    }
}

TEST_CASE("beamformers respect the power scaling") {
    const ChannelSet cs = generate_generic({3, 7}, 4);
    const BeamformerSet beams = solve_scheme(cs, Topology::AllUnicast, 1, 4, 2.5);
    double max_trace = 0.0;
    for (int user = 1; user <= 4; ++user) {
        double trace = 0.0;
        for (std::size_t i = 0; i < beams.order.size(); ++i)
            if (beams.order[i].src == user) trace += beams.mats[i].squaredNorm();
        max_trace = std::max(max_trace, trace);
    }
    CHECK(max_trace == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_SUITE_END();
