#include "relayia/dof.hpp"

#include <numeric>

namespace relayia {

namespace {

struct PieceConstants {
    // piece denominators: d* = max(min(M/a, N/b), min(2M/c, N/p))
    std::int64_t a, b, c, p;
};

PieceConstants constants(Topology t) {
    return t == Topology::AllUnicast ? PieceConstants{3, 7, 7, 6} : PieceConstants{2, 5, 5, 4};
}

}  // namespace

Rational dof_y(std::int64_t M, std::int64_t N) {
    return max(min(Rational(M, 3), Rational(N, 7)), min(Rational(2 * M, 7), Rational(N, 6)));
}

Rational dof_x(std::int64_t M, std::int64_t N) {
    return max(min(Rational(M, 2), Rational(N, 5)), min(Rational(2 * M, 5), Rational(N, 4)));
}

Rational dof_star(Topology t, std::int64_t M, std::int64_t N) {
    return t == Topology::AllUnicast ? dof_y(M, N) : dof_x(M, N);
}

Rational counting_bound(Topology t, std::int64_t M, std::int64_t N) {
    return Rational(2 * M + N, t == Topology::AllUnicast ? 13 : 9);
}

std::string regime_label(Topology t, Regime r) {
    const auto k = constants(t);
    switch (r) {
        case Regime::MLow: return "M/" + std::to_string(k.a);
        case Regime::NLow: return "N/" + std::to_string(k.b);
        case Regime::MHigh: return "2M/" + std::to_string(k.c);
        case Regime::NHigh: return "N/" + std::to_string(k.p);
    }
    return "?";
}

std::string to_string(Redundancy r) {
    switch (r) {
        case Redundancy::Neither: return "neither";
        case Redundancy::UserRedundant: return "user_redundant";
        case Redundancy::RelayRedundant: return "relay_redundant";
        case Redundancy::Both: return "both";
    }
    return "?";
}

DofProfile classify(Topology t, std::int64_t M, std::int64_t N) {
    const auto k = constants(t);
    const Rational ratio(M, N);
    const Rational low(k.a, k.b);      // 3/7 or 2/5
    const Rational high(k.c, 2 * k.p); // 7/12 or 5/8

    DofProfile prof;
    prof.d_star = dof_star(t, M, N);
    prof.counting_bound = counting_bound(t, M, N);
    prof.feasible_floor = prof.d_star.floor();

    if (ratio <= low) prof.regime = Regime::MLow;
    else if (ratio <= Rational(1, 2)) prof.regime = Regime::NLow;
    else if (ratio <= high) prof.regime = Regime::MHigh;
    else prof.regime = Regime::NHigh;

    if (ratio == low || ratio == high) prof.redundancy = Redundancy::Neither;
    else if (ratio == Rational(1, 2)) prof.redundancy = Redundancy::Both;
    else if (prof.regime == Regime::MLow || prof.regime == Regime::MHigh)
        prof.redundancy = Redundancy::RelayRedundant;  // d* is M-limited, the relay has slack
    else
        prof.redundancy = Redundancy::UserRedundant;
    return prof;
}

NormalizationPlan normalization_plan(Topology t, std::int64_t M, std::int64_t N) {
    const auto k = constants(t);
    const Regime regime = classify(t, M, N).regime;
    NormalizationPlan plan;
    switch (regime) {
        case Regime::MLow:
            // scale so that a | qM, reduce relay to the target ratio a/b
            plan.scale_q = k.a / std::gcd(M, k.a);
            plan.reduced_M = plan.scale_q * M;
            plan.reduced_N = k.b * plan.scale_q * M / k.a;
            plan.per_message_symbols = plan.scale_q * M / k.a;
            break;
        case Regime::NLow:
            plan.scale_q = k.b / std::gcd(N, k.b);
            plan.reduced_M = k.a * plan.scale_q * N / k.b;
            plan.reduced_N = plan.scale_q * N;
            plan.per_message_symbols = plan.scale_q * N / k.b;
            break;
        case Regime::MHigh: {
            // target ratio c/(2p) with relay reduction; d* = 2M/c
            const std::int64_t b2 = 2 * k.p;
            plan.scale_q = k.c / std::gcd(M, k.c);
            plan.reduced_M = plan.scale_q * M;
            plan.reduced_N = b2 * plan.scale_q * M / k.c;
            plan.per_message_symbols = 2 * plan.scale_q * M / k.c;
            break;
        }
        case Regime::NHigh: {
            const std::int64_t b2 = 2 * k.p;
            plan.scale_q = b2 / std::gcd(N, b2);
            plan.reduced_M = k.c * plan.scale_q * N / b2;
            plan.reduced_N = plan.scale_q * N;
            plan.per_message_symbols = plan.scale_q * N / k.p;
            break;
        }
    }
    return plan;
}

}  // namespace relayia
