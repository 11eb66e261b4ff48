#pragma once

#include <cstdint>
#include <string>

#include "relayia/rational.hpp"
#include "relayia/topology.hpp"

namespace relayia {

/// The four linear pieces of the per-message DoF curve, in ratio order.
/// For AllUnicast: M/3, N/7, 2M/7, N/6. For MultipleUnicast: M/2, N/5,
/// 2M/5, N/4.
enum class Regime { MLow, NLow, MHigh, NHigh };

enum class Redundancy { Neither, UserRedundant, RelayRedundant, Both };

std::string regime_label(Topology t, Regime r);
std::string to_string(Redundancy r);

struct DofProfile {
    Rational d_star;
    Regime regime = Regime::MLow;
    Rational counting_bound;
    std::int64_t feasible_floor = 0;
    Redundancy redundancy = Redundancy::Neither;
};

/// Spatial-extension plan reaching the nearest regime-transition ratio.
/// Applied to the q-scaled network, the reduced network achieves
/// per_message_symbols DoF per message, i.e. per_message_symbols / q
/// normalized.
struct NormalizationPlan {
    std::int64_t scale_q = 1;
    std::int64_t reduced_M = 0;
    std::int64_t reduced_N = 0;
    std::int64_t per_message_symbols = 0;
};

/// Per-message DoF for the all-unicast network:
/// max(min(M/3, N/7), min(2M/7, N/6)).
Rational dof_y(std::int64_t M, std::int64_t N);

/// Per-message DoF for the multiple-unicast network:
/// max(min(M/2, N/5), min(2M/5, N/4)).
Rational dof_x(std::int64_t M, std::int64_t N);

Rational dof_star(Topology t, std::int64_t M, std::int64_t N);

/// Proper-system counting bound: (2M+N)/13 (all unicast), (2M+N)/9
/// (multiple unicast).
Rational counting_bound(Topology t, std::int64_t M, std::int64_t N);

DofProfile classify(Topology t, std::int64_t M, std::int64_t N);

NormalizationPlan normalization_plan(Topology t, std::int64_t M, std::int64_t N);

}  // namespace relayia
