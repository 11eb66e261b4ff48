#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relayia {

/// Which message set is active on the 4-user relay network.
///
/// AllUnicast: every ordered user pair exchanges a message (12 messages,
/// 6 pairwise couples). MultipleUnicast: the intra-side messages between
/// users {1,2} and between users {3,4} are deactivated (8 messages,
/// 4 pairwise couples).
enum class Topology { AllUnicast, MultipleUnicast };

inline constexpr int kUserCount = 4;

/// One directed message, user `src` -> user `dst`, both in 1..4.
struct MessageId {
    int src = 0;
    int dst = 0;
    auto operator<=>(const MessageId&) const = default;
};

inline std::string to_string(const MessageId& m) {
    return "u" + std::to_string(m.src) + std::to_string(m.dst);
}

/// Active messages, in the canonical column-block order used by the
/// stacked alignment system: grouped by source user, destinations
/// ascending.
const std::vector<MessageId>& messages(Topology t);

/// Pairwise couples {(i,j),(j,i)}, ordered by (i,j) with i < j.
const std::vector<std::pair<MessageId, MessageId>>& message_pairs(Topology t);

/// Messages per user: 3 for AllUnicast, 2 for MultipleUnicast.
int streams_per_user(Topology t);

inline Topology topology_from_string(const std::string& s) {
    if (s == "y" || s == "Y" || s == "all-unicast") return Topology::AllUnicast;
    if (s == "x" || s == "X" || s == "multiple-unicast") return Topology::MultipleUnicast;
    throw std::invalid_argument("unknown topology: " + s);
}

inline std::string to_string(Topology t) {
    return t == Topology::AllUnicast ? "y" : "x";
}

}  // namespace relayia
