#include "relayia/topology.hpp"

namespace relayia {

namespace {

std::vector<MessageId> make_messages(Topology t) {
    std::vector<MessageId> out;
    const bool all = t == Topology::AllUnicast;
    for (int src = 1; src <= kUserCount; ++src) {
        for (int dst = 1; dst <= kUserCount; ++dst) {
            if (src == dst) continue;
            if (!all) {
                // W12, W21, W34, W43 are deactivated
                const bool same_side = (src <= 2 && dst <= 2) || (src >= 3 && dst >= 3);
                if (same_side) continue;
            }
            out.push_back({src, dst});
        }
    }
    return out;
}

std::vector<std::pair<MessageId, MessageId>> make_pairs(Topology t) {
    std::vector<std::pair<MessageId, MessageId>> out;
    for (const MessageId& m : make_messages(t)) {
        if (m.src < m.dst) out.push_back({m, {m.dst, m.src}});
    }
    return out;
}

}  // namespace

const std::vector<MessageId>& messages(Topology t) {
    static const std::vector<MessageId> y = make_messages(Topology::AllUnicast);
    static const std::vector<MessageId> x = make_messages(Topology::MultipleUnicast);
    return t == Topology::AllUnicast ? y : x;
}

const std::vector<std::pair<MessageId, MessageId>>& message_pairs(Topology t) {
    static const auto y = make_pairs(Topology::AllUnicast);
    static const auto x = make_pairs(Topology::MultipleUnicast);
    return t == Topology::AllUnicast ? y : x;
}

int streams_per_user(Topology t) { return t == Topology::AllUnicast ? 3 : 2; }

}  // namespace relayia
