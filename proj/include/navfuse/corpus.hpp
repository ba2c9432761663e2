#pragma once

#include <vector>

#include "navfuse/expert.hpp"
#include "navfuse/histpolicy.hpp"

namespace navfuse {

inline BcEpisode bc_episode_from_demo(const DemonstrationRecord& rec) {
    BcEpisode ep;
    ep.obs.reserve(rec.steps.size());
    ep.actions.reserve(rec.steps.size());
    for (const auto& s : rec.steps) {
        ep.obs.push_back(s.obs);
        ep.actions.push_back(s.action);
    }
    return ep;
}

inline std::vector<BcEpisode> bc_corpus_from_demos(const std::vector<DemonstrationRecord>& recs) {
    std::vector<BcEpisode> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(bc_episode_from_demo(r));
    return out;
}

}  // namespace navfuse
