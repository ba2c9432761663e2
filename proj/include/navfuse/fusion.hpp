#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navfuse/corpus.hpp"
#include "navfuse/expert.hpp"
#include "navfuse/histpolicy.hpp"

namespace navfuse {

struct FusionConfig {
    double alpha = 0.8;          // weight on the behaviour-cloning policy output
    double epsilon_mass = 1e-9;  // below this surviving mass, fall back to uniform
};

// Fused training target: alpha*p_sota + (1-alpha)*onehot(gt), colliding
// actions zeroed, renormalized. Masked entries are exactly zero. If the mask
// removes essentially all mass, the target is uniform over unmasked actions.
inline ActionDistribution build_target(const ActionDistribution& p_sota, Action gt_action,
                                       ActionSet colliding, const FusionConfig& config) {
    if (config.alpha < 0.0 || config.alpha > 1.0)
        throw Error("build_target: alpha must be in [0, 1]");
    p_sota.check_valid("build_target");
    if (colliding.contains(Action::Stop))
        throw Error("build_target: Stop cannot be a colliding action");
    if (colliding.count() >= kNumActions)
        throw Error("build_target: every action is masked");

    ActionDistribution m;
    for (int i = 0; i < kNumActions; ++i) m[i] = config.alpha * p_sota[i];
    m[gt_action] += 1.0 - config.alpha;

    double mass = 0.0;
    for (int i = 0; i < kNumActions; ++i) {
        if (colliding.contains(static_cast<Action>(i)))
            m[i] = 0.0;
        else
            mass += m[i];
    }
    if (mass > config.epsilon_mass) {
        for (int i = 0; i < kNumActions; ++i)
            if (!colliding.contains(static_cast<Action>(i))) m[i] /= mass;
        return m;
    }
    const int free_count = kNumActions - colliding.count();
    for (int i = 0; i < kNumActions; ++i)
        m[i] = colliding.contains(static_cast<Action>(i)) ? 0.0 : 1.0 / free_count;
    return m;
}

// Whether colliding actions are taken from the simulator at the pre-action
// pose (the paper's construction) or suppressed entirely (the
// no-collision-check ablation).
enum class MaskMode { Simulator, None };

struct TargetRecord {
    std::string episode_id;
    int t = 0;
    Observation obs;
    Action action = Action::Stop;  // demonstrated (ground-truth) action
    bool collided = false;
    ActionDistribution p_sota;
    ActionSet colliding;
    ActionDistribution target;
};

struct TargetDataset {
    // grouped per episode, in corpus order; hidden state threading during
    // student training follows this grouping
    std::vector<Episode> episodes;
    std::vector<std::vector<TargetRecord>> records;

    std::size_t total_steps() const {
        std::size_t n = 0;
        for (const auto& ep : records) n += ep.size();
        return n;
    }
};

// Replays each demonstration through the frozen policy: records p_sota at each
// step, the simulator's colliding set at the pre-action pose, and the fused
// target. The recurrent state threads across the episode from zero.
inline TargetDataset build_target_dataset(const std::vector<DemonstrationRecord>& corpus,
                                          const PolicyParams& policy, const FusionConfig& config,
                                          MaskMode mask_mode = MaskMode::Simulator) {
    TargetDataset out;
    out.episodes.reserve(corpus.size());
    out.records.reserve(corpus.size());
    for (const auto& demo : corpus) {
        if (!demo.episode.grid)
            throw Error("build_target_dataset: episode " + demo.episode.id +
                        " has no grid loaded (map file missing?)");
        const OccupancyGrid& grid = *demo.episode.grid;
        std::vector<TargetRecord> recs;
        recs.reserve(demo.steps.size());
        RecurrentState h = initial_state(policy);
        Pose pose = demo.episode.start;
        for (std::size_t t = 0; t < demo.steps.size(); ++t) {
            const DemoStep& s = demo.steps[t];
            auto [p_sota, nh] = forward_step(policy, h, s.obs);
            h = nh;
            TargetRecord r;
            r.episode_id = demo.episode.id;
            r.t = static_cast<int>(t);
            r.obs = s.obs;
            r.action = s.action;
            r.collided = s.collided;
            r.p_sota = p_sota;
            r.colliding = mask_mode == MaskMode::Simulator ? colliding_actions(grid, pose)
                                                           : ActionSet{};
            r.target = build_target(p_sota, s.action, r.colliding, config);
            recs.push_back(std::move(r));

            const StepOutcome outcome = step(grid, pose, s.action);
            if (outcome.collided != s.collided)
                throw Error("build_target_dataset: episode " + demo.episode.id + " step " +
                            std::to_string(t) + " does not replay (collision mismatch)");
            pose = outcome.pose;
        }
        out.episodes.push_back(demo.episode);
        out.records.push_back(std::move(recs));
    }
    return out;
}

// ---- target dataset I/O (JSON Lines, demonstration schema plus p_sota,
// colliding, target) ----

inline void write_targets(const TargetDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write target dataset: " + path);
    for (std::size_t ei = 0; ei < ds.records.size(); ++ei) {
        DemonstrationRecord header;
        header.episode = ds.episodes[ei];
        nlohmann::json hj = episode_to_json(header.episode);
        hj["num_steps"] = ds.records[ei].size();
        out << hj.dump() << "\n";
        for (const TargetRecord& r : ds.records[ei]) {
            nlohmann::json j;
            j["episode_id"] = r.episode_id;
            j["t"] = r.t;
            j["patch"] = r.obs.patch;
            j["gps"] = {r.obs.gps_dx_m, r.obs.gps_dy_m};
            j["compass"] = r.obs.compass_rad;
            if (r.obs.prev_action.has_value())
                j["prev_action"] = static_cast<int>(*r.obs.prev_action);
            else
                j["prev_action"] = nullptr;
            j["goal"] = static_cast<int>(r.obs.goal);
            j["collided_last"] = r.obs.collided_last;
            j["action"] = static_cast<int>(r.action);
            j["collided"] = r.collided;
            j["p_sota"] = r.p_sota.p;
            nlohmann::json mask = nlohmann::json::array();
            for (int i = 0; i < kNumActions; ++i)
                if (r.colliding.contains(static_cast<Action>(i))) mask.push_back(i);
            j["colliding"] = mask;
            j["target"] = r.target.p;
            out << j.dump() << "\n";
        }
    }
}

inline TargetDataset read_targets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read target dataset: " + path);
    MapCache cache;
    TargetDataset ds;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json hj;
        try {
            hj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": bad json: " + e.what());
        }
        if (!hj.contains("num_steps"))
            throw Error(path + ":" + std::to_string(lineno) + ": expected episode header line");
        Episode ep = episode_from_json(hj, path, cache);
        const std::size_t n = hj.at("num_steps").get<std::size_t>();
        std::vector<TargetRecord> recs;
        recs.reserve(n);
        for (std::size_t t = 0; t < n; ++t) {
            if (!std::getline(in, line))
                throw Error(path + ": truncated target dataset in episode " + ep.id);
            ++lineno;
            const std::string where = path + ":" + std::to_string(lineno);
            try {
                nlohmann::json sj = nlohmann::json::parse(line);
                TargetRecord r;
                DemoStep s = detail::demo_step_from_json(sj, where);
                r.episode_id = sj.at("episode_id").get<std::string>();
                r.t = sj.at("t").get<int>();
                r.obs = s.obs;
                r.action = s.action;
                r.collided = s.collided;
                for (int i = 0; i < kNumActions; ++i)
                    r.p_sota[i] = sj.at("p_sota").at(static_cast<std::size_t>(i)).get<double>();
                for (const auto& idx : sj.at("colliding"))
                    r.colliding.insert(action_from_index(idx.get<int>()));
                for (int i = 0; i < kNumActions; ++i)
                    r.target[i] = sj.at("target").at(static_cast<std::size_t>(i)).get<double>();
                recs.push_back(std::move(r));
            } catch (const nlohmann::json::exception& e) {
                throw Error(where + ": " + e.what());
            }
        }
        ds.episodes.push_back(std::move(ep));
        ds.records.push_back(std::move(recs));
    }
    return ds;
}

}  // namespace navfuse
