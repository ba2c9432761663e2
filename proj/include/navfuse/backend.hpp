#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "navfuse/episode.hpp"
#include "navfuse/expert.hpp"
#include "navfuse/histpolicy.hpp"
#include "navfuse/student.hpp"

namespace navfuse {

// Uniform policy interface for evaluation rollouts. A backend instance serves
// one episode at a time: reset() fully clears episode state.
class PolicyBackend {
public:
    virtual ~PolicyBackend() = default;
    virtual void reset(const Episode& episode) = 0;
    virtual ActionDistribution act(const Observation& obs) = 0;
    // remote backends report how often they fell back to p_sota this episode
    virtual int fallback_count() const { return 0; }
};

// Shortest-path expert. The pose is reconstructed from the episode start and
// the gps/compass channels of the observation.
class ExpertBackend : public PolicyBackend {
public:
    explicit ExpertBackend(double stop_radius_m = 0.0) : stop_radius_(stop_radius_m) {}

    void reset(const Episode& episode) override {
        episode_ = episode;
        planner_.emplace(episode.grid, episode.grid->goal_cells(episode.goal));
    }

    ActionDistribution act(const Observation& obs) override {
        if (!planner_) throw Error("ExpertBackend: act before reset");
        Pose pose;
        pose.x_m = episode_.start.x_m + obs.gps_dx_m;
        pose.y_m = episode_.start.y_m + obs.gps_dy_m;
        const int delta = static_cast<int>(std::lround(obs.compass_rad * 180.0 / std::numbers::pi_v<double>));
        pose.heading_deg = wrap_heading(episode_.start.heading_deg + delta);
        pose.pitch_deg = 0;
        return ActionDistribution::onehot(planner_->act(pose, stop_radius_));
    }

private:
    double stop_radius_;
    Episode episode_;
    std::optional<ExpertPlanner> planner_;
};

// Uniform distribution every step.
class RandomBackend : public PolicyBackend {
public:
    void reset(const Episode&) override {}
    ActionDistribution act(const Observation&) override { return ActionDistribution::uniform(); }
};

// The behaviour-cloning (IL) policy.
class BcBackend : public PolicyBackend {
public:
    explicit BcBackend(PolicyParams params) : params_(std::move(params)) {}

    void reset(const Episode&) override { state_ = initial_state(params_); }

    ActionDistribution act(const Observation& obs) override {
        if (state_.empty()) throw Error("BcBackend: act before reset");
        auto [dist, next] = forward_step(params_, state_, obs);
        state_ = std::move(next);
        return dist;
    }

    const PolicyParams& params() const { return params_; }

private:
    PolicyParams params_;
    RecurrentState state_;
};

// Student policy driven by the frozen history policy's features.
class StudentBackend : public PolicyBackend {
public:
    StudentBackend(StudentParams student, PolicyParams frozen)
        : student_(std::move(student)), frozen_(std::move(frozen)) {
        if (student_.input != student_input_dim(frozen_.dims))
            throw Error("StudentBackend: student/policy dimension mismatch");
    }

    void reset(const Episode&) override { state_ = initial_state(frozen_); }

    ActionDistribution act(const Observation& obs) override {
        if (state_.empty()) throw Error("StudentBackend: act before reset");
        std::vector<double> enc = encode(frozen_, obs);
        state_ = gru_step(frozen_, enc, state_);
        const ActionDistribution p_sota = head_distribution(frozen_, state_);
        return student_forward(student_, enc, state_, p_sota, obs.goal);
    }

private:
    StudentParams student_;
    PolicyParams frozen_;
    RecurrentState state_;
};

}  // namespace navfuse
