#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "navfuse/fusion.hpp"
#include "navfuse/histpolicy.hpp"
#include "navfuse/nn.hpp"

namespace navfuse {

inline constexpr int kStudentDefaultHidden = 128;
inline constexpr int kStudentDefaultIterations = 20000;  // 80k at paper scale
inline constexpr int kStudentDefaultBatch = 6;

// Two-hidden-layer tanh MLP over [frozen encoder features | frozen hidden
// state | p_sota | goal one-hot].
struct StudentParams {
    int input = 0;
    int hidden = kStudentDefaultHidden;
    Tensor W1, b1, W2, b2, W3, b3;

    std::vector<Tensor*> tensors() { return {&W1, &b1, &W2, &b2, &W3, &b3}; }
    std::vector<const Tensor*> tensors() const { return {&W1, &b1, &W2, &b2, &W3, &b3}; }

    static StudentParams shaped(int input, int hidden) {
        StudentParams s;
        s.input = input;
        s.hidden = hidden;
        s.W1 = Tensor::matrix("S_W1", static_cast<std::uint32_t>(hidden),
                              static_cast<std::uint32_t>(input));
        s.b1 = Tensor::vector("S_b1", static_cast<std::uint32_t>(hidden));
        s.W2 = Tensor::matrix("S_W2", static_cast<std::uint32_t>(hidden),
                              static_cast<std::uint32_t>(hidden));
        s.b2 = Tensor::vector("S_b2", static_cast<std::uint32_t>(hidden));
        s.W3 = Tensor::matrix("S_W3", kNumActions, static_cast<std::uint32_t>(hidden));
        s.b3 = Tensor::vector("S_b3", kNumActions);
        return s;
    }

    static StudentParams init(int input, int hidden, std::uint64_t seed) {
        StudentParams s = shaped(input, hidden);
        Rng rng(mix_seed(seed, 0x73747564u));
        s.W1.init_uniform(static_cast<std::uint32_t>(input), rng);
        s.b1.init_uniform(static_cast<std::uint32_t>(input), rng);
        s.W2.init_uniform(static_cast<std::uint32_t>(hidden), rng);
        s.b2.init_uniform(static_cast<std::uint32_t>(hidden), rng);
        s.W3.init_uniform(static_cast<std::uint32_t>(hidden), rng);
        s.b3.init_uniform(static_cast<std::uint32_t>(hidden), rng);
        return s;
    }
};

inline int student_input_dim(const PolicyDims& d) {
    return d.input() + d.hidden + kNumActions + kNumGoalCategories;
}

// Assembles the student input vector.
inline void student_input_into(std::span<const double> enc_features,
                               std::span<const double> hist_state,
                               const ActionDistribution& p_sota, GoalCategory goal,
                               std::span<double> out) {
    std::size_t at = 0;
    for (double v : enc_features) out[at++] = v;
    for (double v : hist_state) out[at++] = v;
    for (int i = 0; i < kNumActions; ++i) out[at++] = p_sota[i];
    for (int i = 0; i < kNumGoalCategories; ++i) out[at++] = 0.0;
    out[at - kNumGoalCategories + static_cast<std::size_t>(goal)] = 1.0;
}

namespace detail {

struct StudentForwardCache {
    std::vector<double> in, a1, a2;
    std::array<double, kNumActions> probs;
};

inline void student_mlp_forward(const StudentParams& s, StudentForwardCache& c) {
    c.a1.assign(s.b1.v.begin(), s.b1.v.end());
    matvec_acc(s.W1, c.in, c.a1);
    for (double& v : c.a1) v = std::tanh(v);
    c.a2.assign(s.b2.v.begin(), s.b2.v.end());
    matvec_acc(s.W2, c.a1, c.a2);
    for (double& v : c.a2) v = std::tanh(v);
    std::copy(s.b3.v.begin(), s.b3.v.end(), c.probs.begin());
    matvec_acc(s.W3, c.a2, c.probs);
    softmax_inplace(c.probs);
}

}  // namespace detail

// Student action distribution given frozen-teacher features.
inline ActionDistribution student_forward(const StudentParams& student,
                                          std::span<const double> enc_features,
                                          std::span<const double> hist_state,
                                          const ActionDistribution& p_sota, GoalCategory goal) {
    detail::StudentForwardCache c;
    c.in.resize(static_cast<std::size_t>(student.input));
    student_input_into(enc_features, hist_state, p_sota, goal, c.in);
    detail::student_mlp_forward(student, c);
    ActionDistribution d;
    d.p = c.probs;
    return d;
}

// Convenience form that runs the frozen encoders itself.
inline ActionDistribution student_forward(const StudentParams& student,
                                          const PolicyParams& frozen, const Observation& obs,
                                          const RecurrentState& hist_state,
                                          const ActionDistribution& p_sota) {
    std::vector<double> enc = encode(frozen, obs);
    return student_forward(student, enc, hist_state, p_sota, obs.goal);
}

enum class TargetMode { Fused, Direct, FusedNomask };

inline const char* target_mode_name(TargetMode m) {
    switch (m) {
        case TargetMode::Fused: return "fused";
        case TargetMode::Direct: return "direct";
        case TargetMode::FusedNomask: return "fused_nomask";
    }
    return "?";
}

inline TargetMode target_mode_from_name(const std::string& s) {
    if (s == "fused") return TargetMode::Fused;
    if (s == "direct") return TargetMode::Direct;
    if (s == "fused_nomask") return TargetMode::FusedNomask;
    throw Error("unknown student target mode: " + s);
}

struct StudentTrainConfig {
    TargetMode target_mode = TargetMode::Fused;
    double learning_rate = 1e-3;
    int iterations = kStudentDefaultIterations;
    int batch_size = kStudentDefaultBatch;
    int hidden = kStudentDefaultHidden;
    std::uint64_t seed = 1;
};

struct StudentTrainResult {
    StudentParams params;
    std::vector<double> iteration_losses;
};

// Distillation of the fused targets (or plain action cloning in direct mode)
// into the student MLP. The history policy stays frozen throughout: its
// features and hidden states are precomputed once and never touched by the
// optimizer. Minibatches are uniform over steps. Deterministic in cfg.seed.
inline StudentTrainResult train_student(const TargetDataset& dataset, const PolicyParams& frozen,
                                        const StudentTrainConfig& cfg) {
    if (cfg.batch_size < 1) throw Error("train_student: batch_size must be >= 1");
    const std::size_t total = dataset.total_steps();
    if (total == 0) throw Error("train_student: empty target dataset");

    const std::size_t enc_dim = static_cast<std::size_t>(frozen.dims.input());
    const std::size_t hid_dim = static_cast<std::size_t>(frozen.dims.hidden);
    const int in_dim = student_input_dim(frozen.dims);

    // precompute the frozen features per step (hidden state threads per episode)
    std::vector<double> enc_all(total * enc_dim);
    std::vector<double> hid_all(total * hid_dim);
    std::vector<const TargetRecord*> recs(total);
    {
        std::size_t at = 0;
        for (const auto& ep_records : dataset.records) {
            RecurrentState h = initial_state(frozen);
            for (const TargetRecord& r : ep_records) {
                std::span<double> enc_slot(enc_all.data() + at * enc_dim, enc_dim);
                encode_into(frozen, r.obs, enc_slot);
                h = gru_step(frozen, enc_slot, h);
                std::copy(h.begin(), h.end(), hid_all.begin() + static_cast<std::ptrdiff_t>(at * hid_dim));
                recs[at] = &r;
                ++at;
            }
        }
    }

    StudentParams student = StudentParams::init(in_dim, cfg.hidden, cfg.seed);
    auto params = student.tensors();
    Adam adam(cfg.learning_rate, params);
    StudentParams grads = StudentParams::shaped(in_dim, cfg.hidden);
    auto grad_ptrs = grads.tensors();

    Rng sample_rng(mix_seed(cfg.seed, 0x62617463u));
    detail::StudentForwardCache c;
    c.in.resize(static_cast<std::size_t>(in_dim));
    std::vector<double> d2(static_cast<std::size_t>(cfg.hidden)), d1(static_cast<std::size_t>(cfg.hidden));

    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        for (Tensor* g : grad_ptrs) g->zero();
        double batch_loss = 0.0;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const std::size_t idx = sample_rng.uniform_int(total);
            const TargetRecord& r = *recs[idx];
            student_input_into(
                std::span<const double>(enc_all.data() + idx * enc_dim, enc_dim),
                std::span<const double>(hid_all.data() + idx * hid_dim, hid_dim), r.p_sota,
                r.obs.goal, c.in);
            detail::student_mlp_forward(student, c);

            ActionDistribution target = cfg.target_mode == TargetMode::Direct
                                            ? ActionDistribution::onehot(r.action)
                                            : r.target;
            double ce = 0.0;
            for (int i = 0; i < kNumActions; ++i)
                if (target[i] != 0.0)
                    ce -= target[i] * std::log(std::max(c.probs[static_cast<std::size_t>(i)], 1e-300));
            batch_loss += ce;

            std::array<double, kNumActions> dlogits;
            for (int i = 0; i < kNumActions; ++i)
                dlogits[static_cast<std::size_t>(i)] = c.probs[static_cast<std::size_t>(i)] - target[i];
            outer_acc(grads.W3, dlogits, c.a2);
            vec_acc(grads.b3, dlogits);
            d2.assign(d2.size(), 0.0);
            matvec_t_acc(student.W3, dlogits, d2);
            for (std::size_t i = 0; i < d2.size(); ++i) d2[i] *= 1.0 - c.a2[i] * c.a2[i];
            outer_acc(grads.W2, d2, c.a1);
            vec_acc(grads.b2, d2);
            d1.assign(d1.size(), 0.0);
            matvec_t_acc(student.W2, d2, d1);
            for (std::size_t i = 0; i < d1.size(); ++i) d1[i] *= 1.0 - c.a1[i] * c.a1[i];
            outer_acc(grads.W1, d1, c.in);
            vec_acc(grads.b1, d1);
        }
        batch_loss /= cfg.batch_size;
        if (!std::isfinite(batch_loss))
            throw Error("train_student: NaN loss at iteration " + std::to_string(it));
        const double inv = 1.0 / cfg.batch_size;
        for (Tensor* g : grad_ptrs)
            for (double& x : g->v) x *= inv;
        adam.step(params, grad_ptrs);
        losses.push_back(batch_loss);
    }
    return StudentTrainResult{std::move(student), std::move(losses)};
}

inline void save_student(const StudentParams& s, const std::string& path) {
    auto ts = s.tensors();
    save_tensors(path, std::span<const Tensor* const>(ts.data(), ts.size()));
}

inline StudentParams load_student(const std::string& path) {
    auto loaded = load_tensors(path);
    int input = -1, hidden = -1;
    for (const auto& t : loaded)
        if (t.name == "S_W1") {
            hidden = static_cast<int>(t.rows());
            input = static_cast<int>(t.cols());
        }
    if (input < 0) throw Error(path + ": missing tensor 'S_W1'");
    StudentParams s = StudentParams::shaped(input, hidden);
    for (Tensor* t : s.tensors()) assign_tensor(*t, loaded, path);
    return s;
}

}  // namespace navfuse
