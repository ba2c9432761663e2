#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "navfuse/nn.hpp"
#include "navfuse/observe.hpp"

namespace navfuse {

inline constexpr int kPrevActionSlots = kNumActions + 1;  // slot 6 = "none yet"

struct PolicyDims {
    int d_patch_hidden = 64;  // hidden width of the patch encoder
    int d_patch = 64;
    int d_gps = 8;
    int d_compass = 8;
    int d_action = 8;
    int d_goal = 8;
    int hidden = 64;
    int input() const { return d_patch + d_gps + d_compass + d_action + d_goal; }
};

// Recurrent behaviour-cloning policy feeding a single GRU with a softmax
// action head. The patch runs through a small two-layer encoder (the stand-in
// for the visual network); gps, compass, previous action, and goal category
// use linear embeddings.
struct PolicyParams {
    PolicyDims dims;
    Tensor W_patch1, b_patch1, W_patch2, b_patch2;
    Tensor W_gps, b_gps;
    Tensor W_compass, b_compass;
    Tensor W_prev, b_prev;
    Tensor W_goal, b_goal;
    Tensor W_z, U_z, b_z;
    Tensor W_r, U_r, b_r;
    Tensor W_h, U_h, b_h;
    Tensor W_out, b_out;

    std::vector<Tensor*> tensors() {
        return {&W_patch1, &b_patch1, &W_patch2, &b_patch2, &W_gps,  &b_gps, &W_compass,
                &b_compass, &W_prev,  &b_prev,   &W_goal,   &b_goal, &W_z,   &U_z,
                &b_z,       &W_r,     &U_r,      &b_r,      &W_h,    &U_h,   &b_h,
                &W_out,     &b_out};
    }
    std::vector<const Tensor*> tensors() const {
        return {&W_patch1, &b_patch1, &W_patch2, &b_patch2, &W_gps,  &b_gps, &W_compass,
                &b_compass, &W_prev,  &b_prev,   &W_goal,   &b_goal, &W_z,   &U_z,
                &b_z,       &W_r,     &U_r,      &b_r,      &W_h,    &U_h,   &b_h,
                &W_out,     &b_out};
    }

    static PolicyParams shaped(const PolicyDims& d) {
        PolicyParams p;
        p.dims = d;
        const auto H = static_cast<std::uint32_t>(d.hidden);
        const auto D = static_cast<std::uint32_t>(d.input());
        p.W_patch1 =
            Tensor::matrix("W_patch1", static_cast<std::uint32_t>(d.d_patch_hidden), kPatchCells);
        p.b_patch1 = Tensor::vector("b_patch1", static_cast<std::uint32_t>(d.d_patch_hidden));
        p.W_patch2 = Tensor::matrix("W_patch2", static_cast<std::uint32_t>(d.d_patch),
                                    static_cast<std::uint32_t>(d.d_patch_hidden));
        p.b_patch2 = Tensor::vector("b_patch2", static_cast<std::uint32_t>(d.d_patch));
        p.W_gps = Tensor::matrix("W_gps", static_cast<std::uint32_t>(d.d_gps), 2);
        p.b_gps = Tensor::vector("b_gps", static_cast<std::uint32_t>(d.d_gps));
        p.W_compass = Tensor::matrix("W_compass", static_cast<std::uint32_t>(d.d_compass), 1);
        p.b_compass = Tensor::vector("b_compass", static_cast<std::uint32_t>(d.d_compass));
        p.W_prev = Tensor::matrix("W_prev", static_cast<std::uint32_t>(d.d_action), kPrevActionSlots);
        p.b_prev = Tensor::vector("b_prev", static_cast<std::uint32_t>(d.d_action));
        p.W_goal = Tensor::matrix("W_goal", static_cast<std::uint32_t>(d.d_goal), kNumGoalCategories);
        p.b_goal = Tensor::vector("b_goal", static_cast<std::uint32_t>(d.d_goal));
        p.W_z = Tensor::matrix("W_z", H, D);
        p.U_z = Tensor::matrix("U_z", H, H);
        p.b_z = Tensor::vector("b_z", H);
        p.W_r = Tensor::matrix("W_r", H, D);
        p.U_r = Tensor::matrix("U_r", H, H);
        p.b_r = Tensor::vector("b_r", H);
        p.W_h = Tensor::matrix("W_h", H, D);
        p.U_h = Tensor::matrix("U_h", H, H);
        p.b_h = Tensor::vector("b_h", H);
        p.W_out = Tensor::matrix("W_out", kNumActions, H);
        p.b_out = Tensor::vector("b_out", kNumActions);
        return p;
    }

    // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) on every tensor, biases using
    // their layer's fan-in; deterministic in the seed
    static PolicyParams init(const PolicyDims& d, std::uint64_t seed) {
        PolicyParams p = shaped(d);
        Rng rng(mix_seed(seed, 0x706f6c69u));
        for (Tensor* t : p.tensors()) {
            std::uint32_t fan_in = t->dims.size() > 1 ? t->cols() : fan_in_of(p, t->name);
            t->init_uniform(fan_in, rng);
        }
        return p;
    }

    void check_finite() const {
        for (const Tensor* t : tensors())
            for (double x : t->v)
                if (!std::isfinite(x)) throw Error("policy params: non-finite value in " + t->name);
    }

private:
    static std::uint32_t fan_in_of(const PolicyParams& p, const std::string& bias_name) {
        if (bias_name == "b_patch1") return p.W_patch1.cols();
        if (bias_name == "b_patch2") return p.W_patch2.cols();
        if (bias_name == "b_gps") return p.W_gps.cols();
        if (bias_name == "b_compass") return p.W_compass.cols();
        if (bias_name == "b_prev") return p.W_prev.cols();
        if (bias_name == "b_goal") return p.W_goal.cols();
        if (bias_name == "b_z" || bias_name == "b_r" || bias_name == "b_h") return p.W_z.cols();
        if (bias_name == "b_out") return p.W_out.cols();
        throw Error("unknown bias tensor: " + bias_name);
    }
};

using RecurrentState = std::vector<double>;

inline RecurrentState initial_state(const PolicyParams& p) {
    return RecurrentState(static_cast<std::size_t>(p.dims.hidden), 0.0);
}

// Flat observation channels fed to the encoders.
struct ObsChannels {
    std::array<double, kPatchCells> patch;
    std::array<double, 2> gps;
    std::array<double, 1> compass;
    std::array<double, kPrevActionSlots> prev;
    std::array<double, kNumGoalCategories> goal;
};

inline ObsChannels obs_channels(const Observation& o) {
    ObsChannels c{};
    for (std::size_t i = 0; i < kPatchCells; ++i) c.patch[i] = o.patch[i];
    c.gps = {o.gps_dx_m, o.gps_dy_m};
    c.compass = {o.compass_rad};
    c.prev.fill(0.0);
    c.prev[o.prev_action ? static_cast<std::size_t>(*o.prev_action)
                         : static_cast<std::size_t>(kNumActions)] = 1.0;
    c.goal.fill(0.0);
    c.goal[static_cast<std::size_t>(o.goal)] = 1.0;
    return c;
}

// Patch encoder hidden activation: a1 = tanh(W_patch1 patch + b_patch1).
inline void patch_hidden_into(const PolicyParams& p, std::span<const double> patch,
                              std::span<double> a1) {
    std::copy(p.b_patch1.v.begin(), p.b_patch1.v.end(), a1.begin());
    matvec_acc(p.W_patch1, patch, a1);
    for (double& v : a1) v = std::tanh(v);
}

// Concatenation of the channel embeddings (two-layer patch encoder, linear
// elsewhere).
inline void encode_into(const PolicyParams& p, const Observation& o, std::span<double> out) {
    const ObsChannels ch = obs_channels(o);
    std::vector<double> a1(static_cast<std::size_t>(p.dims.d_patch_hidden));
    patch_hidden_into(p, ch.patch, a1);
    std::size_t at = 0;
    auto emit = [&](const Tensor& W, const Tensor& b, std::span<const double> x) {
        std::span<double> y = out.subspan(at, b.size());
        std::copy(b.v.begin(), b.v.end(), y.begin());
        matvec_acc(W, x, y);
        at += b.size();
    };
    emit(p.W_patch2, p.b_patch2, a1);
    emit(p.W_gps, p.b_gps, ch.gps);
    emit(p.W_compass, p.b_compass, ch.compass);
    emit(p.W_prev, p.b_prev, ch.prev);
    emit(p.W_goal, p.b_goal, ch.goal);
}

inline std::vector<double> encode(const PolicyParams& p, const Observation& o) {
    std::vector<double> x(static_cast<std::size_t>(p.dims.input()), 0.0);
    encode_into(p, o, x);
    return x;
}

// z = sig(W_z x + U_z h + b_z), r = sig(W_r x + U_r h + b_r),
// hbar = tanh(W_h x + U_h (r*h) + b_h), h' = (1-z)*h + z*hbar
inline RecurrentState gru_step(const PolicyParams& p, std::span<const double> x,
                               const RecurrentState& h) {
    const std::size_t H = static_cast<std::size_t>(p.dims.hidden);
    std::vector<double> z(p.b_z.v), r(p.b_r.v), c(p.b_h.v), rh(H);
    matvec_acc(p.W_z, x, z);
    matvec_acc(p.U_z, h, z);
    matvec_acc(p.W_r, x, r);
    matvec_acc(p.U_r, h, r);
    for (std::size_t i = 0; i < H; ++i) {
        z[i] = sigmoid(z[i]);
        r[i] = sigmoid(r[i]);
        rh[i] = r[i] * h[i];
    }
    matvec_acc(p.W_h, x, c);
    matvec_acc(p.U_h, rh, c);
    RecurrentState out(H);
    for (std::size_t i = 0; i < H; ++i) {
        c[i] = std::tanh(c[i]);
        out[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
    }
    return out;
}

inline ActionDistribution head_distribution(const PolicyParams& p, const RecurrentState& h) {
    std::array<double, kNumActions> logits;
    std::copy(p.b_out.v.begin(), p.b_out.v.end(), logits.begin());
    matvec_acc(p.W_out, h, logits);
    softmax_inplace(logits);
    ActionDistribution d;
    d.p = logits;
    return d;
}

// One policy tick: consume an observation, update the recurrent state, emit
// the action distribution.
inline std::pair<ActionDistribution, RecurrentState> forward_step(const PolicyParams& p,
                                                                  const RecurrentState& state,
                                                                  const Observation& o) {
    std::vector<double> x = encode(p, o);
    RecurrentState h = gru_step(p, x, state);
    return {head_distribution(p, h), std::move(h)};
}

// ---- behaviour-cloning training ----

struct BcEpisode {
    std::vector<Observation> obs;
    std::vector<Action> actions;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 4;
    int batch_episodes = 8;
    PolicyDims dims{};
    double clip_norm = 5.0;
    std::uint64_t seed = 1;
};

namespace detail {

// Per-episode forward/backward with reusable caches. Gradients accumulate
// unscaled (sum of per-step CE); callers divide by the step count afterwards.
class BpttWorkspace {
public:
    void configure(const PolicyDims& d) {
        H_ = static_cast<std::size_t>(d.hidden);
        D_ = static_cast<std::size_t>(d.input());
    }

    void configure_patch(int d_patch_hidden) { P1_ = static_cast<std::size_t>(d_patch_hidden); }

    // returns summed cross-entropy over the episode
    double forward(const PolicyParams& p, const BcEpisode& ep) {
        const std::size_t T = ep.actions.size();
        P1_ = static_cast<std::size_t>(p.dims.d_patch_hidden);
        ensure(T);
        double ce = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            ch_[t] = obs_channels(ep.obs[t]);
            std::span<double> xt(x_[t].data(), D_);
            std::fill(xt.begin(), xt.end(), 0.0);
            encode_channels(p, ch_[t], t, xt);
            const std::span<const double> h_prev =
                t == 0 ? std::span<const double>(zero_) : std::span<const double>(h_[t - 1]);
            step_forward(p, xt, h_prev, t);
            std::array<double, kNumActions> logits;
            std::copy(p.b_out.v.begin(), p.b_out.v.end(), logits.begin());
            matvec_acc(p.W_out, h_[t], logits);
            softmax_inplace(logits);
            probs_[t] = logits;
            const double pa = logits[static_cast<std::size_t>(ep.actions[t])];
            ce += -std::log(std::max(pa, 1e-300));
        }
        return ce;
    }

    void backward(const PolicyParams& p, const BcEpisode& ep, PolicyParams& grads) {
        const std::size_t T = ep.actions.size();
        std::vector<double>& dh = dh_;
        dh.assign(H_, 0.0);
        for (std::size_t t = T; t-- > 0;) {
            // head
            std::array<double, kNumActions> dlogits = probs_[t];
            dlogits[static_cast<std::size_t>(ep.actions[t])] -= 1.0;
            outer_acc(grads.W_out, dlogits, h_[t]);
            vec_acc(grads.b_out, dlogits);
            matvec_t_acc(p.W_out, dlogits, dh);

            const std::span<const double> h_prev =
                t == 0 ? std::span<const double>(zero_) : std::span<const double>(h_[t - 1]);
            auto& z = z_[t];
            auto& r = r_[t];
            auto& c = c_[t];
            auto& rh = rh_[t];

            dz_.assign(H_, 0.0);
            dc_.assign(H_, 0.0);
            dhp_.assign(H_, 0.0);
            for (std::size_t i = 0; i < H_; ++i) {
                dz_[i] = dh[i] * (c[i] - h_prev[i]);
                dc_[i] = dh[i] * z[i];
                dhp_[i] = dh[i] * (1.0 - z[i]);
            }
            // candidate
            for (std::size_t i = 0; i < H_; ++i) dc_[i] *= 1.0 - c[i] * c[i];
            std::span<const double> xt(x_[t].data(), D_);
            outer_acc(grads.W_h, dc_, xt);
            vec_acc(grads.b_h, dc_);
            outer_acc(grads.U_h, dc_, rh);
            drh_.assign(H_, 0.0);
            matvec_t_acc(p.U_h, dc_, drh_);
            dr_.assign(H_, 0.0);
            for (std::size_t i = 0; i < H_; ++i) {
                dr_[i] = drh_[i] * h_prev[i];
                dhp_[i] += drh_[i] * r[i];
            }
            // gates
            for (std::size_t i = 0; i < H_; ++i) {
                dr_[i] *= r[i] * (1.0 - r[i]);
                dz_[i] *= z[i] * (1.0 - z[i]);
            }
            outer_acc(grads.W_r, dr_, xt);
            vec_acc(grads.b_r, dr_);
            outer_acc(grads.U_r, dr_, h_prev);
            matvec_t_acc(p.U_r, dr_, dhp_);
            outer_acc(grads.W_z, dz_, xt);
            vec_acc(grads.b_z, dz_);
            outer_acc(grads.U_z, dz_, h_prev);
            matvec_t_acc(p.U_z, dz_, dhp_);

            // into the encoders
            dx_.assign(D_, 0.0);
            matvec_t_acc(p.W_z, dz_, dx_);
            matvec_t_acc(p.W_r, dr_, dx_);
            matvec_t_acc(p.W_h, dc_, dx_);
            std::size_t at = 0;
            const ObsChannels& ch = ch_[t];
            // patch branch: through the two-layer encoder
            {
                std::span<const double> dy(dx_.data(), grads.b_patch2.size());
                outer_acc(grads.W_patch2, dy, pa_[t]);
                vec_acc(grads.b_patch2, dy);
                da1_.assign(P1_, 0.0);
                matvec_t_acc(p.W_patch2, dy, da1_);
                for (std::size_t i = 0; i < P1_; ++i) da1_[i] *= 1.0 - pa_[t][i] * pa_[t][i];
                outer_acc(grads.W_patch1, da1_, ch.patch);
                vec_acc(grads.b_patch1, da1_);
                at += grads.b_patch2.size();
            }
            auto back_enc = [&](Tensor& dW, Tensor& db, std::span<const double> in) {
                std::span<const double> dy(dx_.data() + at, db.size());
                outer_acc(dW, dy, in);
                vec_acc(db, dy);
                at += db.size();
            };
            back_enc(grads.W_gps, grads.b_gps, ch.gps);
            back_enc(grads.W_compass, grads.b_compass, ch.compass);
            back_enc(grads.W_prev, grads.b_prev, ch.prev);
            back_enc(grads.W_goal, grads.b_goal, ch.goal);

            dh = dhp_;
        }
    }

    const RecurrentState& hidden_at(std::size_t t) const { return h_[t]; }
    const std::array<double, kNumActions>& probs_at(std::size_t t) const { return probs_[t]; }

private:
    void ensure(std::size_t T) {
        zero_.assign(H_, 0.0);
        if (x_.size() < T) {
            x_.resize(T);
            z_.resize(T);
            r_.resize(T);
            c_.resize(T);
            rh_.resize(T);
            h_.resize(T);
            pa_.resize(T);
            probs_.resize(T);
            ch_.resize(T);
        }
        for (std::size_t t = 0; t < T; ++t) {
            x_[t].resize(D_);
            z_[t].resize(H_);
            r_[t].resize(H_);
            c_[t].resize(H_);
            rh_[t].resize(H_);
            h_[t].resize(H_);
            pa_[t].resize(P1_);
        }
    }

    void encode_channels(const PolicyParams& p, const ObsChannels& ch, std::size_t t,
                         std::span<double> out) {
        patch_hidden_into(p, ch.patch, pa_[t]);
        std::size_t at = 0;
        auto emit = [&](const Tensor& W, const Tensor& b, std::span<const double> x) {
            std::span<double> y = out.subspan(at, b.size());
            std::copy(b.v.begin(), b.v.end(), y.begin());
            matvec_acc(W, x, y);
            at += b.size();
        };
        emit(p.W_patch2, p.b_patch2, pa_[t]);
        emit(p.W_gps, p.b_gps, ch.gps);
        emit(p.W_compass, p.b_compass, ch.compass);
        emit(p.W_prev, p.b_prev, ch.prev);
        emit(p.W_goal, p.b_goal, ch.goal);
    }

    void step_forward(const PolicyParams& p, std::span<const double> x,
                      std::span<const double> h_prev, std::size_t t) {
        auto& z = z_[t];
        auto& r = r_[t];
        auto& c = c_[t];
        auto& rh = rh_[t];
        auto& h = h_[t];
        std::copy(p.b_z.v.begin(), p.b_z.v.end(), z.begin());
        std::copy(p.b_r.v.begin(), p.b_r.v.end(), r.begin());
        std::copy(p.b_h.v.begin(), p.b_h.v.end(), c.begin());
        matvec_acc(p.W_z, x, z);
        matvec_acc(p.U_z, h_prev, z);
        matvec_acc(p.W_r, x, r);
        matvec_acc(p.U_r, h_prev, r);
        for (std::size_t i = 0; i < H_; ++i) {
            z[i] = sigmoid(z[i]);
            r[i] = sigmoid(r[i]);
            rh[i] = r[i] * h_prev[i];
        }
        matvec_acc(p.W_h, x, c);
        matvec_acc(p.U_h, rh, c);
        for (std::size_t i = 0; i < H_; ++i) {
            c[i] = std::tanh(c[i]);
            h[i] = (1.0 - z[i]) * h_prev[i] + z[i] * c[i];
        }
    }

    std::size_t H_ = 0, D_ = 0, P1_ = 0;
    std::vector<double> zero_, dh_, dz_, dr_, dc_, drh_, dhp_, dx_, da1_;
    std::vector<std::vector<double>> x_, z_, r_, c_, rh_, h_, pa_;
    std::vector<std::array<double, kNumActions>> probs_;
    std::vector<ObsChannels> ch_;
};

inline PolicyParams zero_like(const PolicyParams& p) {
    PolicyParams g = PolicyParams::shaped(p.dims);
    return g;
}

// Forward-only loss evaluation in selectable precision. The finite-difference
// checker runs this in long double so that difference quotients are not
// dominated by double rounding of the loss itself.
template <typename Real>
Real bc_loss_precise(const PolicyParams& p, std::span<const BcEpisode> batch) {
    const std::size_t H = static_cast<std::size_t>(p.dims.hidden);
    const std::size_t D = static_cast<std::size_t>(p.dims.input());
    auto matvec = [](const Tensor& W, const std::vector<Real>& x, std::vector<Real>& y) {
        const std::size_t R = W.rows(), C = W.cols();
        for (std::size_t r = 0; r < R; ++r) {
            Real acc = 0;
            for (std::size_t c = 0; c < C; ++c) acc += static_cast<Real>(W.v[r * C + c]) * x[c];
            y[r] += acc;
        }
    };
    const std::size_t P1 = static_cast<std::size_t>(p.dims.d_patch_hidden);
    Real ce = 0;
    std::size_t steps = 0;
    std::vector<Real> x(D), h(H), z(H), r(H), c(H), rh(H), a1(P1), logits(kNumActions);
    for (const auto& ep : batch) {
        std::fill(h.begin(), h.end(), Real(0));
        for (std::size_t t = 0; t < ep.actions.size(); ++t) {
            const ObsChannels ch = obs_channels(ep.obs[t]);
            std::size_t at = 0;
            auto emit_raw = [&](const Tensor& W, const Tensor& b, const Real* in, std::size_t n) {
                for (std::size_t i = 0; i < b.size(); ++i) x[at + i] = static_cast<Real>(b.v[i]);
                const std::size_t R = W.rows(), C = W.cols();
                for (std::size_t rr = 0; rr < R; ++rr) {
                    Real acc = 0;
                    for (std::size_t cc = 0; cc < n && cc < C; ++cc)
                        acc += static_cast<Real>(W.v[rr * C + cc]) * in[cc];
                    x[at + rr] += acc;
                }
                at += b.size();
            };
            auto emit = [&](const Tensor& W, const Tensor& b, const double* in, std::size_t n) {
                std::vector<Real> tmp(n);
                for (std::size_t i = 0; i < n; ++i) tmp[i] = static_cast<Real>(in[i]);
                emit_raw(W, b, tmp.data(), n);
            };
            for (std::size_t i = 0; i < P1; ++i) {
                Real acc = static_cast<Real>(p.b_patch1.v[i]);
                for (std::size_t j = 0; j < kPatchCells; ++j)
                    acc += static_cast<Real>(p.W_patch1.v[i * kPatchCells + j]) *
                           static_cast<Real>(ch.patch[j]);
                a1[i] = std::tanh(acc);
            }
            emit_raw(p.W_patch2, p.b_patch2, a1.data(), a1.size());
            emit(p.W_gps, p.b_gps, ch.gps.data(), ch.gps.size());
            emit(p.W_compass, p.b_compass, ch.compass.data(), ch.compass.size());
            emit(p.W_prev, p.b_prev, ch.prev.data(), ch.prev.size());
            emit(p.W_goal, p.b_goal, ch.goal.data(), ch.goal.size());

            for (std::size_t i = 0; i < H; ++i) {
                z[i] = static_cast<Real>(p.b_z.v[i]);
                r[i] = static_cast<Real>(p.b_r.v[i]);
                c[i] = static_cast<Real>(p.b_h.v[i]);
            }
            matvec(p.W_z, x, z);
            matvec(p.U_z, h, z);
            matvec(p.W_r, x, r);
            matvec(p.U_r, h, r);
            for (std::size_t i = 0; i < H; ++i) {
                z[i] = Real(1) / (Real(1) + std::exp(-z[i]));
                r[i] = Real(1) / (Real(1) + std::exp(-r[i]));
                rh[i] = r[i] * h[i];
            }
            matvec(p.W_h, x, c);
            matvec(p.U_h, rh, c);
            for (std::size_t i = 0; i < H; ++i) {
                c[i] = std::tanh(c[i]);
                h[i] = (Real(1) - z[i]) * h[i] + z[i] * c[i];
            }
            for (int i = 0; i < kNumActions; ++i) logits[static_cast<std::size_t>(i)] = static_cast<Real>(p.b_out.v[static_cast<std::size_t>(i)]);
            matvec(p.W_out, h, logits);
            Real mx = logits[0];
            for (Real v : logits) mx = std::max(mx, v);
            Real sum = 0;
            for (Real& v : logits) {
                v = std::exp(v - mx);
                sum += v;
            }
            ce += -std::log(logits[static_cast<std::size_t>(ep.actions[t])] / sum);
            ++steps;
        }
    }
    return ce / static_cast<Real>(steps);
}

}  // namespace detail

struct BcTrainResult {
    PolicyParams params;
    std::vector<double> epoch_losses;
};

// Behaviour cloning with full-episode backpropagation through time, Adam, and
// global-norm gradient clipping. Deterministic in config.seed.
inline BcTrainResult train_bc(std::span<const BcEpisode> corpus, const TrainConfig& cfg) {
    if (corpus.empty()) throw Error("train_bc: empty corpus");
    for (const auto& ep : corpus)
        if (ep.obs.size() != ep.actions.size() || ep.actions.empty())
            throw Error("train_bc: malformed episode (observation/action misalignment)");

    PolicyParams params = PolicyParams::init(cfg.dims, cfg.seed);
    auto tensor_ptrs = params.tensors();
    Adam adam(cfg.learning_rate, tensor_ptrs);

    detail::BpttWorkspace ws;
    ws.configure(cfg.dims);
    PolicyParams grad_holder = detail::zero_like(params);
    auto grad_ptrs = grad_holder.tensors();

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(mix_seed(cfg.seed, 0x73687566u));

    std::vector<double> epoch_losses;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_ce = 0.0;
        std::size_t epoch_steps = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_episodes)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_episodes));
            for (Tensor* g : grad_ptrs) g->zero();
            double batch_ce = 0.0;
            std::size_t batch_steps = 0;
            for (std::size_t bi = start; bi < end; ++bi) {
                const BcEpisode& ep = corpus[order[bi]];
                batch_ce += ws.forward(params, ep);
                ws.backward(params, ep, grad_holder);
                batch_steps += ep.actions.size();
            }
            if (!std::isfinite(batch_ce))
                throw Error("train_bc: NaN loss at epoch " + std::to_string(epoch) +
                            ", batch starting at episode " + std::to_string(start));
            const double inv = 1.0 / static_cast<double>(batch_steps);
            for (Tensor* g : grad_ptrs)
                for (double& x : g->v) x *= inv;
            clip_global_norm(grad_ptrs, cfg.clip_norm);
            adam.step(tensor_ptrs, grad_ptrs);
            epoch_ce += batch_ce;
            epoch_steps += batch_steps;
        }
        epoch_losses.push_back(epoch_ce / static_cast<double>(epoch_steps));
    }
    return BcTrainResult{std::move(params), std::move(epoch_losses)};
}

// Mean per-step cross entropy of the corpus under fixed parameters.
inline double bc_loss(const PolicyParams& params, std::span<const BcEpisode> corpus) {
    detail::BpttWorkspace ws;
    ws.configure(params.dims);
    double ce = 0.0;
    std::size_t steps = 0;
    for (const auto& ep : corpus) {
        ce += ws.forward(params, ep);
        steps += ep.actions.size();
    }
    return ce / static_cast<double>(steps);
}

// Central finite-difference validation of the analytic BPTT gradient over
// every parameter element. Returns the max relative error; per-tensor maxima
// go to per_tensor when provided.
inline double grad_check(const PolicyParams& params, std::span<const BcEpisode> batch,
                         std::map<std::string, double>* per_tensor = nullptr) {
    if (batch.empty()) throw Error("grad_check: empty batch");
    if (batch.size() > 3) throw Error("grad_check: batch must have at most 3 episodes");
    for (const auto& ep : batch) {
        if (ep.actions.empty() || ep.obs.size() != ep.actions.size())
            throw Error("grad_check: malformed episode");
        if (ep.actions.size() > 10) throw Error("grad_check: episodes must be short (<= 10 steps)");
    }

    PolicyParams work = params;
    detail::BpttWorkspace ws;
    ws.configure(work.dims);

    std::size_t total_steps = 0;
    for (const auto& ep : batch) total_steps += ep.actions.size();
    const double inv = 1.0 / static_cast<double>(total_steps);

    PolicyParams grad_holder = detail::zero_like(work);
    for (const auto& ep : batch) {
        ws.forward(work, ep);
        ws.backward(work, ep, grad_holder);
    }
    auto analytic = grad_holder.tensors();
    for (Tensor* g : analytic)
        for (double& x : g->v) x *= inv;

    const double h = 1e-5;
    double max_rel = 0.0;
    auto work_ptrs = work.tensors();
    for (std::size_t ti = 0; ti < work_ptrs.size(); ++ti) {
        Tensor* t = work_ptrs[ti];
        double tensor_max = 0.0;
        for (std::size_t k = 0; k < t->v.size(); ++k) {
            const double orig = t->v[k];
            t->v[k] = orig + h;
            const long double up = detail::bc_loss_precise<long double>(work, batch);
            t->v[k] = orig - h;
            const long double dn = detail::bc_loss_precise<long double>(work, batch);
            t->v[k] = orig;
            const double gn = static_cast<double>((up - dn) / (2.0L * h));
            const double ga = analytic[ti]->v[k];
            const double rel = std::abs(ga - gn) / std::max({std::abs(ga), std::abs(gn), 1e-8});
            tensor_max = std::max(tensor_max, rel);
        }
        if (per_tensor) (*per_tensor)[t->name] = tensor_max;
        max_rel = std::max(max_rel, tensor_max);
    }
    return max_rel;
}

// ---- parameter persistence ----

inline void save_policy(const PolicyParams& p, const std::string& path) {
    auto ts = p.tensors();
    save_tensors(path, std::span<const Tensor* const>(ts.data(), ts.size()));
}

inline PolicyParams load_policy(const std::string& path) {
    auto loaded = load_tensors(path);
    auto find = [&](const char* name) -> const Tensor& {
        for (const auto& t : loaded)
            if (t.name == name) return t;
        throw Error(path + ": missing tensor '" + std::string(name) + "'");
    };
    PolicyDims d;
    d.d_patch_hidden = static_cast<int>(find("W_patch1").rows());
    d.d_patch = static_cast<int>(find("W_patch2").rows());
    d.d_gps = static_cast<int>(find("W_gps").rows());
    d.d_compass = static_cast<int>(find("W_compass").rows());
    d.d_action = static_cast<int>(find("W_prev").rows());
    d.d_goal = static_cast<int>(find("W_goal").rows());
    d.hidden = static_cast<int>(find("W_z").rows());
    PolicyParams p = PolicyParams::shaped(d);
    for (Tensor* t : p.tensors()) assign_tensor(*t, loaded, path);
    p.check_finite();
    return p;
}

}  // namespace navfuse
