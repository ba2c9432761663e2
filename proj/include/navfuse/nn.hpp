#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "navfuse/core.hpp"
#include "navfuse/rng.hpp"

namespace navfuse {

static_assert(std::endian::native == std::endian::little,
              "parameter files are little-endian; big-endian hosts are unsupported");

// Named dense tensor, doubles, row-major for rank 2 (rows = outputs).
struct Tensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<double> v;

    static Tensor matrix(std::string name, std::uint32_t rows, std::uint32_t cols) {
        Tensor t;
        t.name = std::move(name);
        t.dims = {rows, cols};
        t.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
        return t;
    }
    static Tensor vector(std::string name, std::uint32_t n) {
        Tensor t;
        t.name = std::move(name);
        t.dims = {n};
        t.v.assign(n, 0.0);
        return t;
    }

    std::size_t size() const { return v.size(); }
    std::uint32_t rows() const { return dims.at(0); }
    std::uint32_t cols() const { return dims.size() > 1 ? dims.at(1) : 1; }

    void zero() { std::fill(v.begin(), v.end(), 0.0); }

    // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
    void init_uniform(std::uint32_t fan_in, Rng& rng) {
        const double b = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& x : v) x = rng.uniform(-b, b);
    }
};

// y += W x
inline void matvec_acc(const Tensor& W, std::span<const double> x, std::span<double> y) {
    const std::size_t R = W.rows(), C = W.cols();
    const double* w = W.v.data();
    for (std::size_t r = 0; r < R; ++r) {
        double acc = 0.0;
        const double* row = w + r * C;
        for (std::size_t c = 0; c < C; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// dx += W^T dy
inline void matvec_t_acc(const Tensor& W, std::span<const double> dy, std::span<double> dx) {
    const std::size_t R = W.rows(), C = W.cols();
    const double* w = W.v.data();
    for (std::size_t r = 0; r < R; ++r) {
        const double g = dy[r];
        if (g == 0.0) continue;
        const double* row = w + r * C;
        for (std::size_t c = 0; c < C; ++c) dx[c] += row[c] * g;
    }
}

// dW += dy x^T
inline void outer_acc(Tensor& dW, std::span<const double> dy, std::span<const double> x) {
    const std::size_t R = dW.rows(), C = dW.cols();
    double* w = dW.v.data();
    for (std::size_t r = 0; r < R; ++r) {
        const double g = dy[r];
        if (g == 0.0) continue;
        double* row = w + r * C;
        for (std::size_t c = 0; c < C; ++c) row[c] += g * x[c];
    }
}

inline void vec_acc(Tensor& db, std::span<const double> dy) {
    for (std::size_t i = 0; i < db.size(); ++i) db.v[i] += dy[i];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void softmax_inplace(std::span<double> v) {
    double mx = v[0];
    for (double x : v) mx = std::max(mx, x);
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

// Scales all gradients so their global L2 norm does not exceed max_norm.
inline double clip_global_norm(std::span<Tensor* const> grads, double max_norm) {
    if (max_norm <= 0.0) return 1.0;
    double sq = 0.0;
    for (const Tensor* g : grads)
        for (double x : g->v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return 1.0;
    const double scale = max_norm / norm;
    for (Tensor* g : grads)
        for (double& x : g->v) x *= scale;
    return scale;
}

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

class Adam {
public:
    Adam(double lr, std::span<Tensor* const> params) : lr_(lr) {
        for (const Tensor* p : params) {
            m_.emplace_back(p->size(), 0.0);
            v_.emplace_back(p->size(), 0.0);
        }
    }

    void step(std::span<Tensor* const> params, std::span<Tensor* const> grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(kAdamBeta1, t_);
        const double bc2 = 1.0 - std::pow(kAdamBeta2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& m = m_[i];
            auto& v = v_[i];
            auto& p = params[i]->v;
            const auto& g = grads[i]->v;
            for (std::size_t k = 0; k < p.size(); ++k) {
                m[k] = kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * g[k];
                v[k] = kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * g[k] * g[k];
                const double mhat = m[k] / bc1;
                const double vhat = v[k] / bc2;
                p[k] -= lr_ * mhat / (std::sqrt(vhat) + kAdamEps);
            }
        }
    }

private:
    double lr_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// ---- parameter file format ----
// magic "NVF1", u32 version, u32 tensor count, then per tensor:
// u32 name length, name bytes, u32 rank, u32 dims[rank], f64 payload.

inline constexpr char kParamMagic[4] = {'N', 'V', 'F', '1'};
inline constexpr std::uint32_t kParamVersion = 1;

inline std::size_t param_file_size(std::span<const Tensor* const> tensors) {
    std::size_t n = 4 + 4 + 4;
    for (const Tensor* t : tensors) {
        n += 4 + t->name.size() + 4 + 4 * t->dims.size();
        n += 8 * t->size();
    }
    return n;
}

inline void save_tensors(const std::string& path, std::span<const Tensor* const> tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write parameter file: " + path);
    auto put_u32 = [&](std::uint32_t x) { out.write(reinterpret_cast<const char*>(&x), 4); };
    out.write(kParamMagic, 4);
    put_u32(kParamVersion);
    put_u32(static_cast<std::uint32_t>(tensors.size()));
    for (const Tensor* t : tensors) {
        put_u32(static_cast<std::uint32_t>(t->name.size()));
        out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
        put_u32(static_cast<std::uint32_t>(t->dims.size()));
        for (std::uint32_t d : t->dims) put_u32(d);
        out.write(reinterpret_cast<const char*>(t->v.data()),
                  static_cast<std::streamsize>(8 * t->size()));
    }
    if (!out) throw Error("short write to parameter file: " + path);
}

inline std::vector<Tensor> load_tensors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read parameter file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kParamMagic, 4) != 0)
        throw Error(path + ": bad magic; not a NVF1 parameter file (version check failed)");
    auto get_u32 = [&]() {
        std::uint32_t x = 0;
        in.read(reinterpret_cast<char*>(&x), 4);
        return x;
    };
    const std::uint32_t version = get_u32();
    if (version != kParamVersion)
        throw Error(path + ": unsupported parameter file version " + std::to_string(version));
    const std::uint32_t count = get_u32();
    std::vector<Tensor> tensors;
    tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Tensor t;
        const std::uint32_t name_len = get_u32();
        t.name.resize(name_len);
        in.read(t.name.data(), name_len);
        const std::uint32_t rank = get_u32();
        t.dims.resize(rank);
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            t.dims[d] = get_u32();
            n *= t.dims[d];
        }
        t.v.resize(n);
        in.read(reinterpret_cast<char*>(t.v.data()), static_cast<std::streamsize>(8 * n));
        if (!in) throw Error(path + ": truncated tensor payload for '" + t.name + "'");
        tensors.push_back(std::move(t));
    }
    return tensors;
}

// Copies loaded values into a destination tensor, checking name and shape.
inline void assign_tensor(Tensor& dst, const std::vector<Tensor>& loaded,
                          const std::string& path) {
    for (const Tensor& t : loaded) {
        if (t.name != dst.name) continue;
        if (t.dims != dst.dims) {
            std::string want, got;
            for (auto d : dst.dims) want += std::to_string(d) + " ";
            for (auto d : t.dims) got += std::to_string(d) + " ";
            throw Error(path + ": shape mismatch for tensor '" + dst.name + "': expected [" +
                        want + "], file has [" + got + "]");
        }
        dst.v = t.v;
        return;
    }
    throw Error(path + ": missing tensor '" + dst.name + "'");
}

}  // namespace navfuse
