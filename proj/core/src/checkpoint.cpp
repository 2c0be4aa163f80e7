#include "rp/checkpoint.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <utility>
#include <vector>

#include "rp/errors.hpp"

namespace rp {

namespace {

constexpr std::uint32_t kMagic = 0x52504E54; // "RPNT"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& buf, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(buf, bits);
}

class Reader {
public:
    Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open checkpoint '" + path + "'");
    }
    std::uint32_t u32() {
        unsigned char b[4];
        read(b, 4);
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
               (std::uint32_t(b[3]) << 24);
    }
    std::uint64_t u64() {
        unsigned char b[8];
        read(b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    void f64_block(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f64();
    }

private:
    void read(void* buf, std::size_t n) {
        in_.read(static_cast<char*>(buf), std::streamsize(n));
        if (std::size_t(in_.gcount()) != n) throw IoError("truncated checkpoint '" + path_ + "'");
    }
    std::string path_;
    std::ifstream in_;
};

void put_block(std::string& buf, const double* data, std::uint64_t rows, std::uint64_t cols) {
    put_u64(buf, rows);
    put_u64(buf, cols);
    for (std::uint64_t k = 0; k < rows * cols; ++k) put_f64(buf, data[k]);
}

} // namespace

void save_checkpoint(const std::string& path, const ActorCriticNet& net) {
    std::string buf;
    buf.reserve(64 + 8 * (net.w_trunk.data.size() + net.b_trunk.size() +
                          net.w_policy.data.size() + net.b_policy.size() + net.w_value.size() + 1));
    put_u32(buf, kMagic);
    put_u32(buf, kVersion);
    put_u64(buf, net.init_seed);
    put_f64(buf, net.cfg.leaky_slope);
    put_u32(buf, net.cfg.linear_value_output ? 1u : 0u);
    put_u32(buf, 6);
    put_block(buf, net.w_trunk.data.data(), net.w_trunk.rows, net.w_trunk.cols);
    put_block(buf, net.b_trunk.data(), net.b_trunk.size(), 1);
    put_block(buf, net.w_policy.data.data(), net.w_policy.rows, net.w_policy.cols);
    put_block(buf, net.b_policy.data(), net.b_policy.size(), 1);
    put_block(buf, net.w_value.data(), net.w_value.size(), 1);
    const double bv = net.b_value;
    put_block(buf, &bv, 1, 1);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw IoError("short write on checkpoint '" + path + "'");
}

ActorCriticNet load_checkpoint(const std::string& path) {
    Reader r(path);
    if (r.u32() != kMagic) throw IoError("bad checkpoint magic in '" + path + "'");
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw IoError("unsupported checkpoint version " + std::to_string(version) + " in '" +
                      path + "'");
    }
    ActorCriticNet net;
    net.init_seed = r.u64();
    net.cfg.leaky_slope = r.f64();
    const std::uint32_t flags = r.u32();
    net.cfg.linear_value_output = (flags & 1u) != 0;
    if (r.u32() != 6) throw IoError("unexpected block count in '" + path + "'");

    auto dims = [&r]() {
        const std::uint64_t rows = r.u64();
        const std::uint64_t cols = r.u64();
        return std::pair<std::uint64_t, std::uint64_t>(rows, cols);
    };

    auto [tr, tc] = dims();
    net.w_trunk = Matrix(tr, tc);
    r.f64_block(net.w_trunk.data.data(), tr * tc);
    auto [btr, btc] = dims();
    if (btr != tr || btc != 1) throw IoError("trunk bias shape mismatch in '" + path + "'");
    net.b_trunk.resize(btr);
    r.f64_block(net.b_trunk.data(), btr);

    auto [pr, pc] = dims();
    if (pc != tr) throw IoError("policy head shape mismatch in '" + path + "'");
    net.w_policy = Matrix(pr, pc);
    r.f64_block(net.w_policy.data.data(), pr * pc);
    auto [bpr, bpc] = dims();
    if (bpr != pr || bpc != 1) throw IoError("policy bias shape mismatch in '" + path + "'");
    net.b_policy.resize(bpr);
    r.f64_block(net.b_policy.data(), bpr);

    auto [vr, vc] = dims();
    if (vr != tr || vc != 1) throw IoError("value head shape mismatch in '" + path + "'");
    net.w_value.resize(vr);
    r.f64_block(net.w_value.data(), vr);
    auto [bvr, bvc] = dims();
    if (bvr != 1 || bvc != 1) throw IoError("value bias shape mismatch in '" + path + "'");
    net.b_value = r.f64();

    net.cfg.input_dim = tc;
    net.cfg.trunk_dim = tr;
    net.num_actions = pr;
    if (!all_finite(net.w_trunk) || !all_finite(net.b_trunk) || !all_finite(net.w_policy) ||
        !all_finite(net.b_policy) || !all_finite(net.w_value) || !std::isfinite(net.b_value)) {
        throw IoError("non-finite parameters in checkpoint '" + path + "'");
    }
    return net;
}

} // namespace rp
