#include "e0a/e0.hpp"

#include <array>
#include <cassert>

namespace e0a::e0 {

using gf2::BoolPoly;
using gf2::Stream;
using gf2::Var;
using gf2::var_c;
using gf2::var_d;
using gf2::var_u;
using gf2::var_x;
using gf2::var_y;
using gf2::var_z;

namespace {

constexpr std::array<int, 4> kTapsX{0, 5, 13, 17};
constexpr std::array<int, 4> kTapsY{0, 7, 15, 19};
constexpr std::array<int, 4> kTapsZ{0, 5, 9, 29};
constexpr std::array<int, 4> kTapsU{0, 3, 11, 35};

template <typename W>
W lfsr_step(W w, int len, const std::array<int, 4>& taps) {
    W fb = 0;
    for (int t : taps) fb ^= (w >> t) & 1u;
    return static_cast<W>((w >> 1) | (fb << (len - 1)));
}

}  // namespace

std::pair<CipherState, int> oracle_step(const CipherState& s) {
    int x1 = (s.x >> 1) & 1;
    int y7 = (s.y >> 7) & 1;
    int z1 = static_cast<int>((s.z >> 1) & 1);
    int u7 = static_cast<int>((s.u >> 7) & 1);
    int c0 = s.fsm & 1;
    int c1 = (s.fsm >> 1) & 1;
    int d0 = (s.fsm >> 2) & 1;
    int d1 = (s.fsm >> 3) & 1;

    int bit = x1 ^ y7 ^ z1 ^ u7 ^ c1;

    // F(t+1) is the integer sum of the four designated taps; the next FSM
    // word comes from the carry of (F + C) / 2 plus the delay-line mix
    int f_sum = x1 + y7 + z1 + u7;
    int g = (f_sum + 2 * d1 + c1) >> 1;
    int d2 = ((g >> 1) & 1) ^ d1 ^ c0;
    int c2 = (g & 1) ^ c1 ^ d0 ^ c0;

    CipherState n;
    n.x = lfsr_step(s.x, kLenX, kTapsX);
    n.y = lfsr_step(s.y, kLenY, kTapsY);
    n.z = lfsr_step(s.z, kLenZ, kTapsZ);
    n.u = lfsr_step(s.u, kLenU, kTapsU);
    n.fsm = static_cast<uint8_t>(c1 | (c2 << 1) | (d1 << 2) | (d2 << 3));
    return {n, bit};
}

CipherState advance(const CipherState& s, uint64_t t) {
    CipherState cur = s;
    for (uint64_t i = 0; i < t; ++i) cur = oracle_step(cur).first;
    return cur;
}

Keystream keystream(const CipherState& s, size_t n, Route route) {
    Keystream ks;
    ks.bits.reserve(n);
    if (route == Route::Oracle) {
        CipherState cur = s;
        for (size_t i = 0; i < n; ++i) {
            auto [next, bit] = oracle_step(cur);
            ks.bits.push_back(static_cast<uint8_t>(bit));
            cur = next;
        }
    } else {
        const dsys::DiffSystem& sys = e0_system();
        dsys::SystemState v = to_system_state(s);
        for (size_t i = 0; i < n; ++i) {
            ks.bits.push_back(
                static_cast<uint8_t>(dsys::evaluate_state(sys, v, *sys.keystream_poly)));
            v = dsys::step(sys, v);
        }
    }
    return ks;
}

// ---------------------------------------------------------------------------
// the difference system

namespace {

dsys::DiffSystem build_e0_system() {
    BoolPoly X = BoolPoly::from_var(var_x(1));
    BoolPoly Y = BoolPoly::from_var(var_y(7));
    BoolPoly Z = BoolPoly::from_var(var_z(1));
    BoolPoly U = BoolPoly::from_var(var_u(7));
    BoolPoly C0 = BoolPoly::from_var(var_c(0));
    BoolPoly C1 = BoolPoly::from_var(var_c(1));
    BoolPoly D0 = BoolPoly::from_var(var_d(0));
    BoolPoly D1 = BoolPoly::from_var(var_d(1));

    // ANF of the binary digits of the integer sum x + y + z + u
    BoolPoly f0 = X + Y + Z + U;
    BoolPoly f1 = X * Y + X * Z + X * U + Y * Z + Y * U + Z * U;
    BoolPoly f2 = X * Y * Z * U;

    // carry arithmetic of (F + C)/2 composed with the delay-line mix
    BoolPoly g0 = f0 * C1 + f1 + D1 + C1 + D0 + C0;
    BoolPoly g1 = f2 + f1 * D1 + f0 * C1 * D1 + f1 * f0 * C1 + D1 + C0;

    auto linear = [](Stream s, std::initializer_list<int> taps) {
        BoolPoly p;
        for (int t : taps) p = p + BoolPoly::from_var(Var(s, t));
        return p;
    };

    dsys::DiffSystem sys;
    sys.streams = {
        {Stream::X, 25, linear(Stream::X, {0, 5, 13, 17})},
        {Stream::Y, 31, linear(Stream::Y, {0, 7, 15, 19})},
        {Stream::Z, 33, linear(Stream::Z, {0, 5, 9, 29})},
        {Stream::U, 39, linear(Stream::U, {0, 3, 11, 35})},
        {Stream::C, 2, g0},
        {Stream::D, 2, g1},
    };
    sys.keystream_poly = X + Y + Z + U + C1;
    return sys;
}

dsys::DiffSystem build_e0_inverse_system() {
    dsys::DiffSystem sys;
    auto linear = [](Stream s, std::initializer_list<int> taps) {
        BoolPoly p;
        for (int t : taps) p = p + BoolPoly::from_var(Var(s, t));
        return p;
    };
    BoolPoly h0 = gf2::parse_poly(
        "x24*y24*z32*u32 + x24*y24*z32*c1 + x24*y24*u32*c1 + x24*z32*u32*c1 + y24*z32*u32*c1"
        " + x24*y24*d1 + x24*z32*d1 + y24*z32*d1 + x24*u32*d1 + y24*u32*d1 + z32*u32*d1"
        " + x24*c1*d1 + y24*c1*d1 + z32*c1*d1 + u32*c1*d1 + d1 + d0");
    BoolPoly h1 = gf2::parse_poly(
        "x24*y24*z32*u32 + x24*y24*z32*c1 + x24*y24*u32*c1 + x24*z32*u32*c1 + y24*z32*u32*c1"
        " + x24*y24*d1 + x24*z32*d1 + y24*z32*d1 + x24*u32*d1 + y24*u32*d1 + z32*u32*d1"
        " + x24*c1*d1 + y24*c1*d1 + z32*c1*d1 + u32*c1*d1 + x24*y24 + x24*z32 + y24*z32"
        " + x24*u32 + y24*u32 + z32*u32 + x24*c1 + y24*c1 + z32*c1 + u32*c1 + c1 + c0 + d0");
    sys.streams = {
        {Stream::X, 25, linear(Stream::X, {20, 12, 8, 0})},
        {Stream::Y, 31, linear(Stream::Y, {24, 16, 12, 0})},
        {Stream::Z, 33, linear(Stream::Z, {28, 24, 4, 0})},
        {Stream::U, 39, linear(Stream::U, {36, 28, 4, 0})},
        {Stream::C, 2, h0},
        {Stream::D, 2, h1},
    };
    return sys;
}

}  // namespace

const dsys::DiffSystem& e0_system() {
    static const dsys::DiffSystem sys = build_e0_system();
    return sys;
}

const dsys::DiffSystem& e0_inverse_system() {
    static const dsys::DiffSystem sys = build_e0_inverse_system();
    return sys;
}

// ---------------------------------------------------------------------------
// state layout

std::vector<uint8_t> state_bits(const CipherState& s) {
    std::vector<uint8_t> bits;
    bits.reserve(kStateBits);
    for (int i = 0; i < kLenX; ++i) bits.push_back((s.x >> i) & 1);
    for (int i = 0; i < kLenY; ++i) bits.push_back((s.y >> i) & 1);
    for (int i = 0; i < kLenZ; ++i) bits.push_back(static_cast<uint8_t>((s.z >> i) & 1));
    for (int i = 0; i < kLenU; ++i) bits.push_back(static_cast<uint8_t>((s.u >> i) & 1));
    // FSM windows (c(0), c(1)) then (d(0), d(1))
    bits.push_back(s.fsm & 1);
    bits.push_back((s.fsm >> 1) & 1);
    bits.push_back((s.fsm >> 2) & 1);
    bits.push_back((s.fsm >> 3) & 1);
    return bits;
}

CipherState state_from_bits(const std::vector<uint8_t>& bits) {
    assert(bits.size() == kStateBits);
    CipherState s;
    size_t p = 0;
    for (int i = 0; i < kLenX; ++i) s.x |= uint32_t{bits[p++] & 1u} << i;
    for (int i = 0; i < kLenY; ++i) s.y |= uint32_t{bits[p++] & 1u} << i;
    for (int i = 0; i < kLenZ; ++i) s.z |= uint64_t{bits[p++] & 1u} << i;
    for (int i = 0; i < kLenU; ++i) s.u |= uint64_t{bits[p++] & 1u} << i;
    s.fsm = static_cast<uint8_t>(bits[p] | (bits[p + 1] << 1) | (bits[p + 2] << 2) |
                                 (bits[p + 3] << 3));
    return s;
}

dsys::SystemState to_system_state(const CipherState& s) {
    dsys::SystemState v;
    v.bits = state_bits(s);
    return v;
}

CipherState from_system_state(const dsys::SystemState& v) { return state_from_bits(v.bits); }

CipherState rewind(const CipherState& s, uint64_t t) {
    return from_system_state(
        dsys::reverse_state(e0_system(), e0_inverse_system(), to_system_state(s), t));
}

// ---------------------------------------------------------------------------
// serialization

std::string to_hex(const CipherState& s) {
    std::vector<uint8_t> bits = state_bits(s);
    std::string hex;
    hex.reserve(kStateBits / 4);
    for (int j = 0; j < kStateBits / 4; ++j) {
        int nib = bits[4 * j] | (bits[4 * j + 1] << 1) | (bits[4 * j + 2] << 2) |
                  (bits[4 * j + 3] << 3);
        hex += "0123456789abcdef"[nib];
    }
    return hex;
}

CipherState from_hex(const std::string& hex) {
    if (hex.size() != kStateBits / 4) {
        throw ParseError("state hex must be exactly 33 digits, got " +
                         std::to_string(hex.size()));
    }
    std::vector<uint8_t> bits;
    bits.reserve(kStateBits);
    for (char c : hex) {
        int nib;
        if (c >= '0' && c <= '9') {
            nib = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            nib = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            nib = c - 'A' + 10;
        } else {
            throw ParseError(std::string("bad hex digit '") + c + "' in state");
        }
        for (int b = 0; b < 4; ++b) bits.push_back((nib >> b) & 1);
    }
    return state_from_bits(bits);
}

CipherState bluetooth_convention_adapter(const CipherState& s) {
    auto reverse_bits = [](uint64_t w, int len) {
        uint64_t r = 0;
        for (int i = 0; i < len; ++i) r |= ((w >> i) & 1u) << (len - 1 - i);
        return r;
    };
    CipherState out;
    out.x = static_cast<uint32_t>(reverse_bits(s.x, kLenX));
    out.y = static_cast<uint32_t>(reverse_bits(s.y, kLenY));
    out.z = reverse_bits(s.z, kLenZ);
    out.u = reverse_bits(s.u, kLenU);
    // incoming word order (c(0), d(0), c(1), d(1)) -> local (c0, c1, d0, d1)
    int c0 = s.fsm & 1, dd0 = (s.fsm >> 1) & 1, c1 = (s.fsm >> 2) & 1, dd1 = (s.fsm >> 3) & 1;
    out.fsm = static_cast<uint8_t>(c0 | (c1 << 1) | (dd0 << 2) | (dd1 << 3));
    return out;
}

// ---------------------------------------------------------------------------
// keystream files

std::vector<uint8_t> pack_keystream(const Keystream& ks) {
    std::vector<uint8_t> out;
    out.reserve(8 + (ks.bits.size() + 7) / 8);
    out.push_back(0xE0);
    out.push_back(0x4B);
    out.push_back(static_cast<uint8_t>(ks.start_clock & 0xFF));
    out.push_back(static_cast<uint8_t>((ks.start_clock >> 8) & 0xFF));
    uint32_t n = static_cast<uint32_t>(ks.bits.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((n >> (8 * i)) & 0xFF));
    out.resize(8 + (ks.bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < ks.bits.size(); ++i) {
        if (ks.bits[i] & 1) out[8 + i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    }
    return out;
}

Keystream unpack_keystream(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 8 || bytes[0] != 0xE0 || bytes[1] != 0x4B) {
        throw ParseError("not a packed keystream (bad header)");
    }
    Keystream ks;
    ks.start_clock = bytes[2] | (uint64_t{bytes[3]} << 8);
    uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= uint32_t{bytes[4 + i]} << (8 * i);
    if (bytes.size() < 8 + (n + 7) / 8) throw ParseError("packed keystream truncated");
    ks.bits.resize(n);
    for (uint32_t i = 0; i < n; ++i) ks.bits[i] = (bytes[8 + i / 8] >> (i % 8)) & 1;
    return ks;
}

std::string bits_string(const Keystream& ks) {
    std::string s;
    s.reserve(ks.bits.size());
    for (uint8_t b : ks.bits) s += (b & 1) ? '1' : '0';
    return s;
}

}  // namespace e0a::e0
