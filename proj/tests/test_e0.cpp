#include <doctest.h>

#include <unordered_set>

#include "e0a/e0.hpp"
#include "test_support.hpp"

using namespace e0a::gf2;
using namespace e0a::e0;
using e0a::SplitMix64;

namespace {

BoolPoly P(const std::string& s) { return parse_poly(s); }

// the combiner feedbacks written out monomial by monomial
const char* kG0 =
    "x1*c1 + y7*c1 + z1*c1 + u7*c1 + x1*y7 + x1*z1 + x1*u7 + y7*z1 + y7*u7 + z1*u7"
    " + c1 + d1 + c0 + d0";
const char* kG1 =
    "x1*y7*z1*u7 + x1*y7*d1 + x1*z1*d1 + x1*u7*d1 + y7*z1*d1 + y7*u7*d1 + z1*u7*d1"
    " + x1*c1*d1 + y7*c1*d1 + z1*c1*d1 + u7*c1*d1 + x1*y7*z1*c1 + x1*y7*u7*c1"
    " + x1*z1*u7*c1 + y7*z1*u7*c1 + d1 + c0";

// 132-bit GF(2) matrix acting on packed register state, for exact period
// certificates of a single register
struct GF2Matrix {
    int n;
    std::vector<uint64_t> rows;  // row i: bit j = entry (i, j)

    static GF2Matrix identity(int n) {
        GF2Matrix m{n, std::vector<uint64_t>(n, 0)};
        for (int i = 0; i < n; ++i) m.rows[i] = uint64_t{1} << i;
        return m;
    }
    GF2Matrix mul(const GF2Matrix& o) const {
        GF2Matrix out{n, std::vector<uint64_t>(n, 0)};
        for (int i = 0; i < n; ++i) {
            uint64_t acc = 0, r = rows[i];
            while (r) {
                int j = __builtin_ctzll(r);
                r &= r - 1;
                acc ^= o.rows[j];
            }
            out.rows[i] = acc;
        }
        return out;
    }
    GF2Matrix pow(uint64_t e) const {
        GF2Matrix result = identity(n);
        GF2Matrix base = *this;
        while (e) {
            if (e & 1) result = result.mul(base);
            base = base.mul(base);
            e >>= 1;
        }
        return result;
    }
    bool is_identity() const {
        for (int i = 0; i < n; ++i) {
            if (rows[i] != (uint64_t{1} << i)) return false;
        }
        return true;
    }
    int rank() const {
        std::vector<uint64_t> r = rows;
        int rk = 0;
        for (int col = 0; col < n; ++col) {
            int pivot = -1;
            for (int i = rk; i < n; ++i) {
                if ((r[i] >> col) & 1) {
                    pivot = i;
                    break;
                }
            }
            if (pivot < 0) continue;
            std::swap(r[rk], r[pivot]);
            for (int i = 0; i < n; ++i) {
                if (i != rk && ((r[i] >> col) & 1)) r[i] ^= r[rk];
            }
            ++rk;
        }
        return rk;
    }
};

GF2Matrix companion(int n, std::initializer_list<int> taps) {
    GF2Matrix m{n, std::vector<uint64_t>(n, 0)};
    for (int i = 0; i + 1 < n; ++i) m.rows[i] = uint64_t{1} << (i + 1);
    for (int t : taps) m.rows[n - 1] |= uint64_t{1} << t;
    return m;
}

// every nonzero state of the register has period exactly 2^n - 1:
// C^(2^n-1) = I and C^((2^n-1)/q) fixes no nonzero vector for prime q
void check_full_period(int n, std::initializer_list<int> taps,
                       std::initializer_list<uint64_t> prime_divisors) {
    GF2Matrix c = companion(n, taps);
    uint64_t order = (uint64_t{1} << n) - 1;
    CHECK(c.pow(order).is_identity());
    for (uint64_t q : prime_divisors) {
        GF2Matrix m = c.pow(order / q);
        CHECK_FALSE(m.is_identity());
        for (int i = 0; i < n; ++i) m.rows[i] ^= uint64_t{1} << i;  // M + I
        CHECK(m.rank() == n);  // no nonzero fixed vector
    }
}

}  // namespace

TEST_CASE("the difference system carries the expected polynomials") {
    const auto& sys = e0_system();
    CHECK(sys.streams[0].feedback == P("x0 + x5 + x13 + x17"));
    CHECK(sys.streams[1].feedback == P("y0 + y7 + y15 + y19"));
    CHECK(sys.streams[2].feedback == P("z0 + z5 + z9 + z29"));
    CHECK(sys.streams[3].feedback == P("u0 + u3 + u11 + u35"));
    CHECK(sys.streams[4].feedback == P(kG0));
    CHECK(sys.streams[5].feedback == P(kG1));
    CHECK(sys.streams[5].feedback.contains(Monomial{var_x(1), var_y(7), var_z(1), var_u(7)}));
    CHECK(*sys.keystream_poly == P("x1 + y7 + z1 + u7 + c1"));

    // no constant term: the all-zero assignment is a root
    Assignment zero;
    for (VarKey k : sys.streams[4].feedback.support()) zero.set_key(k, 0);
    CHECK(evaluate(sys.streams[4].feedback, zero) == 0);
}

TEST_CASE("the inverse system matches the derived listing") {
    const auto& inv = e0_inverse_system();
    CHECK(inv.streams[0].feedback == P("x20 + x12 + x8 + x0"));
    CHECK(inv.streams[1].feedback == P("y24 + y16 + y12 + y0"));
    CHECK(inv.streams[2].feedback == P("z28 + z24 + z4 + z0"));
    CHECK(inv.streams[3].feedback == P("u36 + u28 + u4 + u0"));
    CHECK(inv.streams[4].feedback.contains(Monomial{var_x(24), var_y(24), var_z(32), var_u(32)}));

    // the inversion machinery reproduces it as a polynomial identity
    auto computed = e0a::dsys::invert(e0_system());
    REQUIRE(computed.has_value());
    REQUIRE(computed->streams.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(computed->streams[i].id == inv.streams[i].id);
        CHECK(computed->streams[i].order == inv.streams[i].order);
        CHECK(computed->streams[i].feedback == inv.streams[i].feedback);
    }
}

TEST_CASE("oracle basics") {
    CipherState zero;
    auto [next, bit] = oracle_step(zero);
    CHECK(next == zero);
    CHECK(bit == 0);

    // zero key: all-zero keystream on both routes
    for (Route r : {Route::Oracle, Route::Algebraic}) {
        Keystream ks = keystream(zero, 64, r);
        for (uint8_t b : ks.bits) CHECK(b == 0);
    }

    // a state with only c(t+1) set: first keystream bit is 1
    CipherState s;
    s.fsm = 0b0010;
    CHECK(oracle_step(s).second == 1);
}

TEST_CASE("integer carry identity") {
    // binary digits of F + C agree with the algebraic carry expressions for
    // every F in 0..4 and C in 0..3
    for (int F = 0; F <= 4; ++F) {
        for (int C = 0; C <= 3; ++C) {
            int f0 = F & 1, f1 = (F >> 1) & 1, f2 = (F >> 2) & 1;
            int c = C & 1, d = (C >> 1) & 1;
            int sum = F + C;
            CHECK(((sum >> 0) & 1) == (f0 ^ c));
            CHECK(((sum >> 1) & 1) == ((f0 & c) ^ f1 ^ d));
            CHECK(((sum >> 2) & 1) == (f2 ^ (f1 & d) ^ (f0 & c & d) ^ (f1 & f0 & c)));
        }
    }
}

TEST_CASE("bitwise and algebraic implementations agree") {
    SplitMix64 rng(0xE0);
    const auto& sys = e0_system();
    for (int key = 0; key < 1000; ++key) {
        CipherState s = testsup::random_state(rng);
        Keystream a = keystream(s, 200, Route::Oracle);
        Keystream b = keystream(s, 200, Route::Algebraic);
        REQUIRE(a.bits == b.bits);
        // state trajectories coincide as well
        e0a::dsys::SystemState v = to_system_state(s);
        CipherState cur = s;
        for (int t = 0; t < 200; ++t) {
            cur = oracle_step(cur).first;
            v = e0a::dsys::step(sys, v);
        }
        REQUIRE(from_system_state(v) == cur);
    }
}

TEST_CASE("stepping composed with rewinding is the identity") {
    SplitMix64 rng(0xE1);
    for (int i = 0; i < 10000; ++i) {
        CipherState s = testsup::random_state(rng);
        CipherState forward = oracle_step(s).first;
        CHECK(rewind(forward, 1) == s);
    }
}

TEST_CASE("register periods") {
    SUBCASE("exact certificates for the short registers") {
        check_full_period(25, {0, 5, 13, 17}, {31, 601, 1801});  // 2^25-1 = 31*601*1801
        check_full_period(31, {0, 7, 15, 19}, {2147483647ull});  // 2^31-1 is prime
    }
    SUBCASE("direct cycle walk of the 25-bit register") {
        uint32_t w = 1;
        uint64_t steps = 0;
        do {
            uint32_t fb = ((w >> 0) ^ (w >> 5) ^ (w >> 13) ^ (w >> 17)) & 1u;
            w = (w >> 1) | (fb << 24);
            ++steps;
        } while (w != 1);
        CHECK(steps == (1u << 25) - 1);
    }
    SUBCASE("long registers do not repeat within a million clocks") {
        auto no_repeat = [](uint64_t w, int len, std::initializer_list<int> taps) {
            std::unordered_set<uint64_t> seen;
            seen.reserve(2100000);
            for (int i = 0; i < 1000000; ++i) {
                if (!seen.insert(w).second) return false;
                uint64_t fb = 0;
                for (int t : taps) fb ^= (w >> t) & 1u;
                w = (w >> 1) | (fb << (len - 1));
            }
            return true;
        };
        CHECK(no_repeat(1, 33, {0, 5, 9, 29}));
        CHECK(no_repeat(1, 39, {0, 3, 11, 35}));
    }
}

TEST_CASE("state hex serialization") {
    SplitMix64 rng(0xE2);
    for (int i = 0; i < 200; ++i) {
        CipherState s = testsup::random_state(rng);
        CHECK(from_hex(to_hex(s)) == s);
    }
    CipherState zero;
    CHECK(to_hex(zero) == std::string(33, '0'));
    // x(0) = 1 lands in the low bit of the first digit
    CipherState s;
    s.x = 1;
    std::string h = to_hex(s);
    CHECK(h[0] == '1');
    CHECK(h.substr(1) == std::string(32, '0'));
    CHECK_THROWS_AS(from_hex("abc"), e0a::ParseError);
    CHECK_THROWS_AS(from_hex(std::string(33, 'g')), e0a::ParseError);
}

TEST_CASE("packed keystream files") {
    SplitMix64 rng(0xE3);
    Keystream ks;
    ks.start_clock = 200;
    for (int i = 0; i < 77; ++i) ks.bits.push_back(static_cast<uint8_t>(rng.bit()));
    auto bytes = pack_keystream(ks);
    CHECK(bytes[0] == 0xE0);
    CHECK(bytes[1] == 0x4B);
    CHECK(bytes.size() == 8 + (77 + 7) / 8);
    Keystream back = unpack_keystream(bytes);
    CHECK(back.start_clock == 200);
    CHECK(back.bits == ks.bits);
    CHECK_THROWS_AS(unpack_keystream({0, 1, 2}), e0a::ParseError);
}

TEST_CASE("mirrored-convention adapter") {
    SplitMix64 rng(0xE4);
    for (int i = 0; i < 100; ++i) {
        CipherState s = testsup::random_state(rng);
        // window reversal plus the FSM word swap is an involution
        CHECK(bluetooth_convention_adapter(bluetooth_convention_adapter(s)) == s);
    }
    CipherState s;
    s.x = 1;          // x(0) in this layout
    s.fsm = 0b0010;   // incoming word (c0, d0, c1, d1) with d0 set
    CipherState t = bluetooth_convention_adapter(s);
    CHECK(t.x == (1u << 24));
    CHECK(t.fsm == 0b0100);  // local layout stores d(0) in bit 2
}
