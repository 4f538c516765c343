#ifndef E0A_GF2_POLY_HPP
#define E0A_GF2_POLY_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "e0a/errors.hpp"

// Sparse ANF arithmetic over GF(2) in the quotient ring modulo the field
// equations v^2 = v.  Monomials are squarefree var sets, polynomials are
// XOR-sets of monomials; both are kept in a canonical sorted form so that
// equality is plain vector equality and hashing is stable across runs.

namespace e0a::gf2 {

// ---------------------------------------------------------------------------
// Variables

enum class Stream : uint8_t { X = 0, Y = 1, Z = 2, U = 3, C = 4, D = 5 };

constexpr char kStreamChar[6] = {'x', 'y', 'z', 'u', 'c', 'd'};

// A variable is one cell of the clocked family x/y/z/u/c/d(t).  Its 16-bit
// key realizes the global precedence
//   x(0) < y(0) < z(0) < u(0) < x(1) < ... < c(0) < c(1) < ... < d(0) < ...
// so ordinary integer comparison of keys is the variable order.
using VarKey = uint16_t;

constexpr VarKey kCBase = 0x8000;
constexpr VarKey kDBase = 0xA000;
constexpr VarKey kPrimeBase = 0xC000;  // shadow copies for elimination rings
constexpr uint32_t kMaxLfsrClock = 8190;
constexpr uint32_t kMaxFsmClock = 8191;
constexpr uint32_t kMaxPrimeClock = 1023;

struct Var {
    Stream stream;
    uint16_t clock;

    constexpr Var(Stream s, uint32_t t) : stream(s), clock(static_cast<uint16_t>(t)) {}

    constexpr VarKey key() const {
        switch (stream) {
            case Stream::C: return static_cast<VarKey>(kCBase + clock);
            case Stream::D: return static_cast<VarKey>(kDBase + clock);
            default: return static_cast<VarKey>(clock * 4u + static_cast<uint32_t>(stream));
        }
    }

    static Var from_key(VarKey k);

    friend bool operator==(const Var& a, const Var& b) { return a.key() == b.key(); }
    friend bool operator<(const Var& a, const Var& b) { return a.key() < b.key(); }

    std::string str() const;
};

inline Var var_x(uint32_t t) { return Var(Stream::X, t); }
inline Var var_y(uint32_t t) { return Var(Stream::Y, t); }
inline Var var_z(uint32_t t) { return Var(Stream::Z, t); }
inline Var var_u(uint32_t t) { return Var(Stream::U, t); }
inline Var var_c(uint32_t t) { return Var(Stream::C, t); }
inline Var var_d(uint32_t t) { return Var(Stream::D, t); }

// Shadow ("primed") keys live above every ordinary key; they never appear in
// public polynomials, only inside the doubled ring of the inversion test.
inline VarKey prime_key(Stream s, uint32_t clock) {
    return static_cast<VarKey>(kPrimeBase + static_cast<uint32_t>(s) * 1024u + clock);
}
inline bool is_prime_key(VarKey k) { return k >= kPrimeBase; }
inline Stream prime_stream(VarKey k) { return static_cast<Stream>((k - kPrimeBase) / 1024u); }
inline uint32_t prime_clock(VarKey k) { return (k - kPrimeBase) % 1024u; }

std::string key_str(VarKey k);

// ---------------------------------------------------------------------------
// Monomials

// Squarefree monomial: ascending sorted set of variable keys.  The empty
// monomial is 1.  Canonical comparison is DegRevLex under the global variable
// order, which for squarefree monomials is (degree, then ascending
// lexicographic on the sorted key vector).
class Monomial {
public:
    using Keys = boost::container::small_vector<VarKey, 6>;

    Monomial() = default;
    explicit Monomial(Keys keys) : keys_(std::move(keys)) {}
    Monomial(std::initializer_list<Var> vars);

    static Monomial one() { return Monomial(); }
    static Monomial from_var(Var v) { return Monomial(Keys{v.key()}); }
    static Monomial from_keys_unsorted(Keys keys);

    bool is_one() const { return keys_.empty(); }
    int degree() const { return static_cast<int>(keys_.size()); }
    const Keys& keys() const { return keys_; }

    bool contains(VarKey k) const;
    // divisibility in the squarefree monoid is set inclusion
    bool divides(const Monomial& other) const;
    // boolean product: set union (the field equations collapse squares)
    Monomial mul(const Monomial& other) const;
    // this / d, requires d.divides(*this)
    Monomial quotient(const Monomial& d) const;
    bool disjoint(const Monomial& other) const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.keys_ == b.keys_; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

    std::string str() const;

private:
    Keys keys_;
};

// canonical global DegRevLex: <0 means a < b
int canonical_cmp(const Monomial& a, const Monomial& b);

struct MonomialHash {
    size_t operator()(const Monomial& m) const;
};

// ---------------------------------------------------------------------------
// Assignments

// Partial assignment Var -> GF(2).
class Assignment {
public:
    Assignment() = default;

    void set(Var v, int value) { map_[v.key()] = static_cast<uint8_t>(value & 1); }
    void set_key(VarKey k, int value) { map_[k] = static_cast<uint8_t>(value & 1); }
    bool has(VarKey k) const { return map_.count(k) != 0; }
    int get(VarKey k) const;  // throws UnassignedVariable
    int get_or(VarKey k, int fallback) const;
    size_t size() const { return map_.size(); }
    const std::unordered_map<VarKey, uint8_t>& raw() const { return map_; }

    // deterministic (key-sorted) view, for printing and hashing
    std::vector<std::pair<VarKey, uint8_t>> sorted() const;

private:
    std::unordered_map<VarKey, uint8_t> map_;
};

// ---------------------------------------------------------------------------
// Polynomials

// XOR-set of squarefree monomials, stored descending in the canonical order;
// the zero polynomial is the empty set.  Values are immutable in spirit: all
// operations return fresh polynomials.
class BoolPoly {
public:
    using Monomials = std::vector<Monomial>;

    BoolPoly() = default;

    static BoolPoly zero() { return BoolPoly(); }
    static BoolPoly one() { return BoolPoly(Monomials{Monomial::one()}, Canonical{}); }
    static BoolPoly constant(int bit) { return (bit & 1) ? one() : zero(); }
    static BoolPoly from_var(Var v) { return from_monomial(Monomial::from_var(v)); }
    static BoolPoly from_monomial(Monomial m) {
        return BoolPoly(Monomials{std::move(m)}, Canonical{});
    }
    // normalizes: sorts and cancels duplicate pairs
    static BoolPoly from_monomials(Monomials ms);
    // trusted: input already canonical (descending, duplicate-free)
    struct Canonical {};
    BoolPoly(Monomials ms, Canonical) : monomials_(std::move(ms)) {}

    bool is_zero() const { return monomials_.empty(); }
    bool is_one() const { return monomials_.size() == 1 && monomials_[0].is_one(); }
    bool is_constant() const { return is_zero() || is_one(); }
    int degree() const;  // degree of 0 is -1 by convention here
    size_t term_count() const { return monomials_.size(); }
    const Monomials& monomials() const { return monomials_; }
    // leading monomial under the canonical order
    const Monomial& leading() const { return monomials_.front(); }
    bool contains(const Monomial& m) const;

    // all variable keys occurring, ascending
    std::vector<VarKey> support() const;

    friend bool operator==(const BoolPoly& a, const BoolPoly& b) {
        return a.monomials_ == b.monomials_;
    }
    friend bool operator!=(const BoolPoly& a, const BoolPoly& b) { return !(a == b); }

    std::string str() const;

private:
    Monomials monomials_;
};

// ring operations
BoolPoly add(const BoolPoly& p, const BoolPoly& q);
BoolPoly mul(const BoolPoly& p, const BoolPoly& q);
BoolPoly mul(const BoolPoly& p, const Monomial& m);

inline BoolPoly operator+(const BoolPoly& p, const BoolPoly& q) { return add(p, q); }
inline BoolPoly operator*(const BoolPoly& p, const BoolPoly& q) { return mul(p, q); }

// evaluation; every variable of p must be assigned
int evaluate(const BoolPoly& p, const Assignment& a);

// partial evaluation: assigned variables are folded away, the rest remain
BoolPoly restrict_poly(const BoolPoly& p, const Assignment& a);

// replace every occurrence of var by r
BoolPoly substitute(const BoolPoly& p, Var var, const BoolPoly& r);
BoolPoly substitute_key(const BoolPoly& p, VarKey key, const BoolPoly& r);

// clock shift x_i(t) -> x_i(t+k), the sigma endomorphism applied k times
BoolPoly shift(const BoolPoly& p, uint32_t k);

// ---------------------------------------------------------------------------
// Monomial orders

// DegRevLex over an explicit finite variable universe, or a product (block)
// order whose blocks are compared left to right, each by DegRevLex.  A block
// order with leading block X realizes the elimination order X > X'.
class MonomialOrder {
public:
    enum class Kind { DegRevLex, Product };

    static MonomialOrder degrevlex(std::vector<Var> universe);
    static MonomialOrder degrevlex_keys(std::vector<VarKey> universe);
    // blocks listed by decreasing precedence; each ascending-sorted
    static MonomialOrder product_keys(std::vector<std::vector<VarKey>> blocks);
    // lex with the LAST universe variable highest (i.e. universe ascending by
    // precedence, like DegRevLex's convention here)
    static MonomialOrder lex_keys(std::vector<VarKey> universe);

    Kind kind() const { return kind_; }
    const std::vector<VarKey>& universe_keys() const { return universe_; }
    size_t block_count() const { return block_count_; }

    bool in_universe(VarKey k) const;
    // <0: a < b, 0: equal, >0: a > b
    int compare(const Monomial& a, const Monomial& b) const;
    bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

    // true when comparisons coincide with the canonical global order (single
    // DegRevLex block over a key-sorted universe) -- the fast path
    bool is_canonical_compatible() const { return canonical_compatible_; }

private:
    Kind kind_ = Kind::DegRevLex;
    std::vector<VarKey> universe_;          // concatenated blocks
    std::vector<uint16_t> block_of_;        // indexed by key
    std::vector<int32_t> rank_of_;          // indexed by key, -1 if absent
    size_t block_count_ = 1;
    bool canonical_compatible_ = false;

    void build_tables(const std::vector<std::vector<VarKey>>& blocks);
};

// ---------------------------------------------------------------------------
// Normal form

// Remainder of p on division by basis under the given order.  Deterministic:
// among applicable reducers the one with the fewest terms (then lowest index)
// is used.  Confluent when basis leading monomials are distinct or basis is a
// Groebner basis.
BoolPoly normal_form(const BoolPoly& p, const std::vector<BoolPoly>& basis,
                     const MonomialOrder& order);

// ---------------------------------------------------------------------------
// ANF <-> truth table

// table has 2^n entries, entry i is the value at the point whose bit j is the
// value of vars[j].  Returns the unique ANF (Moebius transform).
BoolPoly anf_from_truth_table(const std::vector<uint8_t>& table, const std::vector<Var>& vars);
std::vector<uint8_t> truth_table(const BoolPoly& p, const std::vector<Var>& vars);

// ---------------------------------------------------------------------------
// Text format:  x1*y7 + c0 + 1

std::string to_string(const BoolPoly& p);
BoolPoly parse_poly(const std::string& text);
Var parse_var(const std::string& text);

std::ostream& operator<<(std::ostream& os, const BoolPoly& p);

}  // namespace e0a::gf2

#endif
