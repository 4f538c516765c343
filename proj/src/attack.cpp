#include "e0a/attack.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "e0a/rng.hpp"

namespace e0a::attack {

using gf2::Assignment;
using gf2::BoolPoly;
using gf2::Monomial;
using gf2::MonomialOrder;
using gf2::Stream;
using gf2::Var;
using gf2::VarKey;
using gf2::var_c;
using gf2::var_d;
using gf2::var_u;
using gf2::var_x;
using gf2::var_y;
using gf2::var_z;

AttackConfig::AttackConfig() : guess_vars(default_guess_vars()) {}

std::vector<Var> default_guess_vars() {
    std::vector<Var> v;
    v.reserve(83);
    for (int t = 0; t <= 24; ++t) v.push_back(var_x(t));
    for (int t = 0; t <= 26; ++t) v.push_back(var_y(t));
    v.push_back(var_y(29));
    for (int t = 0; t <= 10; ++t) v.push_back(var_z(t));
    for (int t = 29; t <= 32; ++t) v.push_back(var_z(t));
    for (int t = 0; t <= 9; ++t) v.push_back(var_u(t));
    for (int t = 35; t <= 37; ++t) v.push_back(var_u(t));
    v.push_back(var_c(0));
    v.push_back(var_d(0));
    return v;
}

std::vector<Var> special_guess_vars() {
    std::vector<Var> v;
    for (int t = 1; t <= 3; ++t) v.push_back(var_x(t));
    for (int t = 7; t <= 9; ++t) v.push_back(var_y(t));
    for (int t = 1; t <= 3; ++t) v.push_back(var_z(t));
    for (int t = 7; t <= 9; ++t) v.push_back(var_u(t));
    v.push_back(var_c(0));
    v.push_back(var_d(0));
    return v;
}

// ---------------------------------------------------------------------------
// recurrences and keystream substitution

Recurrences make_recurrences(int count) {
    const dsys::DiffSystem& sys = e0::e0_system();
    Recurrences rec;
    rec.c_recs.reserve(count);
    rec.d_recs.reserve(count);
    BoolPoly cur_c = sys.streams[4].feedback;  // g0'
    BoolPoly cur_d = sys.streams[5].feedback;  // g1'
    for (int t = 0; t < count; ++t) {
        rec.c_recs.push_back(add(BoolPoly::from_var(var_c(t + 2)), cur_c));
        rec.d_recs.push_back(add(BoolPoly::from_var(var_d(t + 2)), cur_d));
        if (t + 1 < count) {
            cur_c = dsys::partial_transition_endo(sys, 4, cur_c);
            cur_d = dsys::partial_transition_endo(sys, 4, cur_d);
        }
    }
    return rec;
}

namespace {

// register-reduced keystream equations T4^t(f) for t = 0..count-1; each is
// c(t+1) plus a linear form over the initial windows
std::vector<BoolPoly> keystream_forms(int count) {
    const dsys::DiffSystem& sys = e0::e0_system();
    std::vector<BoolPoly> forms;
    forms.reserve(count);
    BoolPoly cur = *sys.keystream_poly;
    for (int t = 0; t < count; ++t) {
        forms.push_back(cur);
        if (t + 1 < count) cur = dsys::partial_transition_endo(sys, 4, cur);
    }
    return forms;
}

void check_eliminated(const BoolPoly& g) {
    for (VarKey k : g.support()) {
        Var v = Var::from_key(k);
        switch (v.stream) {
            case Stream::X: assert(v.clock < 25); break;
            case Stream::Y: assert(v.clock < 31); break;
            case Stream::Z: assert(v.clock < 33); break;
            case Stream::U: assert(v.clock < 39); break;
            case Stream::C: assert(v.clock == 0); break;
            case Stream::D: break;
        }
    }
    (void)g;
}

}  // namespace

// ---------------------------------------------------------------------------
// compiled generators

namespace {

CompiledGen compile_generator(const BoolPoly& g, const std::vector<int>& guess_pos) {
    struct Split {
        Monomial free_part;
        std::array<uint64_t, 2> mask;
    };
    std::vector<Split> splits;
    splits.reserve(g.term_count());
    for (const auto& m : g.monomials()) {
        Split s;
        s.mask = {0, 0};
        Monomial::Keys free_keys;
        for (VarKey k : m.keys()) {
            int pos = guess_pos[k];
            if (pos >= 0) {
                s.mask[pos / 64] |= uint64_t{1} << (pos % 64);
            } else {
                free_keys.push_back(k);
            }
        }
        s.free_part = Monomial(std::move(free_keys));
        splits.push_back(std::move(s));
    }
    std::sort(splits.begin(), splits.end(), [](const Split& a, const Split& b) {
        int c = gf2::canonical_cmp(a.free_part, b.free_part);
        if (c != 0) return c > 0;  // descending free parts
        if (a.mask[1] != b.mask[1]) return a.mask[1] < b.mask[1];
        return a.mask[0] < b.mask[0];
    });
    CompiledGen out;
    size_t i = 0;
    while (i < splits.size()) {
        size_t j = i;
        while (j < splits.size() && splits[j].free_part == splits[i].free_part) ++j;
        CompiledGen::Group grp;
        grp.free_part = splits[i].free_part;
        grp.first = static_cast<uint32_t>(out.masks.size());
        grp.count = static_cast<uint32_t>(j - i);
        for (size_t k = i; k < j; ++k) out.masks.push_back(splits[k].mask);
        out.groups.push_back(std::move(grp));
        i = j;
    }
    return out;
}

}  // namespace

BoolPoly CompiledGen::materialize(const std::vector<Var>& guess_vars) const {
    BoolPoly::Monomials ms;
    ms.reserve(masks.size());
    for (const auto& grp : groups) {
        for (uint32_t i = grp.first; i < grp.first + grp.count; ++i) {
            Monomial::Keys keys(grp.free_part.keys().begin(), grp.free_part.keys().end());
            for (size_t pos = 0; pos < guess_vars.size(); ++pos) {
                if (masks[i][pos / 64] & (uint64_t{1} << (pos % 64))) {
                    keys.push_back(guess_vars[pos].key());
                }
            }
            ms.push_back(Monomial::from_keys_unsorted(std::move(keys)));
        }
    }
    return BoolPoly::from_monomials(std::move(ms));
}

const std::vector<BoolPoly>& AttackInstance::generators() const {
    if (plain_.empty() && !compiled.empty()) {
        plain_.reserve(compiled.size());
        for (const auto& cg : compiled) plain_.push_back(cg.materialize(guess_vars));
    }
    return plain_;
}

int AttackInstance::evaluate_generator(size_t i, const Assignment& a) const {
    std::array<uint64_t, 2> ones = {0, 0};
    for (size_t pos = 0; pos < guess_vars.size(); ++pos) {
        if (a.get(guess_vars[pos].key())) ones[pos / 64] |= uint64_t{1} << (pos % 64);
    }
    const CompiledGen& cg = compiled[i];
    int acc = 0;
    for (const auto& grp : cg.groups) {
        int parity = 0;
        for (uint32_t k = grp.first; k < grp.first + grp.count; ++k) {
            const auto& m = cg.masks[k];
            if ((m[0] & ~ones[0]) == 0 && (m[1] & ~ones[1]) == 0) parity ^= 1;
        }
        if (!parity) continue;
        int prod = 1;
        for (VarKey k : grp.free_part.keys()) {
            if (a.get(k) == 0) {
                prod = 0;
                break;
            }
        }
        acc ^= prod;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// the 14-variable polynomial

GParts build_g_parts(int b0, int b1, int b2) {
    Recurrences rec = make_recurrences(2);
    GParts p;
    p.c0 = rec.c_recs[0];
    p.c1 = rec.c_recs[1];
    p.d0 = rec.d_recs[0];
    std::vector<BoolPoly> ks = keystream_forms(3);
    p.b0 = add(ks[0], BoolPoly::constant(b0));
    p.b1 = add(ks[1], BoolPoly::constant(b1));
    p.b2 = add(ks[2], BoolPoly::constant(b2));

    // eliminate c(1), c(2), c(3): the keystream equations head exactly those
    std::vector<VarKey> universe;
    for (const BoolPoly* q : {&p.c0, &p.c1, &p.d0, &p.b0, &p.b1, &p.b2}) {
        auto s = q->support();
        universe.insert(universe.end(), s.begin(), s.end());
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    MonomialOrder order = MonomialOrder::degrevlex_keys(universe);
    std::vector<BoolPoly> bs = {p.b0, p.b1, p.b2};
    p.g1 = gf2::normal_form(p.c0, bs, order);
    p.g2 = gf2::normal_form(p.c1, bs, order);
    p.g3 = gf2::normal_form(p.d0, bs, order);

    // G1 = d(1) + A1,  G2 = d(1) + d(2) + A2,  G3 = A3*d(1) + d(2) + A4
    p.a1 = add(p.g1, BoolPoly::from_var(var_d(1)));
    p.a2 = add(p.g2, add(BoolPoly::from_var(var_d(1)), BoolPoly::from_var(var_d(2))));
    BoolPoly::Monomials a3_ms, a4_ms;
    for (const auto& m : p.g3.monomials()) {
        if (m.contains(var_d(1).key())) {
            a3_ms.push_back(m.quotient(Monomial::from_var(var_d(1))));
        } else if (m == Monomial::from_var(var_d(2))) {
            // the single linear d(2) term
        } else {
            a4_ms.push_back(m);
        }
    }
    p.a3 = BoolPoly::from_monomials(std::move(a3_ms));
    p.a4 = BoolPoly::from_monomials(std::move(a4_ms));

    // consistency of the linear system G1 = G2 = G3 = 0 in d(1), d(2):
    // substituting the forced d(1) = A1 and d(2) = A1 + A2 into G3
    p.g = gf2::substitute(gf2::substitute(p.g3, var_d(1), p.a1), var_d(2), add(p.a1, p.a2));
    p.g_closed_form = add(add(mul(add(p.a1, BoolPoly::one()), p.a3), p.a2), p.a4);
    return p;
}

BoolPoly build_g_polynomial(int b0, int b1, int b2) { return build_g_parts(b0, b1, b2).g; }

// ---------------------------------------------------------------------------
// instance construction

AttackInstance build_instance(const AttackConfig& cfg, const e0::Keystream& ks) {
    const int K = cfg.keystream_bits;
    if (K < 3) throw Error("keystream_bits must be at least 3");
    if (static_cast<int>(ks.bits.size()) < K) {
        throw InsufficientKeystream("need " + std::to_string(K) + " keystream bits, have " +
                                    std::to_string(ks.bits.size()));
    }
    AttackInstance inst;
    inst.keystream_bits = K;
    inst.keystream = ks;
    inst.keystream.start_clock = 0;  // the attack targets the state at keystream onset
    inst.guess_vars = cfg.guess_vars;

    Recurrences rec = make_recurrences(K - 1);
    std::vector<BoolPoly> kforms = keystream_forms(K);

    // c(t+1) := T4^t(f) - c(t+1) + b(t), consumed by substitution
    std::vector<BoolPoly> c_sub(K + 1);
    for (int t = 0; t < K; ++t) {
        c_sub[t + 1] = add(add(kforms[t], BoolPoly::from_var(var_c(t + 1))),
                           BoolPoly::constant(ks.bits[t]));
    }
    auto substitute_cs = [&](BoolPoly g) {
        // highest c first keeps lower substitutions untouched
        std::vector<uint32_t> cs;
        for (VarKey k : g.support()) {
            Var v = Var::from_key(k);
            if (v.stream == Stream::C && v.clock >= 1) cs.push_back(v.clock);
        }
        std::sort(cs.rbegin(), cs.rend());
        for (uint32_t c : cs) {
            assert(c <= static_cast<uint32_t>(K));
            g = gf2::substitute(g, var_c(c), c_sub[c]);
        }
        return g;
    };

    std::vector<int> guess_pos(0xE000, -1);
    for (size_t i = 0; i < cfg.guess_vars.size(); ++i) {
        guess_pos[cfg.guess_vars[i].key()] = static_cast<int>(i);
    }
    if (cfg.guess_vars.size() > 128) throw Error("guess sets beyond 128 variables unsupported");

    std::vector<VarKey> universe;
    auto add_generator = [&](BoolPoly g) {
        check_eliminated(g);
        auto s = g.support();
        universe.insert(universe.end(), s.begin(), s.end());
        inst.compiled.push_back(compile_generator(g, guess_pos));
    };
    for (int t = 0; t < K - 1; ++t) add_generator(substitute_cs(rec.c_recs[t]));
    for (int t = 0; t < K - 1; ++t) add_generator(substitute_cs(rec.d_recs[t]));

    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    inst.order = MonomialOrder::degrevlex_keys(universe);

    GParts gp = build_g_parts(ks.bits[0], ks.bits[1], ks.bits[2]);
    inst.g = gp.g;
    inst.a1 = gp.a1;
    inst.a2 = gp.a2;
    return inst;
}

// ---------------------------------------------------------------------------
// guesses

const char* degree_class_name(DegreeClass c) {
    switch (c) {
        case DegreeClass::Deg0: return "deg0";
        case DegreeClass::Deg1: return "deg1";
        case DegreeClass::Deg2: return "deg2";
        case DegreeClass::Higher: return "higher";
        case DegreeClass::Budget: return "budget";
    }
    return "?";
}

Assignment guess_from_state(const e0::CipherState& s, const std::vector<Var>& vars) {
    std::vector<uint8_t> bits = e0::state_bits(s);
    auto bit_of = [&](Var v) -> int {
        switch (v.stream) {
            case Stream::X: return bits[v.clock];
            case Stream::Y: return bits[25 + v.clock];
            case Stream::Z: return bits[56 + v.clock];
            case Stream::U: return bits[89 + v.clock];
            case Stream::C: return bits[128 + v.clock];
            case Stream::D: return bits[130 + v.clock];
        }
        return 0;
    };
    Assignment a;
    for (Var v : vars) a.set(v, bit_of(v));
    return a;
}

namespace {

// reassemble a 132-bit state from guess + solution; c(1) comes from the first
// keystream equation.  Returns false if some state bit is missing.
bool assemble_state(const AttackInstance& inst, const Assignment& guess, const Assignment& sol,
                    e0::CipherState* out) {
    auto value_of = [&](VarKey k, int* v) {
        if (sol.has(k)) {
            *v = sol.get(k);
            return true;
        }
        if (guess.has(k)) {
            *v = guess.get(k);
            return true;
        }
        return false;
    };
    std::vector<uint8_t> bits(e0::kStateBits, 0);
    auto put = [&](size_t idx, Var v) {
        int val = 0;
        if (!value_of(v.key(), &val)) return false;
        bits[idx] = static_cast<uint8_t>(val);
        return true;
    };
    for (int t = 0; t < 25; ++t) {
        if (!put(t, var_x(t))) return false;
    }
    for (int t = 0; t < 31; ++t) {
        if (!put(25 + t, var_y(t))) return false;
    }
    for (int t = 0; t < 33; ++t) {
        if (!put(56 + t, var_z(t))) return false;
    }
    for (int t = 0; t < 39; ++t) {
        if (!put(89 + t, var_u(t))) return false;
    }
    if (!put(128, var_c(0))) return false;
    if (!put(130, var_d(0))) return false;
    if (!put(131, var_d(1))) return false;
    // c(1) = b(0) + x(1) + y(7) + z(1) + u(7)
    bits[129] = static_cast<uint8_t>(inst.keystream.bits[0] ^ bits[1] ^ bits[25 + 7] ^
                                     bits[56 + 1] ^ bits[89 + 7]);
    *out = e0::state_from_bits(bits);
    return true;
}

}  // namespace

GuessOutcome run_guess(const AttackInstance& inst, const Assignment& guess,
                       const e0::Keystream& full_ks, const AttackConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](GuessOutcome out) {
        out.elapsed_ns = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
                .count());
        return out;
    };

    // fast path: half of all guesses fail the 14-variable consistency check
    bool have_specials = true;
    for (const BoolPoly* p : {&inst.g, &inst.a1, &inst.a2}) {
        for (VarKey k : p->support()) {
            if (!guess.has(k)) {
                have_specials = false;
                break;
            }
        }
    }
    if (have_specials && gf2::evaluate(inst.g, guess) != 0) {
        GuessOutcome out;
        out.degree_class = DegreeClass::Deg0;
        out.fast_rejected = true;
        return finish(out);
    }

    // restrict the generators to the guess
    std::array<uint64_t, 2> ones = {0, 0};
    for (size_t pos = 0; pos < inst.guess_vars.size(); ++pos) {
        if (guess.get(inst.guess_vars[pos].key())) ones[pos / 64] |= uint64_t{1} << (pos % 64);
    }
    std::vector<BoolPoly> gens;
    gens.reserve(inst.compiled.size() + 2);
    for (const auto& cg : inst.compiled) {
        BoolPoly::Monomials ms;
        for (const auto& grp : cg.groups) {
            int parity = 0;
            for (uint32_t k = grp.first; k < grp.first + grp.count; ++k) {
                const auto& m = cg.masks[k];
                if ((m[0] & ~ones[0]) == 0 && (m[1] & ~ones[1]) == 0) parity ^= 1;
            }
            if (parity) ms.push_back(grp.free_part);  // groups are already descending
        }
        gens.emplace_back(std::move(ms), BoolPoly::Canonical{});
    }
    // imply the linear d(1), d(2) relations when the consistency check passed
    if (have_specials) {
        int a1v = gf2::evaluate(inst.a1, guess);
        int a2v = gf2::evaluate(inst.a2, guess);
        gens.push_back(add(BoolPoly::from_var(var_d(1)), BoolPoly::constant(a1v)));
        gens.push_back(add(BoolPoly::from_var(var_d(2)), BoolPoly::constant(a1v ^ a2v)));
    }

    // ring = instance variables not guessed
    std::vector<VarKey> universe;
    for (VarKey k : inst.order.universe_keys()) {
        if (!guess.has(k)) universe.push_back(k);
    }

    gb::IdealBasis ideal{std::move(gens), MonomialOrder::degrevlex_keys(universe)};
    gb::EarlyExit exits{true, true};
    gb::Budget budget{cfg.pair_budget, cfg.step_budget};
    GuessOutcome out;
    gb::GroebnerResult res;
    try {
        res = gb::buchberger(ideal, exits, budget);
    } catch (const BudgetExceeded&) {
        out.degree_class = DegreeClass::Budget;
        return finish(out);
    }

    if (res.status == gb::GbStatus::Inconsistent) {
        out.degree_class = DegreeClass::Deg0;
        return finish(out);
    }
    out.degree_class = res.degree <= 1   ? DegreeClass::Deg1
                       : res.degree == 2 ? DegreeClass::Deg2
                                         : DegreeClass::Higher;
    if (!res.dimension_exact) {
        out.truncated = true;
        out.raw_solution_count = res.dimension;
        return finish(out);
    }
    out.raw_solution_count = res.dimension;
    if (res.dimension > cfg.solution_limit) {
        out.truncated = true;
        return finish(out);
    }

    // spurious-key filter: regenerate keystream through the bitwise oracle
    size_t check_len = std::min(full_ks.bits.size(),
                                static_cast<size_t>(inst.keystream_bits + cfg.extra_check_bits));
    for (const Assignment& sol : gb::enumerate_solutions(res, cfg.solution_limit)) {
        e0::CipherState cand;
        if (!assemble_state(inst, guess, sol, &cand)) {
            out.truncated = true;
            continue;
        }
        e0::Keystream regen = e0::keystream(cand, check_len, e0::Route::Oracle);
        bool match = true;
        for (size_t i = 0; i < check_len; ++i) {
            if (regen.bits[i] != full_ks.bits[i]) {
                match = false;
                break;
            }
        }
        if (match) out.survivors.push_back(cand);
    }
    return finish(out);
}

// ---------------------------------------------------------------------------
// samplers

Sampler Sampler::random(uint64_t n, uint64_t seed) {
    Sampler s;
    s.kind = Kind::Random;
    s.count = n;
    s.seed = seed;
    return s;
}

Sampler Sampler::exhaustive(uint64_t lo, uint64_t hi, std::vector<Var> vary,
                            std::optional<Assignment> base) {
    Sampler s;
    s.kind = Kind::ExhaustiveRange;
    s.lo = lo;
    s.hi = hi;
    s.vary = std::move(vary);
    s.base = std::move(base);
    return s;
}

Sampler Sampler::include_truth(const e0::CipherState& key, uint64_t n_random, uint64_t seed) {
    Sampler s;
    s.kind = Kind::IncludeTruth;
    s.count = n_random;
    s.seed = seed;
    s.truth = key;
    return s;
}

uint64_t Sampler::total() const {
    switch (kind) {
        case Kind::Random: return count;
        case Kind::ExhaustiveRange: return hi - lo;
        case Kind::IncludeTruth: return count + 1;
    }
    return 0;
}

Assignment Sampler::guess_at(uint64_t index, const std::vector<Var>& guess_vars) const {
    if (kind == Kind::ExhaustiveRange) {
        uint64_t code = lo + index;
        Assignment a = base ? *base : Assignment{};
        for (size_t i = 0; i < vary.size(); ++i) {
            a.set(vary[i], static_cast<int>((code >> i) & 1));
        }
        return a;
    }
    if (kind == Kind::IncludeTruth && index == count) {
        return guess_from_state(*truth, guess_vars);
    }
    SplitMix64 rng(stream_seed(seed, index));
    uint64_t w0 = rng.next(), w1 = rng.next();
    Assignment a;
    for (size_t i = 0; i < guess_vars.size(); ++i) {
        uint64_t w = i < 64 ? w0 : w1;
        a.set(guess_vars[i], static_cast<int>((w >> (i % 64)) & 1));
    }
    return a;
}

// ---------------------------------------------------------------------------
// campaign

namespace {

struct GuessRecord {
    uint8_t degree_class = 0;
    uint8_t fast = 0;
    uint8_t truncated = 0;
    uint8_t n_survivors = 0;
    uint64_t raw = 0;
    uint64_t elapsed_ns = 0;
};

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t campaign_hash(const AttackConfig& cfg, const e0::Keystream& ks, const Sampler& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](uint64_t v) { h = fnv1a(&v, sizeof v, h); };
    mix(cfg.keystream_bits);
    mix(cfg.extra_check_bits);
    for (Var v : cfg.guess_vars) mix(v.key());
    mix(cfg.solution_limit);
    mix(static_cast<uint64_t>(s.kind));
    mix(s.count);
    mix(s.seed);
    mix(s.lo);
    mix(s.hi);
    h = fnv1a(ks.bits.data(), ks.bits.size(), h);
    return h;
}

constexpr char kCheckpointMagic[4] = {'E', '0', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    uint64_t cursor = 0;
    std::vector<GuessRecord> records;
    std::vector<std::pair<uint64_t, e0::CipherState>> survivors;
};

void write_checkpoint(const std::string& path, uint64_t hash, const Checkpoint& cp) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return;
    f.write(kCheckpointMagic, 4);
    auto put64 = [&](uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    uint32_t ver = kCheckpointVersion;
    f.write(reinterpret_cast<const char*>(&ver), 4);
    put64(hash);
    put64(cp.cursor);
    f.write(reinterpret_cast<const char*>(cp.records.data()),
            static_cast<std::streamsize>(cp.cursor * sizeof(GuessRecord)));
    uint64_t ns = 0;
    for (const auto& sv : cp.survivors) {
        if (sv.first < cp.cursor) ++ns;
    }
    put64(ns);
    for (const auto& sv : cp.survivors) {
        if (sv.first >= cp.cursor) continue;
        put64(sv.first);
        std::string hex = e0::to_hex(sv.second);
        f.write(hex.data(), 33);
    }
}

bool read_checkpoint(const std::string& path, uint64_t hash, uint64_t total, Checkpoint* cp) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    char magic[4];
    uint32_t ver = 0;
    uint64_t h = 0, cursor = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&ver), 4);
    f.read(reinterpret_cast<char*>(&h), 8);
    f.read(reinterpret_cast<char*>(&cursor), 8);
    if (!f || std::memcmp(magic, kCheckpointMagic, 4) != 0 || ver != kCheckpointVersion ||
        h != hash || cursor > total) {
        return false;
    }
    cp->cursor = cursor;
    cp->records.assign(total, GuessRecord{});
    f.read(reinterpret_cast<char*>(cp->records.data()),
           static_cast<std::streamsize>(cursor * sizeof(GuessRecord)));
    uint64_t ns = 0;
    f.read(reinterpret_cast<char*>(&ns), 8);
    for (uint64_t i = 0; i < ns && f; ++i) {
        uint64_t idx = 0;
        char hex[34] = {0};
        f.read(reinterpret_cast<char*>(&idx), 8);
        f.read(hex, 33);
        if (f) cp->survivors.emplace_back(idx, e0::from_hex(std::string(hex, 33)));
    }
    return f.good();
}

thread_local std::vector<uint64_t> g_last_gb_times;
thread_local std::vector<uint64_t> g_last_fast_times;

TimingSummary summarize(std::vector<uint64_t> times) {
    TimingSummary t;
    t.count = times.size();
    if (times.empty()) return t;
    std::sort(times.begin(), times.end());
    t.min_ns = times.front();
    t.max_ns = times.back();
    t.median_ns = times[times.size() / 2];
    for (uint64_t v : times) t.total_ns += v;
    return t;
}

}  // namespace

const std::vector<uint64_t>& last_campaign_gb_times() { return g_last_gb_times; }
const std::vector<uint64_t>& last_campaign_fast_times() { return g_last_fast_times; }

AttackStats run_campaign(const AttackConfig& cfg, const e0::Keystream& ks, const Sampler& sampler,
                         const std::string& checkpoint_path) {
    AttackInstance inst = build_instance(cfg, ks);
    const uint64_t total = sampler.total();
    const uint64_t hash = campaign_hash(cfg, ks, sampler);

    Checkpoint cp;
    if (checkpoint_path.empty() || !read_checkpoint(checkpoint_path, hash, total, &cp)) {
        cp.cursor = 0;
        cp.records.assign(total, GuessRecord{});
        cp.survivors.clear();
    }

    std::atomic<uint64_t> next{cp.cursor};
    std::mutex mu;
    std::vector<uint8_t> done(total, 0);
    for (uint64_t i = 0; i < cp.cursor; ++i) done[i] = 1;
    uint64_t committed = cp.cursor;  // contiguous completed prefix
    uint64_t last_checkpointed = cp.cursor;

    auto worker = [&] {
        for (;;) {
            uint64_t idx = next.fetch_add(1);
            if (idx >= total) return;
            Assignment guess = sampler.guess_at(idx, cfg.guess_vars);
            GuessOutcome out = run_guess(inst, guess, ks, cfg);
            GuessRecord rec;
            rec.degree_class = static_cast<uint8_t>(out.degree_class);
            rec.fast = out.fast_rejected;
            rec.truncated = out.truncated;
            rec.n_survivors = static_cast<uint8_t>(out.survivors.size());
            rec.raw = out.raw_solution_count;
            rec.elapsed_ns = out.elapsed_ns;
            std::lock_guard<std::mutex> lock(mu);
            cp.records[idx] = rec;
            for (const auto& s : out.survivors) cp.survivors.emplace_back(idx, s);
            done[idx] = 1;
            while (committed < total && done[committed]) ++committed;
            cp.cursor = committed;
            if (!checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
                committed - last_checkpointed >= cfg.checkpoint_every) {
                write_checkpoint(checkpoint_path, hash, cp);
                last_checkpointed = committed;
            }
        }
    };

    int n_workers = std::max(1, cfg.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (!checkpoint_path.empty()) write_checkpoint(checkpoint_path, hash, cp);

    // aggregation is a commutative fold over the records
    AttackStats st;
    st.keystream_bits = cfg.keystream_bits;
    st.extra_check_bits = cfg.extra_check_bits;
    st.guess_var_count = cfg.guess_vars.size();
    st.pair_budget = cfg.pair_budget;
    st.solution_limit = cfg.solution_limit;
    st.sample_size = total;
    st.seed = sampler.seed;
    st.sampler_kind = sampler.kind == Sampler::Kind::Random          ? "random"
                      : sampler.kind == Sampler::Kind::IncludeTruth  ? "include-truth"
                                                                     : "exhaustive";
    st.truth_included = sampler.truth.has_value();
    std::vector<uint64_t> all_times, gb_times, fast_times;
    all_times.reserve(total);
    for (const auto& rec : cp.records) {
        st.class_counts[rec.degree_class] += 1;
        st.raw_solutions_by_class[rec.degree_class] += rec.raw;
        st.fast_rejects += rec.fast;
        st.survivor_total += rec.n_survivors;
        all_times.push_back(rec.elapsed_ns);
        (rec.fast ? fast_times : gb_times).push_back(rec.elapsed_ns);
    }
    if (sampler.truth) {
        std::string truth_hex = e0::to_hex(*sampler.truth);
        for (const auto& sv : cp.survivors) {
            if (e0::to_hex(sv.second) == truth_hex) {
                st.truth_recovered = true;
                st.recovered_state_hex = truth_hex;
                break;
            }
        }
    }
    g_last_gb_times = gb_times;
    g_last_fast_times = fast_times;
    st.gb_times = summarize(std::move(gb_times));
    st.fast_times = summarize(std::move(fast_times));
    st.all_times = summarize(std::move(all_times));
    if (total > 0) {
        double avg_sec = double(st.all_times.total_ns) / double(total) / 1e9;
        st.extrapolated_total_seconds = avg_sec * std::pow(2.0, 83.0);
    }
    return st;
}

double AttackStats::class_fraction(DegreeClass c) const {
    return sample_size ? double(class_counts[static_cast<int>(c)]) / double(sample_size) : 0.0;
}

double AttackStats::avg_solutions(DegreeClass c) const {
    uint64_t n = class_counts[static_cast<int>(c)];
    return n ? double(raw_solutions_by_class[static_cast<int>(c)]) / double(n) : 0.0;
}

std::string AttackStats::table() const {
    std::ostringstream os;
    char buf[256];
    os << "K    deg(GB)=0   deg(GB)=1   deg(GB)=2   higher   budget   deg=1 avg sol   "
          "deg=2 avg sol   GB avg      GB min/max\n";
    std::snprintf(buf, sizeof buf, "%-4d %9.3f%% %10.3f%% %10.4f%% %7.3f%% %7.3f%%",
                  keystream_bits, 100 * class_fraction(DegreeClass::Deg0),
                  100 * class_fraction(DegreeClass::Deg1),
                  100 * class_fraction(DegreeClass::Deg2),
                  100 * class_fraction(DegreeClass::Higher),
                  100 * class_fraction(DegreeClass::Budget));
    os << buf;
    auto avg_or_dash = [&](DegreeClass c) {
        if (class_counts[static_cast<int>(c)] == 0) return std::string("        -");
        std::snprintf(buf, sizeof buf, "%9.3f", avg_solutions(c));
        return std::string(buf);
    };
    os << "   " << avg_or_dash(DegreeClass::Deg1) << "       " << avg_or_dash(DegreeClass::Deg2);
    std::snprintf(buf, sizeof buf, "   %7.1fms   %llu/%llums\n", gb_times.avg_ms(),
                  static_cast<unsigned long long>(gb_times.min_ns / 1000000),
                  static_cast<unsigned long long>(gb_times.max_ns / 1000000));
    os << buf;
    os << "sample=" << sample_size << " fast_rejects=" << fast_rejects
       << " survivors=" << survivor_total;
    if (truth_included) os << " truth_recovered=" << (truth_recovered ? "yes" : "no");
    os << "\n";
    return os.str();
}

std::string AttackStats::json(bool pretty) const {
    nlohmann::json j;
    j["results"]["keystream_bits"] = keystream_bits;
    j["results"]["sample_size"] = sample_size;
    j["results"]["sampler"] = sampler_kind;
    j["results"]["seed"] = seed;
    for (int c = 0; c < 5; ++c) {
        auto name = degree_class_name(static_cast<DegreeClass>(c));
        j["results"]["classes"][name]["count"] = class_counts[c];
        j["results"]["classes"][name]["fraction"] = class_fraction(static_cast<DegreeClass>(c));
        j["results"]["classes"][name]["raw_solutions"] = raw_solutions_by_class[c];
        j["results"]["classes"][name]["avg_solutions"] =
            avg_solutions(static_cast<DegreeClass>(c));
    }
    j["results"]["config"]["extra_check_bits"] = extra_check_bits;
    j["results"]["config"]["guess_vars"] = guess_var_count;
    j["results"]["config"]["pair_budget"] = pair_budget;
    j["results"]["config"]["solution_limit"] = solution_limit;
    j["results"]["fast_rejects"] = fast_rejects;
    j["results"]["survivors"] = survivor_total;
    j["results"]["truth_included"] = truth_included;
    j["results"]["truth_recovered"] = truth_recovered;
    if (!recovered_state_hex.empty()) j["results"]["recovered_state"] = recovered_state_hex;
    auto timing = [&](const char* name, const TimingSummary& t) {
        j["timing"][name]["count"] = t.count;
        j["timing"][name]["avg_ms"] = t.avg_ms();
        j["timing"][name]["min_ms"] = t.min_ns / 1e6;
        j["timing"][name]["max_ms"] = t.max_ns / 1e6;
        j["timing"][name]["median_ms"] = t.median_ns / 1e6;
    };
    timing("all", all_times);
    timing("groebner", gb_times);
    timing("fast_reject", fast_times);
    j["timing"]["extrapolated_total_seconds"] = extrapolated_total_seconds;
    j["timing"]["extrapolated_log2_seconds"] =
        extrapolated_total_seconds > 0 ? std::log2(extrapolated_total_seconds) : 0.0;
    return pretty ? j.dump(2) : j.dump();
}

e0::CipherState recover_initial_state(const e0::CipherState& recovered, uint64_t t) {
    return e0::rewind(recovered, t);
}

}  // namespace e0a::attack
