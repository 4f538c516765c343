#ifndef E0A_ATTACK_HPP
#define E0A_ATTACK_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "e0a/e0.hpp"
#include "e0a/groebner.hpp"

// Guess-and-determine attack on E0: build the keystream ideal with the
// register variables reduced to their initial windows and the c-chain
// eliminated through the keystream equations, evaluate 83-variable guesses,
// classify the resulting Groebner bases, filter spurious keys with extra
// keystream bits, and aggregate campaign statistics.

namespace e0a::attack {

struct AttackConfig {
    int keystream_bits = 57;  // K, the number of keystream bits the ideal consumes
    int extra_check_bits = 16;
    std::vector<gf2::Var> guess_vars;  // defaults to the standard 83 below
    uint64_t pair_budget = 1'000'000;
    uint64_t step_budget = 200'000'000;
    uint64_t solution_limit = 64;
    int workers = 1;
    uint64_t checkpoint_every = 1024;

    AttackConfig();
    // clock bound of the unreduced formulation (keystream taps reach t+7)
    int clock_bound() const { return keystream_bits + 6; }
};

// the 83 brute-forced state bits
std::vector<gf2::Var> default_guess_vars();
// the 14 of them that drive the fast-reject polynomial
std::vector<gf2::Var> special_guess_vars();

// ---------------------------------------------------------------------------
// instance

// Combiner recurrences at clocks t = 0..count-1, before keystream
// substitution: c_recs[t] = c(t+2) + T4^t(g0'), d_recs[t] = d(t+2) + T4^t(g1'),
// register variables already reduced to the initial windows.
struct Recurrences {
    std::vector<gf2::BoolPoly> c_recs;
    std::vector<gf2::BoolPoly> d_recs;
};
Recurrences make_recurrences(int count);

// One generator compiled against the configured guess variables: monomials
// grouped by their unguessed part, the guessed part of each original monomial
// kept as a bitmask over guess positions.  Restriction to a guess is then one
// mask test per original monomial and needs no sorting.
struct CompiledGen {
    struct Group {
        gf2::Monomial free_part;
        uint32_t first = 0;
        uint32_t count = 0;
    };
    std::vector<Group> groups;               // descending by free_part
    std::vector<std::array<uint64_t, 2>> masks;

    gf2::BoolPoly materialize(const std::vector<gf2::Var>& guess_vars) const;
};

struct AttackInstance {
    int keystream_bits = 0;
    e0::Keystream keystream;              // observed bits, start normalized to 0
    std::vector<gf2::Var> guess_vars;
    std::vector<CompiledGen> compiled;    // 2(K-1) generators, c-recs then d-recs
    gf2::MonomialOrder order;             // DegRevLex over the occurring variables
    gf2::BoolPoly g;                      // 14-variable consistency polynomial
    gf2::BoolPoly a1, a2;                 // d(1) = A1, d(2) = A1 + A2 under a guess

    // the generators in their plain polynomial form (materialized on demand)
    const std::vector<gf2::BoolPoly>& generators() const;
    // value of generator i under a full assignment of its variables
    int evaluate_generator(size_t i, const gf2::Assignment& a) const;

private:
    mutable std::vector<gf2::BoolPoly> plain_;
};

// throws InsufficientKeystream if ks has fewer than K + extra_check_bits bits
AttackInstance build_instance(const AttackConfig& cfg, const e0::Keystream& ks);

// ---------------------------------------------------------------------------
// the 14-variable polynomial

struct GParts {
    gf2::BoolPoly c0, c1, d0;          // combiner recurrences at t = 0, 1
    gf2::BoolPoly b0, b1, b2;          // first three keystream equations
    gf2::BoolPoly g1, g2, g3;          // after eliminating c(1), c(2), c(3)
    gf2::BoolPoly a1, a2, a3, a4;
    gf2::BoolPoly g;                   // consistency polynomial, zero iff solvable
    gf2::BoolPoly g_closed_form;       // (A1+1)*A3 + A2 + A4, kept for comparison
};
GParts build_g_parts(int b0, int b1, int b2);
gf2::BoolPoly build_g_polynomial(int b0, int b1, int b2);

// ---------------------------------------------------------------------------
// guesses

enum class DegreeClass { Deg0, Deg1, Deg2, Higher, Budget };
const char* degree_class_name(DegreeClass c);

struct GuessOutcome {
    DegreeClass degree_class = DegreeClass::Deg0;
    uint64_t raw_solution_count = 0;
    std::vector<e0::CipherState> survivors;
    uint64_t elapsed_ns = 0;
    bool fast_rejected = false;   // killed by the 14-variable polynomial
    bool truncated = false;       // raw count exceeded the enumeration limit
};

GuessOutcome run_guess(const AttackInstance& inst, const gf2::Assignment& guess,
                       const e0::Keystream& full_ks, const AttackConfig& cfg);

// restriction of a full state to the configured guess variables
gf2::Assignment guess_from_state(const e0::CipherState& s, const std::vector<gf2::Var>& vars);

// ---------------------------------------------------------------------------
// campaigns

struct Sampler {
    enum class Kind { ExhaustiveRange, Random, IncludeTruth };
    Kind kind = Kind::Random;
    uint64_t count = 0;              // Random / IncludeTruth: number of random guesses
    uint64_t seed = 0;
    uint64_t lo = 0, hi = 0;         // ExhaustiveRange: codes [lo, hi)
    std::vector<gf2::Var> vary;      // ExhaustiveRange: bit i of the code drives vary[i]
    std::optional<gf2::Assignment> base;      // ExhaustiveRange: fixed remainder
    std::optional<e0::CipherState> truth;     // IncludeTruth: appended last

    static Sampler random(uint64_t n, uint64_t seed);
    static Sampler exhaustive(uint64_t lo, uint64_t hi, std::vector<gf2::Var> vary,
                              std::optional<gf2::Assignment> base = std::nullopt);
    static Sampler include_truth(const e0::CipherState& key, uint64_t n_random, uint64_t seed);

    uint64_t total() const;
    gf2::Assignment guess_at(uint64_t index, const std::vector<gf2::Var>& guess_vars) const;
};

struct TimingSummary {
    uint64_t count = 0;
    uint64_t total_ns = 0;
    uint64_t min_ns = 0;
    uint64_t max_ns = 0;
    uint64_t median_ns = 0;
    double avg_ms() const { return count ? double(total_ns) / double(count) / 1e6 : 0.0; }
};

struct AttackStats {
    // deterministic under (seed, config)
    int keystream_bits = 0;
    int extra_check_bits = 0;
    uint64_t guess_var_count = 0;
    uint64_t pair_budget = 0;
    uint64_t solution_limit = 0;
    uint64_t sample_size = 0;
    uint64_t class_counts[5] = {0, 0, 0, 0, 0};  // indexed by DegreeClass
    uint64_t fast_rejects = 0;
    uint64_t raw_solutions_by_class[5] = {0, 0, 0, 0, 0};
    uint64_t survivor_total = 0;
    bool truth_included = false;
    bool truth_recovered = false;
    std::string recovered_state_hex;
    uint64_t seed = 0;
    std::string sampler_kind;

    // wall-clock section, excluded from the reproducibility contract
    TimingSummary all_times;
    TimingSummary gb_times;    // guesses that went through the Groebner engine
    TimingSummary fast_times;  // guesses killed by the 14-variable polynomial
    double extrapolated_total_seconds = 0.0;  // 2^83 * average per-guess time

    double class_fraction(DegreeClass c) const;
    double avg_solutions(DegreeClass c) const;
    std::string table() const;         // aligned human-readable summary
    std::string json(bool pretty = true) const;
};

// Runs every guess of the sampler through run_guess and aggregates.  With
// checkpoint_path set, progress is persisted every cfg.checkpoint_every
// guesses and an interrupted campaign resumes from the saved cursor.
AttackStats run_campaign(const AttackConfig& cfg, const e0::Keystream& ks, const Sampler& sampler,
                         const std::string& checkpoint_path = "");

// collected per-guess timing samples from the most recent campaign in this
// thread (test support for the timing-trend checks)
const std::vector<uint64_t>& last_campaign_gb_times();
const std::vector<uint64_t>& last_campaign_fast_times();

// ---------------------------------------------------------------------------

// clock-0 state whose t-fold evolution is `recovered`
e0::CipherState recover_initial_state(const e0::CipherState& recovered, uint64_t t);

}  // namespace e0a::attack

#endif
