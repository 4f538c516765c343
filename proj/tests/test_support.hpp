#ifndef E0A_TEST_SUPPORT_HPP
#define E0A_TEST_SUPPORT_HPP

#include <vector>

#include "e0a/e0.hpp"
#include "e0a/gf2_poly.hpp"
#include "e0a/rng.hpp"

// shared brute-force oracles; everything here is independent of the
// implementation paths it checks

namespace testsup {

using e0a::SplitMix64;
using namespace e0a::gf2;

inline Var random_var(SplitMix64& rng, const std::vector<Var>& pool) {
    return pool[rng.below(pool.size())];
}

inline Monomial random_monomial(SplitMix64& rng, const std::vector<Var>& pool, int max_deg) {
    Monomial::Keys keys;
    int deg = static_cast<int>(rng.below(max_deg + 1));
    for (int i = 0; i < deg; ++i) keys.push_back(random_var(rng, pool).key());
    return Monomial::from_keys_unsorted(std::move(keys));
}

inline BoolPoly random_poly(SplitMix64& rng, const std::vector<Var>& pool, int max_deg,
                            int max_terms) {
    BoolPoly::Monomials ms;
    int n = static_cast<int>(rng.below(max_terms + 1));
    for (int i = 0; i < n; ++i) ms.push_back(random_monomial(rng, pool, max_deg));
    return BoolPoly::from_monomials(std::move(ms));
}

inline Assignment random_assignment(SplitMix64& rng, const std::vector<Var>& pool) {
    Assignment a;
    for (Var v : pool) a.set(v, rng.bit());
    return a;
}

inline std::vector<Var> var_pool(int n) {
    // a mixed-stream pool exercising the interleaved variable order
    std::vector<Var> pool;
    const Stream streams[] = {Stream::X, Stream::Y, Stream::Z, Stream::U, Stream::C, Stream::D};
    for (int i = 0; i < n; ++i) pool.push_back(Var(streams[i % 6], i / 6));
    return pool;
}

// all points of GF(2)^pool zeroing every generator, by exhaustive evaluation
inline std::vector<Assignment> brute_force_solutions(const std::vector<BoolPoly>& gens,
                                                     const std::vector<Var>& pool) {
    std::vector<Assignment> out;
    size_t n = pool.size();
    for (size_t word = 0; word < (size_t{1} << n); ++word) {
        Assignment a;
        for (size_t i = 0; i < n; ++i) a.set(pool[i], (word >> i) & 1);
        bool ok = true;
        for (const auto& g : gens) {
            if (evaluate(g, a) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(a);
    }
    return out;
}

inline e0a::e0::CipherState random_state(SplitMix64& rng) {
    std::vector<uint8_t> bits(e0a::e0::kStateBits);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return e0a::e0::state_from_bits(bits);
}

}  // namespace testsup

#endif
