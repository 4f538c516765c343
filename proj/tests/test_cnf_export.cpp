#include <doctest.h>

#include <sstream>

#include "e0a/cnf_export.hpp"
#include "e0a/groebner.hpp"
#include "test_support.hpp"

using namespace e0a::gf2;
using namespace e0a::cnf;
using e0a::SplitMix64;

namespace {

BoolPoly P(const std::string& s) { return parse_poly(s); }

// Satisfiability of the clause set once every source variable is pinned.
// The gate and chain auxiliaries are forced by unit propagation, so the value
// is decided without search; a clause left undecided would be a bug.
bool sat_with_sources(const CnfFormula& f, const Assignment& source) {
    std::vector<int8_t> val(static_cast<size_t>(f.num_vars) + 1, -1);
    for (VarKey k : f.mapped_vars) val[f.var_map.at(k)] = static_cast<int8_t>(source.get(k));
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& clause : f.clauses) {
            int unassigned = 0;
            int free_lit = 0;
            bool satisfied = false;
            for (int lit : clause) {
                int8_t v = val[std::abs(lit)];
                if (v < 0) {
                    ++unassigned;
                    free_lit = lit;
                } else if ((lit > 0) == (v == 1)) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied) continue;
            if (unassigned == 0) return false;
            if (unassigned == 1) {
                val[std::abs(free_lit)] = free_lit > 0 ? 1 : 0;
                progress = true;
            }
        }
    }
    for (const auto& clause : f.clauses) {
        bool satisfied = false;
        for (int lit : clause) {
            int8_t v = val[std::abs(lit)];
            REQUIRE(v >= 0);  // propagation must pin every auxiliary
            if ((lit > 0) == (v == 1)) satisfied = true;
        }
        if (!satisfied) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("two-literal XOR encodes to the two parity clauses") {
    CnfFormula f = compile_polys({P("x0 + y0 + 1")});
    REQUIRE(f.num_vars == 2);
    REQUIRE(f.clauses.size() == 2);
    // x XOR y = 1: forbid (0,0) and (1,1)
    CHECK(f.clauses[0] == std::vector<int>{1, 2});
    CHECK(f.clauses[1] == std::vector<int>{-1, -2});
}

TEST_CASE("AND gate clauses") {
    CnfFormula f = compile_polys({P("x0*y0 + z0")});
    REQUIRE(f.and_gates.size() == 1);
    int g = f.and_gates[0].lit;
    // (~g v x)(~g v y)(g v ~x v ~y) plus the XOR with z
    bool has1 = false, has2 = false, has3 = false;
    for (const auto& c : f.clauses) {
        if (c == std::vector<int>{-g, f.lit_of(var_x(0).key())}) has1 = true;
        if (c == std::vector<int>{-g, f.lit_of(var_y(0).key())}) has2 = true;
        if (c == std::vector<int>{g, -f.lit_of(var_x(0).key()), -f.lit_of(var_y(0).key())})
            has3 = true;
    }
    CHECK(has1);
    CHECK(has2);
    CHECK(has3);
    // the gate is shared across polynomials
    CnfFormula f2 = compile_polys({P("x0*y0 + z0"), P("x0*y0 + u0")});
    CHECK(f2.and_gates.size() == 1);
}

TEST_CASE("solution sets of random systems survive the compilation") {
    SplitMix64 rng(0xCF);
    for (int trial = 0; trial < 100; ++trial) {
        int nvars = 4 + static_cast<int>(rng.below(7));  // up to 10 source variables
        std::vector<Var> pool = testsup::var_pool(nvars);
        std::vector<BoolPoly> gens;
        int ngens = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < ngens; ++i) gens.push_back(testsup::random_poly(rng, pool, 3, 6));
        CnfFormula f = compile_polys(gens);

        // project CNF models to the source variables and compare with the
        // brute-forced zeros of the polynomial system
        uint64_t cnf_models = 0, anf_zeros = 0;
        std::vector<Var> mapped;
        for (VarKey k : f.mapped_vars) mapped.push_back(Var::from_key(k));
        size_t n = mapped.size();
        for (uint64_t w = 0; w < (uint64_t{1} << n); ++w) {
            Assignment a;
            for (size_t i = 0; i < n; ++i) a.set(mapped[i], (w >> i) & 1);
            bool sat = sat_with_sources(f, a);
            bool zero = true;
            for (const auto& g : gens) {
                Assignment full = a;
                for (Var v : pool) {
                    if (!full.has(v.key())) full.set(v, 0);
                }
                if (evaluate(g, full) != 0) {
                    zero = false;
                    break;
                }
            }
            cnf_models += sat;
            anf_zeros += zero;
            CHECK(sat == zero);
        }
        CHECK(cnf_models == anf_zeros);

        // equisatisfiability against the solver's verdict
        std::vector<VarKey> keys = f.mapped_vars;
        auto res = e0a::gb::buchberger(
            e0a::gb::IdealBasis{gens, MonomialOrder::degrevlex_keys(keys)});
        CHECK((res.status != e0a::gb::GbStatus::Inconsistent) == (cnf_models > 0));
    }
}

TEST_CASE("long XORs are cut through chain auxiliaries") {
    BoolPoly p = P("x0 + y0 + z0 + u0 + x1 + y1 + z1 + u1 + 1");
    CompileOptions opts;
    opts.cut_width = 4;
    CnfFormula f = compile_polys({p}, opts);
    CHECK(f.chain_aux_count > 0);
    for (const auto& c : f.clauses) CHECK(c.size() <= 4);
    // semantics preserved on every assignment
    SplitMix64 rng(0xCC);
    std::vector<Var> mapped;
    for (VarKey k : f.mapped_vars) mapped.push_back(Var::from_key(k));
    for (int trial = 0; trial < 256; ++trial) {
        Assignment a;
        for (Var v : mapped) a.set(v, rng.bit());
        CHECK(sat_with_sources(f, a) == (evaluate(p, a) == 0));
    }
}

TEST_CASE("guess injection appends unit clauses") {
    CnfFormula base = compile_polys({P("x0*y0 + z0"), P("x0 + y0 + z0")});
    size_t base_clauses = base.clauses.size();
    Assignment guess;
    guess.set(var_x(0), 1);
    guess.set(var_y(0), 0);
    CnfFormula injected = inject_guess(base, guess);
    CHECK(base.clauses.size() == base_clauses);  // base reused untouched
    REQUIRE(injected.clauses.size() == base_clauses + 2);
    CHECK(injected.clauses[base_clauses] == std::vector<int>{base.lit_of(var_x(0).key())});
    CHECK(injected.clauses[base_clauses + 1] == std::vector<int>{-base.lit_of(var_y(0).key())});

    Assignment unmapped;
    unmapped.set(var_d(9), 1);
    CHECK_THROWS_AS(inject_guess(base, unmapped), e0a::UnmappedVariable);
}

TEST_CASE("the true key extension satisfies the injected instance") {
    SplitMix64 rng(0xCD);
    e0a::e0::CipherState key = testsup::random_state(rng);
    e0a::attack::AttackConfig cfg;
    cfg.keystream_bits = 9;
    e0a::e0::Keystream ks = e0a::e0::keystream(key, 9, e0a::e0::Route::Oracle);
    e0a::attack::AttackInstance inst = e0a::attack::build_instance(cfg, ks);
    CnfFormula base = compile(inst);

    // the trajectory assignment restricted to mapped variables
    Assignment full;
    std::vector<uint8_t> bits = e0a::e0::state_bits(key);
    for (int t = 0; t < 25; ++t) full.set(var_x(t), bits[t]);
    for (int t = 0; t < 31; ++t) full.set(var_y(t), bits[25 + t]);
    for (int t = 0; t < 33; ++t) full.set(var_z(t), bits[56 + t]);
    for (int t = 0; t < 39; ++t) full.set(var_u(t), bits[89 + t]);
    e0a::e0::CipherState cur = key;
    for (int t = 0; t <= 9; ++t) {
        full.set(var_c(t), cur.fsm & 1);
        full.set(var_d(t), (cur.fsm >> 2) & 1);
        cur = e0a::e0::oracle_step(cur).first;
    }
    Assignment mapped;
    for (VarKey k : base.mapped_vars) mapped.set_key(k, full.get(k));
    // inject the guessed part of the assignment; the rest extends to a model
    Assignment guessed;
    for (Var v : cfg.guess_vars) {
        if (base.var_map.count(v.key())) guessed.set(v, full.get(v.key()));
    }
    CnfFormula injected = inject_guess(base, guessed);
    CHECK(sat_with_sources(injected, mapped));
}

TEST_CASE("DIMACS output") {
    SUBCASE("empty formula") {
        std::ostringstream os;
        write_dimacs(CnfFormula{}, os);
        CHECK(os.str() == "p cnf 0 0\n");
    }
    SUBCASE("the worked two-variable example") {
        CnfFormula f = compile_polys({P("x0 + y0 + 1")});
        std::ostringstream os;
        write_dimacs(f, os);
        CHECK(os.str() == "p cnf 2 2\n1 2 0\n-1 -2 0\n");
    }
    SUBCASE("round-trip") {
        SplitMix64 rng(0xCE);
        std::vector<Var> pool = testsup::var_pool(8);
        std::vector<BoolPoly> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(testsup::random_poly(rng, pool, 3, 6));
        CnfFormula f = compile_polys(gens);
        std::ostringstream os;
        write_dimacs(f, os);
        std::istringstream is(os.str());
        ParsedDimacs parsed = parse_dimacs(is);
        CHECK(parsed.num_vars == f.num_vars);
        CHECK(parsed.clauses == f.clauses);
    }
    SUBCASE("native xor dialect") {
        CompileOptions opts;
        opts.native_xor = true;
        CnfFormula f = compile_polys({P("x0 + y0 + z0"), P("x0*y0 + z0 + 1")}, opts);
        CHECK(f.xor_lines.size() == 2);
        // first polynomial: XOR = 0, emitted with a complemented first literal
        CHECK(f.xor_lines[0][0] < 0);
        // second: XOR = 1 over the gate and z
        CHECK(f.xor_lines[1][0] > 0);
        std::ostringstream os;
        write_dimacs(f, os);
        std::istringstream is(os.str());
        ParsedDimacs parsed = parse_dimacs(is);
        CHECK(parsed.xor_lines == f.xor_lines);
        CHECK(parsed.clauses == f.clauses);
    }
}

TEST_CASE("clause and variable counts are deterministic") {
    SplitMix64 rng(0xD0);
    e0a::e0::CipherState key = testsup::random_state(rng);
    e0a::attack::AttackConfig cfg;
    cfg.keystream_bits = 11;
    e0a::e0::Keystream ks = e0a::e0::keystream(key, 11, e0a::e0::Route::Oracle);
    e0a::attack::AttackInstance inst = e0a::attack::build_instance(cfg, ks);
    CnfFormula a = compile(inst);
    CnfFormula b = compile(inst);
    CHECK(a.num_vars == b.num_vars);
    CHECK(a.clauses == b.clauses);
    CompileOptions wide;
    wide.cut_width = 6;
    CnfFormula c = compile(inst, wide);
    CHECK(c.chain_aux_count <= a.chain_aux_count);
    std::ostringstream ma;
    write_var_map(a, ma);
    std::ostringstream mb;
    write_var_map(b, mb);
    CHECK(ma.str() == mb.str());
}
