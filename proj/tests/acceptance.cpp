// Acceptance suite: every shipping criterion, one pass/fail line each.
// Sample sizes for the statistical runs scale with E0A_ACCEPT_LOG2
// (default 12, i.e. 4096 guesses per keystream length; the tolerance bands
// widen automatically when scaled down).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "e0a/attack.hpp"
#include "e0a/cnf_export.hpp"
#include "e0a/difference_system.hpp"
#include "e0a/e0.hpp"
#include "e0a/groebner.hpp"
#include "e0a/rng.hpp"

using namespace e0a;
using namespace e0a::gf2;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_t0;

void begin(int idx, const char* name) {
    std::printf("[%d] %-58s ", idx, name);
    std::fflush(stdout);
    g_t0 = std::chrono::steady_clock::now();
}

void report(bool pass, const std::string& detail) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0).count();
    std::printf("%s  (%.1fs)  %s\n", pass ? "PASS" : "FAIL", secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void skip(const std::string& detail) {
    std::printf("SKIP  %s\n", detail.c_str());
    std::fflush(stdout);
}

e0::CipherState random_state(SplitMix64& rng) {
    std::vector<uint8_t> bits(e0::kStateBits);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return e0::state_from_bits(bits);
}

int accept_log2() {
    const char* env = std::getenv("E0A_ACCEPT_LOG2");
    int v = env ? std::atoi(env) : 12;
    return std::max(6, std::min(17, v));
}

int workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw >= 2 ? 2 : 1;
}

// --------------------------------------------------------------------------

void criterion1_g_balance() {
    begin(1, "G-balance: 8192 zeros for each keystream prefix");
    bool pass = true;
    std::ostringstream detail;
    std::vector<Var> fourteen = attack::special_guess_vars();
    for (int b = 0; b < 8 && pass; ++b) {
        BoolPoly g = attack::build_g_polynomial(b & 1, (b >> 1) & 1, (b >> 2) & 1);
        auto table = truth_table(g, fourteen);
        uint64_t zeros = 0;
        for (uint8_t v : table) zeros += (v == 0);
        if (zeros != 8192) {
            pass = false;
            detail << "prefix " << b << " has " << zeros << " zeros";
        }
    }
    if (pass) detail << "8 prefixes x 8192/16384";
    report(pass, detail.str());
}

void criterion2_inverse_golden() {
    begin(2, "inverse system identity and 10^4-state step/rewind");
    const auto& sys = e0::e0_system();
    const auto& expected = e0::e0_inverse_system();
    auto inv = dsys::invert(sys);
    bool pass = inv.has_value() && inv->streams.size() == expected.streams.size();
    if (pass) {
        for (size_t i = 0; i < expected.streams.size(); ++i) {
            pass = pass && inv->streams[i].feedback == expected.streams[i].feedback &&
                   inv->streams[i].order == expected.streams[i].order;
        }
    }
    SplitMix64 rng(0x2222);
    int checked = 0;
    for (int i = 0; i < 10000 && pass; ++i) {
        e0::CipherState s = random_state(rng);
        e0::CipherState forward = e0::oracle_step(s).first;
        pass = e0::rewind(forward, 1) == s;
        ++checked;
    }
    report(pass, pass ? "polynomial identity + 10000 states" :
                        ("failed after " + std::to_string(checked) + " states"));
}

void criterion3_cross_oracle() {
    begin(3, "bitwise vs algebraic equivalence, 10^3 keys x 200 clocks");
    SplitMix64 rng(0x3333);
    const auto& sys = e0::e0_system();
    bool pass = true;
    for (int key = 0; key < 1000 && pass; ++key) {
        e0::CipherState s = random_state(rng);
        e0::Keystream a = e0::keystream(s, 200, e0::Route::Oracle);
        e0::Keystream b = e0::keystream(s, 200, e0::Route::Algebraic);
        pass = a.bits == b.bits;
        dsys::SystemState v = e0::to_system_state(s);
        e0::CipherState cur = s;
        for (int t = 0; t < 200 && pass; t += 50) {
            for (int i = 0; i < 50; ++i) {
                cur = e0::oracle_step(cur).first;
                v = dsys::step(sys, v);
            }
            pass = e0::from_system_state(v) == cur;
        }
    }
    report(pass, "keystreams and trajectories agree");
}

void criterion4_end_to_end() {
    begin(4, "key recovery for 2^3 keys at K in {51,57,63} + 200-clock rewind");
    SplitMix64 rng(0x4444);
    bool pass = true;
    std::ostringstream detail;
    int campaigns = 0;
    for (int K : {51, 57, 63}) {
        for (int key_idx = 0; key_idx < 8 && pass; ++key_idx) {
            e0::CipherState key0 = random_state(rng);
            e0::CipherState onset = e0::advance(key0, 200);
            attack::AttackConfig cfg;
            cfg.keystream_bits = K;
            cfg.workers = workers();
            e0::Keystream ks =
                e0::keystream(onset, K + cfg.extra_check_bits, e0::Route::Oracle);
            attack::Sampler sampler =
                attack::Sampler::include_truth(onset, 8, 0x7000 + K * 100 + key_idx);
            attack::AttackStats stats = attack::run_campaign(cfg, ks, sampler);
            ++campaigns;
            if (!stats.truth_recovered) {
                pass = false;
                detail << "K=" << K << " key " << key_idx << ": state not recovered";
                break;
            }
            if (!(attack::recover_initial_state(onset, 200) == key0)) {
                pass = false;
                detail << "K=" << K << " key " << key_idx << ": rewind mismatch";
                break;
            }
        }
    }
    if (pass) detail << campaigns << " campaigns, all states exact";
    report(pass, detail.str());
}

struct CampaignRow {
    int K;
    attack::AttackStats stats;
};

std::vector<CampaignRow> g_rows;  // filled by criterion 5, reused by 6

void criterion5_table_stats() {
    int log2n = accept_log2();
    uint64_t n = uint64_t{1} << log2n;
    std::string name = "degree-class fractions vs reference, 2^" + std::to_string(log2n) +
                       " guesses per K";
    begin(5, name.c_str());
    struct Ref {
        int K;
        double deg0, deg1, deg2, avg1_lo, avg1_hi;
    };
    // reference fractions for random wrong guesses; the deg=1 mean-solution
    // window applies at K=51 only
    const Ref refs[] = {
        {51, 0.83781, 0.15243, 0.00975, 1.3, 1.6},
        {59, 0.99901, 0.00098, 0.0, 0, 0},
        {63, 0.99993, 0.00006, 0.0, 0, 0},
    };
    SplitMix64 rng(0x5555);
    bool pass = true;
    std::ostringstream detail;
    for (const Ref& ref : refs) {
        e0::CipherState key = random_state(rng);
        attack::AttackConfig cfg;
        cfg.keystream_bits = ref.K;
        cfg.workers = workers();
        e0::Keystream ks =
            e0::keystream(key, ref.K + cfg.extra_check_bits, e0::Route::Oracle);
        attack::Sampler sampler = attack::Sampler::random(n, 0x500 + ref.K);
        attack::AttackStats stats = attack::run_campaign(cfg, ks, sampler);
        g_rows.push_back({ref.K, stats});
        std::printf("\n%s", stats.table().c_str());
        std::fflush(stdout);

        auto band_ok = [&](double p_hat, double p_ref) {
            double sigma = std::sqrt(std::max(p_ref * (1 - p_ref), 1e-12) / double(n));
            return std::fabs(p_hat - p_ref) <= 3 * sigma + 1e-12;
        };
        double d0 = stats.class_fraction(attack::DegreeClass::Deg0);
        double d1 = stats.class_fraction(attack::DegreeClass::Deg1);
        double d2 = stats.class_fraction(attack::DegreeClass::Deg2);
        double hi = stats.class_fraction(attack::DegreeClass::Higher);
        double bu = stats.class_fraction(attack::DegreeClass::Budget);
        if (!band_ok(d0, ref.deg0) || !band_ok(d1, ref.deg1) || !band_ok(d2, ref.deg2)) {
            pass = false;
            detail << "K=" << ref.K << " fractions off: " << d0 << "/" << d1 << "/" << d2 << " ";
        }
        if (hi != 0.0 || bu != 0.0) {
            pass = false;
            detail << "K=" << ref.K << " unexpected higher/budget classes ";
        }
        if (ref.K == 51) {
            double avg1 = stats.avg_solutions(attack::DegreeClass::Deg1);
            if (avg1 < ref.avg1_lo || avg1 > ref.avg1_hi) {
                pass = false;
                detail << "K=51 deg1 mean solutions " << avg1 << " outside [1.3,1.6] ";
            }
        }
    }
    if (pass) detail << "all fractions within 3-sigma bands";
    report(pass, detail.str());
}

void criterion6_timing_trends() {
    begin(6, "timing trends: median growth in K, fast path 5x faster");
    bool pass = true;
    std::ostringstream detail;
    const CampaignRow *k51 = nullptr, *k63 = nullptr;
    for (const auto& row : g_rows) {
        if (row.K == 51) k51 = &row;
        if (row.K == 63) k63 = &row;
    }
    if (!k51 || !k63) {
        report(false, "criterion 5 rows missing");
        return;
    }
    // (a) engine-path medians grow with the keystream length
    uint64_t med51 = k51->stats.gb_times.median_ns;
    uint64_t med63 = k63->stats.gb_times.median_ns;
    if (!(med63 > med51)) {
        pass = false;
        detail << "median(K=63)=" << med63 << "ns !> median(K=51)=" << med51 << "ns ";
    }
    // (b) fast rejects beat the per-K engine median by at least 5x
    for (const auto& row : g_rows) {
        uint64_t fast = row.stats.fast_times.median_ns;
        uint64_t gb = row.stats.gb_times.median_ns;
        if (!(fast * 5 <= gb)) {
            pass = false;
            detail << "K=" << row.K << " fast median " << fast << "ns not 5x under " << gb
                   << "ns ";
        }
    }
    if (pass) {
        detail << "median " << med51 / 1000000 << "ms -> " << med63 / 1000000
               << "ms; fast path ~" << k63->stats.fast_times.median_ns / 1000 << "us";
    }
    report(pass, detail.str());
}

void criterion7_solver_oracles() {
    begin(7, "solver vs brute force on 10^3 ideals; CNF equisatisfiability");
    SplitMix64 rng(0x7777);
    bool pass = true;
    std::ostringstream detail;
    const Stream streams[] = {Stream::X, Stream::Y, Stream::Z, Stream::U, Stream::C, Stream::D};
    for (int trial = 0; trial < 1000 && pass; ++trial) {
        int nvars = 4 + static_cast<int>(rng.below(11));  // up to 14
        std::vector<Var> pool;
        for (int i = 0; i < nvars; ++i) pool.push_back(Var(streams[i % 6], i / 6));
        std::vector<BoolPoly> gens;
        int ngens = 1 + static_cast<int>(rng.below(6));
        for (int gi = 0; gi < ngens; ++gi) {
            BoolPoly::Monomials ms;
            int terms = static_cast<int>(rng.below(7));
            for (int t = 0; t < terms; ++t) {
                Monomial::Keys keys;
                int deg = static_cast<int>(rng.below(4));
                for (int dd = 0; dd < deg; ++dd) {
                    keys.push_back(pool[rng.below(pool.size())].key());
                }
                ms.push_back(Monomial::from_keys_unsorted(std::move(keys)));
            }
            gens.push_back(BoolPoly::from_monomials(std::move(ms)));
        }
        // brute force over the full pool
        uint64_t expected = 0;
        for (uint64_t w = 0; w < (uint64_t{1} << nvars); ++w) {
            Assignment a;
            for (int i = 0; i < nvars; ++i) a.set(pool[i], (w >> i) & 1);
            bool ok = true;
            for (const auto& g : gens) {
                if (evaluate(g, a) != 0) {
                    ok = false;
                    break;
                }
            }
            expected += ok;
        }
        std::vector<VarKey> keys;
        for (Var v : pool) keys.push_back(v.key());
        std::sort(keys.begin(), keys.end());
        auto res = gb::buchberger(gb::IdealBasis{gens, MonomialOrder::degrevlex_keys(keys)});
        if (gb::count_solutions(res) != expected) {
            pass = false;
            detail << "trial " << trial << ": dimension " << res.dimension << " != brute "
                   << expected;
            break;
        }
        if (expected <= 128) {
            auto sols = gb::enumerate_solutions(res, 128);
            if (sols.size() != expected) {
                pass = false;
                detail << "trial " << trial << ": enumeration " << sols.size() << " != "
                       << expected;
                break;
            }
            for (const auto& s : sols) {
                for (const auto& g : gens) {
                    if (evaluate(g, s) != 0) {
                        pass = false;
                        detail << "trial " << trial << ": enumerated point misses a generator";
                        break;
                    }
                }
            }
        }
    }
    // CNF path: per-assignment equivalence on smaller instances
    for (int trial = 0; trial < 60 && pass; ++trial) {
        int nvars = 4 + static_cast<int>(rng.below(9));  // up to 12
        std::vector<Var> pool;
        for (int i = 0; i < nvars; ++i) pool.push_back(Var(streams[i % 6], i / 6));
        std::vector<BoolPoly> gens;
        for (int gi = 0; gi < 3; ++gi) {
            BoolPoly::Monomials ms;
            int terms = 1 + static_cast<int>(rng.below(6));
            for (int t = 0; t < terms; ++t) {
                Monomial::Keys keys;
                int deg = static_cast<int>(rng.below(4));
                for (int dd = 0; dd < deg; ++dd) {
                    keys.push_back(pool[rng.below(pool.size())].key());
                }
                ms.push_back(Monomial::from_keys_unsorted(std::move(keys)));
            }
            gens.push_back(BoolPoly::from_monomials(std::move(ms)));
        }
        cnf::CnfFormula f = cnf::compile_polys(gens);
        std::vector<Var> mapped;
        for (VarKey k : f.mapped_vars) mapped.push_back(Var::from_key(k));
        size_t nm = mapped.size();
        for (uint64_t w = 0; w < (uint64_t{1} << nm) && pass; ++w) {
            Assignment a;
            for (size_t i = 0; i < nm; ++i) a.set(mapped[i], (w >> i) & 1);
            // decide the clause set by unit propagation on the auxiliaries
            std::vector<int8_t> val(static_cast<size_t>(f.num_vars) + 1, -1);
            for (VarKey k : f.mapped_vars) val[f.var_map.at(k)] = static_cast<int8_t>(a.get(k));
            bool sat = true;
            bool progress = true;
            while (progress && sat) {
                progress = false;
                for (const auto& clause : f.clauses) {
                    int unassigned = 0, free_lit = 0;
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
                    if (unassigned == 0) {
                        sat = false;
                        break;
                    }
                    if (unassigned == 1) {
                        val[std::abs(free_lit)] = free_lit > 0 ? 1 : 0;
                        progress = true;
                    }
                }
            }
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
            if (sat != zero) {
                pass = false;
                detail << "CNF trial " << trial << ": sat != zero at point " << w;
            }
        }
    }
    if (pass) detail << "1000 solver oracles + 60 CNF instances";
    report(pass, detail.str());
}

void criterion8_external_sat() {
    begin(8, "external SAT parity on sampled guesses (optional)");
    const char* solvers[] = {"cryptominisat5", "kissat", "minisat", "picosat"};
    std::string solver;
    for (const char* s : solvers) {
        std::string probe = std::string("command -v ") + s + " >/dev/null 2>&1";
        if (std::system(probe.c_str()) == 0) {
            solver = s;
            break;
        }
    }
    if (solver.empty()) {
        skip("no DIMACS solver on PATH");
        return;
    }
    SplitMix64 rng(0x8888);
    e0::CipherState key = random_state(rng);
    attack::AttackConfig cfg;
    cfg.keystream_bits = 51;
    e0::Keystream ks = e0::keystream(key, 51 + cfg.extra_check_bits, e0::Route::Oracle);
    attack::AttackInstance inst = attack::build_instance(cfg, ks);
    cnf::CnfFormula base = cnf::compile(inst);
    attack::Sampler sampler = attack::Sampler::random(256, 0x801);
    fs::path dir = fs::temp_directory_path() / "e0a_sat";
    fs::create_directories(dir);
    bool pass = true;
    std::ostringstream detail;
    for (uint64_t i = 0; i < 256 && pass; ++i) {
        Assignment guess = sampler.guess_at(i, cfg.guess_vars);
        attack::GuessOutcome out = attack::run_guess(inst, guess, ks, cfg);
        Assignment mapped;
        for (auto [k, v] : guess.sorted()) {
            if (base.var_map.count(k)) mapped.set_key(k, v);
        }
        cnf::CnfFormula injected = cnf::inject_guess(base, mapped);
        fs::path file = dir / ("g" + std::to_string(i) + ".cnf");
        cnf::write_dimacs_file(injected, file.string());
        std::string cmd = solver + " " + file.string() + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        bool sat = code == 10;
        bool unsat = code == 20;
        if (!sat && !unsat) {
            pass = false;
            detail << "solver returned " << code;
            break;
        }
        bool gb_consistent = out.degree_class != attack::DegreeClass::Deg0;
        if (sat != gb_consistent) {
            pass = false;
            detail << "guess " << i << ": SAT=" << sat << " vs groebner=" << gb_consistent;
        }
        fs::remove(file);
    }
    fs::remove_all(dir);
    if (pass) detail << "256 verdicts match (" << solver << ")";
    report(pass, detail.str());
}

void criterion9_extrapolation_note() {
    begin(9, "full-campaign figures are extrapolation-only");
    // the report carries the 2^83-guess extrapolation as information; nothing
    // here runs the full space
    bool pass = true;
    std::ostringstream detail;
    if (g_rows.empty()) {
        report(false, "criterion 5 rows missing");
        return;
    }
    for (const auto& row : g_rows) {
        if (row.stats.extrapolated_total_seconds <= 0) pass = false;
    }
    double log2s = std::log2(g_rows.back().stats.extrapolated_total_seconds);
    detail << "reported extrapolation ~2^" << std::fixed << std::setprecision(1) << log2s
           << " seconds at K=" << g_rows.back().K << " (informational)";
    report(pass, detail.str());
}

void property_spurious_monotonicity() {
    begin(0, "property: mean survivors per guess non-increasing in K");
    SplitMix64 rng(0xAAAA);
    e0::CipherState key = random_state(rng);
    bool pass = true;
    double prev = 1e9;
    std::ostringstream detail;
    for (int K = 51; K <= 63; K += 2) {
        attack::AttackConfig cfg;
        cfg.keystream_bits = K;
        cfg.workers = workers();
        e0::Keystream ks = e0::keystream(key, K + cfg.extra_check_bits, e0::Route::Oracle);
        attack::AttackStats stats =
            attack::run_campaign(cfg, ks, attack::Sampler::random(512, 0x900 + K));
        double mean = double(stats.survivor_total) / double(stats.sample_size);
        detail << "K" << K << "=" << std::setprecision(3) << mean << " ";
        if (mean > prev + 1e-12) pass = false;
        prev = mean;
    }
    report(pass, detail.str());
}

}  // namespace

int main() {
    std::printf("acceptance suite (samples 2^%d per campaign, %d workers)\n", accept_log2(),
                workers());
    criterion1_g_balance();
    criterion2_inverse_golden();
    criterion3_cross_oracle();
    criterion4_end_to_end();
    criterion5_table_stats();
    criterion6_timing_trends();
    criterion7_solver_oracles();
    criterion8_external_sat();
    criterion9_extrapolation_note();
    property_spurious_monotonicity();
    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
