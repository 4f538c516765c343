// e0attack: keystream generation, difference-system inversion, balance checks,
// guess-and-determine campaigns, and CNF export for the E0 attack toolkit.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "e0a/attack.hpp"
#include "e0a/cnf_export.hpp"
#include "e0a/difference_system.hpp"
#include "e0a/e0.hpp"
#include "e0a/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "e0attack 0.1.0";

// distinct exit codes per failure class
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotInvertible = 3;
constexpr int kExitBudget = 4;
constexpr int kExitAssertion = 5;

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string default_outdir() {
    const char* env = std::getenv("E0ATTACK_OUTDIR");
    return env ? env : ".";
}

// every artifact-producing run drops a manifest next to its outputs
void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    uint64_t seed, const std::string& started,
                    const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["version"] = kVersion;
    m["started"] = started;
    m["finished"] = now_iso8601();
    m["outputs"] = outputs;
    std::ofstream f(dir / (command + "-manifest.json"));
    f << m.dump(2) << "\n";
}

e0a::e0::CipherState random_state(uint64_t seed) {
    e0a::SplitMix64 rng(seed);
    std::vector<uint8_t> bits(e0a::e0::kStateBits);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return e0a::e0::state_from_bits(bits);
}

e0a::e0::CipherState state_from_flags(const std::string& hex, bool random, uint64_t seed) {
    if (random) return random_state(seed);
    return e0a::e0::from_hex(hex);
}

// ---------------------------------------------------------------------------

int cmd_keystream(const std::string& state_hex, bool random_key, uint64_t seed, uint64_t n,
                  const std::string& route, uint64_t skip, const std::string& format,
                  const std::string& out_path) {
    auto state = state_from_flags(state_hex, random_key, seed);
    if (skip > 0) state = e0a::e0::advance(state, skip);
    auto r = route == "algebraic" ? e0a::e0::Route::Algebraic : e0a::e0::Route::Oracle;
    e0a::e0::Keystream ks = e0a::e0::keystream(state, n, r);
    ks.start_clock = skip;
    if (format == "packed") {
        auto bytes = e0a::e0::pack_keystream(ks);
        if (out_path.empty()) {
            std::cout.write(reinterpret_cast<const char*>(bytes.data()),
                            static_cast<std::streamsize>(bytes.size()));
        } else {
            std::ofstream f(out_path, std::ios::binary);
            f.write(reinterpret_cast<const char*>(bytes.data()),
                    static_cast<std::streamsize>(bytes.size()));
        }
    } else {
        std::string s = e0a::e0::bits_string(ks);
        if (out_path.empty()) {
            std::cout << s << "\n";
        } else {
            std::ofstream f(out_path);
            f << s << "\n";
        }
    }
    return kExitOk;
}

int cmd_invert(const std::string& preset, const std::string& file, uint64_t verify_samples,
               uint64_t seed, const std::string& out_path) {
    e0a::dsys::DiffSystem sys;
    if (preset == "e0") {
        sys = e0a::e0::e0_system();
    } else if (!file.empty()) {
        sys = e0a::dsys::load_system_file(file);
    } else {
        std::cerr << "invert: need --preset e0 or a system file\n";
        return kExitUsage;
    }
    auto inv = e0a::dsys::invert(sys);
    if (!inv) {
        std::cerr << "not invertible: the transition map is not a bijection\n";
        return kExitNotInvertible;
    }
    std::string text = e0a::dsys::to_string(*inv);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        f << text;
    }
    if (verify_samples > 0) {
        // step-back of step must be the identity on sampled states
        e0a::SplitMix64 rng(seed);
        uint32_t r = sys.state_width();
        for (uint64_t i = 0; i < verify_samples; ++i) {
            e0a::dsys::SystemState v;
            v.bits.resize(r);
            for (auto& b : v.bits) b = static_cast<uint8_t>(rng.bit());
            auto w = e0a::dsys::step(sys, v);
            auto back = e0a::dsys::reverse_state(sys, *inv, w, 1);
            if (!(back == v)) {
                std::cerr << "roundtrip verification FAILED at sample " << i << "\n";
                return kExitAssertion;
            }
        }
        std::cerr << "roundtrip verified on " << verify_samples << " states\n";
    }
    return kExitOk;
}

int cmd_gbalance(const std::string& bits, bool all) {
    auto count_zeros = [](int b0, int b1, int b2) {
        e0a::gf2::BoolPoly g = e0a::attack::build_g_polynomial(b0, b1, b2);
        std::vector<e0a::gf2::Var> vars;
        for (e0a::gf2::VarKey k : g.support()) vars.push_back(e0a::gf2::Var::from_key(k));
        auto table = e0a::gf2::truth_table(g, vars);
        uint64_t zeros = 0;
        for (uint8_t v : table) zeros += (v == 0);
        // variables dropped by cancellation still range over GF(2)
        return zeros << (14 - vars.size());
    };
    if (all) {
        for (int b = 0; b < 8; ++b) {
            std::cout << "b0b1b2=" << (b & 1) << ((b >> 1) & 1) << ((b >> 2) & 1)
                      << " zeros=" << count_zeros(b & 1, (b >> 1) & 1, (b >> 2) & 1) << "\n";
        }
        return kExitOk;
    }
    if (bits.size() != 3 || bits.find_first_not_of("01") != std::string::npos) {
        std::cerr << "gbalance: --bits needs exactly three 0/1 characters\n";
        return kExitUsage;
    }
    std::cout << count_zeros(bits[0] - '0', bits[1] - '0', bits[2] - '0') << "\n";
    return kExitOk;
}

int cmd_attack(const std::string& key_hex, bool random_key, uint64_t key_seed, int K,
               int extra_bits, uint64_t samples, uint64_t seed, bool include_truth, int workers,
               const std::string& outdir, bool export_cnf, uint64_t export_guesses,
               const std::string& guess_file, uint64_t budget) {
    auto started = now_iso8601();
    e0a::e0::CipherState key = state_from_flags(key_hex, random_key, key_seed);

    e0a::attack::AttackConfig cfg;
    cfg.keystream_bits = K;
    cfg.extra_check_bits = extra_bits;
    cfg.workers = workers;
    cfg.pair_budget = budget;
    if (!guess_file.empty()) {
        std::ifstream f(guess_file);
        if (!f) {
            std::cerr << "cannot open guess set file: " << guess_file << "\n";
            return kExitUsage;
        }
        cfg.guess_vars.clear();
        std::string tok;
        while (f >> tok) cfg.guess_vars.push_back(e0a::gf2::parse_var(tok));
    }

    size_t need = static_cast<size_t>(K + extra_bits);
    e0a::e0::Keystream ks = e0a::e0::keystream(key, need, e0a::e0::Route::Oracle);

    e0a::attack::Sampler sampler = include_truth
                                       ? e0a::attack::Sampler::include_truth(key, samples, seed)
                                       : e0a::attack::Sampler::random(samples, seed);

    fs::path dir(outdir);
    fs::create_directories(dir);
    std::string checkpoint = (dir / "attack.checkpoint").string();
    e0a::attack::AttackStats stats = e0a::attack::run_campaign(cfg, ks, sampler, checkpoint);

    std::vector<std::string> outputs;
    {
        std::ofstream f(dir / "stats.json");
        f << stats.json() << "\n";
        outputs.push_back((dir / "stats.json").string());
    }
    {
        std::ofstream f(dir / "stats.txt");
        f << stats.table();
        outputs.push_back((dir / "stats.txt").string());
    }
    std::cout << stats.table();

    if (export_cnf) {
        e0a::attack::AttackInstance inst = e0a::attack::build_instance(cfg, ks);
        e0a::cnf::CnfFormula base = e0a::cnf::compile(inst);
        e0a::cnf::write_dimacs_file(base, (dir / "instance.cnf").string());
        e0a::cnf::write_var_map_file(base, (dir / "instance.map").string());
        outputs.push_back((dir / "instance.cnf").string());
        outputs.push_back((dir / "instance.map").string());
        uint64_t n_export = std::min(export_guesses, sampler.total());
        for (uint64_t i = 0; i < n_export; ++i) {
            e0a::gf2::Assignment guess = sampler.guess_at(i, cfg.guess_vars);
            // only variables present in the formula become unit clauses
            e0a::gf2::Assignment mapped;
            for (auto [k, v] : guess.sorted()) {
                if (base.var_map.count(k)) mapped.set_key(k, v);
            }
            auto injected = e0a::cnf::inject_guess(base, mapped);
            std::string name = "guess-" + std::to_string(i) + ".cnf";
            e0a::cnf::write_dimacs_file(injected, (dir / name).string());
            outputs.push_back((dir / name).string());
        }
    }

    json config;
    config["keystream_bits"] = K;
    config["extra_check_bits"] = extra_bits;
    config["samples"] = samples;
    config["include_truth"] = include_truth;
    config["workers"] = workers;
    config["key"] = e0a::e0::to_hex(key);
    config["pair_budget"] = budget;
    write_manifest(dir, "attack", config, seed, started, outputs);

    if (include_truth && !stats.truth_recovered) {
        std::cerr << "true key NOT recovered\n";
        return kExitAssertion;
    }
    return kExitOk;
}

int cmd_export_cnf(const std::string& key_hex, bool random_key, uint64_t key_seed, int K,
                   uint64_t seed, const std::string& outdir, int cut_width, bool native_xor) {
    auto started = now_iso8601();
    e0a::e0::CipherState key = state_from_flags(key_hex, random_key, key_seed);
    e0a::attack::AttackConfig cfg;
    cfg.keystream_bits = K;
    e0a::e0::Keystream ks = e0a::e0::keystream(key, K, e0a::e0::Route::Oracle);
    e0a::attack::AttackInstance inst = e0a::attack::build_instance(cfg, ks);
    e0a::cnf::CompileOptions opts;
    opts.cut_width = cut_width;
    opts.native_xor = native_xor;
    e0a::cnf::CnfFormula f = e0a::cnf::compile(inst, opts);
    fs::path dir(outdir);
    fs::create_directories(dir);
    e0a::cnf::write_dimacs_file(f, (dir / "instance.cnf").string());
    e0a::cnf::write_var_map_file(f, (dir / "instance.map").string());
    std::cout << "vars=" << f.num_vars << " clauses=" << (f.clauses.size() + f.xor_lines.size())
              << " and_gates=" << f.and_gates.size() << " chain_aux=" << f.chain_aux_count << "\n";
    json config;
    config["keystream_bits"] = K;
    config["cut_width"] = cut_width;
    config["native_xor"] = native_xor;
    config["key"] = e0a::e0::to_hex(key);
    write_manifest(dir, "export-cnf", config, seed, started,
                   {(dir / "instance.cnf").string(), (dir / "instance.map").string()});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebraic attack toolkit for the E0 stream cipher"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // keystream
    auto* ksc = app.add_subcommand("keystream", "generate keystream bits from a state");
    std::string ks_state;
    bool ks_random = false;
    uint64_t ks_seed = 1;
    uint64_t ks_n = 64;
    uint64_t ks_skip = 0;
    std::string ks_route = "oracle", ks_format = "bits", ks_out;
    ksc->add_option("--state", ks_state, "132-bit state as 33 hex digits");
    ksc->add_flag("--random-key", ks_random, "draw the state from --seed");
    ksc->add_option("--seed", ks_seed, "seed for --random-key");
    ksc->add_option("-n,--bits", ks_n, "number of keystream bits");
    ksc->add_option("--skip", ks_skip, "clocks to advance before output");
    ksc->add_option("--route", ks_route, "oracle | algebraic")
        ->check(CLI::IsMember({"oracle", "algebraic"}));
    ksc->add_option("--format", ks_format, "bits | packed")
        ->check(CLI::IsMember({"bits", "packed"}));
    ksc->add_option("-o,--out", ks_out, "output file (default stdout)");

    // invert
    auto* ivc = app.add_subcommand("invert", "derive the inverse of a difference system");
    std::string iv_preset, iv_file, iv_out;
    uint64_t iv_verify = 0, iv_seed = 1;
    ivc->add_option("--preset", iv_preset, "built-in system name (e0)");
    ivc->add_option("--file", iv_file, "system definition file");
    ivc->add_option("--verify", iv_verify, "verify step/step-back identity on N sampled states");
    ivc->add_option("--seed", iv_seed, "seed for --verify sampling");
    ivc->add_option("-o,--out", iv_out, "output file (default stdout)");

    // gbalance
    auto* gbc = app.add_subcommand("gbalance", "zero counts of the 14-variable fast-reject polynomial");
    std::string gb_bits = "000";
    bool gb_all = false;
    gbc->add_option("--bits", gb_bits, "three keystream bits b0b1b2");
    gbc->add_flag("--all", gb_all, "all eight keystream-bit prefixes");

    // attack
    auto* atc = app.add_subcommand("attack", "run a guess-and-determine campaign");
    std::string at_key;
    bool at_random = false;
    uint64_t at_key_seed = 1;
    int at_k = 57, at_extra = 16, at_workers = 1;
    uint64_t at_samples = 1024, at_seed = 1, at_budget = 1'000'000, at_export_guesses = 4;
    bool at_truth = false, at_export = false;
    std::string at_out = default_outdir(), at_guess_file;
    atc->add_option("--key", at_key, "true 132-bit state as 33 hex digits");
    atc->add_flag("--random-key", at_random, "draw the key from --key-seed");
    atc->add_option("--key-seed", at_key_seed, "seed for --random-key");
    atc->add_option("-K,--keystream-bits", at_k, "keystream bits used by the ideal")
        ->check(CLI::Range(3, 200));
    atc->add_option("--extra-bits", at_extra, "extra bits for spurious filtering");
    atc->add_option("-n,--samples", at_samples, "number of sampled guesses");
    atc->add_option("--seed", at_seed, "campaign seed");
    atc->add_flag("--include-truth", at_truth, "append the true guess and assert recovery");
    atc->add_option("--workers", at_workers, "parallel guess workers");
    atc->add_option("--out", at_out, "output directory (default $E0ATTACK_OUTDIR or .)");
    atc->add_flag("--export-cnf", at_export, "also emit DIMACS for the instance and first guesses");
    atc->add_option("--export-guesses", at_export_guesses, "guesses to emit with --export-cnf");
    atc->add_option("--guess-set", at_guess_file, "file with one guess variable per line");
    atc->add_option("--budget", at_budget, "pair-reduction cap per guess");

    // export-cnf
    auto* exc = app.add_subcommand("export-cnf", "compile an attack instance to DIMACS");
    std::string ex_key, ex_out = default_outdir();
    bool ex_random = false, ex_xor = false;
    uint64_t ex_key_seed = 1, ex_seed = 1;
    int ex_k = 57, ex_cut = 4;
    exc->add_option("--key", ex_key, "true 132-bit state as 33 hex digits");
    exc->add_flag("--random-key", ex_random, "draw the key from --key-seed");
    exc->add_option("--key-seed", ex_key_seed, "seed for --random-key");
    exc->add_option("-K,--keystream-bits", ex_k, "keystream bits used by the ideal")
        ->check(CLI::Range(3, 200));
    exc->add_option("--cut-width", ex_cut, "max literals per XOR clause chunk");
    exc->add_flag("--native-xor", ex_xor, "emit `x...0` lines instead of XOR clauses");
    exc->add_option("--out", ex_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(ksc)) {
            if (!ks_random && ks_state.empty()) {
                std::cerr << "keystream: need --state or --random-key\n";
                return kExitUsage;
            }
            return cmd_keystream(ks_state, ks_random, ks_seed, ks_n, ks_route, ks_skip, ks_format,
                                 ks_out);
        }
        if (app.got_subcommand(ivc)) {
            return cmd_invert(iv_preset, iv_file, iv_verify, iv_seed, iv_out);
        }
        if (app.got_subcommand(gbc)) {
            return cmd_gbalance(gb_bits, gb_all);
        }
        if (app.got_subcommand(atc)) {
            if (!at_random && at_key.empty()) {
                std::cerr << "attack: need --key or --random-key\n";
                return kExitUsage;
            }
            return cmd_attack(at_key, at_random, at_key_seed, at_k, at_extra, at_samples, at_seed,
                              at_truth, at_workers, at_out, at_export, at_export_guesses,
                              at_guess_file, at_budget);
        }
        if (app.got_subcommand(exc)) {
            if (!ex_random && ex_key.empty()) {
                std::cerr << "export-cnf: need --key or --random-key\n";
                return kExitUsage;
            }
            return cmd_export_cnf(ex_key, ex_random, ex_key_seed, ex_k, ex_seed, ex_out, ex_cut,
                                  ex_xor);
        }
    } catch (const e0a::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const e0a::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const e0a::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
