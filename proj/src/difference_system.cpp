#include "e0a/difference_system.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>

#include "e0a/groebner.hpp"

namespace e0a::dsys {

using gf2::BoolPoly;
using gf2::Monomial;
using gf2::Stream;
using gf2::Var;
using gf2::VarKey;

uint32_t DiffSystem::state_width() const {
    uint32_t r = 0;
    for (const auto& s : streams) r += s.order;
    return r;
}

uint32_t DiffSystem::window_offset(size_t stream_index) const {
    uint32_t off = 0;
    for (size_t i = 0; i < stream_index; ++i) off += streams[i].order;
    return off;
}

int DiffSystem::stream_index_of(Stream id) const {
    for (size_t i = 0; i < streams.size(); ++i) {
        if (streams[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

namespace {

// value of an initial-window variable in a state
int state_bit(const DiffSystem& sys, const SystemState& v, VarKey key) {
    Var var = Var::from_key(key);
    int si = sys.stream_index_of(var.stream);
    if (si < 0 || var.clock >= sys.streams[si].order) {
        throw Error("variable " + var.str() + " outside the system's initial window");
    }
    return v.bits[sys.window_offset(si) + var.clock];
}

}  // namespace

int evaluate_state(const DiffSystem& sys, const SystemState& v, const BoolPoly& p) {
    int acc = 0;
    for (const auto& m : p.monomials()) {
        int prod = 1;
        for (VarKey k : m.keys()) {
            if (state_bit(sys, v, k) == 0) {
                prod = 0;
                break;
            }
        }
        acc ^= prod;
    }
    return acc;
}

SystemState step(const DiffSystem& sys, const SystemState& v) {
    assert(v.bits.size() == sys.state_width());
    SystemState next;
    next.bits.resize(v.bits.size());
    uint32_t off = 0;
    for (const auto& s : sys.streams) {
        for (uint32_t k = 0; k + 1 < s.order; ++k) next.bits[off + k] = v.bits[off + k + 1];
        next.bits[off + s.order - 1] = static_cast<uint8_t>(evaluate_state(sys, v, s.feedback));
        off += s.order;
    }
    return next;
}

gf2::BoolPoly transition_endo(const DiffSystem& sys, const BoolPoly& p) {
    return partial_transition_endo(sys, sys.streams.size(), p);
}

gf2::BoolPoly partial_transition_endo(const DiffSystem& sys, size_t m, const BoolPoly& p) {
    assert(m <= sys.streams.size());
    BoolPoly::Monomials out;
    for (const auto& mono : p.monomials()) {
        BoolPoly term = BoolPoly::one();
        for (VarKey key : mono.keys()) {
            Var var = Var::from_key(key);
            int si = sys.stream_index_of(var.stream);
            BoolPoly image;
            if (si >= 0 && static_cast<size_t>(si) < m) {
                uint32_t r = sys.streams[si].order;
                if (uint32_t{var.clock} + 1 < r) {
                    image = BoolPoly::from_var(Var(var.stream, var.clock + 1));
                } else if (uint32_t{var.clock} + 1 == r) {
                    image = sys.streams[si].feedback;
                } else {
                    throw Error("variable " + var.str() + " outside the window of its stream");
                }
            } else {
                // untouched streams shift verbatim
                image = BoolPoly::from_var(Var(var.stream, var.clock + 1));
            }
            term = mul(term, image);
        }
        for (const auto& tm : term.monomials()) out.push_back(tm);
    }
    return BoolPoly::from_monomials(std::move(out));
}

// ---------------------------------------------------------------------------
// inversion

std::optional<DiffSystem> invert(const DiffSystem& sys) {
    // doubled ring: originals x_i(k) plus shadows x'_i(k); the graph ideal of
    // the transition endomorphism is generated by x'_i(k) - T(x_i(k))
    std::vector<VarKey> originals;
    std::vector<VarKey> shadows;
    std::vector<BoolPoly> gens;
    for (size_t i = 0; i < sys.streams.size(); ++i) {
        const auto& s = sys.streams[i];
        if (s.order > gf2::kMaxPrimeClock) throw Error("stream order too large to invert");
        for (uint32_t k = 0; k < s.order; ++k) {
            originals.push_back(Var(s.id, k).key());
            shadows.push_back(gf2::prime_key(s.id, k));
            BoolPoly shadow = BoolPoly::from_monomial(
                Monomial(Monomial::Keys{gf2::prime_key(s.id, k)}));
            BoolPoly image = (k + 1 < s.order)
                                 ? BoolPoly::from_var(Var(s.id, k + 1))
                                 : s.feedback;
            gens.push_back(add(shadow, image));
        }
    }
    std::sort(originals.begin(), originals.end());
    std::sort(shadows.begin(), shadows.end());

    gb::IdealBasis ideal{std::move(gens),
                         gf2::MonomialOrder::product_keys({originals, shadows})};
    gb::Budget budget;
    budget.max_pair_reductions = 4'000'000;
    gb::GroebnerResult res = gb::buchberger(ideal, {}, budget);

    // Invertible exactly when the reduced basis is triangular: one element per
    // original variable, led by that variable, with a tail purely in shadows.
    if (res.status == gb::GbStatus::Inconsistent) return std::nullopt;
    if (res.basis.size() != originals.size()) return std::nullopt;
    std::vector<const BoolPoly*> lead_of(0xE000, nullptr);
    for (const auto& g : res.basis) {
        const Monomial* lm = &g.monomials().front();
        for (const auto& mono : g.monomials()) {
            if (res.order.compare(mono, *lm) > 0) lm = &mono;
        }
        if (lm->degree() != 1) return std::nullopt;
        VarKey head = lm->keys()[0];
        if (gf2::is_prime_key(head)) return std::nullopt;
        for (const auto& mono : g.monomials()) {
            if (mono == *lm) continue;
            for (VarKey k : mono.keys()) {
                if (!gf2::is_prime_key(k)) return std::nullopt;
            }
        }
        lead_of[head] = &g;
    }

    DiffSystem inv;
    inv.streams.reserve(sys.streams.size());
    for (const auto& s : sys.streams) {
        const BoolPoly* elem = lead_of[Var(s.id, 0).key()];
        if (!elem) return std::nullopt;
        // tail = f'_i over shadows; pull it back through the reversal
        // isomorphism x'_i(k) -> x_i(r_i - 1 - k)
        BoolPoly::Monomials mapped;
        for (const auto& mono : elem->monomials()) {
            if (mono.degree() == 1 && mono.keys()[0] == Var(s.id, 0).key()) continue;
            Monomial::Keys keys;
            for (VarKey k : mono.keys()) {
                Stream ps = gf2::prime_stream(k);
                uint32_t pk = gf2::prime_clock(k);
                int si = sys.stream_index_of(ps);
                assert(si >= 0);
                keys.push_back(Var(ps, sys.streams[si].order - 1 - pk).key());
            }
            mapped.push_back(Monomial::from_keys_unsorted(std::move(keys)));
        }
        inv.streams.push_back(StreamDef{s.id, s.order, BoolPoly::from_monomials(std::move(mapped))});
    }
    return inv;
}

namespace {

SystemState reverse_windows(const DiffSystem& sys, const SystemState& v) {
    SystemState out;
    out.bits.resize(v.bits.size());
    uint32_t off = 0;
    for (const auto& s : sys.streams) {
        for (uint32_t k = 0; k < s.order; ++k) out.bits[off + k] = v.bits[off + s.order - 1 - k];
        off += s.order;
    }
    return out;
}

}  // namespace

SystemState reverse_state(const DiffSystem& sys, const DiffSystem& inv, const SystemState& v,
                          uint64_t t) {
    SystemState cur = reverse_windows(sys, v);
    for (uint64_t i = 0; i < t; ++i) cur = step(inv, cur);
    return reverse_windows(sys, cur);
}

// ---------------------------------------------------------------------------
// text format

std::string to_string(const DiffSystem& sys) {
    std::ostringstream os;
    for (const auto& s : sys.streams) {
        os << "stream " << gf2::kStreamChar[static_cast<int>(s.id)] << " " << s.order << " = "
           << gf2::to_string(s.feedback) << "\n";
    }
    if (sys.keystream_poly) os << "keystream = " << gf2::to_string(*sys.keystream_poly) << "\n";
    return os.str();
}

DiffSystem parse_system(const std::string& text) {
    DiffSystem sys;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "stream") {
            std::string id_str;
            uint32_t order = 0;
            std::string eq;
            if (!(ls >> id_str >> order >> eq) || eq != "=" || id_str.size() != 1 || order == 0) {
                throw ParseError("line " + std::to_string(lineno) + ": expected 'stream <id> <order> = <poly>'");
            }
            std::string rest;
            std::getline(ls, rest);
            Var probe = gf2::parse_var(id_str + "0");
            sys.streams.push_back(StreamDef{probe.stream, order, gf2::parse_poly(rest)});
        } else if (word == "keystream") {
            std::string eq;
            if (!(ls >> eq) || eq != "=") {
                throw ParseError("line " + std::to_string(lineno) + ": expected 'keystream = <poly>'");
            }
            std::string rest;
            std::getline(ls, rest);
            sys.keystream_poly = gf2::parse_poly(rest);
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown directive '" + word + "'");
        }
    }
    if (sys.streams.empty()) throw ParseError("system file defines no streams");
    for (size_t i = 0; i < sys.streams.size(); ++i) {
        for (size_t j = i + 1; j < sys.streams.size(); ++j) {
            if (sys.streams[i].id == sys.streams[j].id) {
                throw ParseError("duplicate stream id");
            }
        }
    }
    // feedbacks must live in the initial windows
    for (const auto& s : sys.streams) {
        for (VarKey k : s.feedback.support()) {
            Var v = Var::from_key(k);
            int si = sys.stream_index_of(v.stream);
            if (si < 0 || v.clock >= sys.streams[si].order) {
                throw ParseError("feedback variable " + v.str() + " outside the initial window");
            }
        }
    }
    return sys;
}

DiffSystem load_system_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open system file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_system(ss.str());
}

}  // namespace e0a::dsys
