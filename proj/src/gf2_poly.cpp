#include "e0a/gf2_poly.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <ostream>
#include <sstream>

namespace e0a::gf2 {

// ---------------------------------------------------------------------------
// Var

Var Var::from_key(VarKey k) {
    if (k >= kPrimeBase) {
        // primed keys have no public Var; callers must unprime first
        assert(false && "primed key has no Var representation");
        return Var(Stream::X, 0);
    }
    if (k >= kDBase) return Var(Stream::D, k - kDBase);
    if (k >= kCBase) return Var(Stream::C, k - kCBase);
    return Var(static_cast<Stream>(k & 3u), k >> 2);
}

std::string Var::str() const {
    return std::string(1, kStreamChar[static_cast<int>(stream)]) + std::to_string(clock);
}

std::string key_str(VarKey k) {
    if (is_prime_key(k)) {
        return std::string(1, kStreamChar[static_cast<int>(prime_stream(k))]) + "'" +
               std::to_string(prime_clock(k));
    }
    return Var::from_key(k).str();
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::initializer_list<Var> vars) {
    for (Var v : vars) keys_.push_back(v.key());
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
}

Monomial Monomial::from_keys_unsorted(Keys keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return Monomial(std::move(keys));
}

bool Monomial::contains(VarKey k) const {
    return std::binary_search(keys_.begin(), keys_.end(), k);
}

bool Monomial::divides(const Monomial& other) const {
    return std::includes(other.keys_.begin(), other.keys_.end(), keys_.begin(), keys_.end());
}

Monomial Monomial::mul(const Monomial& other) const {
    Keys out;
    out.reserve(keys_.size() + other.keys_.size());
    std::set_union(keys_.begin(), keys_.end(), other.keys_.begin(), other.keys_.end(),
                   std::back_inserter(out));
    return Monomial(std::move(out));
}

Monomial Monomial::quotient(const Monomial& d) const {
    Keys out;
    out.reserve(keys_.size());
    std::set_difference(keys_.begin(), keys_.end(), d.keys_.begin(), d.keys_.end(),
                        std::back_inserter(out));
    return Monomial(std::move(out));
}

bool Monomial::disjoint(const Monomial& other) const {
    auto a = keys_.begin();
    auto b = other.keys_.begin();
    while (a != keys_.end() && b != other.keys_.end()) {
        if (*a == *b) return false;
        (*a < *b) ? ++a : ++b;
    }
    return true;
}

std::string Monomial::str() const {
    if (keys_.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < keys_.size(); ++i) {
        if (i) s += "*";
        s += key_str(keys_[i]);
    }
    return s;
}

int canonical_cmp(const Monomial& a, const Monomial& b) {
    // DegRevLex on squarefree monomials over the global key order reduces to
    // (degree, then ascending lex on the sorted key vectors)
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
    const auto& ka = a.keys();
    const auto& kb = b.keys();
    for (size_t i = 0; i < ka.size(); ++i) {
        if (ka[i] != kb[i]) return ka[i] < kb[i] ? -1 : 1;
    }
    return 0;
}

size_t MonomialHash::operator()(const Monomial& m) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (VarKey k : m.keys()) {
        h ^= k;
        h *= 0x100000001b3ull;
    }
    return static_cast<size_t>(h);
}

// ---------------------------------------------------------------------------
// Assignment

int Assignment::get(VarKey k) const {
    auto it = map_.find(k);
    if (it == map_.end()) throw UnassignedVariable(key_str(k));
    return it->second;
}

int Assignment::get_or(VarKey k, int fallback) const {
    auto it = map_.find(k);
    return it == map_.end() ? fallback : it->second;
}

std::vector<std::pair<VarKey, uint8_t>> Assignment::sorted() const {
    std::vector<std::pair<VarKey, uint8_t>> v(map_.begin(), map_.end());
    std::sort(v.begin(), v.end());
    return v;
}

// ---------------------------------------------------------------------------
// BoolPoly

namespace {

bool canonical_desc(const Monomial& a, const Monomial& b) { return canonical_cmp(a, b) > 0; }

// sort descending and cancel equal pairs (characteristic 2)
void normalize(std::vector<Monomial>& ms) {
    std::sort(ms.begin(), ms.end(), canonical_desc);
    size_t out = 0;
    size_t i = 0;
    while (i < ms.size()) {
        size_t j = i + 1;
        while (j < ms.size() && ms[j] == ms[i]) ++j;
        if ((j - i) % 2 == 1) {
            if (out != i) ms[out] = std::move(ms[i]);
            ++out;
        }
        i = j;
    }
    ms.resize(out);
}

}  // namespace

BoolPoly BoolPoly::from_monomials(Monomials ms) {
    normalize(ms);
    return BoolPoly(std::move(ms), Canonical{});
}

int BoolPoly::degree() const {
    if (monomials_.empty()) return -1;
    // canonical order is degree-compatible, so the leading monomial is maximal
    return monomials_.front().degree();
}

bool BoolPoly::contains(const Monomial& m) const {
    auto it = std::lower_bound(monomials_.begin(), monomials_.end(), m, canonical_desc);
    return it != monomials_.end() && *it == m;
}

std::vector<VarKey> BoolPoly::support() const {
    std::vector<VarKey> keys;
    for (const auto& m : monomials_) keys.insert(keys.end(), m.keys().begin(), m.keys().end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

std::string BoolPoly::str() const { return to_string(*this); }

BoolPoly add(const BoolPoly& p, const BoolPoly& q) {
    // symmetric difference of two descending monomial lists
    BoolPoly::Monomials out;
    out.reserve(p.term_count() + q.term_count());
    auto a = p.monomials().begin(), ae = p.monomials().end();
    auto b = q.monomials().begin(), be = q.monomials().end();
    while (a != ae && b != be) {
        int c = canonical_cmp(*a, *b);
        if (c > 0) {
            out.push_back(*a++);
        } else if (c < 0) {
            out.push_back(*b++);
        } else {
            ++a;
            ++b;
        }
    }
    out.insert(out.end(), a, ae);
    out.insert(out.end(), b, be);
    return BoolPoly(std::move(out), BoolPoly::Canonical{});
}

BoolPoly mul(const BoolPoly& p, const Monomial& m) {
    BoolPoly::Monomials out;
    out.reserve(p.term_count());
    for (const auto& pm : p.monomials()) out.push_back(pm.mul(m));
    normalize(out);
    return BoolPoly(std::move(out), BoolPoly::Canonical{});
}

BoolPoly mul(const BoolPoly& p, const BoolPoly& q) {
    BoolPoly::Monomials out;
    out.reserve(p.term_count() * q.term_count());
    for (const auto& pm : p.monomials()) {
        for (const auto& qm : q.monomials()) out.push_back(pm.mul(qm));
    }
    normalize(out);
    return BoolPoly(std::move(out), BoolPoly::Canonical{});
}

int evaluate(const BoolPoly& p, const Assignment& a) {
    int acc = 0;
    for (const auto& m : p.monomials()) {
        int prod = 1;
        for (VarKey k : m.keys()) {
            if (a.get(k) == 0) {
                prod = 0;
                break;
            }
        }
        acc ^= prod;
    }
    return acc;
}

BoolPoly restrict_poly(const BoolPoly& p, const Assignment& a) {
    BoolPoly::Monomials out;
    Monomial::Keys keep;
    for (const auto& m : p.monomials()) {
        keep.clear();
        bool dead = false;
        for (VarKey k : m.keys()) {
            if (a.has(k)) {
                if (a.get(k) == 0) {
                    dead = true;
                    break;
                }
            } else {
                keep.push_back(k);
            }
        }
        if (!dead) out.push_back(Monomial(keep));
    }
    normalize(out);
    return BoolPoly(std::move(out), BoolPoly::Canonical{});
}

BoolPoly substitute_key(const BoolPoly& p, VarKey key, const BoolPoly& r) {
    // p = A + key*B with key-free B; result is A + B*r
    BoolPoly::Monomials untouched;
    BoolPoly::Monomials factored;
    for (const auto& m : p.monomials()) {
        if (m.contains(key)) {
            Monomial::Keys rest;
            for (VarKey k : m.keys()) {
                if (k != key) rest.push_back(k);
            }
            factored.push_back(Monomial(std::move(rest)));
        } else {
            untouched.push_back(m);
        }
    }
    BoolPoly b = BoolPoly::from_monomials(std::move(factored));
    return add(BoolPoly::from_monomials(std::move(untouched)), mul(b, r));
}

BoolPoly substitute(const BoolPoly& p, Var var, const BoolPoly& r) {
    return substitute_key(p, var.key(), r);
}

BoolPoly shift(const BoolPoly& p, uint32_t k) {
    if (k == 0) return p;
    // key order is clock-monotone per stream class, so the shift preserves the
    // canonical sort
    BoolPoly::Monomials out;
    out.reserve(p.term_count());
    for (const auto& m : p.monomials()) {
        Monomial::Keys keys;
        keys.reserve(m.keys().size());
        for (VarKey key : m.keys()) {
            Var v = Var::from_key(key);
            keys.push_back(Var(v.stream, v.clock + k).key());
        }
        out.push_back(Monomial(std::move(keys)));
    }
    return BoolPoly(std::move(out), BoolPoly::Canonical{});
}

// ---------------------------------------------------------------------------
// MonomialOrder

MonomialOrder MonomialOrder::degrevlex(std::vector<Var> universe) {
    std::vector<VarKey> keys;
    keys.reserve(universe.size());
    for (Var v : universe) keys.push_back(v.key());
    return degrevlex_keys(std::move(keys));
}

MonomialOrder MonomialOrder::degrevlex_keys(std::vector<VarKey> universe) {
    MonomialOrder o;
    o.kind_ = Kind::DegRevLex;
    o.build_tables({std::move(universe)});
    return o;
}

MonomialOrder MonomialOrder::product_keys(std::vector<std::vector<VarKey>> blocks) {
    MonomialOrder o;
    o.kind_ = Kind::Product;
    o.build_tables(blocks);
    return o;
}

MonomialOrder MonomialOrder::lex_keys(std::vector<VarKey> universe) {
    // lex = product order of singleton blocks, highest variable first
    std::vector<std::vector<VarKey>> blocks;
    blocks.reserve(universe.size());
    for (auto it = universe.rbegin(); it != universe.rend(); ++it) blocks.push_back({*it});
    MonomialOrder o;
    o.kind_ = Kind::Product;
    o.build_tables(blocks);
    return o;
}

void MonomialOrder::build_tables(const std::vector<std::vector<VarKey>>& blocks) {
    block_count_ = blocks.size();
    universe_.clear();
    size_t total = 0;
    for (const auto& b : blocks) total += b.size();
    universe_.reserve(total);
    rank_of_.assign(0xE000, -1);
    block_of_.assign(0xE000, 0xFFFF);
    int32_t rank = 0;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        for (VarKey k : blocks[bi]) {
            assert(rank_of_[k] == -1 && "duplicate variable in order universe");
            universe_.push_back(k);
            rank_of_[k] = rank++;
            block_of_[k] = static_cast<uint16_t>(bi);
        }
    }
    canonical_compatible_ =
        kind_ == Kind::DegRevLex && std::is_sorted(universe_.begin(), universe_.end());
}

bool MonomialOrder::in_universe(VarKey k) const {
    return k < rank_of_.size() && rank_of_[k] >= 0;
}

int MonomialOrder::compare(const Monomial& a, const Monomial& b) const {
    if (kind_ == Kind::DegRevLex) {
        if (canonical_compatible_) return canonical_cmp(a, b);
        if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
        // ascending rank sequences, lexicographic
        boost::container::small_vector<int32_t, 8> ra, rb;
        for (VarKey k : a.keys()) ra.push_back(rank_of_[k]);
        for (VarKey k : b.keys()) rb.push_back(rank_of_[k]);
        std::sort(ra.begin(), ra.end());
        std::sort(rb.begin(), rb.end());
        for (size_t i = 0; i < ra.size(); ++i) {
            if (ra[i] != rb[i]) return ra[i] < rb[i] ? -1 : 1;
        }
        return 0;
    }
    // product order: compare block by block, each by DegRevLex of the
    // block-restricted monomials
    boost::container::small_vector<int32_t, 8> ra, rb;
    for (size_t bi = 0; bi < block_count_; ++bi) {
        ra.clear();
        rb.clear();
        for (VarKey k : a.keys()) {
            if (block_of_[k] == bi) ra.push_back(rank_of_[k]);
        }
        for (VarKey k : b.keys()) {
            if (block_of_[k] == bi) rb.push_back(rank_of_[k]);
        }
        if (ra.size() != rb.size()) return ra.size() < rb.size() ? -1 : 1;
        std::sort(ra.begin(), ra.end());
        std::sort(rb.begin(), rb.end());
        for (size_t i = 0; i < ra.size(); ++i) {
            if (ra[i] != rb[i]) return ra[i] < rb[i] ? -1 : 1;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// normal form

namespace {

// leading monomial of p under an arbitrary order (canonical storage only
// guarantees the front for canonical-compatible orders)
const Monomial* leading_under(const BoolPoly& p, const MonomialOrder& order) {
    if (p.is_zero()) return nullptr;
    if (order.is_canonical_compatible()) return &p.monomials().front();
    const Monomial* best = &p.monomials().front();
    for (const auto& m : p.monomials()) {
        if (order.compare(m, *best) > 0) best = &m;
    }
    return best;
}

}  // namespace

BoolPoly normal_form(const BoolPoly& p, const std::vector<BoolPoly>& basis,
                     const MonomialOrder& order) {
    if (basis.empty()) return p;
    struct Reducer {
        const BoolPoly* poly;
        Monomial lm;
        BoolPoly tail;  // poly - lm
        size_t terms;
    };
    std::vector<Reducer> reducers;
    reducers.reserve(basis.size());
    for (const auto& g : basis) {
        if (g.is_zero()) continue;
        const Monomial* lm = leading_under(g, order);
        reducers.push_back({&g, *lm, add(g, BoolPoly::from_monomial(*lm)), g.term_count()});
    }

    // Work through the monomials of p from the top of the order downward.  A
    // reduction step cancels the current monomial and adds strictly smaller
    // ones, so the loop terminates.
    BoolPoly work = p;
    BoolPoly::Monomials done;  // irreducible, collected in any order
    while (!work.is_zero()) {
        const Monomial* top = leading_under(work, order);
        Monomial m = *top;
        const Reducer* chosen = nullptr;
        for (const auto& r : reducers) {
            if (r.lm.divides(m)) {
                if (!chosen || r.terms < chosen->terms) chosen = &r;
            }
        }
        if (!chosen) {
            done.push_back(m);
            work = add(work, BoolPoly::from_monomial(m));
            continue;
        }
        Monomial cofactor = m.quotient(chosen->lm);
        // work := work + cofactor * reducer  (cancels m)
        work = add(add(work, BoolPoly::from_monomial(m)), mul(chosen->tail, cofactor));
    }
    return BoolPoly::from_monomials(std::move(done));
}

// ---------------------------------------------------------------------------
// truth tables

BoolPoly anf_from_truth_table(const std::vector<uint8_t>& table, const std::vector<Var>& vars) {
    size_t n = vars.size();
    if (table.size() != (size_t{1} << n)) {
        throw IncompleteTable("truth table must have exactly 2^n entries");
    }
    // in-place Moebius transform
    std::vector<uint8_t> t = table;
    for (size_t j = 0; j < n; ++j) {
        size_t stride = size_t{1} << j;
        for (size_t i = 0; i < t.size(); ++i) {
            if (i & stride) t[i] ^= t[i ^ stride];
        }
    }
    BoolPoly::Monomials ms;
    for (size_t i = 0; i < t.size(); ++i) {
        if (!t[i]) continue;
        Monomial::Keys keys;
        for (size_t j = 0; j < n; ++j) {
            if (i & (size_t{1} << j)) keys.push_back(vars[j].key());
        }
        ms.push_back(Monomial::from_keys_unsorted(std::move(keys)));
    }
    return BoolPoly::from_monomials(std::move(ms));
}

std::vector<uint8_t> truth_table(const BoolPoly& p, const std::vector<Var>& vars) {
    size_t n = vars.size();
    std::vector<uint8_t> out(size_t{1} << n, 0);
    Assignment a;
    for (size_t i = 0; i < out.size(); ++i) {
        for (size_t j = 0; j < n; ++j) a.set(vars[j], (i >> j) & 1);
        out[i] = static_cast<uint8_t>(evaluate(p, a));
    }
    return out;
}

// ---------------------------------------------------------------------------
// text format

std::string to_string(const BoolPoly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (size_t i = 0; i < p.monomials().size(); ++i) {
        if (i) s += " + ";
        s += p.monomials()[i].str();
    }
    return s;
}

std::ostream& operator<<(std::ostream& os, const BoolPoly& p) { return os << to_string(p); }

namespace {

Stream stream_from_char(char c) {
    switch (c) {
        case 'x': return Stream::X;
        case 'y': return Stream::Y;
        case 'z': return Stream::Z;
        case 'u': return Stream::U;
        case 'c': return Stream::C;
        case 'd': return Stream::D;
        default: throw ParseError(std::string("unknown stream letter: ") + c);
    }
}

}  // namespace

Var parse_var(const std::string& text) {
    if (text.size() < 2) throw ParseError("bad variable: " + text);
    Stream s = stream_from_char(text[0]);
    for (size_t i = 1; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw ParseError("bad variable: " + text);
        }
    }
    unsigned long clock = std::stoul(text.substr(1));
    return Var(s, static_cast<uint32_t>(clock));
}

BoolPoly parse_poly(const std::string& text) {
    BoolPoly::Monomials ms;
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (i == text.size()) throw ParseError("empty polynomial text");
    bool expect_term = true;
    Monomial::Keys keys;
    int constant_factor = 1;
    bool in_term = false;
    auto flush_term = [&] {
        if (!in_term) throw ParseError("dangling operator in: " + text);
        if (constant_factor != 0) ms.push_back(Monomial::from_keys_unsorted(keys));
        keys.clear();
        constant_factor = 1;
        in_term = false;
    };
    while (i < text.size()) {
        skip_ws();
        if (i == text.size()) break;
        char c = text[i];
        if (c == '+') {
            flush_term();
            expect_term = true;
            ++i;
        } else if (c == '*') {
            if (!in_term) throw ParseError("'*' without left factor in: " + text);
            expect_term = true;
            ++i;
        } else if (c == '0' || c == '1') {
            if (!expect_term) throw ParseError("missing operator in: " + text);
            if (c == '0') constant_factor = 0;
            in_term = true;
            expect_term = false;
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            if (!expect_term) throw ParseError("missing operator in: " + text);
            size_t j = i + 1;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            keys.push_back(parse_var(text.substr(i, j - i)).key());
            in_term = true;
            expect_term = false;
            i = j;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "' in: " + text);
        }
    }
    flush_term();
    return BoolPoly::from_monomials(std::move(ms));
}

}  // namespace e0a::gf2
