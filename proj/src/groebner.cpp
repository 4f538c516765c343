#include "e0a/groebner.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace e0a::gb {

using gf2::Assignment;
using gf2::BoolPoly;
using gf2::Monomial;
using gf2::MonomialOrder;
using gf2::VarKey;

namespace {

using MVec = std::vector<Monomial>;  // descending under the active order

// 64-bit divisibility pre-filter: sig(d) & ~sig(m) != 0 rules out d | m
uint64_t signature(const Monomial& m) {
    uint64_t s = 0;
    for (VarKey k : m.keys()) s |= uint64_t{1} << (k % 61);
    return s;
}

struct Engine {
    const MonomialOrder& order;
    const EarlyExit exits;
    const Budget budget;
    const std::vector<BoolPoly>& input;

    struct Elem {
        MVec poly;  // descending, poly[0] is the leading monomial
        uint64_t lm_sig;
        bool active = true;
    };
    std::vector<Elem> elems;
    std::vector<uint32_t> active_ids;
    // reducer index: active elements bucketed by the smallest variable of
    // their leading monomial (a divisor's smallest variable must occur in the
    // reduced monomial); retired entries are lazily skipped
    std::unordered_map<VarKey, std::vector<uint32_t>> reducer_bucket;

    enum class ItemKind : uint8_t { SPair = 0, Field = 1, Raw = 2 };
    struct Item {
        int deg;
        uint32_t cost;  // combined size of the polynomials involved
        Monomial key;   // lcm for pairs, leading monomial otherwise
        ItemKind kind;
        uint32_t i = 0, j = 0;
        VarKey fvar = 0;
        MVec raw;
        uint64_t seq = 0;
    };
    struct ItemCmp {
        const MonomialOrder* ord;
        // priority_queue pops the maximum; we want the smallest item first:
        // lowest lcm degree, then cheapest, so short chains of near-linear
        // elements propagate before any dense pair is touched
        bool operator()(const Item& a, const Item& b) const {
            if (a.deg != b.deg) return a.deg > b.deg;
            if (a.cost != b.cost) return a.cost > b.cost;
            int c = ord->compare(a.key, b.key);
            if (c != 0) return c > 0;
            if (a.kind != b.kind) return a.kind > b.kind;
            if (a.i != b.i) return a.i > b.i;
            if (a.j != b.j) return a.j > b.j;
            if (a.fvar != b.fvar) return a.fvar > b.fvar;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Item, std::vector<Item>, ItemCmp> queue;
    uint64_t seq_counter = 0;
    size_t raw_pending = 0;

    // queued classical pairs by packed (i, j), kept for the update criteria
    std::unordered_map<uint64_t, Monomial> alive_pairs;

    uint64_t items_processed = 0;
    uint64_t reduction_steps = 0;
    size_t linear_headed = 0;  // distinct universe vars heading a linear element
    std::vector<uint8_t> linear_var_seen;
    bool inconsistent = false;
    bool solved_exit = false;
    bool unit_exit = false;

    Engine(const IdealBasis& ideal, const EarlyExit& e, const Budget& b)
        : order(ideal.order),
          exits(e),
          budget(b),
          input(ideal.gens),
          queue(ItemCmp{&ideal.order}) {
        linear_var_seen.assign(0xE000, 0);
    }

    bool desc(const Monomial& a, const Monomial& b) const { return order.compare(a, b) > 0; }

    MVec to_mvec(const BoolPoly& p) const {
        MVec v(p.monomials().begin(), p.monomials().end());
        if (!order.is_canonical_compatible()) {
            std::sort(v.begin(), v.end(),
                      [this](const Monomial& a, const Monomial& b) { return desc(a, b); });
        }
        return v;
    }

    // p * m in the boolean ring; unsorted, duplicates left to the XOR heap
    MVec mul_unsorted(const MVec& p, const Monomial& m) const {
        MVec out;
        out.reserve(p.size());
        for (const auto& t : p) out.push_back(t.mul(m));
        return out;
    }

    void bump_steps() {
        if (++reduction_steps > budget.max_reduction_steps) {
            throw BudgetExceeded("groebner: reduction step cap exceeded");
        }
    }

    const Elem* find_reducer(const Monomial& m, uint64_t msig) const {
        const Elem* chosen = nullptr;
        for (VarKey k : m.keys()) {
            auto it = reducer_bucket.find(k);
            if (it == reducer_bucket.end()) continue;
            for (uint32_t id : it->second) {
                const Elem& e = elems[id];
                if (!e.active) continue;
                if ((e.lm_sig & ~msig) != 0) continue;
                if (!e.poly[0].divides(m)) continue;
                if (!chosen || e.poly.size() < chosen->poly.size() ||
                    (e.poly.size() == chosen->poly.size() && &e < chosen)) {
                    chosen = &e;
                }
            }
        }
        return chosen;
    }

    // Full normal form.  The working polynomial lives in a lazy XOR heap: a
    // max-heap where a monomial's multiplicity mod 2 decides whether it is
    // present, so each reduction step costs the reducer-tail size, not the
    // size of the whole intermediate polynomial.
    struct HeapCmp {
        const MonomialOrder* ord;
        bool operator()(const Monomial& a, const Monomial& b) const {
            return ord->compare(a, b) < 0;  // max-heap
        }
    };
    MVec normal_form(MVec work) {
        std::priority_queue<Monomial, std::vector<Monomial>, HeapCmp> heap{HeapCmp{&order}};
        for (auto& m : work) heap.push(std::move(m));
        MVec out;
        while (!heap.empty()) {
            Monomial m = heap.top();
            heap.pop();
            bool present = true;
            while (!heap.empty() && heap.top() == m) {
                heap.pop();
                present = !present;
            }
            if (!present) continue;
            const Elem* chosen = find_reducer(m, signature(m));
            if (!chosen) {
                out.push_back(std::move(m));
                continue;
            }
            bump_steps();
            Monomial cof = m.quotient(chosen->poly[0]);
            if (cof.is_one()) {
                for (size_t t = 1; t < chosen->poly.size(); ++t) heap.push(chosen->poly[t]);
            } else {
                for (size_t t = 1; t < chosen->poly.size(); ++t) {
                    heap.push(chosen->poly[t].mul(cof));
                }
            }
        }
        return out;
    }

    static uint64_t pair_code(uint32_t i, uint32_t j) {
        if (i > j) std::swap(i, j);
        return (uint64_t{i} << 32) | j;
    }

    void push_field_pairs(uint32_t i) {
        const Monomial& lm = elems[i].poly[0];
        // affine elements never carry their head variable in the tail, and
        // v*(v + tail) then reduces to zero by the element itself
        if (lm.degree() < 2) return;
        uint32_t cost = static_cast<uint32_t>(elems[i].poly.size());
        for (VarKey v : lm.keys()) {
            queue.push(Item{lm.degree(), cost, lm, ItemKind::Field, i, 0, v, {}, seq_counter++});
        }
    }

    void note_linear_head(const Monomial& lm) {
        if (lm.degree() == 1) {
            VarKey v = lm.keys()[0];
            if (!linear_var_seen[v]) {
                linear_var_seen[v] = 1;
                ++linear_headed;
            }
        }
    }

    // A pinned variable (an element v or v + 1) acts as a strictly shrinking
    // substitution.  Folding it into the stale tails of the other elements
    // keeps reducer chains short; leading monomials are untouched since any
    // element led by a v-multiple was just retired.
    void retro_substitute(uint32_t id) {
        const MVec& p = elems[id].poly;
        if (p[0].degree() != 1 || p.size() > 2) return;
        if (p.size() == 2 && !p[1].is_one()) return;
        VarKey v = p[0].keys()[0];
        for (uint32_t other : active_ids) {
            if (other == id) continue;
            Elem& e = elems[other];
            bool touched = false;
            for (size_t t = 1; t < e.poly.size() && !touched; ++t) {
                touched = e.poly[t].contains(v);
            }
            if (!touched) continue;
            MVec rewritten;
            rewritten.reserve(e.poly.size());
            rewritten.push_back(e.poly[0]);
            for (size_t t = 1; t < e.poly.size(); ++t) {
                const Monomial& m = e.poly[t];
                if (!m.contains(v)) {
                    rewritten.push_back(m);
                    continue;
                }
                Monomial rest = m.quotient(p[0]);
                if (p.size() == 2) rewritten.push_back(rest.mul(p[1]));
                // v + 0 = 0 drops the monomial entirely
            }
            // cancel duplicates created by the rewrite, keep descending
            std::sort(rewritten.begin() + 1, rewritten.end(),
                      [this](const Monomial& a, const Monomial& b) { return desc(a, b); });
            MVec dedup;
            dedup.reserve(rewritten.size());
            dedup.push_back(std::move(rewritten[0]));
            size_t t = 1;
            while (t < rewritten.size()) {
                size_t u = t + 1;
                while (u < rewritten.size() && rewritten[u] == rewritten[t]) ++u;
                if ((u - t) % 2 == 1) dedup.push_back(std::move(rewritten[t]));
                t = u;
            }
            e.poly.swap(dedup);
        }
    }

    // classical pair bookkeeping with the update criteria: among the new
    // pairs keep one representative per least common multiple, drop classes
    // witnessed by a coprime pair or by a strictly smaller new lcm, and prune
    // queued pairs whose lcm the new leading monomial refines
    void update_pairs(uint32_t t) {
        const Monomial& lm_t = elems[t].poly[0];
        uint64_t sig_t = elems[t].lm_sig;

        struct Cand {
            Monomial lcm;
            uint32_t i;
            bool coprime;
        };
        std::vector<Cand> cands;
        cands.reserve(active_ids.size());
        for (uint32_t i : active_ids) {
            if (i == t) continue;
            const Monomial& lm_i = elems[i].poly[0];
            cands.push_back({lm_i.mul(lm_t), i, lm_i.disjoint(lm_t)});
        }

        // prune queued pairs strictly refined by the new element
        for (auto it = alive_pairs.begin(); it != alive_pairs.end();) {
            const Monomial& lcm_ij = it->second;
            uint32_t i = static_cast<uint32_t>(it->first >> 32);
            uint32_t j = static_cast<uint32_t>(it->first);
            bool drop = false;
            if ((sig_t & ~signature(lcm_ij)) == 0 && lm_t.divides(lcm_ij)) {
                Monomial lcm_it = elems[i].poly[0].mul(lm_t);
                Monomial lcm_jt = elems[j].poly[0].mul(lm_t);
                drop = !(lcm_it == lcm_ij) && !(lcm_jt == lcm_ij);
            }
            if (drop) {
                it = alive_pairs.erase(it);
            } else {
                ++it;
            }
        }

        // keep only minimal lcms among the new pairs
        std::sort(cands.begin(), cands.end(), [this](const Cand& a, const Cand& b) {
            int c = order.compare(a.lcm, b.lcm);
            if (c != 0) return c < 0;
            return a.i < b.i;
        });
        std::vector<Cand> kept;
        for (size_t ci = 0; ci < cands.size();) {
            size_t cj = ci;
            bool coprime_in_class = false;
            while (cj < cands.size() && cands[cj].lcm == cands[ci].lcm) {
                coprime_in_class |= cands[cj].coprime;
                ++cj;
            }
            bool dominated = false;
            for (const Cand& k : kept) {
                if (k.lcm.divides(cands[ci].lcm)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated && !coprime_in_class) kept.push_back(cands[ci]);
            if (!dominated && coprime_in_class) {
                // the whole class reduces to zero by the product criterion
            }
            ci = cj;
        }
        for (const Cand& k : kept) {
            alive_pairs.emplace(pair_code(k.i, t), k.lcm);
            uint32_t cost = static_cast<uint32_t>(elems[k.i].poly.size() + elems[t].poly.size());
            queue.push(Item{k.lcm.degree(), cost, k.lcm, ItemKind::SPair, std::min(k.i, t),
                            std::max(k.i, t), 0, {}, seq_counter++});
        }
    }

    // insert a fully reduced nonzero element
    void insert(MVec h) {
        if (h.empty()) return;
        if (h[0].is_one()) {
            inconsistent = true;
            if (exits.stop_on_unit) unit_exit = true;
            return;
        }
        uint32_t id = static_cast<uint32_t>(elems.size());
        uint64_t sig = signature(h[0]);
        // retire actives whose leading monomial the new one divides; their
        // content re-enters the queue for re-reduction
        std::vector<uint32_t> kept;
        kept.reserve(active_ids.size() + 1);
        for (uint32_t other : active_ids) {
            Elem& e = elems[other];
            if ((sig & ~e.lm_sig) == 0 && h[0].divides(e.poly[0])) {
                e.active = false;
                queue.push(Item{e.poly[0].degree(), static_cast<uint32_t>(e.poly.size()),
                                e.poly[0], ItemKind::Raw, other, 0, 0, e.poly, seq_counter++});
                ++raw_pending;
                for (auto it = alive_pairs.begin(); it != alive_pairs.end();) {
                    uint32_t pi = static_cast<uint32_t>(it->first >> 32);
                    uint32_t pj = static_cast<uint32_t>(it->first);
                    it = (pi == other || pj == other) ? alive_pairs.erase(it) : std::next(it);
                }
            } else {
                kept.push_back(other);
            }
        }
        active_ids.swap(kept);
        elems.push_back(Elem{std::move(h), sig, true});
        active_ids.push_back(id);
        reducer_bucket[elems[id].poly[0].keys()[0]].push_back(id);
        update_pairs(id);
        push_field_pairs(id);
        note_linear_head(elems[id].poly[0]);
        retro_substitute(id);
    }

    // With every universe variable linear-headed the basis pins down a single
    // candidate point.  Pending items could still hide an inconsistency, so
    // the exit is only taken once the point checks out against the inputs.
    bool try_solved_exit() {
        if (!exits.stop_on_all_vars_linear) return false;
        if (raw_pending != 0) return false;
        if (linear_headed < order.universe_keys().size()) return false;
        Assignment point;
        if (!solve_linear_point(point)) return false;
        for (const auto& g : input) {
            if (evaluate_at(g, point) != 0) return false;
        }
        solved_exit = true;
        return true;
    }

    bool solve_linear_point(Assignment& point) {
        // heads in ascending order: tails hold only smaller monomials, so one
        // forward pass resolves every variable
        std::vector<uint32_t> lin;
        for (uint32_t id : active_ids) {
            if (elems[id].poly[0].degree() == 1) lin.push_back(id);
        }
        std::sort(lin.begin(), lin.end(), [this](uint32_t a, uint32_t b) {
            return order.compare(elems[a].poly[0], elems[b].poly[0]) < 0;
        });
        for (uint32_t id : lin) {
            const MVec& p = elems[id].poly;
            int acc = 0;
            for (size_t t = 1; t < p.size(); ++t) {
                int prod = 1;
                for (VarKey k : p[t].keys()) {
                    if (!point.has(k)) return false;
                    if (point.get(k) == 0) {
                        prod = 0;
                        break;
                    }
                }
                acc ^= prod;
            }
            point.set_key(p[0].keys()[0], acc);
        }
        return point.size() == order.universe_keys().size();
    }

    static int evaluate_at(const BoolPoly& g, const Assignment& a) {
        int acc = 0;
        for (const auto& m : g.monomials()) {
            int prod = 1;
            for (VarKey k : m.keys()) {
                if (a.get_or(k, 0) == 0) {
                    prod = 0;
                    break;
                }
            }
            acc ^= prod;
        }
        return acc;
    }

    void run() {
        for (const auto& g : input) {
            if (g.is_zero()) continue;
            insert(normal_form(to_mvec(g)));
            if (inconsistent) return;
        }
        if (try_solved_exit()) return;

        const bool trace = std::getenv("E0A_GB_TRACE") != nullptr;
        while (!queue.empty()) {
            if (++items_processed > budget.max_pair_reductions) {
                throw BudgetExceeded("groebner: pair reduction cap exceeded");
            }
            Item item = queue.top();
            queue.pop();
            if (trace && items_processed % 2000 == 0) {
                size_t maxterms = 0, terms = 0;
                for (uint32_t id : active_ids) {
                    maxterms = std::max(maxterms, elems[id].poly.size());
                    terms += elems[id].poly.size();
                }
                std::fprintf(stderr,
                             "gb: items=%llu steps=%llu elems=%zu active=%zu queue=%zu "
                             "itemdeg=%d terms=%zu max=%zu\n",
                             (unsigned long long)items_processed,
                             (unsigned long long)reduction_steps, elems.size(),
                             active_ids.size(), queue.size(), item.deg, terms, maxterms);
            }
            if (item.kind == ItemKind::Raw) --raw_pending;

            MVec reduced;
            if (item.kind == ItemKind::SPair) {
                auto alive = alive_pairs.find(pair_code(item.i, item.j));
                if (alive == alive_pairs.end()) continue;  // pruned or superseded
                if (!elems[item.i].active || !elems[item.j].active) {
                    alive_pairs.erase(alive);
                    continue;
                }
                alive_pairs.erase(alive);
                const MVec& f = elems[item.i].poly;
                const MVec& g = elems[item.j].poly;
                MVec s = mul_unsorted(f, item.key.quotient(f[0]));
                MVec s2 = mul_unsorted(g, item.key.quotient(g[0]));
                s.insert(s.end(), s2.begin(), s2.end());  // heap-normalized below
                reduced = normal_form(std::move(s));
            } else if (item.kind == ItemKind::Field) {
                if (!elems[item.i].active) continue;
                // v * f for v in lm(f): the square collapse exposes ideal
                // elements the classical pairs miss
                Monomial v(Monomial::Keys{item.fvar});
                reduced = normal_form(mul_unsorted(elems[item.i].poly, v));
            } else {
                reduced = normal_form(std::move(item.raw));
            }
            if (reduced.empty()) continue;
            insert(std::move(reduced));
            if (inconsistent) return;  // the reduced basis is {1} regardless of the rest
            if (try_solved_exit()) return;
        }
    }

    // minimalize, inter-reduce tails, and emit the reduced basis in ascending
    // leading-monomial order
    std::vector<BoolPoly> finalize() {
        if (inconsistent) return {BoolPoly::one()};
        std::sort(active_ids.begin(), active_ids.end(), [this](uint32_t a, uint32_t b) {
            int c = order.compare(elems[a].poly[0], elems[b].poly[0]);
            return c != 0 ? c < 0 : a < b;
        });
        // ascending scan: a divisor of a leading monomial is never behind it
        std::vector<uint32_t> minimal;
        for (uint32_t id : active_ids) {
            bool redundant = false;
            for (uint32_t k : minimal) {
                if ((elems[k].lm_sig & ~elems[id].lm_sig) == 0 &&
                    elems[k].poly[0].divides(elems[id].poly[0])) {
                    redundant = true;
                    break;
                }
            }
            if (redundant) {
                elems[id].active = false;
            } else {
                minimal.push_back(id);
            }
        }
        active_ids.swap(minimal);
        // ascending pass: reducers of a tail always have smaller heads, so
        // they are already fully reduced when used
        for (size_t idx = 0; idx < active_ids.size(); ++idx) {
            Elem& e = elems[active_ids[idx]];
            if (e.poly.size() <= 1) continue;
            Monomial head = e.poly[0];
            MVec tail(e.poly.begin() + 1, e.poly.end());
            e.active = false;  // do not reduce by itself
            MVec nf = normal_form(std::move(tail));
            e.active = true;
            e.poly.clear();
            e.poly.push_back(std::move(head));
            e.poly.insert(e.poly.end(), nf.begin(), nf.end());
        }
        std::vector<BoolPoly> out;
        out.reserve(active_ids.size());
        for (uint32_t id : active_ids) {
            out.push_back(BoolPoly::from_monomials(
                BoolPoly::Monomials(elems[id].poly.begin(), elems[id].poly.end())));
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// standard monomial counting / solution enumeration

struct Staircase {
    std::vector<VarKey> free_vars;                 // universe vars without a linear head
    std::vector<std::vector<VarKey>> forbidden;    // leading monomials of degree >= 2
    std::vector<const BoolPoly*> linear_elems;     // heads cover the non-free vars
    std::vector<const BoolPoly*> nonlinear_elems;  // supported on free vars only
    bool unit_ideal = false;
};

Staircase staircase_of(const GroebnerResult& res) {
    Staircase s;
    if (res.basis.empty()) {
        s.free_vars = res.order.universe_keys();
        std::sort(s.free_vars.begin(), s.free_vars.end());
        return s;
    }
    if (res.basis.size() == 1 && res.basis[0].is_one()) {
        s.unit_ideal = true;
        return s;
    }
    std::vector<uint8_t> headed(0xE000, 0);
    for (const auto& g : res.basis) {
        const Monomial* lm = &g.monomials().front();
        // basis elements are stored canonically; recover the order's view
        if (!res.order.is_canonical_compatible()) {
            for (const auto& m : g.monomials()) {
                if (res.order.compare(m, *lm) > 0) lm = &m;
            }
        }
        if (lm->degree() == 1) {
            headed[lm->keys()[0]] = 1;
            s.linear_elems.push_back(&g);
        } else {
            s.forbidden.emplace_back(lm->keys().begin(), lm->keys().end());
            s.nonlinear_elems.push_back(&g);
        }
    }
    for (VarKey k : res.order.universe_keys()) {
        if (!headed[k]) s.free_vars.push_back(k);
    }
    std::sort(s.free_vars.begin(), s.free_vars.end());
    return s;
}

constexpr uint64_t kDimensionCap = uint64_t{1} << 26;

// DFS over subsets of the free variables avoiding the forbidden monomials
uint64_t count_standard(const Staircase& s, bool* exact) {
    *exact = true;
    if (s.unit_ideal) return 0;
    if (s.forbidden.empty()) {
        if (s.free_vars.size() >= 26) {
            *exact = false;
            return kDimensionCap;
        }
        return uint64_t{1} << s.free_vars.size();
    }
    std::vector<uint8_t> chosen(0xE000, 0);
    uint64_t count = 0;
    struct Frame {
        size_t depth;
        int phase;  // 0: descend excluding, 1: descend including, 2: unwind
    };
    std::vector<Frame> stack;
    stack.push_back({0, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.depth == s.free_vars.size()) {
            ++count;
            if (count >= kDimensionCap) {
                *exact = false;
                return kDimensionCap;
            }
            stack.pop_back();
            continue;
        }
        VarKey v = s.free_vars[f.depth];
        if (f.phase == 0) {
            f.phase = 1;
            stack.push_back({f.depth + 1, 0});
        } else if (f.phase == 1) {
            chosen[v] = 1;
            bool ok = true;
            for (const auto& fm : s.forbidden) {
                if (fm.back() != v) continue;  // completed only when v is its top
                bool all = true;
                for (VarKey k : fm) {
                    if (!chosen[k]) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    ok = false;
                    break;
                }
            }
            f.phase = 2;
            if (ok) {
                stack.push_back({f.depth + 1, 0});
            } else {
                chosen[v] = 0;
                stack.pop_back();
            }
        } else {
            chosen[v] = 0;
            stack.pop_back();
        }
    }
    return count;
}

}  // namespace

GroebnerResult buchberger(const IdealBasis& ideal, const EarlyExit& exits, const Budget& budget) {
    Engine eng(ideal, exits, budget);
    eng.run();
    GroebnerResult res;
    res.order = ideal.order;
    res.pair_reductions = eng.items_processed;
    res.reduction_steps = eng.reduction_steps;
    res.basis_elements = eng.elems.size();
    res.early_exit_taken = eng.unit_exit || eng.solved_exit;
    res.basis = eng.finalize();
    if (eng.inconsistent) {
        res.status = GbStatus::Inconsistent;
        res.degree = 0;
        res.dimension = 0;
        return res;
    }
    res.status = eng.solved_exit ? GbStatus::Solved : GbStatus::Finished;
    res.degree = 0;
    for (const auto& g : res.basis) res.degree = std::max(res.degree, g.degree());
    Staircase s = staircase_of(res);
    res.dimension = count_standard(s, &res.dimension_exact);
    return res;
}

uint64_t count_solutions(const GroebnerResult& res) {
    if (!res.dimension_exact) {
        throw TooManySolutions("solution count exceeds the desk-scale cap");
    }
    return res.dimension;
}

std::vector<Assignment> enumerate_solutions(const GroebnerResult& res, uint64_t limit) {
    if (!res.dimension_exact || res.dimension > limit) {
        throw TooManySolutions("variety larger than the requested limit");
    }
    std::vector<Assignment> out;
    if (res.dimension == 0) return out;
    Staircase s = staircase_of(res);

    // group the nonlinear constraints under the largest free variable they
    // mention, so each is checked as soon as it is fully assigned
    std::vector<std::vector<const BoolPoly*>> checks(s.free_vars.size());
    auto var_pos = [&](VarKey k) {
        return static_cast<size_t>(
            std::lower_bound(s.free_vars.begin(), s.free_vars.end(), k) - s.free_vars.begin());
    };
    for (const BoolPoly* g : s.nonlinear_elems) {
        VarKey maxv = 0;
        for (const auto& m : g->monomials()) {
            for (VarKey k : m.keys()) maxv = std::max(maxv, k);
        }
        checks[var_pos(maxv)].push_back(g);
    }

    Assignment partial;
    // backtracking over the free variables with constraint propagation
    std::function<void(size_t)> dfs = [&](size_t depth) {
        if (depth == s.free_vars.size()) {
            Assignment full = partial;
            std::vector<const BoolPoly*> lin = s.linear_elems;
            std::sort(lin.begin(), lin.end(), [&](const BoolPoly* a, const BoolPoly* b) {
                return res.order.compare(a->monomials().front(), b->monomials().front()) < 0;
            });
            for (const BoolPoly* g : lin) {
                const Monomial* lm = &g->monomials().front();
                if (!res.order.is_canonical_compatible()) {
                    for (const auto& m : g->monomials()) {
                        if (res.order.compare(m, *lm) > 0) lm = &m;
                    }
                }
                int acc = 0;
                for (const auto& m : g->monomials()) {
                    if (m == *lm) continue;
                    int prod = 1;
                    for (VarKey k : m.keys()) {
                        if (full.get_or(k, 0) == 0) {
                            prod = 0;
                            break;
                        }
                    }
                    acc ^= prod;
                }
                full.set_key(lm->keys()[0], acc);
            }
            out.push_back(std::move(full));
            return;
        }
        for (int bit = 0; bit <= 1; ++bit) {
            partial.set_key(s.free_vars[depth], bit);
            bool ok = true;
            for (const BoolPoly* g : checks[depth]) {
                int acc = 0;
                for (const auto& m : g->monomials()) {
                    int prod = 1;
                    for (VarKey k : m.keys()) {
                        if (partial.get_or(k, 0) == 0) {
                            prod = 0;
                            break;
                        }
                    }
                    acc ^= prod;
                }
                if (acc != 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) dfs(depth + 1);
        }
    };
    dfs(0);
    std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
        return a.sorted() < b.sorted();
    });
    return out;
}

}  // namespace e0a::gb
