#ifndef E0A_DIFFERENCE_SYSTEM_HPP
#define E0A_DIFFERENCE_SYSTEM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "e0a/gf2_poly.hpp"

// Explicit difference systems over GF(2): state evolution, the transition
// endomorphism and its partial variants, Groebner-based invertibility with
// inverse-system extraction, and state reversal through the inverse system.

namespace e0a::dsys {

struct StreamDef {
    gf2::Stream id;
    uint32_t order;          // window length r_i >= 1
    gf2::BoolPoly feedback;  // over the initial windows of all streams
};

struct DiffSystem {
    std::vector<StreamDef> streams;
    std::optional<gf2::BoolPoly> keystream_poly;

    uint32_t state_width() const;
    // offset of stream s's window inside a SystemState, by list position
    uint32_t window_offset(size_t stream_index) const;
    int stream_index_of(gf2::Stream id) const;  // -1 if absent
};

// bits laid out stream by stream in window order: stream 0's window first,
// position k inside a window holds x_i(t+k)
struct SystemState {
    std::vector<uint8_t> bits;

    bool operator==(const SystemState& o) const { return bits == o.bits; }
};

// one clock of evolution: windows shift down, the vacated top cell takes the
// feedback value
SystemState step(const DiffSystem& sys, const SystemState& v);

// evaluate a polynomial over the initial-window variables at a state
int evaluate_state(const DiffSystem& sys, const SystemState& v, const gf2::BoolPoly& p);

// the full transition endomorphism: x_i(k) -> x_i(k+1) below the window top,
// x_i(r_i - 1) -> f_i
gf2::BoolPoly transition_endo(const DiffSystem& sys, const gf2::BoolPoly& p);

// the partial endomorphism: the first m streams step through their feedback,
// the rest are shifted verbatim to any clock
gf2::BoolPoly partial_transition_endo(const DiffSystem& sys, size_t m, const gf2::BoolPoly& p);

// Invertibility test and inverse-system derivation.  Builds the doubled ring
// on the window variables and their shadows, computes the reduced Groebner
// basis of the graph ideal under a product order (originals first), and reads
// the inverse feedbacks off the triangular basis through the per-window
// reversal isomorphism.  nullopt is the definite answer "not invertible".
std::optional<DiffSystem> invert(const DiffSystem& sys);

// initial state u with step^t(u) = v, computed on the inverse system:
// reverse each window, run inv forward t clocks, reverse again
SystemState reverse_state(const DiffSystem& sys, const DiffSystem& inv, const SystemState& v,
                          uint64_t t);

// text format, one stream per line:
//   stream x 25 = x0 + x5 + x13 + x17
//   keystream = x1 + y7 + z1 + u7 + c1
std::string to_string(const DiffSystem& sys);
DiffSystem parse_system(const std::string& text);
DiffSystem load_system_file(const std::string& path);

}  // namespace e0a::dsys

#endif
