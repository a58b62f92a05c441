#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "meshfwd/types.hpp"

namespace meshfwd::markov {

// End-to-end progress chain for n node-disjoint paths of m hops each. A
// state records how many hops every path's packet has traversed; each
// slot every unfinished path advances by one hop with probability 1-e,
// independently. The chain absorbs once at least k paths have finished.
struct AbsorptionProblem {
    int n = 1;       // parallel paths
    int m = 1;       // hops per path
    int k = 1;       // finished paths required for absorption
    double e = 0.0;  // per-hop error probability
    std::uint64_t state_budget = 1'000'000;  // cap on (m+1)^n
};

// Path progress vector, one digit in [0, m] per path.
using State = std::vector<int>;

struct StateBudgetError : std::runtime_error {
    StateBudgetError(std::uint64_t required, std::uint64_t budget);
    std::uint64_t required;
    std::uint64_t budget;
};

// Mixed-radix encoding: index = sum_i s[i] * (m+1)^i.
std::uint64_t encode_state(const State& s, int m);
State decode_state(std::uint64_t index, int n, int m);

struct StateSpace {
    std::uint64_t total_states = 0;           // (m+1)^n
    std::uint64_t absorbing_count = 0;        // states with >= k finished paths
    std::vector<std::uint64_t> transient;     // mixed-radix indices, ascending
    std::vector<std::int64_t> transient_row;  // full index -> row, -1 absorbing
};

// Enumerates the full state space. Throws StateBudgetError when (m+1)^n
// exceeds the budget.
StateSpace enumerate_states(const AbsorptionProblem& p);

// One-slot transition probability. Zero unless every path either holds its
// position or advances one hop (finished paths hold); otherwise
// (1-e)^advanced * e^(unfinished - advanced). Absorbing states self-loop.
double transition_prob(const State& from, const State& to,
                       const AbsorptionProblem& p);

enum class SolveMethod {
    Auto,        // Recurrence
    DenseLU,     // (I - P) t = 1 by partial-pivoting elimination, <= 5000 rows
    Recurrence,  // exact sweep in decreasing total-progress order
};

// Expected slots from the all-zero state to absorption. Every transition
// leaving a state strictly increases total progress except the self-loop,
// so t(S) = (1 + sum P(S,S') t(S')) / (1 - P(S,S)) evaluated in decreasing
// progress order is exact; the dense route solves the same linear system
// directly and is kept as an independent check. Returns infinity at e = 1.
double expected_absorption_time(const AbsorptionProblem& p,
                                SolveMethod method = SolveMethod::Auto);

struct SchemeParams {
    int n = 3;
    int m = 2;
    double e = 0.0;
    int k = 2;                  // generation size for the coding schemes
    bool strict_paths = false;  // require n = 2^k - 1 for coding schemes
    std::uint64_t state_budget = 1'000'000;
};

// Per-scheme delay and throughput on the n x m grid:
//   SP    one path of m hops                    (1 packet / delivery)
//   MP    n independent paths, delay of one     (n packets / delivery)
//   MC    n copies, first arrival wins          (1 packet / delivery)
//   NC    n coded packets, k arrivals decode    (k packets / delivery)
//   NC_L  alias of NC; NC_U needs k+1 arrivals  (k packets / delivery)
SchemeResult evaluate_scheme(Scheme scheme, const SchemeParams& p);

// Evaluates several schemes and fills the ratios against SP.
SchemeResults evaluate_schemes(const std::vector<Scheme>& schemes,
                               const SchemeParams& p);

}  // namespace meshfwd::markov
