#include "meshfwd/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace meshfwd::markov {

namespace {

void validate(const AbsorptionProblem& p) {
    if (p.n < 1 || p.m < 1 || p.k < 1 || p.k > p.n) {
        throw std::invalid_argument("absorption problem: need n >= 1, m >= 1, 1 <= k <= n");
    }
    if (p.e < 0.0 || p.e > 1.0) {
        throw std::invalid_argument("absorption problem: e outside [0,1]");
    }
}

std::uint64_t checked_state_count(const AbsorptionProblem& p) {
    const double radix = static_cast<double>(p.m) + 1.0;
    if (p.n * std::log(radix) > std::log(2.0) * 62.0) {
        throw StateBudgetError(UINT64_MAX, p.state_budget);
    }
    std::uint64_t total = 1;
    for (int i = 0; i < p.n; ++i) total *= static_cast<std::uint64_t>(p.m) + 1;
    if (total > p.state_budget) {
        throw StateBudgetError(total, p.state_budget);
    }
    return total;
}

int finished_count(const State& s, int m) {
    int fin = 0;
    for (int v : s) fin += (v == m);
    return fin;
}

constexpr std::size_t kDenseLimit = 5000;

}  // namespace

StateBudgetError::StateBudgetError(std::uint64_t required_, std::uint64_t budget_)
    : std::runtime_error("state space needs " +
                         (required_ == UINT64_MAX ? std::string("more than 2^62")
                                                  : std::to_string(required_)) +
                         " states, budget is " + std::to_string(budget_)),
      required(required_),
      budget(budget_) {}

std::uint64_t encode_state(const State& s, int m) {
    std::uint64_t index = 0;
    std::uint64_t weight = 1;
    for (int v : s) {
        index += weight * static_cast<std::uint64_t>(v);
        weight *= static_cast<std::uint64_t>(m) + 1;
    }
    return index;
}

State decode_state(std::uint64_t index, int n, int m) {
    State s(n);
    const std::uint64_t radix = static_cast<std::uint64_t>(m) + 1;
    for (int i = 0; i < n; ++i) {
        s[i] = static_cast<int>(index % radix);
        index /= radix;
    }
    return s;
}

StateSpace enumerate_states(const AbsorptionProblem& p) {
    validate(p);
    const std::uint64_t total = checked_state_count(p);

    StateSpace space;
    space.total_states = total;
    space.transient_row.assign(total, -1);

    State digits(p.n, 0);
    int fin = 0;
    for (std::uint64_t f = 0; f < total; ++f) {
        if (fin >= p.k) {
            ++space.absorbing_count;
        } else {
            space.transient_row[f] = static_cast<std::int64_t>(space.transient.size());
            space.transient.push_back(f);
        }
        // Increment the mixed-radix counter, keeping the finished tally.
        for (int i = 0; i < p.n; ++i) {
            if (digits[i] == p.m) {
                digits[i] = 0;
                --fin;
                continue;
            }
            ++digits[i];
            if (digits[i] == p.m) ++fin;
            break;
        }
    }
    return space;
}

double transition_prob(const State& from, const State& to,
                       const AbsorptionProblem& p) {
    validate(p);
    if (from.size() != static_cast<std::size_t>(p.n) ||
        to.size() != static_cast<std::size_t>(p.n)) {
        throw std::invalid_argument("transition_prob: state size mismatch");
    }
    for (int v : from) {
        if (v < 0 || v > p.m) throw std::invalid_argument("transition_prob: bad state");
    }
    for (int v : to) {
        if (v < 0 || v > p.m) throw std::invalid_argument("transition_prob: bad state");
    }
    const int fin = finished_count(from, p.m);
    if (fin >= p.k) {
        return from == to ? 1.0 : 0.0;
    }
    int advanced = 0;
    for (int i = 0; i < p.n; ++i) {
        const int d = to[i] - from[i];
        if (d < 0 || d > 1) return 0.0;
        if (from[i] == p.m && d != 0) return 0.0;
        advanced += d;
    }
    const int unfinished = p.n - fin;
    return std::pow(1.0 - p.e, advanced) * std::pow(p.e, unfinished - advanced);
}

namespace {

// Shared transition walk: for each transient row, visits every non-empty
// advance subset with its probability and target row (-1 when absorbing).
struct ChainLayout {
    const AbsorptionProblem& p;
    StateSpace space;
    std::vector<std::uint64_t> weights;   // (m+1)^i
    std::vector<double> pow_ok, pow_err;  // (1-e)^j, e^j

    explicit ChainLayout(const AbsorptionProblem& prob)
        : p(prob), space(enumerate_states(prob)) {
        weights.resize(p.n);
        std::uint64_t w = 1;
        for (int i = 0; i < p.n; ++i) {
            weights[i] = w;
            w *= static_cast<std::uint64_t>(p.m) + 1;
        }
        pow_ok.resize(p.n + 1);
        pow_err.resize(p.n + 1);
        pow_ok[0] = pow_err[0] = 1.0;
        for (int j = 1; j <= p.n; ++j) {
            pow_ok[j] = pow_ok[j - 1] * (1.0 - p.e);
            pow_err[j] = pow_err[j - 1] * p.e;
        }
    }

    // visit(target_row, probability); self-loop excluded. Returns the
    // self-loop probability e^unfinished.
    template <typename Visit>
    double for_each_successor(std::size_t row, Visit&& visit) const {
        const std::uint64_t f = space.transient[row];
        State digits = decode_state(f, p.n, p.m);
        int unfinished_idx[64];
        int u = 0;
        for (int i = 0; i < p.n; ++i) {
            if (digits[i] < p.m) unfinished_idx[u++] = i;
        }
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << u); ++mask) {
            std::uint64_t target = f;
            for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
                target += weights[unfinished_idx[std::countr_zero(bits)]];
            }
            const int adv = std::popcount(mask);
            const double prob = pow_ok[adv] * pow_err[u - adv];
            visit(space.transient_row[target], prob);
        }
        return pow_err[u];
    }
};

double solve_recurrence(const ChainLayout& chain) {
    const auto& transient = chain.space.transient;
    const std::size_t rows = transient.size();

    // Rows sorted by decreasing total progress; successors of a state have
    // strictly larger progress, so one sweep suffices.
    std::vector<int> progress(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        State s = decode_state(transient[r], chain.p.n, chain.p.m);
        int sum = 0;
        for (int v : s) sum += v;
        progress[r] = sum;
    }
    std::vector<std::size_t> order(rows);
    for (std::size_t r = 0; r < rows; ++r) order[r] = r;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return progress[a] > progress[b];
    });

    std::vector<double> t(rows, 0.0);
    for (std::size_t r : order) {
        double acc = 1.0;
        const double self = chain.for_each_successor(r, [&](std::int64_t row, double prob) {
            if (row >= 0) acc += prob * t[static_cast<std::size_t>(row)];
        });
        t[r] = acc / (1.0 - self);
    }
    return t[0];
}

double solve_dense(const ChainLayout& chain) {
    const std::size_t rows = chain.space.transient.size();
    if (rows > kDenseLimit) {
        throw std::invalid_argument("dense solve limited to " +
                                    std::to_string(kDenseLimit) + " transient states");
    }
    // Build A = I - P restricted to transient states, right-hand side 1.
    std::vector<double> a(rows * rows, 0.0);
    std::vector<double> t(rows, 1.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double self = chain.for_each_successor(r, [&](std::int64_t row, double prob) {
            if (row >= 0) a[r * rows + static_cast<std::size_t>(row)] -= prob;
        });
        a[r * rows + r] = 1.0 - self;
    }

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < rows; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * rows + col]);
        for (std::size_t r = col + 1; r < rows; ++r) {
            const double v = std::abs(a[r * rows + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) {
            throw std::runtime_error("dense solve: singular system");
        }
        if (pivot != col) {
            for (std::size_t c = col; c < rows; ++c) {
                std::swap(a[pivot * rows + c], a[col * rows + c]);
            }
            std::swap(t[pivot], t[col]);
        }
        const double* prow = &a[col * rows];
        const double inv_p = 1.0 / prow[col];
        for (std::size_t r = col + 1; r < rows; ++r) {
            double* arow = &a[r * rows];
            const double factor = arow[col] * inv_p;
            if (factor == 0.0) continue;
            arow[col] = 0.0;
            for (std::size_t c = col + 1; c < rows; ++c) {
                arow[c] -= factor * prow[c];
            }
            t[r] -= factor * t[col];
        }
    }
    for (std::size_t r = rows; r-- > 0;) {
        double sum = t[r];
        const double* arow = &a[r * rows];
        for (std::size_t c = r + 1; c < rows; ++c) {
            sum -= arow[c] * t[c];
        }
        t[r] = sum / arow[r];
    }
    return t[0];
}

}  // namespace

double expected_absorption_time(const AbsorptionProblem& p, SolveMethod method) {
    validate(p);
    if (p.e >= 1.0) return kInfiniteDelay;
    ChainLayout chain(p);
    switch (method) {
        case SolveMethod::DenseLU:
            return solve_dense(chain);
        case SolveMethod::Auto:
        case SolveMethod::Recurrence:
            return solve_recurrence(chain);
    }
    return solve_recurrence(chain);
}

namespace {

SchemeResult absorption_result(const AbsorptionProblem& p, double units) {
    const double delay = expected_absorption_time(p);
    SchemeResult r;
    r.units_per_delivery = units;
    r.delay = delay;
    if (!std::isfinite(delay)) {
        r.unreachable = true;
        r.throughput = 0.0;
    } else {
        r.throughput = units / delay;
    }
    return r;
}

void check_coding_paths(const SchemeParams& p, int min_arrivals) {
    if (p.k < 1) {
        throw std::invalid_argument("coding scheme: generation size must be >= 1");
    }
    if (p.strict_paths) {
        if (p.n != (1 << p.k) - 1) {
            throw std::invalid_argument(
                "coding scheme: strict mode requires n = 2^k - 1 paths");
        }
    }
    if (p.n < min_arrivals) {
        throw std::invalid_argument("coding scheme: needs at least " +
                                    std::to_string(min_arrivals) + " paths");
    }
}

}  // namespace

SchemeResult evaluate_scheme(Scheme scheme, const SchemeParams& p) {
    const AbsorptionProblem single{1, p.m, 1, p.e, p.state_budget};
    switch (scheme) {
        case Scheme::SP:
            return absorption_result(single, 1.0);
        case Scheme::MP: {
            // Each packet rides its own path; per-packet delay is SP's,
            // n packets complete per delivery period.
            SchemeResult r = absorption_result(single, static_cast<double>(p.n));
            return r;
        }
        case Scheme::MC:
            return absorption_result({p.n, p.m, 1, p.e, p.state_budget}, 1.0);
        case Scheme::NC:
        case Scheme::NC_L:
            check_coding_paths(p, p.k);
            return absorption_result({p.n, p.m, p.k, p.e, p.state_budget},
                                     static_cast<double>(p.k));
        case Scheme::NC_U:
            check_coding_paths(p, p.k + 1);
            return absorption_result({p.n, p.m, p.k + 1, p.e, p.state_budget},
                                     static_cast<double>(p.k));
        default:
            throw std::invalid_argument("evaluate_scheme: unsupported scheme " +
                                        to_string(scheme));
    }
}

SchemeResults evaluate_schemes(const std::vector<Scheme>& schemes,
                               const SchemeParams& p) {
    SchemeResults out;
    for (Scheme s : schemes) {
        out[s] = evaluate_scheme(s, p);
    }
    fill_ratios_to_sp(out);
    return out;
}

}  // namespace meshfwd::markov
