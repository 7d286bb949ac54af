#include "qmp/cost_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qmp/core.hpp"

namespace qmp {

std::string to_string(OpCount value) {
    if (value == 0) {
        return "0";
    }
    std::string out;
    while (value > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

OpCount parse_op_count(const std::string &text) {
    if (text.empty()) {
        throw ValueError("parse_op_count: empty string");
    }
    OpCount value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw ValueError("parse_op_count: not a decimal integer: " + text);
        }
        value = value * 10 + static_cast<unsigned>(c - '0');
    }
    return value;
}

std::size_t ceil_log2(std::size_t n) {
    if (n <= 1) {
        return 1;
    }
    return static_cast<std::size_t>(std::bit_width(n - 1));
}

std::size_t ceil_log2_product(std::size_t n, std::size_t m) {
    OpCount product = static_cast<OpCount>(n) * m;
    if (product <= 1) {
        return 1;
    }
    OpCount x = product - 1;
    std::size_t bits = 0;
    while (x > 0) {
        x >>= 1;
        ++bits;
    }
    return bits;
}

std::size_t ceil_sqrt(std::size_t m) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
    while (r * r > m) {
        --r;
    }
    while (r * r < m) {
        ++r;
    }
    return r;
}

double quantum_search_term_real(std::size_t n, std::size_t m, double xi, double delta,
                                std::size_t k_max) {
    if (!(xi > 0.0) || !(delta > 0.0) || !(delta < 1.0) || n == 0 || m == 0 || k_max == 0) {
        throw ValueError("quantum cost model: parameters must be positive");
    }
    double overhead = std::log(3.0 * static_cast<double>(k_max) * static_cast<double>(m) / delta);
    return static_cast<double>(ceil_sqrt(m)) * overhead *
           static_cast<double>(ceil_log2_product(n, m)) / xi;
}

OpCount quantum_search_term(std::size_t n, std::size_t m, double xi, double delta,
                            std::size_t k_max) {
    return static_cast<OpCount>(std::ceil(quantum_search_term_real(n, m, xi, delta, k_max)));
}

void CostLedger::merge(const CostLedger &other) {
    classical_ops += other.classical_ops;
    quantum_ops += other.quantum_ops;
    classical_init_ops += other.classical_init_ops;
    quantum_init_ops += other.quantum_init_ops;
    classical_init_calls += other.classical_init_calls;
    quantum_init_calls += other.quantum_init_calls;
    per_iteration.insert(per_iteration.end(), other.per_iteration.begin(),
                         other.per_iteration.end());
    if (params == CostParams{}) {
        params = other.params;
    }
}

void charge_classical_iteration(CostLedger &ledger, std::size_t n, std::size_t m) {
    OpCount charge = static_cast<OpCount>(n) * m + n;
    ledger.classical_ops += charge;
    ledger.per_iteration.push_back({charge, 0, 0});
}

void charge_classical_init(CostLedger &ledger, std::size_t n) {
    ledger.classical_ops += n;
    ledger.classical_init_ops += n;
    ++ledger.classical_init_calls;
}

void charge_quantum_init(CostLedger &ledger, std::size_t n) {
    OpCount charge = static_cast<OpCount>(n) * ceil_log2(n);
    ledger.quantum_ops += charge;
    ledger.quantum_init_ops += charge;
    ++ledger.quantum_init_calls;
}

void charge_quantum_iteration(CostLedger &ledger, std::size_t support, std::size_t n,
                              std::size_t m, double xi, double delta, std::size_t k_max) {
    OpCount charge = static_cast<OpCount>(support) * ceil_log2(n) +
                     quantum_search_term(n, m, xi, delta, k_max);
    ledger.quantum_ops += charge;
    ledger.per_iteration.push_back({0, charge, support});
}

OpCount classical_model_total(std::size_t n, std::size_t m, std::size_t k) {
    return static_cast<OpCount>(n) + static_cast<OpCount>(k) * (static_cast<OpCount>(n) * m + n);
}

OpCount quantum_model_total(std::size_t n, std::size_t m, double xi, double delta,
                            std::size_t k_max, std::span<const std::size_t> supports) {
    OpCount support_sum = 0;
    for (std::size_t s : supports) {
        support_sum += s;
    }
    OpCount log_n = ceil_log2(n);
    OpCount total = static_cast<OpCount>(n) * log_n + support_sum * log_n;
    if (!supports.empty()) {
        total += static_cast<OpCount>(supports.size()) * quantum_search_term(n, m, xi, delta, k_max);
    }
    return total;
}

OpCount quantum_model_total_dense(std::size_t n, std::size_t m, std::size_t k, double xi,
                                  double delta) {
    OpCount log_n = ceil_log2(n);
    OpCount total = static_cast<OpCount>(n) * log_n;
    if (k > 0) {
        total += static_cast<OpCount>(k) *
                 (static_cast<OpCount>(n) * log_n + quantum_search_term(n, m, xi, delta, k));
    }
    return total;
}

std::size_t SupportModel::support_for(std::size_t n) const {
    return kind == Kind::Dense ? n : std::min(fixed_support, n);
}

double ModelPoint::ratio() const {
    return static_cast<double>(static_cast<long double>(quantum_ops) /
                               static_cast<long double>(classical_ops));
}

ModelPoint evaluate_model(const CrossoverQuery &query, std::size_t n) {
    ModelPoint p;
    p.n = n;
    p.m = query.m_of_n(n);
    p.k = query.k_of_n(n);
    if (p.m == 0 || p.k == 0) {
        throw ValueError("crossover: m and k mappings must be positive");
    }
    p.classical_ops = classical_model_total(n, p.m, p.k);
    if (query.support.kind == SupportModel::Kind::Dense) {
        p.quantum_ops = quantum_model_total_dense(n, p.m, p.k, query.xi, query.delta);
    } else {
        std::vector<std::size_t> supports(p.k, query.support.support_for(n));
        p.quantum_ops = quantum_model_total(n, p.m, query.xi, query.delta, p.k, supports);
    }
    return p;
}

std::vector<std::size_t> geometric_grid(std::size_t n_min, std::size_t n_max, double factor) {
    if (n_min < 1 || n_max < n_min || !(factor > 1.0)) {
        throw ValueError("geometric_grid: need 1 <= n_min <= n_max and factor > 1");
    }
    std::vector<std::size_t> grid;
    double x = static_cast<double>(n_min);
    while (true) {
        auto n = static_cast<std::size_t>(std::llround(x));
        if (n > n_max) {
            break;
        }
        if (grid.empty() || n > grid.back()) {
            grid.push_back(n);
        }
        x *= factor;
    }
    return grid;
}

std::optional<std::size_t> crossover_point(const CrossoverQuery &query) {
    if (!query.m_of_n || !query.k_of_n) {
        throw ValueError("crossover: mappings are required");
    }
    auto quantum_wins = [&](std::size_t n) {
        ModelPoint p = evaluate_model(query, n);
        return p.quantum_ops < p.classical_ops;
    };
    auto grid = geometric_grid(query.n_min, query.n_max, query.grid_factor);
    std::size_t prev = 0;
    for (std::size_t n : grid) {
        if (quantum_wins(n)) {
            if (prev == 0) {
                return n;
            }
            // invariant: !quantum_wins(lo) && quantum_wins(hi)
            std::size_t lo = prev;
            std::size_t hi = n;
            while (hi - lo > 1) {
                std::size_t mid = lo + (hi - lo) / 2;
                if (quantum_wins(mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
        prev = n;
    }
    return std::nullopt;
}

}  // namespace qmp
