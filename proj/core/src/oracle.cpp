#include "markup/errors.hpp"
#include "markup/parallel.hpp"
#include "markup/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace markup {
namespace {

struct Instance {
    const std::vector<double>& v;
    const std::vector<double>& f;
    std::vector<double> grid;
    std::vector<double> grid_cost;
};

struct Best {
    double profit = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> index;
};

// Depth-first walk over nondecreasing index vectors. `rent` is the running
// sum of (v_{j+1} - v_j) q_j over j < i, so t_i = v_i q_i - rent.
void enumerate(const Instance& in, std::size_t i, std::size_t min_index, double rent, double profit,
               std::vector<std::size_t>& current, Best& best) {
    const std::size_t n = in.v.size();
    for (std::size_t k = min_index; k < in.grid.size(); ++k) {
        const double q = in.grid[k];
        const double t = in.v[i] * q - rent;
        const double p = profit + in.f[i] * (t - in.grid_cost[k]);
        current[i] = k;
        if (i + 1 == n) {
            if (p > best.profit) {
                best.profit = p;
                best.index = current;
            }
        } else {
            enumerate(in, i + 1, k, rent + (in.v[i + 1] - in.v[i]) * q, p, current, best);
        }
    }
}

std::vector<double> transfers_for(const std::vector<double>& v, const std::vector<double>& q) {
    std::vector<double> t(v.size());
    double rent = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        t[i] = v[i] * q[i] - rent;
        if (i + 1 < v.size()) {
            rent += (v[i + 1] - v[i]) * q[i];
        }
    }
    return t;
}

// Pool-adjacent-violators: weighted isotonic (nondecreasing) regression.
std::vector<double> isotonic(const std::vector<double>& y, const std::vector<double>& w) {
    struct Block {
        double sum;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i] * w[i], w[i], 1});
        while (blocks.size() >= 2) {
            const auto& b = blocks.back();
            const auto& a = blocks[blocks.size() - 2];
            if (a.sum / a.weight <= b.sum / b.weight) {
                break;
            }
            Block m{a.sum + b.sum, a.weight + b.weight, a.count + b.count};
            blocks.pop_back();
            blocks.back() = m;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) {
        out.insert(out.end(), b.count, b.sum / b.weight);
    }
    return out;
}

}  // namespace

double monotone_vector_count(std::size_t g, std::size_t n) {
    // C(g + n - 1, n)
    double c = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        c *= static_cast<double>(g - 1 + i) / static_cast<double>(i);
    }
    return std::round(c);
}

OracleResult discrete_oracle(const DiscreteScreeningInstance& inst, OracleMode mode, double agreement_tol) {
    const auto& v = inst.values;
    const auto& f = inst.masses;
    const std::size_t n = v.size();
    if (n == 0 || f.size() != n) {
        throw DomainError("discrete_oracle: values and masses must be non-empty and equally long");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(f[i] > 0.0)) {
            throw DomainError("discrete_oracle: masses must be positive");
        }
        if (v[i] < 0.0 || (i > 0 && !(v[i] > v[i - 1]))) {
            throw DomainError("discrete_oracle: values must be nonnegative and strictly ascending");
        }
        total += f[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("discrete_oracle: masses must sum to 1");
    }

    OracleResult out;
    const double eta = inst.cost.eta();

    // Reduced mode.
    std::vector<double> phi(n);
    double upper_mass = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        upper_mass -= f[i];
        const double tail = std::max(upper_mass, 0.0);
        phi[i] = i + 1 < n ? v[i] - (v[i + 1] - v[i]) * tail / f[i] : v[i];
    }
    out.ironed_virtual_values = isotonic(phi, f);
    out.reduced_allocation.resize(n);
    out.reduced_profit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pb = out.ironed_virtual_values[i];
        const double q = pb > 0.0 ? std::pow(pb, 1.0 / (eta - 1.0)) : 0.0;
        out.reduced_allocation[i] = q;
        out.reduced_profit += f[i] * (phi[i] * q - inst.cost.cost(q));
    }

    if (mode == OracleMode::reduced) {
        out.profit = out.reduced_profit;
        out.allocation = out.reduced_allocation;
        out.transfers = transfers_for(v, out.allocation);
        return out;
    }

    // Exhaustive mode.
    const auto& grid = inst.quality_grid;
    if (grid.empty() || grid.front() != 0.0 || !std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        throw DomainError("discrete_oracle: quality grid must be strictly ascending and start at 0");
    }
    if (n > 12) {
        throw DomainError("discrete_oracle: exhaustive mode supports at most 12 types");
    }
    const double count = monotone_vector_count(grid.size(), n);
    if (count > kOracleCombinationCap) {
        std::ostringstream os;
        os << "discrete_oracle: " << count << " monotone allocations exceed the cap of " << kOracleCombinationCap
           << "; use the reduced mode";
        throw DomainError(os.str());
    }
    out.combinations = static_cast<std::size_t>(count);

    Instance in{v, f, grid, {}};
    in.grid_cost.reserve(grid.size());
    for (double q : grid) {
        in.grid_cost.push_back(inst.cost.cost(q));
    }
    auto partial = parallel_map(grid.size(), [&](std::size_t k0) {
        Best best;
        std::vector<std::size_t> current(n, 0);
        const double q = grid[k0];
        const double t = v[0] * q;
        const double p = f[0] * (t - in.grid_cost[k0]);
        current[0] = k0;
        if (n == 1) {
            best.profit = p;
            best.index = current;
        } else {
            enumerate(in, 1, k0, (v[1] - v[0]) * q, p, current, best);
        }
        return best;
    });
    Best best;
    for (auto& b : partial) {
        if (b.profit > best.profit) {
            best = std::move(b);
        }
    }
    out.profit = best.profit;
    out.allocation.resize(n);
    bool at_boundary = false;
    for (std::size_t i = 0; i < n; ++i) {
        out.allocation[i] = grid[best.index[i]];
        at_boundary = at_boundary || (best.index[i] + 1 == grid.size() && grid.size() > 1);
    }
    out.transfers = transfers_for(v, out.allocation);
    if (at_boundary) {
        out.warnings.push_back("grid too coarse: the optimum uses the largest grid quality");
    }

    if (mode == OracleMode::both) {
        const double scale = std::max(std::abs(out.reduced_profit), 1e-300);
        out.relative_gap = (out.reduced_profit - out.profit) / scale;
        out.modes_agree = out.profit <= out.reduced_profit + 1e-9 * scale + 1e-15 &&
                          out.relative_gap <= agreement_tol;
    }
    return out;
}

}  // namespace markup
