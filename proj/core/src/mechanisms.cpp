#include "markup/mechanisms.hpp"

#include "markup/closed_forms.hpp"
#include "markup/errors.hpp"
#include "markup/io.hpp"
#include "markup/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace markup {

DirectMechanism::DirectMechanism(std::string label, Evaluator allocation, std::vector<double> breakpoints,
                                 Evaluator allocation_integral, Evaluator inverse_allocation)
    : label_(std::move(label)),
      allocation_(std::move(allocation)),
      breakpoints_(std::move(breakpoints)),
      integral_(std::move(allocation_integral)),
      inverse_(std::move(inverse_allocation)) {
    if (!allocation_) {
        throw DomainError("DirectMechanism: allocation evaluator is required");
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

DirectMechanism DirectMechanism::from_menu(std::string label, Evaluator allocation, Evaluator transfer,
                                           std::vector<double> breakpoints) {
    DirectMechanism m(std::move(label), std::move(allocation), std::move(breakpoints));
    if (!transfer) {
        throw DomainError("from_menu: transfer evaluator is required");
    }
    m.transfer_ = std::move(transfer);
    return m;
}

double DirectMechanism::allocation(double v) const { return v < 0.0 ? 0.0 : allocation_(v); }

double DirectMechanism::transfer(double v) const {
    if (transfer_) {
        return transfer_(v);
    }
    if (v <= 0.0) {
        return 0.0;
    }
    return v * allocation(v) - allocation_integral(v);
}

double DirectMechanism::allocation_integral(double v) const {
    if (v <= 0.0) {
        return 0.0;
    }
    if (integral_) {
        return integral_(v);
    }
    std::vector<double> nodes{0.0};
    for (double b : breakpoints_) {
        if (b > 0.0 && b < v) {
            nodes.push_back(b);
        }
    }
    nodes.push_back(v);
    return integrate_piecewise([this](double s) { return allocation_(s); }, nodes).value;
}

DirectMechanism DirectMechanism::with_transfer(Evaluator transfer, std::string label) const {
    DirectMechanism copy = *this;
    copy.label_ = std::move(label);
    copy.transfer_ = std::move(transfer);
    return copy;
}

DirectMechanism guarantee_mechanism(double eta) {
    if (!(eta > 1.0) || !std::isfinite(eta)) {
        throw DomainError("guarantee_mechanism: eta must be finite and > 1");
    }
    const double r = 1.0 / (eta - 1.0);
    auto q = [eta, r](double v) { return v <= 0.0 ? 0.0 : std::pow(v / eta, r); };
    auto integral = [eta, r](double v) {
        if (v <= 0.0) {
            return 0.0;
        }
        return std::pow(eta, -r) * (eta - 1.0) / eta * std::pow(v, eta * r);
    };
    auto inverse = [eta](double qq) { return eta * std::pow(qq, eta - 1.0); };
    std::ostringstream label;
    label << "guarantee(eta=" << eta << ")";
    return DirectMechanism(label.str(), q, {}, integral, inverse);
}

double envelope_transfer(const Evaluator& allocation, double v, const std::vector<double>& breakpoints) {
    if (v <= 0.0) {
        return 0.0;
    }
    std::vector<double> nodes{0.0};
    for (double b : breakpoints) {
        if (b > 0.0 && b < v) {
            nodes.push_back(b);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.push_back(v);
    return v * allocation(v) - integrate_piecewise(allocation, nodes).value;
}

IndirectTariff::IndirectTariff(const DirectMechanism& mechanism, double v_lo, double v_hi, std::size_t grid_size)
    : mechanism_(mechanism) {
    if (!(v_lo >= 0.0 && v_hi > v_lo && std::isfinite(v_hi))) {
        throw DomainError("marginal_price: need 0 <= v_lo < v_hi < inf");
    }
    if (grid_size < 2) {
        throw DomainError("marginal_price: grid needs at least two points");
    }
    const double start = v_lo > 0.0 ? v_lo : v_hi * 1e-6;
    if (v_lo < start) {
        v_cache_.push_back(v_lo);
    }
    const double ratio = std::pow(v_hi / start, 1.0 / static_cast<double>(grid_size - 1));
    for (std::size_t i = 0; i < grid_size; ++i) {
        v_cache_.push_back(i + 1 == grid_size ? v_hi : start * std::pow(ratio, static_cast<double>(i)));
    }
    q_cache_.reserve(v_cache_.size());
    for (double v : v_cache_) {
        const double q = mechanism_.allocation(v);
        if (!q_cache_.empty() && q < q_cache_.back() - 1e-12 * std::max(1.0, std::abs(q))) {
            throw DomainError("marginal_price: allocation is not nondecreasing");
        }
        q_cache_.push_back(q_cache_.empty() ? q : std::max(q, q_cache_.back()));
    }
    for (double b : mechanism_.breakpoints()) {
        if (b <= v_lo || b > v_hi) {
            continue;
        }
        const double q_left = mechanism_.allocation(b * (1.0 - 1e-13));
        const double q_right = mechanism_.allocation(std::min(v_hi, b * (1.0 + 1e-13)));
        if (q_right - q_left > 1e-10 * std::max(1.0, std::abs(q_right))) {
            gaps_.push_back({b, q_left, q_right});
        }
    }
}

double IndirectTariff::generalized_inverse(double q) const {
    if (q <= q_cache_.front()) {
        return v_cache_.front();
    }
    const auto it = std::lower_bound(q_cache_.begin(), q_cache_.end(), q);
    if (it == q_cache_.end()) {
        return v_cache_.back();
    }
    const std::size_t i = static_cast<std::size_t>(it - q_cache_.begin());
    double lo = v_cache_[i - 1];
    double hi = v_cache_[i];
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mechanism_.allocation(mid) >= q) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double IndirectTariff::price(double q) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(q_max()));
    if (q < q_min() - tol || q > q_max() + tol) {
        throw DomainError("price: quantity outside the range sold by the menu");
    }
    for (const auto& g : gaps_) {
        if (q > g.q_lo && q < g.q_hi) {
            std::ostringstream os;
            os << "price: quantity " << q << " lies in the gap (" << g.q_lo << ", " << g.q_hi
               << ") at v=" << g.v << "; no type buys it";
            throw DomainError(os.str());
        }
    }
    if (mechanism_.inverse_allocation() && q > 0.0) {
        return mechanism_.inverse_allocation()(q);
    }
    return generalized_inverse(q);
}

double IndirectTariff::payment(double q) const {
    if (q <= 0.0) {
        return 0.0;
    }
    const double q0 = std::min(q, q_min());
    double total = v_cache_.front() * q0;
    if (q <= q_min()) {
        return total;
    }
    std::vector<double> nodes{q_min()};
    for (const auto& g : gaps_) {
        for (double e : {g.q_lo, g.q_hi}) {
            if (e > q_min() && e < q) {
                nodes.push_back(e);
            }
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.push_back(q);
    const auto& inv = mechanism_.inverse_allocation();
    Evaluator p = inv ? Evaluator([&inv](double s) { return inv(s); })
                      : Evaluator([this](double s) { return generalized_inverse(s); });
    total += integrate_piecewise(p, nodes).value;
    return total;
}

IndirectTariff marginal_price(const DirectMechanism& mechanism, double v_lo, double v_hi, std::size_t grid_size) {
    return IndirectTariff(mechanism, v_lo, v_hi, grid_size);
}

MarkupMechanism constant_markup_mechanism(const GeneralConvexCost& cost) {
    const CostValidation report = cost.validate();
    std::vector<std::string> warnings;
    const bool below_two = cost.eta_bar() < 2.0;
    std::string msg;
    for (const auto& p : report.problems) {
        // c''' < 0 is unavoidable below 2 (q^eta with eta < 2).
        if (below_two && p.rfind("c'''", 0) == 0) {
            warnings.push_back(p);
        } else {
            msg += " " + p + ";";
        }
    }
    if (!msg.empty()) {
        throw DomainError("constant_markup_mechanism: cost failed validation:" + msg);
    }
    if (below_two) {
        warnings.push_back("eta_bar < 2: outside the range where the constant-markup bound is informative");
    }
    const double z = markup_multiplier(cost.eta_bar());
    Evaluator q = [cost, z](double v) { return v <= 0.0 ? 0.0 : efficient_quality(z * v, cost); };
    Evaluator integral;
    if (cost.iso_eta()) {
        const double eta = *cost.iso_eta();
        integral = [eta, z](double v) {
            const double r = 1.0 / (eta - 1.0);
            return v <= 0.0 ? 0.0 : std::pow(z, r) * (eta - 1.0) / eta * std::pow(v, eta * r);
        };
    }
    std::ostringstream label;
    label << "constant_markup(z=" << z << ")";
    return {z, 1.0 - z, DirectMechanism(label.str(), q, {}, integral), warnings};
}

double UniformPriceMechanism::quantity(double v, const NonlinearDemandModel& model) const {
    return model.demand(v, p_star);
}

double UniformPriceMechanism::profit(double v, const NonlinearDemandModel& model) const {
    return (p_star - 1.0) * model.demand(v, p_star);
}

double UniformPriceMechanism::buyer_surplus(double v, const NonlinearDemandModel& model) const {
    return integrate_to_infinity([&](double p) { return model.demand(v, p); }, p_star).value;
}

UniformPriceMechanism uniform_price_mechanism(double eta_bar) { return {uniform_price(eta_bar), eta_bar}; }

IcAudit ic_audit(const DirectMechanism& mechanism, const std::vector<double>& grid) {
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw DomainError("ic_audit: grid must be ascending");
    }
    const std::size_t n = grid.size();
    std::vector<double> q(n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = mechanism.allocation(grid[i]);
        t[i] = mechanism.transfer(grid[i]);
    }
    IcAudit audit;
    for (std::size_t i = 0; i < n; ++i) {
        const double truthful = grid[i] * q[i] - t[i];
        audit.max_ir_violation = std::max(audit.max_ir_violation, -truthful);
        for (std::size_t j = 0; j < n; ++j) {
            const double gain = grid[i] * q[j] - t[j] - truthful;
            if (gain > audit.max_ic_violation) {
                audit.max_ic_violation = gain;
                audit.worst_type = grid[i];
                audit.worst_report = grid[j];
            }
        }
    }
    return audit;
}

void write_menu_csv(std::ostream& os, const DirectMechanism& mechanism, const std::vector<double>& grid) {
    write_csv_row(os, std::vector<std::string>{"v", "Q", "T"});
    for (double v : grid) {
        write_csv_row(os, std::vector<double>{v, mechanism.allocation(v), mechanism.transfer(v)});
    }
}

void write_tariff_csv(std::ostream& os, const IndirectTariff& tariff, const std::vector<double>& q_grid) {
    write_csv_row(os, std::vector<std::string>{"q", "p", "P"});
    for (double q : q_grid) {
        double p = 0.0;
        try {
            p = tariff.price(q);
        } catch (const DomainError&) {
            continue;
        }
        write_csv_row(os, std::vector<double>{q, p, tariff.payment(q)});
    }
}

}  // namespace markup
