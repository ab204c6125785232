#include "markup/closed_forms.hpp"

#include "markup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace markup {
namespace {

void require_eta(double eta, const char* who) {
    if (!(eta > 1.0)) {
        throw DomainError(std::string(who) + ": eta must be > 1");
    }
}

void require_eta_bar(double eta_bar, const char* who) {
    if (!(eta_bar < -1.0)) {
        throw DomainError(std::string(who) + ": eta_bar must be < -1");
    }
}

// log(eta)/(eta-1), accurate as eta -> 1.
double log_ratio(double eta) {
    const double d = eta - 1.0;
    return d == 0.0 ? 1.0 : std::log1p(d) / d;
}

void require_beta(double beta, double eta, const char* who) {
    const double lo = frontier_beta_min(eta);
    if (!(beta >= lo * (1.0 - 1e-12) && beta <= 1.0 + 1e-12)) {
        throw DomainError(std::string(who) + ": beta outside the feasible interval [" + std::to_string(lo) +
                          ", 1]");
    }
}

}  // namespace

double guarantee_ratio(double eta) {
    require_eta(eta, "guarantee_ratio");
    if (std::isinf(eta)) {
        return 0.0;
    }
    return std::exp(-eta * log_ratio(eta));
}

double consumer_share(double eta) {
    require_eta(eta, "consumer_share");
    if (std::isinf(eta)) {
        return 1.0;
    }
    return std::exp(-log_ratio(eta));
}

double pareto_profit_ratio(double alpha, double eta) {
    require_eta(eta, "pareto_profit_ratio");
    if (!(alpha > eta / (eta - 1.0))) {
        throw DomainError("pareto_profit_ratio: need alpha > eta/(eta-1) for finite surplus");
    }
    if (std::isinf(alpha)) {
        return 1.0;
    }
    return std::exp(eta / (eta - 1.0) * std::log1p(-1.0 / alpha));
}

double pareto_consumer_ratio(double alpha, double eta) {
    require_eta(eta, "pareto_consumer_ratio");
    if (!(alpha > eta / (eta - 1.0))) {
        throw DomainError("pareto_consumer_ratio: need alpha > eta/(eta-1) for finite surplus");
    }
    if (std::isinf(alpha)) {
        return 0.0;
    }
    const double c = std::exp(std::log1p(-1.0 / alpha) / (eta - 1.0));
    return eta / (eta - 1.0) * c / alpha;
}

double frontier_beta_min(double eta) { return guarantee_ratio(eta); }

double frontier(double beta, double eta) {
    require_eta(eta, "frontier");
    require_beta(beta, eta, "frontier");
    beta = std::min(beta, 1.0);
    return eta / (eta - 1.0) * (std::pow(beta, 1.0 / eta) - beta);
}

double frontier_attaining_shape(double beta, double eta) {
    require_eta(eta, "frontier_attaining_shape");
    require_beta(beta, eta, "frontier_attaining_shape");
    if (beta >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    // 1 - beta^((eta-1)/eta) via expm1 for beta near 1.
    return 1.0 / -std::expm1((eta - 1.0) / eta * std::log(beta));
}

double surplus_lower_bound(double eta) {
    if (!(eta >= 2.0)) {
        throw DomainError("surplus_lower_bound: requires eta >= 2");
    }
    return 1.0 / eta;
}

double markup_multiplier(double eta_bar) {
    require_eta(eta_bar, "markup_multiplier");
    return 1.0 / (std::sqrt(eta_bar - 1.0) + 1.0);
}

double convex_cost_guarantee(double eta_bar) {
    require_eta(eta_bar, "convex_cost_guarantee");
    if (std::isinf(eta_bar)) {
        return 0.0;
    }
    return 1.0 / (eta_bar + 2.0 * std::sqrt(eta_bar - 1.0));
}

double uniform_price(double eta_bar) {
    require_eta_bar(eta_bar, "uniform_price");
    if (std::isinf(eta_bar)) {
        return 1.0;
    }
    return eta_bar / (eta_bar + 1.0);
}

double quantity_guarantee(double eta_bar) {
    require_eta_bar(eta_bar, "quantity_guarantee");
    if (std::isinf(eta_bar)) {
        return std::exp(-1.0);
    }
    return std::exp(eta_bar * std::log1p(-1.0 / (eta_bar + 1.0)));
}

ProcurementQuality procurement_quality(double eta) {
    require_eta(eta, "procurement_quality");
    if (std::isinf(eta)) {
        return {0.0, 1.0};
    }
    return {1.0 / eta, consumer_share(eta)};
}

ProcurementQuantity procurement_quantity(double eta) {
    require_eta_bar(eta, "procurement_quantity");
    if (std::isinf(eta)) {
        return {1.0, std::exp(-1.0)};
    }
    return {(eta + 1.0) / eta, std::exp((eta + 1.0) * std::log1p(-1.0 / (eta + 1.0)))};
}

RatioPair truncated_pareto_eta2(double alpha, double k) {
    if (!(alpha >= 1.0) || !(k > 1.0)) {
        throw DomainError("truncated_pareto_eta2: need alpha >= 1 and k > 1");
    }
    // r = (k^(alpha-2) - 1)/(alpha - 2), continuous through alpha = 2.
    const double lk = std::log(k);
    const double t = (alpha - 2.0) * lk;
    const double r = std::abs(t) < 1e-300 ? lk : std::expm1(t) / t * lk;
    const double denom = alpha * (1.0 + alpha * r);
    return {2.0 * (alpha - 1.0) * r / denom, (alpha + (alpha - 1.0) * (alpha - 1.0) * r) / denom};
}

LimitEvaluation limit_at(const std::function<double(double)>& f, double x0, double sign, int steps,
                         double scale) {
    LimitEvaluation out;
    for (int j = 1; j <= steps; ++j) {
        const double x = x0 + sign * scale * std::pow(10.0, -j);
        out.points.push_back(x);
        out.values.push_back(f(x));
    }
    if (!out.values.empty()) {
        out.estimate = out.values.back();
    }
    if (out.values.size() >= 2) {
        out.last_step = std::abs(out.values.back() - out.values[out.values.size() - 2]);
    }
    return out;
}

LimitEvaluation limit_at_infinity(const std::function<double(double)>& f, double sign, int steps) {
    LimitEvaluation out;
    for (int j = 1; j <= steps; ++j) {
        const double x = (sign > 0 ? 1.0 : -1.0) * std::pow(10.0, j);
        out.points.push_back(x);
        out.values.push_back(f(x));
    }
    if (!out.values.empty()) {
        out.estimate = out.values.back();
    }
    if (out.values.size() >= 2) {
        out.last_step = std::abs(out.values.back() - out.values[out.values.size() - 2]);
    }
    return out;
}

}  // namespace markup
