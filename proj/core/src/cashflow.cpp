#include "iacvlab/cashflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iacvlab {

double annual_to_monthly_rate(double annual) {
    if (annual <= -1.0)
        throw std::domain_error("annual rate must be > -100%");
    return std::pow(1.0 + annual, 1.0 / 12.0) - 1.0;
}

double monthly_to_annual_rate(double monthly) {
    if (monthly <= -1.0)
        throw std::domain_error("monthly rate must be > -100%");
    return std::pow(1.0 + monthly, 12.0) - 1.0;
}

void LoanContract::validate() const {
    if (!(principal > 0.0) || !std::isfinite(principal))
        throw std::invalid_argument("contract " + id + ": principal must be positive");
    if (cash_flows.empty())
        throw std::invalid_argument("contract " + id + ": empty cash flow schedule");
    bool any_positive = false;
    for (double cf : cash_flows) {
        if (!std::isfinite(cf))
            throw std::invalid_argument("contract " + id + ": non-finite cash flow");
        if (cf < 0.0)
            throw std::invalid_argument("contract " + id + ": negative contractual flow");
        if (cf > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw std::invalid_argument("contract " + id + ": all cash flows are zero");
}

double present_value(std::span<const double> cash_flows, double rate,
                     int horizon_offset) {
    if (rate <= -1.0)
        throw std::domain_error("discount rate must be > -100%");
    const double inv = 1.0 / (1.0 + rate);
    double df = std::pow(1.0 + rate, static_cast<double>(horizon_offset));
    double acc = 0.0;
    for (double cf : cash_flows) {
        df *= inv;
        acc += cf * df;
    }
    return acc;
}

namespace {

// d PV / d rate for flows due at periods 1..T, valued at period 0.
double pv_derivative(std::span<const double> flows, double rate) {
    const double inv = 1.0 / (1.0 + rate);
    double df = inv;
    double acc = 0.0;
    for (std::size_t k = 0; k < flows.size(); ++k) {
        df *= inv;
        acc -= static_cast<double>(k + 1) * flows[k] * df;
    }
    return acc;
}

// Sign changes of (-principal, flows...), zeros skipped. More than one
// change means the PV equation may have several roots.
int sign_changes(double principal, std::span<const double> flows) {
    int changes = 0;
    int last = principal > 0.0 ? -1 : (principal < 0.0 ? 1 : 0);
    for (double f : flows) {
        if (f == 0.0) continue;
        const int s = f > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

struct Objective {
    std::span<const double> flows;
    double principal;
    double operator()(double rate) const {
        return present_value(flows, rate, 0) - principal;
    }
};

RateSolution solve_bracketed(const Objective& f, double lo, double hi,
                             double f_lo, double f_hi,
                             const SolverOptions& options) {
    const double tol = options.rel_tol * std::abs(f.principal);
    RateSolution out;
    double x = 0.5 * (lo + hi);
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const double fx = f(x);
        out.rate = x;
        out.residual = std::abs(fx);
        out.iterations = iter;
        if (out.residual <= tol) return out;

        if ((fx < 0.0) == (f_lo < 0.0)) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }

        // Newton step from the current iterate, falling back to bisection
        // whenever it would leave the bracket or the slope is too flat.
        const double slope = pv_derivative(f.flows, x);
        double next = std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(slope) && slope != 0.0) next = x - fx / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw std::runtime_error("rate solver did not converge within iteration limit");
}

RateSolution solve_flows(double principal, std::span<const double> flows,
                         const SolverOptions& options) {
    const Objective f{flows, principal};
    double lo = options.bracket_lo;
    double hi = options.bracket_hi;
    double f_lo = f(lo);
    double f_hi = f(hi);
    if ((f_lo < 0.0) == (f_hi < 0.0))
        throw std::domain_error("no rate in the bracket equates PV and principal");

    const bool ambiguous = sign_changes(principal, flows) > 1;
    if (ambiguous) {
        // Walk the bracket to isolate the first (lowest-rate) root.
        constexpr int steps = 256;
        const double width = (hi - lo) / steps;
        double a = lo, fa = f_lo;
        for (int s = 1; s <= steps; ++s) {
            const double b = (s == steps) ? hi : lo + s * width;
            const double fb = (s == steps) ? f_hi : f(b);
            if ((fa < 0.0) != (fb < 0.0)) {
                RateSolution out = solve_bracketed(f, a, b, fa, fb, options);
                out.ambiguous = true;
                return out;
            }
            a = b;
            fa = fb;
        }
        // Fall through: the scan missed the change (can happen only with
        // pathological flat stretches); solve the whole bracket instead.
    }
    RateSolution out = solve_bracketed(f, lo, hi, f_lo, f_hi, options);
    out.ambiguous = ambiguous;
    return out;
}

} // namespace

RateSolution solve_effective_rate(const LoanContract& contract,
                                  const SolverOptions& options) {
    contract.validate();
    return solve_flows(contract.principal, contract.cash_flows, options);
}

RateSolution solve_risk_adjusted_rate(const LoanContract& contract,
                                      std::span<const double> expected_losses,
                                      const SolverOptions& options) {
    contract.validate();
    if (expected_losses.size() > contract.term())
        throw std::invalid_argument("contract " + contract.id +
                                    ": loss profile longer than the cash flow schedule");
    std::vector<double> expected(contract.cash_flows);
    for (std::size_t k = 0; k < expected_losses.size(); ++k) {
        if (!std::isfinite(expected_losses[k]))
            throw std::invalid_argument("contract " + contract.id +
                                        ": non-finite expected loss");
        expected[k] -= expected_losses[k];
    }
    return solve_flows(contract.principal, expected, options);
}

} // namespace iacvlab
