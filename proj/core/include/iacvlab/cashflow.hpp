#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace iacvlab {

enum class PeriodUnit { year, month };

/// Geometric rate conversion: (1 + monthly)^12 = 1 + annual.
double annual_to_monthly_rate(double annual);
double monthly_to_annual_rate(double monthly);

/// Closed-end loan. The principal is paid out at t = 0; contractual cash
/// flows (interest plus redemption) fall due at the end of periods 1..T,
/// so cash_flows[k] is the flow of period k + 1. Day-one fees must already
/// be netted into the principal.
struct LoanContract {
    std::string id;
    double principal = 0.0;
    std::vector<double> cash_flows;
    PeriodUnit period_unit = PeriodUnit::year;

    std::size_t term() const { return cash_flows.size(); }

    /// Throws std::invalid_argument unless principal > 0 and the schedule
    /// is non-empty, finite, non-negative, with at least one positive flow.
    void validate() const;
};

/// Result of a rate solve. residual is |PV(rate) - principal| in currency.
/// ambiguous is set when the net flow sequence (-principal, flows...) has
/// more than one sign change, i.e. the root need not be unique; the first
/// root in the search bracket is returned in that case.
struct RateSolution {
    double rate = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool ambiguous = false;
};

struct SolverOptions {
    double bracket_lo = -0.99;
    double bracket_hi = 10.0;
    double rel_tol = 1e-12;   // on |PV - principal| relative to principal
    int max_iterations = 200;
};

/// Value at the end of period horizon_offset of flows due at the end of
/// periods 1..T: sum of cash_flows[k] / (1 + rate)^(k + 1 - horizon_offset).
/// Throws std::domain_error for rate <= -1.
double present_value(std::span<const double> cash_flows, double rate,
                     int horizon_offset = 0);

/// Effective interest rate: the per-period rate at which the contractual
/// flows discount back to the principal. Bracketed bisection with Newton
/// refinement. Throws std::domain_error when the bracket has no sign change.
RateSolution solve_effective_rate(const LoanContract& contract,
                                  const SolverOptions& options = {});

/// Risk-adjusted rate: same solve on the expected flows CF_t - R_t, where
/// expected_losses[k] is the loss expected to materialize with the flow of
/// period k + 1. A shorter loss vector is padded with zeros to the term.
RateSolution solve_risk_adjusted_rate(const LoanContract& contract,
                                      std::span<const double> expected_losses,
                                      const SolverOptions& options = {});

} // namespace iacvlab
