#pragma once

#include <span>
#include <string>
#include <variant>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::causal {

using numkit::Vector;

// Which observed block a policy reads its context from.
enum class ContextRole { treatment, treatment_proxy };

double policy_cost(double c1, double c2);  // 23 + c1 c2
double policy_price(double p);             // max(0.7 p, 10)

// Demand-design cost policy, context (C1, C2) = z.
struct CostPolicy {};
// Demand-design price policy, context P = a.
struct PricePolicy {};
// Step function of one context coordinate: actions[k] applies on
// [breakpoints[k-1], breakpoints[k]); with no breakpoints the policy is constant.
struct TabulatedPolicy {
  ContextRole role = ContextRole::treatment;
  std::size_t column = 0;
  Vector breakpoints;
  Vector actions;
};

using Policy = std::variant<CostPolicy, PricePolicy, TabulatedPolicy>;

TabulatedPolicy constant_policy(double action);

ContextRole context_role(const Policy& policy);
double apply_policy(const Policy& policy, std::span<const double> context);

// "cost", "price", or "constant:<action>".
Policy policy_from_name(const std::string& name);
std::string policy_name(const Policy& policy);

}  // namespace dfpv::causal
