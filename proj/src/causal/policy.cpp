#include "dfpv/causal/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dfpv/errors.hpp"

namespace dfpv::causal {

double policy_cost(double c1, double c2) { return 23.0 + c1 * c2; }

double policy_price(double p) { return std::max(0.7 * p, 10.0); }

TabulatedPolicy constant_policy(double action) {
  if (!std::isfinite(action)) throw InvalidArgument("constant_policy: action must be finite");
  return TabulatedPolicy{ContextRole::treatment, 0, {}, {action}};
}

ContextRole context_role(const Policy& policy) {
  if (std::holds_alternative<CostPolicy>(policy)) return ContextRole::treatment_proxy;
  if (std::holds_alternative<PricePolicy>(policy)) return ContextRole::treatment;
  return std::get<TabulatedPolicy>(policy).role;
}

double apply_policy(const Policy& policy, std::span<const double> context) {
  if (std::holds_alternative<CostPolicy>(policy)) {
    if (context.size() != 2) throw InvalidArgument("cost policy: context must be (c1, c2)");
    return policy_cost(context[0], context[1]);
  }
  if (std::holds_alternative<PricePolicy>(policy)) {
    if (context.size() != 1) throw InvalidArgument("price policy: context must be a scalar price");
    return policy_price(context[0]);
  }
  const auto& t = std::get<TabulatedPolicy>(policy);
  if (t.actions.size() != t.breakpoints.size() + 1)
    throw InvalidArgument("tabulated policy: need one more action than breakpoints");
  if (t.breakpoints.empty()) return t.actions[0];
  if (t.column >= context.size()) throw InvalidArgument("tabulated policy: context column out of range");
  const auto it = std::upper_bound(t.breakpoints.begin(), t.breakpoints.end(), context[t.column]);
  return t.actions[static_cast<std::size_t>(it - t.breakpoints.begin())];
}

Policy policy_from_name(const std::string& name) {
  if (name == "cost") return CostPolicy{};
  if (name == "price") return PricePolicy{};
  const std::string prefix = "constant:";
  if (name.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = name.substr(prefix.size());
      const double a = std::stod(tail, &used);
      if (used == tail.size()) return constant_policy(a);
    } catch (const std::exception&) {
    }
  }
  throw InvalidArgument("unknown policy '" + name + "' (expected cost, price or constant:<action>)");
}

std::string policy_name(const Policy& policy) {
  if (std::holds_alternative<CostPolicy>(policy)) return "cost";
  if (std::holds_alternative<PricePolicy>(policy)) return "price";
  const auto& t = std::get<TabulatedPolicy>(policy);
  char buf[64];
  if (t.breakpoints.empty()) {
    std::snprintf(buf, sizeof buf, "constant:%.6g", t.actions.at(0));
    return buf;
  }
  return "tabulated";
}

}  // namespace dfpv::causal
