#pragma once

#include <string>
#include <vector>

namespace sct {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

// Debug fault injection used to prove the checks have teeth.
enum class FaultInjection { None, InterpPhase };

// Analytic invariant suite: slack/label identity, Parseval consistency,
// Gaussian coefficient quadrature, dense-solve equivalence on a small
// instance, and the operator gradient check.
std::vector<CheckResult> run_selfchecks(FaultInjection fault = FaultInjection::None);

}  // namespace sct
