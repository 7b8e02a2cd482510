#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kgalign {

/// Central-difference check of analytic gradients. `eval` re-evaluates the
/// loss after in-place parameter edits through `param`; `analytic` is the
/// gradient entry for the same scalar.
struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
    std::string worst_site;
};

struct GradProbe {
    double* param = nullptr;
    double analytic = 0.0;
    std::string site;
};

GradCheckResult check_gradients(const std::function<double()>& eval,
                                const std::vector<GradProbe>& probes, double epsilon = 1e-5);

/// The individual finite-difference suites (each draws its own seeded
/// problems and returns the worst relative error seen).
double gradcheck_loss_k(std::uint64_t seed);
double gradcheck_loss_r1(std::uint64_t seed);
double gradcheck_loss_r2(std::uint64_t seed);
double gradcheck_regression(std::uint64_t seed);
double gradcheck_task(std::uint64_t seed);
double gradcheck_full_network(std::uint64_t seed);

} // namespace kgalign
