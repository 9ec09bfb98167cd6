#pragma once

#include <cstdint>
#include <string>

namespace hsiu::ulnsa {

enum class GradOp {
    projection,
    local_attention,
    nonlocal_attention,
    spectral_attention,
    lnsa_block,
    ulnsa,
};

/// CLI names: proj, local-attn, nonlocal-attn, spectral-attn, lnsa, ulnsa.
GradOp parse_grad_op(const std::string& name);
std::string to_string(GradOp op);

/// Pass threshold on the max relative error for each op.
double gradcheck_threshold(GradOp op);

struct GradCheckResult {
    GradOp op{};
    double max_relative_error = 0.0;
    int coordinates = 0;  ///< input coordinates compared
    double threshold = 0.0;
    bool passed = false;
};

/// Compares the reverse-mode gradient of sum(op(x)) against central differences
/// (step 1e-3, double precision) at up to `max_coordinates` input coordinates chosen by `seed`.
///
/// Relative error per coordinate is |g - fd| / max(|g|, |fd|, 1e-6).
GradCheckResult gradient_check(GradOp op, std::uint64_t seed, int max_coordinates = 24);

}  // namespace hsiu::ulnsa
