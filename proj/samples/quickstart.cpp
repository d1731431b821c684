// Smallest useful tour: build a carpet, get the unperturbed dimension,
// solve the shrinking-target maximization, inspect what was active, and
// sample the entropy frontier the optimum lives on.

#include <cstdio>

#include <carpetdim/carpetdim.hpp>

using namespace carpetdim;

int main() {
    // N = 3 columns, M = 8 rows, fiber counts per occupied column
    auto spec = CarpetSpec::from_fiber_counts(3, 8, {5, 2, 8});

    std::printf("tau          %.6f\n", spec.tau());
    std::printf("McMullen dim %.9f\n\n", mcmullen_dimension(spec));

    // cylinder targets shrinking at rate alpha
    for (double alpha : {0.25, 1.0, 4.0}) {
        auto r = maximize(spec, cylinder_params(alpha));
        std::printf("alpha %-5g DIM %.9f  active {", alpha, r.value);
        for (int i : r.breakdown.active_indices()) std::printf(" d%d", i);
        std::printf(" }\n");
    }

    // ball targets need the limiting fiber-entropy H of the target measure
    auto nu = distinguished_measures(spec).p_d;
    auto rb = maximize(spec, ball_params(spec, 1.0, bernoulli_H(spec, nu)));
    std::printf("\nball, H from p_d: DIM %.9f\n", rb.value);

    // the maximizing quadruple, lifted back to probability vectors
    const char* label[] = {"p-", "p1", "p2", "p+"};
    for (int i = 0; i < 4; ++i) {
        const auto& p = rb.vectors[static_cast<std::size_t>(i)];
        std::printf("  %s  h %.6f  h_r %.6f\n", label[i], entropy(p),
                    row_entropy(spec, p));
    }

    // psi(z) = max entropy at fixed row entropy; the optimum sits on it
    Frontier f(spec);
    std::printf("\nfrontier on [%.4f, %.4f]:\n", f.z_lo(), f.z_hi());
    for (int i = 0; i <= 4; ++i) {
        double z = f.z_lo() + (f.z_hi() - f.z_lo()) * i / 4.0;
        std::printf("  z %.4f  psi %.6f\n", z, f.psi(z));
    }
    return 0;
}
