// Classifies a few sequences on a geometric partition and prints the verdicts.

#include <iomanip>
#include <iostream>

#include "lacuna/lacuna.hpp"

int main()
{
    using namespace lacuna;

    const LacunaryPartition theta = dsl::partition("geometric(1, 2, 12)");
    const Modulus f = dsl::modulus("power(0.5)");
    const char* inputs[] = {
        "gcdclass(6, 1:0.1, 2:0.2, 3:0.3, 6:0.6)",
        "perturbed(6, 0.001, 1:0.1, 2:0.2, 3:0.3, 6:0.6)",
        "harmonic(1)",
        "blockspike(geometric(1, 2, 12), 1, 1)",
    };

    ClassifyConfig config;
    config.eps = 1e-2;
    for (const char* text : inputs) {
        const ConvergenceReport rep = classify(dsl::sequence(text), theta, f, config);
        std::cout << rep.sequence << "\n";
        for (const auto& e : rep.spaces)
            std::cout << "  " << std::left << std::setw(12) << to_string(e.space) << std::setw(14)
                      << to_string(e.verdict) << "n = " << e.witness_n.value_or(0) << ", tail = " << e.tail_stat
                      << "\n";
    }

    const auto gap = theorems::search_separator(dsl::partition("points(2, 4, 16, 256, 65536)"),
                                                theorems::SeparatorTarget::theta_not_sigma, 10000);
    if (gap)
        std::cout << "separator: " << gap->sequence.name() << "\n  theta tail " << gap->theta_stat
                  << ", sigma tail " << gap->sigma_stat << "\n";
}
