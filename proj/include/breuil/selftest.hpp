#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace breuil::selftest {

struct Outcome {
    std::string name;
    bool pass = false;
    long checks = 0;     // individual assertions exercised
    std::string detail;  // first failure, or a short summary
};

// Property suites.  Each runs exact checks over seeded instances on the
// default grids (p=3, e=2, r=1, s in 3..6) and (p=5, e=2, r=1, s in 5..10)
// and returns the first failure found, if any.
Outcome suite_ring(int iterations, uint64_t seed);
Outcome suite_adapted_basis(int sets, uint64_t seed);
Outcome suite_duality(int instances, uint64_t seed);
Outcome suite_unipotency(int seeded_instances, uint64_t seed);
Outcome suite_equivalence(int pairs_per_regime, uint64_t seed);
Outcome suite_abelian_p(int morphisms, uint64_t seed);
Outcome suite_abelian_transport(int morphisms, uint64_t seed);
Outcome suite_extensions(int count, uint64_t seed);
Outcome suite_parts(int count, uint64_t seed);
Outcome suite_filtration();
Outcome suite_monodromy(int iterations, uint64_t seed);
Outcome suite_io(int count, uint64_t seed);

std::vector<std::string> suite_names();

struct Options {
    int iterations = 100;
    uint64_t seed = 1;
    std::vector<std::string> suites;  // empty = all
};
std::vector<Outcome> run_selftest(const Options& options);

}  // namespace breuil::selftest
