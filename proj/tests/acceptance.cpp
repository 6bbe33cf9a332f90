// Acceptance gate: one binary, one pass/fail line per criterion, exit 0
// only when every requested criterion holds.  All checks are exact; there
// are no tolerances anywhere.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "breuil/selftest.hpp"

namespace {

struct Criterion {
    int number;
    std::string title;
    breuil::selftest::Outcome (*fn)(uint64_t seed, const std::string& cli);
};

using breuil::selftest::Outcome;

Outcome crit_duality(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_duality(200, seed);
}
Outcome crit_adapted(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_adapted_basis(50, seed);
}
Outcome crit_unipotency(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_unipotency(500, seed);
}
Outcome crit_equivalence(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_equivalence(100, seed);
}
Outcome crit_abelian(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_abelian_p(100, seed);
}
Outcome crit_transport(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_abelian_transport(50, seed);
}
Outcome crit_extensions(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_extensions(200, seed);
}
Outcome crit_parts(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_parts(200, seed);
}
Outcome crit_filtration(uint64_t, const std::string&) {
    return breuil::selftest::suite_filtration();
}
Outcome crit_monodromy(uint64_t seed, const std::string&) {
    return breuil::selftest::suite_monodromy(100, seed);
}
Outcome crit_io(uint64_t seed, const std::string& cli) {
    Outcome out = breuil::selftest::suite_io(200, seed);
    if (!out.pass) return out;
    if (cli.empty()) {
        out.pass = false;
        out.detail = "no --cli path given, cannot run the end-to-end selftest";
        return out;
    }
    const std::string cmd = cli + " selftest --iterations 30 --seed " + std::to_string(seed);
    std::cout << "  [running: " << cmd << "]" << std::endl;
    const int rc = std::system(cmd.c_str());
    ++out.checks;
    if (rc != 0) {
        out.pass = false;
        out.detail = "CLI selftest exited nonzero (a suite is red)";
    }
    return out;
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> c = {
        {1, "duality: dual(dual(M)) ~ M and dual exchanges the parts rows (200 instances)", crit_duality},
        {2, "adapted basis: exhaustive element oracle at p=3, s=3, d=2 (50 sets)", crit_adapted},
        {3, "unipotency: dual test vs product test, exhaustive rank 1 + 500 seeded", crit_unipotency},
        {4, "equivalence: round trips, Hom dimensions, regime rejection (100/regime)", crit_equivalence},
        {5, "abelianness at s=p: kernels/cokernels/images + universal properties (100)", crit_abelian},
        {6, "transported abelianness at er=p-1, s>p on unipotent objects (50)", crit_transport},
        {7, "extensions: unipotent iff both ends; truncation keeps exactness (200)", crit_extensions},
        {8, "parts: multiplicative part free with Fil = u^{er}, exact rows (200)", crit_parts},
        {9, "filtration dims: equality between s=p and s=2p iff e*b <= p (exhaustive)", crit_filtration},
        {10, "monodromy: documented examples, Leibniz, rejections (100)", crit_monodromy},
        {11, "io: bit-exact round trips; CLI selftest exits 0 with all suites green", crit_io},
    };
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;  // 0 = all
    uint64_t seed = 1;
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&](const char* name) -> std::string {
            if (i + 1 >= argc) {
                std::cerr << "missing value for " << name << "\n";
                std::exit(2);
            }
            return argv[++i];
        };
        if (arg == "--criterion")
            which = std::atoi(next("--criterion").c_str());
        else if (arg == "--seed")
            seed = std::strtoull(next("--seed").c_str(), nullptr, 10);
        else if (arg == "--cli")
            cli = next("--cli");
        else if (arg == "--all")
            which = 0;
        else {
            std::cerr << "usage: acceptance [--criterion N] [--seed S] [--cli PATH]\n";
            return 2;
        }
    }

    bool all_pass = true;
    for (const Criterion& crit : criteria()) {
        if (which != 0 && crit.number != which) continue;
        const Outcome out = crit.fn(seed, cli);
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << crit.number << ": "
                  << crit.title << " (" << out.checks << " checks)"
                  << (out.pass ? "" : " -- " + out.detail) << "\n";
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
