// Command-line surface for the breuil library.  Exit codes: 0 success,
// 1 mathematical negative (e.g. "not unipotent"), 2 error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "breuil/abelian.hpp"
#include "breuil/functors.hpp"
#include "breuil/io.hpp"
#include "breuil/monodromy.hpp"
#include "breuil/phimod.hpp"
#include "breuil/selftest.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw breuil::ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw breuil::Error("cannot write " + path);
    out << text;
}

breuil::PhiModule load_module(const std::string& path) {
    return breuil::parse_module(read_file(path)).module;
}

std::string exponents_str(const breuil::PhiModule& m) {
    std::string out = "[";
    const std::vector<int> exps = breuil::invariant_exponents(m);
    for (size_t i = 0; i < exps.size(); ++i)
        out += (i ? "," : "") + std::to_string(exps[i]);
    return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic for filtered phi-modules over truncated polynomial rings"};
    app.require_subcommand(1);
    int exit_code = 0;

    // validate
    {
        auto* cmd = app.add_subcommand("validate", "validate a module document");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file, "module document")->required();
        cmd->callback([file, &exit_code] {
            try {
                const breuil::ParsedModule pm = breuil::parse_module(read_file(*file));
                std::cout << "valid: p=" << pm.module.params.p << " e=" << pm.module.params.e
                          << " r=" << pm.module.params.r << " s=" << pm.module.params.s
                          << " rank=" << pm.module.rank() << " exponents=" << exponents_str(pm.module)
                          << (pm.n_op ? " with monodromy operator" : "") << "\n";
            } catch (const breuil::ValidationError& e) {
                std::cout << "invalid: " << e.what() << "\n";
                exit_code = 1;
            }
        });
    }
    // dual
    {
        auto* cmd = app.add_subcommand("dual", "Cartier dual of a module");
        auto file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("file", *file)->required();
        cmd->add_option("-o,--output", *out, "output document")->required();
        cmd->callback([file, out] {
            write_file(*out, breuil::serialize_module(breuil::cartier_dual(load_module(*file))));
        });
    }
    // parts
    {
        auto* cmd = app.add_subcommand("parts", "ranks of the four parts");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file)->required();
        cmd->callback([file] {
            const breuil::PartsDecomposition pd = breuil::parts(load_module(*file));
            std::cout << "m=" << pd.m_part.rank() << " nil=" << pd.nil_quotient.rank()
                      << " uni=" << pd.uni_part.rank() << " et=" << pd.et_quotient.rank() << "\n";
        });
    }
    // is-unipotent
    {
        auto* cmd = app.add_subcommand("is-unipotent", "unipotency predicate");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file)->required();
        cmd->callback([file, &exit_code] {
            if (breuil::is_unipotent(load_module(*file))) {
                std::cout << "unipotent\n";
            } else {
                std::cout << "not unipotent\n";
                exit_code = 1;
            }
        });
    }
    // hom
    {
        auto* cmd = app.add_subcommand("hom", "F_p-basis of Hom(source, target)");
        auto src = std::make_shared<std::string>();
        auto tgt = std::make_shared<std::string>();
        cmd->add_option("source", *src)->required();
        cmd->add_option("target", *tgt)->required();
        cmd->callback([src, tgt] {
            const auto basis = breuil::hom_space(load_module(*src), load_module(*tgt));
            std::cout << "dimension " << basis.size() << "\n";
            for (size_t i = 0; i < basis.size(); ++i)
                std::cout << "basis " << i << " phi(X):\n"
                          << breuil::serialize_matrix(basis[i].phi_x);
        });
    }
    // truncate / lift
    {
        auto* cmd = app.add_subcommand("truncate", "reduce a module to a lower order");
        auto file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(0);
        cmd->add_option("file", *file)->required();
        cmd->add_option("--to", *level, "target order")->required();
        cmd->add_option("-o,--output", *out)->required();
        cmd->callback([file, out, level] {
            const breuil::ParsedModule pm = breuil::parse_module(read_file(*file));
            if (pm.n_op) throw breuil::Error("monodromy documents cannot be truncated");
            write_file(*out, breuil::serialize_module(breuil::truncate_object(pm.module, *level)));
        });
    }
    {
        auto* cmd = app.add_subcommand("lift", "lift a module to a higher order");
        auto file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto level = std::make_shared<int>(0);
        cmd->add_option("file", *file)->required();
        cmd->add_option("--to", *level, "target order")->required();
        cmd->add_option("-o,--output", *out)->required();
        cmd->callback([file, out, level] {
            const breuil::ParsedModule pm = breuil::parse_module(read_file(*file));
            if (pm.n_op) throw breuil::Error("monodromy documents cannot be lifted");
            write_file(*out, breuil::serialize_module(breuil::lift_object(pm.module, *level)));
        });
    }
    // ker / coker / im
    {
        auto add_morphism_cmd = [&](const std::string& name, const std::string& desc, int which) {
            auto* cmd = app.add_subcommand(name, desc);
            auto file = std::make_shared<std::string>();
            auto out = std::make_shared<std::string>();
            cmd->add_option("morphism", *file, "morphism document")->required();
            cmd->add_option("-o,--output", *out)->required();
            cmd->callback([file, out, which, name] {
                const breuil::PhiMorphism f = breuil::parse_morphism(read_file(*file));
                breuil::PhiModule result = [&] {
                    if (which == 0) return breuil::kernel(f).module;
                    if (which == 1) return breuil::cokernel(f).module;
                    return breuil::image(f).module;
                }();
                std::cout << name << " rank " << result.rank() << "\n";
                write_file(*out, breuil::serialize_module(result));
            });
        };
        add_morphism_cmd("ker", "kernel of a morphism", 0);
        add_morphism_cmd("coker", "cokernel of a morphism", 1);
        add_morphism_cmd("im", "image of a morphism", 2);
    }
    // check-exact
    {
        auto* cmd = app.add_subcommand("check-exact", "verify a short exact sequence");
        auto file = std::make_shared<std::string>();
        cmd->add_option("sequence", *file)->required();
        cmd->callback([file, &exit_code] {
            const breuil::ExactnessReport rep =
                breuil::check_exact(breuil::parse_sequence(read_file(*file)));
            std::cout << (rep.pass ? "exact" : "not exact: " + rep.detail) << "\n";
            if (!rep.pass) exit_code = 1;
        });
    }
    // extend
    {
        auto* cmd = app.add_subcommand("extend", "build an extension of two modules");
        auto m1 = std::make_shared<std::string>();
        auto m2 = std::make_shared<std::string>();
        auto block = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto seed = std::make_shared<uint64_t>(0);
        cmd->add_option("sub", *m1, "submodule document")->required();
        cmd->add_option("quot", *m2, "quotient document")->required();
        cmd->add_option("--block", *block, "matrix document for the connecting block");
        cmd->add_option("--seed", *seed, "seed for a random block");
        cmd->add_option("-o,--output", *out)->required();
        cmd->callback([m1, m2, block, out, seed] {
            const breuil::PhiModule sub = load_module(*m1);
            const breuil::PhiModule quot = load_module(*m2);
            breuil::Matrix c0(sub.params.p, sub.params.s, quot.rank(), sub.rank());
            if (!block->empty()) {
                c0 = breuil::parse_matrix(read_file(*block));
                if (c0.field_char() != sub.params.p || c0.order() != sub.params.s)
                    throw breuil::ParamMismatch("block matrix lives in the wrong ring");
            } else {
                breuil::Rng rng(*seed);
                c0 = breuil::random_matrix(rng, sub.params.p, sub.params.s, quot.rank(), sub.rank());
            }
            write_file(*out, breuil::serialize_sequence(breuil::build_extension(sub, quot, c0)));
        });
    }
    // check-n
    {
        auto* cmd = app.add_subcommand("check-n", "verify the monodromy axioms");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file)->required();
        cmd->callback([file, &exit_code] {
            const breuil::ParsedModule pm = breuil::parse_module(read_file(*file));
            const breuil::MonodromyReport rep = breuil::check_monodromy(pm.monodromy());
            std::cout << "filtration stability: " << (rep.fil_stable ? "pass" : "fail") << "\n"
                      << "frobenius diagram:    " << (rep.diagram ? "pass" : "fail") << "\n";
            if (!rep.pass()) {
                std::cout << rep.detail << "\n";
                exit_code = 1;
            }
        });
    }
    // filcmp
    {
        auto* cmd = app.add_subcommand("filcmp", "compare filtration quotient dimensions");
        auto a = std::make_shared<int>(0);
        auto b = std::make_shared<int>(0);
        auto s1 = std::make_shared<int>(0);
        auto s2 = std::make_shared<int>(0);
        auto e = std::make_shared<int>(2);
        cmd->add_option("--a", *a, "lower level")->required();
        cmd->add_option("--b", *b, "upper level")->required();
        cmd->add_option("--s", *s1, "first truncation order")->required();
        cmd->add_option("--s2", *s2, "second truncation order")->required();
        cmd->add_option("--e", *e, "ramification index (default 2)");
        cmd->callback([a, b, s1, s2, e, &exit_code] {
            const int d1 = breuil::fil_quotient_dim(*a, *b, *e, *s1);
            const int d2 = breuil::fil_quotient_dim(*a, *b, *e, *s2);
            std::cout << "dim Fil^" << *a << "/Fil^" << *b << ": s=" << *s1 << " gives " << d1
                      << ", s=" << *s2 << " gives " << d2 << " -- "
                      << (d1 == d2 ? "isomorphic" : "not isomorphic") << "\n";
            if (d1 != d2) exit_code = 1;
        });
    }
    // gen
    {
        auto* cmd = app.add_subcommand("gen", "generate a seeded random module");
        auto seed = std::make_shared<uint64_t>(0);
        auto p = std::make_shared<int>(3);
        auto e = std::make_shared<int>(2);
        auto r = std::make_shared<int>(1);
        auto s = std::make_shared<int>(6);
        auto rank = std::make_shared<int>(2);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--seed", *seed)->required();
        cmd->add_option("--p", *p);
        cmd->add_option("--e", *e);
        cmd->add_option("--r", *r);
        cmd->add_option("--s", *s);
        cmd->add_option("--rank", *rank);
        cmd->add_option("-o,--output", *out)->required();
        cmd->callback([seed, p, e, r, s, rank, out] {
            const breuil::RingParams params(*p, *e, *r, *s);
            write_file(*out, breuil::serialize_module(breuil::random_object(*seed, params, *rank)));
        });
    }
    // selftest
    {
        auto* cmd = app.add_subcommand("selftest", "run the property suites");
        auto iterations = std::make_shared<int>(100);
        auto seed = std::make_shared<uint64_t>(1);
        auto suites = std::make_shared<std::vector<std::string>>();
        cmd->add_option("--iterations", *iterations, "instances per suite (default 100)");
        cmd->add_option("--seed", *seed, "base seed (default 1, env SELFTEST_SEED overrides)");
        cmd->add_option("--suite", *suites, "restrict to named suites");
        cmd->callback([iterations, seed, suites, &exit_code] {
            breuil::selftest::Options opt;
            opt.iterations = *iterations;
            opt.seed = *seed;
            if (const char* env = std::getenv("SELFTEST_SEED")) opt.seed = std::strtoull(env, nullptr, 10);
            opt.suites = *suites;
            const auto results = breuil::selftest::run_selftest(opt);
            if (results.empty()) throw breuil::Error("no such suite");
            bool all = true;
            for (const auto& res : results) {
                std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.name << " (" << res.checks
                          << " checks)" << (res.pass ? "" : ": " + res.detail) << "\n";
                all = all && res.pass;
            }
            std::cout << (all ? "selftest: all suites green\n" : "selftest: failures present\n");
            if (!all) exit_code = 1;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const breuil::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
