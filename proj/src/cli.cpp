#include "kgalign/cli.hpp"

#include "kgalign/errors.hpp"
#include "kgalign/experiments.hpp"
#include "kgalign/gradcheck.hpp"
#include "kgalign/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <random>
#include <sstream>

namespace kgalign {

namespace {

std::vector<double> parse_values_csv(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InvalidArgument("--values: '" + tok + "' is not a number");
        }
    }
    if (values.empty()) throw InvalidArgument("--values: no values given");
    return values;
}

void run_vsa_demo(int dimension, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const HyperVector kw_name = random_bipolar(dimension, rng);
    const HyperVector kw_job = random_bipolar(dimension, rng);

    VsaSpace space("demo", dimension, /*trainable=*/false);
    for (const char* name : {"A", "B", "C", "E"}) {
        space.add_symbol(name, SymbolKind::Entity, random_bipolar(dimension, rng));
    }

    const HyperVector record =
        bundle({bind(kw_name, space.symbol("A")), bind(kw_job, space.symbol("B"))});

    std::printf("dimension %d, 4 stored symbols\n", dimension);
    std::printf("record K = [name * A] + [job * B]\n");
    const auto [who, cos_who] = nearest_symbol(space, bind(record, kw_name));
    std::printf("query K * name -> nearest symbol '%s' (cosine %.3f)\n", who.c_str(), cos_who);
    const auto [what, cos_what] = nearest_symbol(space, bind(record, kw_job));
    std::printf("query K * job  -> nearest symbol '%s' (cosine %.3f)\n", what.c_str(), cos_what);
}

int run_check_gradients(int seeds) {
    struct Suite {
        const char* name;
        double (*run)(std::uint64_t);
        double tolerance;
    };
    const Suite suites[] = {
        {"loss_k", gradcheck_loss_k, 1e-4},     {"loss_r1", gradcheck_loss_r1, 1e-4},
        {"loss_r2", gradcheck_loss_r2, 1e-4},   {"regression", gradcheck_regression, 1e-4},
        {"task", gradcheck_task, 1e-4},         {"full_network", gradcheck_full_network, 1e-3},
    };
    bool all_ok = true;
    for (const auto& s : suites) {
        double worst = 0.0;
        for (int k = 0; k < seeds; ++k) {
            worst = std::max(worst, s.run(static_cast<std::uint64_t>(k) + 1));
        }
        const bool ok = worst <= s.tolerance;
        all_ok = all_ok && ok;
        std::printf("%-14s max rel error %.3e over %d seeds (tolerance %.0e) %s\n", s.name,
                    worst, seeds, s.tolerance, ok ? "ok" : "FAIL");
    }
    return all_ok ? 0 : 2;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"VSA-based alignment of network-generated and human knowledge graphs"};
    app.require_subcommand(1);

    std::uint64_t seed_override = 0;
    bool seed_set = false;
    app.add_option("--seed", seed_override, "override the master seed of any subcommand")
        ->each([&](const std::string&) { seed_set = true; });

    // exp1
    auto* exp1 = app.add_subcommand("exp1", "joint digit-classification alignment run");
    std::string exp1_config, exp1_mnist, exp1_kg, exp1_out;
    exp1->add_option("--config", exp1_config, "training config JSON");
    exp1->add_option("--mnist-dir", exp1_mnist, "directory with the four IDX files")->required();
    exp1->add_option("--kg", exp1_kg, "human knowledge graph JSON")->required();
    exp1->add_option("--out", exp1_out, "output directory")->required();

    // exp2
    auto* exp2 = app.add_subcommand("exp2", "synthetic graph-alignment sweep");
    std::string exp2_axis, exp2_values, exp2_out;
    int exp2_seeds = 5;
    int exp2_dimension = 1024;
    int exp2_epochs = 10;
    int exp2_steps = 40;
    double exp2_lr = 1e-2;
    exp2->add_option("--axis", exp2_axis,
                     "entity_count | relation_proportion | triplet_proportion | "
                     "distribution_alpha | nn_concept_ratio")
        ->required();
    exp2->add_option("--values", exp2_values, "comma-separated sweep values")->required();
    exp2->add_option("--seeds", exp2_seeds, "seeds per sweep point");
    exp2->add_option("--out", exp2_out, "output directory")->required();
    exp2->add_option("--dimension", exp2_dimension, "hypervector dimension");
    exp2->add_option("--epochs", exp2_epochs, "matching epochs");
    exp2->add_option("--steps-per-epoch", exp2_steps, "optimizer steps per matching");
    exp2->add_option("--lr", exp2_lr, "symbol-vector learning rate");

    // vsa-demo
    auto* demo = app.add_subcommand("vsa-demo", "bind/bundle/query walkthrough");
    int demo_dimension = 1024;
    demo->add_option("--dimension", demo_dimension, "hypervector dimension");

    // check-gradients
    auto* gradcheck = app.add_subcommand("check-gradients", "finite-difference suites");
    int grad_seeds = 20;
    gradcheck->add_option("--seeds", grad_seeds, "seeds per suite");

    // make-digits
    auto* digits = app.add_subcommand("make-digits", "write a synthetic IDX digit corpus");
    std::string digits_out;
    int digits_train = 60000;
    int digits_test = 10000;
    digits->add_option("--out", digits_out, "output directory")->required();
    digits->add_option("--train", digits_train, "training sample count");
    digits->add_option("--test", digits_test, "test sample count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (exp1->parsed()) {
            TrainConfig cfg =
                exp1_config.empty() ? TrainConfig{} : TrainConfig::load(exp1_config);
            if (seed_set) cfg.master_seed = seed_override;
            run_experiment1(cfg, exp1_kg, exp1_mnist, exp1_out);
            std::printf("experiment 1 outputs written to %s\n", exp1_out.c_str());
        } else if (exp2->parsed()) {
            SweepSpec sweep;
            sweep.axis = sweep_axis_from_name(exp2_axis);
            sweep.values = parse_values_csv(exp2_values);
            sweep.seeds_per_point = exp2_seeds;
            sweep.align.dimension = exp2_dimension;
            sweep.align.epochs = exp2_epochs;
            sweep.align.steps_per_epoch = exp2_steps;
            sweep.align.learning_rate = exp2_lr;
            if (seed_set) sweep.align.seed = seed_override;
            run_experiment2(sweep, exp2_out);
            std::printf("sweep written to %s/sweep.csv\n", exp2_out.c_str());
        } else if (demo->parsed()) {
            if (demo_dimension < 1) throw InvalidArgument("--dimension must be >= 1");
            run_vsa_demo(demo_dimension, seed_set ? seed_override : 42);
        } else if (gradcheck->parsed()) {
            return run_check_gradients(grad_seeds);
        } else if (digits->parsed()) {
            write_digit_corpus(digits_out, digits_train, digits_test,
                               seed_set ? seed_override : 7);
            std::printf("digit corpus written to %s\n", digits_out.c_str());
        }
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const KgParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const UnknownName& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DuplicateTriplet& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IdxError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 2;
    }
    return 0;
}

} // namespace kgalign
