#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mifi/commands.hpp"
#include "mifi/config.hpp"
#include "mifi/error.hpp"

namespace {

int dispatch(CLI::App& app, CLI::App* synth, CLI::App* train, CLI::App* eval,
             CLI::App* gradcheck, CLI::App* sweep, CLI::App* keyframes);

struct Flags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;

    std::string fusion, loss, dataset;
    double beta = 0, gamma = 0, lambda1 = 0, lambda2 = 0, gamma_fl = 0, lr = 0;
    int epochs = 0, batch_size = 0, view = 0;
    std::vector<int> decay_epochs;
    int train_drivers = 0, val_drivers = 0, test_drivers = 0;

    std::string run_dir;
    std::string split = "test";
    int eval_view = -1;

    bool corrupt = false;
    std::vector<double> betas = {1, 2, 3, 4, 5, 6};
    int total_epochs = 100;

    std::string kf_input, kf_output;
    std::size_t kf_n = 1;
};

Flags flags;

mifi::RunConfig effective_config(const CLI::App& app, const CLI::App* sub) {
    mifi::RunConfig cfg;
    if (app.count("--config")) cfg = mifi::load_config_file(flags.config_path);
    if (app.count("--seed")) cfg.seed = flags.seed;
    if (app.count("--out")) cfg.out = flags.out;
    if (sub == nullptr) return cfg;
    if (sub->count("--fusion")) cfg.fusion = flags.fusion;
    if (sub->count("--loss")) cfg.loss = flags.loss;
    if (sub->count("--beta")) cfg.beta = flags.beta;
    if (sub->count("--gamma")) cfg.gamma = flags.gamma;
    if (sub->count("--lambda1")) cfg.lambda1 = flags.lambda1;
    if (sub->count("--lambda2")) cfg.lambda2 = flags.lambda2;
    if (sub->count("--gamma-fl")) cfg.gamma_fl = flags.gamma_fl;
    if (sub->count("--lr")) cfg.lr = flags.lr;
    if (sub->count("--epochs")) cfg.epochs = flags.epochs;
    if (sub->count("--batch-size")) cfg.batch_size = flags.batch_size;
    if (sub->count("--decay-epochs")) cfg.decay_epochs = flags.decay_epochs;
    if (sub->count("--dataset")) cfg.dataset = flags.dataset;
    if (sub->count("--view")) cfg.view = flags.view;
    if (sub->count("--train-drivers")) cfg.train_drivers = flags.train_drivers;
    if (sub->count("--val-drivers")) cfg.val_drivers = flags.val_drivers;
    if (sub->count("--test-drivers")) cfg.test_drivers = flags.test_drivers;
    return cfg;
}

int dispatch(CLI::App& app, CLI::App* synth, CLI::App* train, CLI::App* eval,
             CLI::App* gradcheck, CLI::App* sweep, CLI::App* keyframes) {
    if (app.got_subcommand(synth)) {
        mifi::RunConfig cfg = effective_config(app, nullptr);
        if (!app.count("--out")) cfg.out = "dataset";
        return mifi::cmd_synth(cfg);
    }
    if (app.got_subcommand(train)) {
        return mifi::cmd_train(effective_config(app, train));
    }
    if (app.got_subcommand(eval)) {
        return mifi::cmd_eval(flags.run_dir, flags.split, flags.eval_view);
    }
    if (app.got_subcommand(gradcheck)) {
        std::uint64_t seed = app.count("--seed") ? flags.seed : 0;
        return mifi::cmd_gradcheck(seed, flags.corrupt);
    }
    if (app.got_subcommand(sweep)) {
        std::string out = app.count("--out") ? flags.out : std::string("alpha_sweep.csv");
        return mifi::cmd_sweep_alpha(flags.betas, flags.total_epochs, out);
    }
    if (app.got_subcommand(keyframes)) {
        return mifi::cmd_keyframes(flags.kf_input, flags.kf_n, flags.kf_output);
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view feature fusion and re-weighted head training"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--config", flags.config_path, "JSON config file");
    app.add_option("--seed", flags.seed, "run seed");
    app.add_option("--out", flags.out, "output directory (or file for sweep-alpha)");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");

    CLI::App* train = app.add_subcommand("train", "train a classifier head");
    train->add_option("--fusion", flags.fusion, "sum|concat-c|concat-t|early");
    train->add_option("--loss", flags.loss, "ce|fl|asl|casl");
    train->add_option("--beta", flags.beta, "cyclical factor");
    train->add_option("--gamma", flags.gamma, "easy-term exponent");
    train->add_option("--lambda1", flags.lambda1, "hard-term exponent 1");
    train->add_option("--lambda2", flags.lambda2, "hard-term exponent 2");
    train->add_option("--gamma-fl", flags.gamma_fl, "focal exponent");
    train->add_option("--lr", flags.lr, "initial learning rate");
    train->add_option("--epochs", flags.epochs, "training epochs");
    train->add_option("--batch-size", flags.batch_size, "minibatch size");
    train->add_option("--decay-epochs", flags.decay_epochs, "step-decay epochs");
    train->add_option("--dataset", flags.dataset, "dataset directory (default: synthetic)");
    train->add_option("--view", flags.view, "0 = fused, 1/2 = single camera");
    train->add_option("--train-drivers", flags.train_drivers, "drivers in train split");
    train->add_option("--val-drivers", flags.val_drivers, "drivers in val split");
    train->add_option("--test-drivers", flags.test_drivers, "drivers in test split");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a trained run directory");
    eval->add_option("--run", flags.run_dir, "run directory")->required();
    eval->add_option("--split", flags.split, "train|val|test");
    eval->add_option("--view", flags.eval_view, "evaluate a single camera view");

    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "verify analytic gradients against finite differences");
    gradcheck->add_flag("--corrupt", flags.corrupt)->group(""); // test hook, hidden

    CLI::App* sweep = app.add_subcommand("sweep-alpha", "tabulate the blending factor curves");
    sweep->add_option("--betas", flags.betas, "cyclical factors to sweep");
    sweep->add_option("--et", flags.total_epochs, "total epochs");

    CLI::App* keyframes = app.add_subcommand("keyframes", "keep the most distinct frames");
    keyframes->add_option("--input", flags.kf_input, "input container")->required();
    keyframes->add_option("--n", flags.kf_n, "frames to keep")->required();
    keyframes->add_option("--output", flags.kf_output, "output container")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        return dispatch(app, synth, train, eval, gradcheck, sweep, keyframes);
    } catch (const mifi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mifi::InvalidInputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mifi::FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const mifi::IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const mifi::ShapeError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const mifi::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
