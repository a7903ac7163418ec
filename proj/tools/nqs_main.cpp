// Command-line driver: build analytic or trained network states, query exact
// observable values, run single phase-reweighted estimates, and reproduce the
// convergence / size-scaling studies as CSV datasets.

#include "nqs/experiments.hpp"
#include "nqs/sampler.hpp"
#include "nqs/states.hpp"
#include "nqs/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

void add_spec_flags(CLI::App* cmd, nqs::ExperimentSpec& spec) {
    cmd->add_option("--seed", spec.seed, "base seed");
    cmd->add_option("--chains", spec.chains, "independent Gibbs chains");
    cmd->add_option("--burn-in", spec.burn_in, "discarded sweeps per chain");
    cmd->add_option("--thin", spec.thin, "sweeps between records");
    cmd->add_option("--threads", spec.threads, "worker threads (0 = hardware)");
    cmd->add_option("--field", spec.field, "transverse field strength for trained states");
    cmd->add_option("--train-seed", spec.train_seed, "training parameter-init seed");
    cmd->add_option("--train-iters", spec.train_iters, "max SR iterations");
    cmd->add_option("--learning-rate", spec.learning_rate, "SR learning rate");
    cmd->add_option("--params-dir", spec.params_dir, "cache directory for trained parameters");
}

int cmd_state(const std::string& state, const nqs::ExperimentSpec& spec, const std::string& out,
              const std::string& export_state, const std::string& train_log) {
    nqs::ExperimentSpec s = spec;
    s.state = state;
    if (state.rfind("tfim:", 0) == 0 && !train_log.empty()) {
        nqs::TrainConfig cfg;
        cfg.n_spins = std::stoi(state.substr(5));
        cfg.coupling = s.coupling;
        cfg.field = s.field;
        cfg.learning_rate = s.learning_rate;
        cfg.max_iters = s.train_iters;
        cfg.seed = s.train_seed;
        const nqs::TrainResult res = nqs::train_ground_state(cfg);
        auto f = open_out(train_log);
        f << "iter,energy,grad_norm\n";
        char buf[80];
        for (size_t i = 0; i < res.log.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, res.log[i][0], res.log[i][1]);
            f << buf;
        }
        if (!out.empty()) nqs::save_params(res.params, out);
        std::cout << "trained " << state << ": energy " << res.energy << " after "
                  << res.iterations << " iterations" << (res.converged ? "" : " (not converged)")
                  << "\n";
        if (!export_state.empty()) {
            auto g = open_out(export_state);
            nqs::save_state_vector(nqs::network_state_vector(res.params), g);
        }
        return 0;
    }
    const nqs::StateBundle bundle = nqs::resolve_state(state, s);
    if (!out.empty()) nqs::save_params(bundle.params, out);
    if (!export_state.empty()) {
        auto f = open_out(export_state);
        nqs::save_state_vector(nqs::network_state_vector(bundle.params), f);
    }
    std::cout << "state " << state << ": " << bundle.params.n_visible << " visible, "
              << bundle.params.n_hidden << " hidden units\n";
    return 0;
}

int cmd_exact(const std::string& state, const std::vector<std::string>& observables,
              const nqs::ExperimentSpec& spec) {
    nqs::ExperimentSpec s = spec;
    s.state = state;
    const nqs::StateBundle bundle = nqs::resolve_state(state, s);
    const int n = static_cast<int>(bundle.params.n_visible);
    char buf[128];
    for (const std::string& text : observables) {
        if (text == "chsh") {
            nqs::PauliString zz, xx;
            zz.axes.assign(n, nqs::Pauli::I);
            xx.axes.assign(n, nqs::Pauli::I);
            zz.axes[0] = zz.axes[1] = nqs::Pauli::Z;
            xx.axes[0] = xx.axes[1] = nqs::Pauli::X;
            const double b = nqs::chsh(nqs::full_sum_expectation(bundle.params, xx),
                                       nqs::full_sum_expectation(bundle.params, zz));
            std::snprintf(buf, sizeof(buf), "chsh %.17g", b);
            std::cout << buf;
            if (bundle.target) {
                std::snprintf(buf, sizeof(buf), " %.17g",
                              nqs::chsh(nqs::pauli_expectation(*bundle.target, xx),
                                        nqs::pauli_expectation(*bundle.target, zz)));
                std::cout << buf;
            }
            std::cout << "\n";
            continue;
        }
        const nqs::PauliString op = nqs::parse_observable(text, n);
        std::snprintf(buf, sizeof(buf), "%s %.17g", op.str().c_str(),
                      nqs::full_sum_expectation(bundle.params, op));
        std::cout << buf;
        if (bundle.target) {
            std::snprintf(buf, sizeof(buf), " %.17g", nqs::pauli_expectation(*bundle.target, op));
            std::cout << buf;
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_sample(nqs::ExperimentSpec spec, const std::string& out, const std::string& dump) {
    const std::vector<nqs::ResultRow> rows = nqs::run_convergence_experiment(spec);
    if (out.empty()) {
        nqs::write_convergence_csv(rows, std::cout);
    } else {
        auto f = open_out(out);
        nqs::write_convergence_csv(rows, f);
    }
    if (!dump.empty()) {
        const nqs::StateBundle bundle = nqs::resolve_state(spec.state, spec);
        const nqs::PauliString op = nqs::parse_observable(spec.observables.front(),
                                                          static_cast<int>(bundle.params.n_visible));
        const nqs::MeasurementBasis basis =
            spec.basis == "auto" ? nqs::auto_basis(op, op.n_sites()) : nqs::parse_basis(spec.basis);
        const nqs::LayeredNetwork net = nqs::attach_rotations(bundle.params, basis);
        nqs::SamplerConfig cfg;
        cfg.n_samples = spec.schedule.front();
        cfg.burn_in = spec.burn_in;
        cfg.thin = spec.thin;
        cfg.n_chains = spec.chains;
        cfg.seed = nqs::job_seed(spec.seed, 0, 0, 0);
        std::vector<std::string> chunks(cfg.n_chains);
        nqs::run_chains_visit(
            net, cfg,
            [&chunks](int chain) -> nqs::RecordVisitor {
                auto* sink = &chunks[chain];
                return [sink](const nqs::SampleRecord& r) {
                    *sink += std::to_string(r.chain) + " " + std::to_string(r.sweep);
                    for (auto s : r.visible) *sink += s == 1 ? " 1" : " -1";
                    char b[40];
                    std::snprintf(b, sizeof(b), " %.17g\n", r.phase);
                    *sink += b;
                };
            },
            spec.threads);
        auto f = open_out(dump);
        for (const std::string& c : chunks) f << c;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural quantum state sampler with phase reweighting"};
    app.require_subcommand(1);

    nqs::ExperimentSpec spec;
    std::string state, out, export_state, dump, config_path, train_log;
    std::vector<std::string> observables;
    std::string basis = "auto";
    std::string samples = "1000000";

    auto* c_state = app.add_subcommand("state", "build and save network parameters");
    c_state->add_option("--state", state, "state name")->required();
    c_state->add_option("--out", out, "parameter file to write");
    c_state->add_option("--export-state", export_state, "state-vector file to write");
    c_state->add_option("--train-log", train_log, "training log CSV (trained states)");
    add_spec_flags(c_state, spec);

    auto* c_exact = app.add_subcommand("exact", "exact observable values from the oracle");
    c_exact->add_option("--state", state, "state name")->required();
    c_exact->add_option("--observable", observables, "observables (comma or repeated)")
        ->required()
        ->delimiter(',');
    add_spec_flags(c_exact, spec);

    int repeats = 1;
    auto* c_sample = app.add_subcommand("sample", "one phase-reweighted estimate");
    c_sample->add_option("--state", state, "state name")->required();
    c_sample->add_option("--observable", observables, "observables")->required()->delimiter(',');
    c_sample->add_option("--basis", basis, "measurement basis (default: auto)");
    c_sample->add_option("--samples", samples, "sample count");
    c_sample->add_option("--repeats", repeats, "independent runs");
    c_sample->add_option("--out", out, "CSV output (default stdout)");
    c_sample->add_option("--dump", dump, "raw record dump file: chain sweep v... phase");
    add_spec_flags(c_sample, spec);

    auto* c_conv = app.add_subcommand("convergence", "deviation vs sample count study");
    c_conv->add_option("--config", config_path, "experiment config file")->required();
    c_conv->add_option("--out", out, "CSV output")->required();
    c_conv->add_option("--threads", spec.threads, "override worker threads");

    auto* c_size = app.add_subcommand("size-scaling", "deviation vs system size study");
    c_size->add_option("--config", config_path, "experiment config file")->required();
    c_size->add_option("--out", out, "CSV output")->required();
    c_size->add_option("--threads", spec.threads, "override worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_state->parsed()) return cmd_state(state, spec, out, export_state, train_log);
        if (c_exact->parsed()) {
            spec.state = state;
            return cmd_exact(state, observables, spec);
        }
        if (c_sample->parsed()) {
            spec.state = state;
            spec.observables = observables;
            spec.basis = basis;
            spec.repeats = repeats;
            char* end = nullptr;
            const double q = std::strtod(samples.c_str(), &end);
            if (end == samples.c_str() || *end != '\0' || q < 1.0)
                throw std::invalid_argument("--samples: expected a positive count");
            spec.schedule = {static_cast<long>(q)};
            return cmd_sample(spec, out, dump);
        }
        const bool size_scaling = c_size->parsed();
        nqs::ExperimentSpec file_spec = nqs::parse_config_file(config_path);
        if (spec.threads != 0) file_spec.threads = spec.threads;
        auto f = open_out(out);
        if (size_scaling) {
            nqs::write_size_scaling_csv(nqs::run_size_scaling_experiment(file_spec), f);
        } else {
            nqs::write_convergence_csv(nqs::run_convergence_experiment(file_spec), f);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
