#include "nqs/experiments.hpp"

#include "nqs/rng.hpp"
#include "nqs/states.hpp"
#include "nqs/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nqs {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

long parse_count(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v) || v < 1.0 ||
        v != std::floor(v) || v > 9e18)
        throw std::invalid_argument(what + ": expected a positive integer, got '" + s + "'");
    return static_cast<long>(v);
}

double parse_real(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
        throw std::invalid_argument(what + ": expected a number, got '" + s + "'");
    return v;
}

void format_field(std::string& line, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    line += buf;
}

}  // namespace

void ExperimentSpec::validate() const {
    // size-scaling runs synthesize per-size TFIM states and default their
    // observable set, so both keys are optional when 'sizes' is given
    if (state.empty() && sizes.empty())
        throw std::invalid_argument("experiment: 'state' is required");
    if (observables.empty() && sizes.empty())
        throw std::invalid_argument("experiment: 'observables' is required");
    if (schedule.empty()) throw std::invalid_argument("experiment: 'samples' is required");
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] < 1) throw std::invalid_argument("experiment: sample counts must be >= 1");
        if (i > 0 && schedule[i] <= schedule[i - 1])
            throw std::invalid_argument("experiment: sample schedule must be strictly increasing");
    }
    if (repeats < 1) throw std::invalid_argument("experiment: repeats must be >= 1");
    if (chains < 1) throw std::invalid_argument("experiment: chains must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("experiment: burn_in must be >= 0");
    if (thin < 1) throw std::invalid_argument("experiment: thin must be >= 1");
    if (train_iters < 1) throw std::invalid_argument("experiment: train_iters must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("experiment: learning_rate must be > 0");
    for (int n : sizes)
        if (n < 2) throw std::invalid_argument("experiment: sizes must be >= 2");
}

ExperimentSpec parse_config(std::istream& in) {
    ExperimentSpec spec;
    // defaults for everything except state/observables/samples are above;
    // fill the schedule default only if the file does not set one
    bool have_samples = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "state") {
                spec.state = val;
            } else if (key == "observables") {
                spec.observables = split_list(val);
            } else if (key == "samples") {
                spec.schedule.clear();
                for (const std::string& s : split_list(val))
                    spec.schedule.push_back(parse_count(s, "samples"));
                have_samples = true;
            } else if (key == "repeats") {
                const long r = std::strtol(val.c_str(), nullptr, 10);
                if (r < 1) throw std::invalid_argument("repeats must be >= 1");
                spec.repeats = static_cast<int>(r);
            } else if (key == "seed") {
                spec.seed = std::strtoull(val.c_str(), nullptr, 10);
            } else if (key == "chains") {
                spec.chains = static_cast<int>(parse_count(val, "chains"));
            } else if (key == "burn_in") {
                spec.burn_in = parse_count(val, "burn_in");
            } else if (key == "thin") {
                spec.thin = parse_count(val, "thin");
            } else if (key == "threads") {
                spec.threads = static_cast<int>(std::strtol(val.c_str(), nullptr, 10));
            } else if (key == "basis") {
                spec.basis = val;
            } else if (key == "sizes") {
                spec.sizes.clear();
                for (const std::string& s : split_list(val))
                    spec.sizes.push_back(static_cast<int>(parse_count(s, "sizes")));
            } else if (key == "field") {
                spec.field = parse_real(val, "field");
            } else if (key == "coupling") {
                spec.coupling = parse_real(val, "coupling");
            } else if (key == "train_seed") {
                spec.train_seed = std::strtoull(val.c_str(), nullptr, 10);
            } else if (key == "train_iters") {
                spec.train_iters = static_cast<int>(parse_count(val, "train_iters"));
            } else if (key == "learning_rate") {
                spec.learning_rate = parse_real(val, "learning_rate");
            } else if (key == "params_dir") {
                spec.params_dir = val;
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_samples) spec.schedule = {100, 1000, 10000, 100000, 1000000};
    spec.validate();
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    return parse_config(f);
}

PauliString parse_observable(const std::string& text, int n_sites) {
    if (text == "chsh")
        throw std::invalid_argument("parse_observable: 'chsh' is a derived quantity");
    const bool compact = std::any_of(text.begin(), text.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
    PauliString op;
    op.axes.assign(n_sites, Pauli::I);
    if (!compact) {
        const PauliString full = PauliString::parse(text);
        if (full.n_sites() != n_sites)
            throw std::invalid_argument("observable '" + text + "' has length " +
                                        std::to_string(full.n_sites()) + ", state has " +
                                        std::to_string(n_sites) + " sites");
        return full;
    }
    size_t i = 0;
    while (i < text.size()) {
        const char a = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (a != 'X' && a != 'Y' && a != 'Z')
            throw std::invalid_argument("observable '" + text + "': expected axis letter at '" +
                                        std::string(1, text[i]) + "'");
        ++i;
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i)
            throw std::invalid_argument("observable '" + text + "': missing site index");
        const int site = std::stoi(text.substr(start, i - start));
        if (site < 1 || site > n_sites)
            throw std::invalid_argument("observable '" + text + "': site " + std::to_string(site) +
                                        " out of range 1.." + std::to_string(n_sites));
        if (op.axes[site - 1] != Pauli::I)
            throw std::invalid_argument("observable '" + text + "': duplicate site " +
                                        std::to_string(site));
        op.axes[site - 1] = static_cast<Pauli>(a);
    }
    if (op.support().empty()) throw std::invalid_argument("observable '" + text + "' is empty");
    return op;
}

MeasurementBasis auto_basis(const PauliString& op, int n_sites) {
    bool all_x = true, all_y = true, any = false;
    for (Pauli p : op.axes) {
        if (p == Pauli::I) continue;
        any = true;
        all_x &= p == Pauli::X;
        all_y &= p == Pauli::Y;
    }
    if (any && all_x) return uniform_basis(Axis::X, n_sites);
    if (any && all_y) return uniform_basis(Axis::Y, n_sites);
    return basis_for(op);
}

StateBundle resolve_state(const std::string& name, const ExperimentSpec& spec) {
    StateBundle out;
    out.id = name;
    if (name == "bell-complex" || name == "bell-imag") {
        out.params = name == "bell-complex" ? bell_complex() : bell_imaginary();
        out.target = bell_state_vector();
    } else if (name.rfind("ghz:", 0) == 0) {
        const int n = static_cast<int>(parse_count(name.substr(4), "ghz size"));
        out.params = ghz(n);
        out.target = ghz_state_vector(n);
    } else if (name.rfind("tfim:", 0) == 0) {
        const int n = static_cast<int>(parse_count(name.substr(5), "tfim size"));
        TrainConfig cfg;
        cfg.n_spins = n;
        cfg.coupling = spec.coupling;
        cfg.field = spec.field;
        cfg.learning_rate = spec.learning_rate;
        cfg.max_iters = spec.train_iters;
        cfg.seed = spec.train_seed;
        std::string cache;
        if (!spec.params_dir.empty()) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "tfim_n%d_h%g_J%g_seed%llu.txt", n, spec.field,
                          spec.coupling, static_cast<unsigned long long>(spec.train_seed));
            cache = spec.params_dir + "/" + buf;
        }
        if (!cache.empty() && std::filesystem::exists(cache)) {
            out.params = load_params(cache);
        } else {
            out.params = train_ground_state(cfg).params;
            if (!cache.empty()) {
                std::filesystem::create_directories(spec.params_dir);
                save_params(out.params, cache);
            }
        }
        out.target = ground_state(tfim_hamiltonian(n, spec.coupling, spec.field)).state;
    } else if (name.rfind("file:", 0) == 0) {
        out.params = load_params(name.substr(5));
    } else {
        throw std::invalid_argument("unknown state '" + name + "'");
    }
    return out;
}

std::uint64_t job_seed(std::uint64_t base, int q_index, int repeat, int group) {
    const std::uint64_t key = (static_cast<std::uint64_t>(q_index) << 40) |
                              (static_cast<std::uint64_t>(repeat) << 16) |
                              static_cast<std::uint64_t>(group);
    return mix64(base, key);
}

namespace {

struct MeasuredOp {
    PauliString op;
    int group = 0;
    int pos = 0;  // position within group
    double exact_sum = 0.0;
    std::optional<double> exact_ed;
};

struct Group {
    std::string basis_text;
    LayeredNetwork net;
    std::vector<SiteProduct> prods;
    std::vector<std::optional<double>> pred_sigma;
};

struct Plan {
    StateBundle state;
    std::uint64_t hash = 0;
    std::vector<std::string> requested;        // spec order, may contain "chsh"
    std::map<std::string, int> measured_index; // op string -> index
    std::vector<MeasuredOp> measured;
    std::vector<Group> groups;
    int chsh_zz = -1, chsh_xx = -1;
};

Plan build_plan(const ExperimentSpec& spec, const StateBundle& state) {
    Plan plan;
    plan.state = state;
    plan.hash = params_hash(state.params);
    plan.requested = spec.observables;
    const int n = static_cast<int>(state.params.n_visible);

    const bool forced = spec.basis != "auto";
    MeasurementBasis forced_basis;
    if (forced) {
        forced_basis = parse_basis(spec.basis);
        if (static_cast<int>(forced_basis.size()) != n)
            throw std::invalid_argument("basis '" + spec.basis + "' does not match state size");
    }

    auto add_measured = [&](const PauliString& op) -> int {
        const std::string key = op.str();
        auto it = plan.measured_index.find(key);
        if (it != plan.measured_index.end()) return it->second;

        MeasurementBasis basis = forced ? forced_basis : auto_basis(op, n);
        for (int s : op.support()) {
            const char want = static_cast<char>(op.axes[s]);
            const char have = static_cast<char>(basis[s]);
            if (want != have)
                throw std::invalid_argument("observable " + key + " is not diagonal in basis " +
                                            basis_str(basis));
        }
        const std::string btext = basis_str(basis);
        int g = -1;
        for (size_t i = 0; i < plan.groups.size(); ++i)
            if (plan.groups[i].basis_text == btext) g = static_cast<int>(i);
        if (g < 0) {
            Group grp;
            grp.basis_text = btext;
            grp.net = attach_rotations(state.params, basis);
            plan.groups.push_back(std::move(grp));
            g = static_cast<int>(plan.groups.size()) - 1;
        }
        MeasuredOp m;
        m.op = op;
        m.group = g;
        m.pos = static_cast<int>(plan.groups[g].prods.size());
        plan.groups[g].prods.push_back(SiteProduct::from_support(op));
        m.exact_sum = full_sum_expectation(state.params, op);
        if (state.target) m.exact_ed = pauli_expectation(*state.target, op);
        const int idx = static_cast<int>(plan.measured.size());
        plan.measured.push_back(std::move(m));
        plan.measured_index.emplace(key, idx);
        return idx;
    };

    for (const std::string& text : spec.observables) {
        if (text == "chsh") {
            if (n < 2) throw std::invalid_argument("chsh needs at least two sites");
            if (forced) throw std::invalid_argument("chsh needs both the z- and x-basis runs");
            PauliString zz, xx;
            zz.axes.assign(n, Pauli::I);
            xx.axes.assign(n, Pauli::I);
            zz.axes[0] = zz.axes[1] = Pauli::Z;
            xx.axes[0] = xx.axes[1] = Pauli::X;
            plan.chsh_zz = add_measured(zz);
            plan.chsh_xx = add_measured(xx);
        } else {
            add_measured(parse_observable(text, n));
        }
    }

    for (Group& g : plan.groups) {
        g.pred_sigma.assign(g.prods.size(), std::nullopt);
        if (g.net.total_units() <= 26) {
            const auto enumerated = enumerate_reweighted(g.net, g.prods);
            for (size_t i = 0; i < enumerated.size(); ++i) g.pred_sigma[i] = enumerated[i].sigma;
        }
    }
    return plan;
}

// reports indexed [q][repeat][group][pos]
using ReportGrid = std::vector<std::vector<std::vector<std::vector<EstimateReport>>>>;

ReportGrid run_jobs(const ExperimentSpec& spec, const Plan& plan) {
    const int nq = static_cast<int>(spec.schedule.size());
    const int ng = static_cast<int>(plan.groups.size());
    ReportGrid grid(nq);
    for (int qi = 0; qi < nq; ++qi) {
        grid[qi].resize(spec.repeats);
        for (int r = 0; r < spec.repeats; ++r) grid[qi][r].resize(ng);
    }

    struct Job {
        int qi, repeat, group;
    };
    std::vector<Job> jobs;
    for (int qi = 0; qi < nq; ++qi)
        for (int r = 0; r < spec.repeats; ++r)
            for (int g = 0; g < ng; ++g) jobs.push_back({qi, r, g});

    auto run_job = [&](const Job& j) {
        SamplerConfig cfg;
        cfg.n_samples = spec.schedule[j.qi];
        cfg.burn_in = spec.burn_in;
        cfg.thin = spec.thin;
        cfg.n_chains = spec.chains;
        cfg.seed = job_seed(spec.seed, j.qi, j.repeat, j.group);
        grid[j.qi][j.repeat][j.group] =
            estimate_sampled(plan.groups[j.group].net, cfg, plan.groups[j.group].prods, 1);
    };

    int threads = spec.threads > 0 ? spec.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (threads == 1) {
        for (const Job& j : jobs) run_job(j);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                    run_job(jobs[i]);
            });
        for (auto& th : pool) th.join();
    }
    return grid;
}

std::vector<ResultRow> assemble_rows(const ExperimentSpec& spec, const Plan& plan,
                                     const ReportGrid& grid) {
    std::vector<ResultRow> rows;
    for (size_t qi = 0; qi < spec.schedule.size(); ++qi) {
        for (int r = 0; r < spec.repeats; ++r) {
            for (const std::string& text : plan.requested) {
                ResultRow row;
                row.n_samples = spec.schedule[qi];
                row.repeat = r;
                row.state_id = plan.state.id;
                row.params_hash = plan.hash;
                if (text == "chsh") {
                    const MeasuredOp& mz = plan.measured[plan.chsh_zz];
                    const MeasuredOp& mx = plan.measured[plan.chsh_xx];
                    const EstimateReport& rz = grid[qi][r][mz.group][mz.pos];
                    const EstimateReport& rx = grid[qi][r][mx.group][mx.pos];
                    row.observable = "chsh";
                    row.basis = "chsh";
                    row.value = chsh(rx.value, rz.value);
                    row.std_error = std::sqrt(2.0) * (rx.std_error + rz.std_error);
                    row.exact = chsh(mx.exact_sum, mz.exact_sum);
                    row.undersampled = rx.undersampled || rz.undersampled;
                    row.seed = rx.seed;
                    if (mx.exact_ed && mz.exact_ed) row.exact_ed = chsh(*mx.exact_ed, *mz.exact_ed);
                    const auto& px = plan.groups[mx.group].pred_sigma[mx.pos];
                    const auto& pz = plan.groups[mz.group].pred_sigma[mz.pos];
                    if (px && pz)
                        row.pred_error = std::sqrt(2.0) * (*px + *pz) /
                                         std::sqrt(static_cast<double>(row.n_samples));
                } else {
                    const int mi = plan.measured_index.at(parse_observable(text,
                                      static_cast<int>(plan.state.params.n_visible)).str());
                    const MeasuredOp& m = plan.measured[mi];
                    const EstimateReport& rep = grid[qi][r][m.group][m.pos];
                    row.observable = m.op.str();
                    row.basis = plan.groups[m.group].basis_text;
                    row.value = rep.value;
                    row.std_error = rep.std_error;
                    row.exact = m.exact_sum;
                    row.undersampled = rep.undersampled;
                    row.seed = rep.seed;
                    row.exact_ed = m.exact_ed;
                    const auto& p = plan.groups[m.group].pred_sigma[m.pos];
                    if (p) row.pred_error = *p / std::sqrt(static_cast<double>(row.n_samples));
                }
                row.abs_dev = std::abs(row.value - row.exact);
                if (row.exact_ed) row.abs_dev_ed = std::abs(row.value - *row.exact_ed);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_row(std::string& line, const ResultRow& row, bool with_size) {
    line.clear();
    if (with_size) line += std::to_string(row.size) + ",";
    line += row.observable + "," + row.basis + "," + std::to_string(row.n_samples) + ",";
    format_field(line, row.value);
    line += ",";
    format_field(line, row.std_error);
    line += ",";
    format_field(line, row.exact);
    line += ",";
    format_field(line, row.abs_dev);
    line += ",";
    line += row.undersampled ? "1" : "0";
    line += "," + std::to_string(row.seed) + "," + std::to_string(row.repeat) + "," +
            row.state_id + ",";
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(row.params_hash));
    line += hash;
    line += ",";
    if (row.exact_ed) format_field(line, *row.exact_ed);
    line += ",";
    if (row.abs_dev_ed) format_field(line, *row.abs_dev_ed);
    line += ",";
    if (row.pred_error) format_field(line, *row.pred_error);
    if (with_size) {
        line += ",";
        if (row.rep_error) format_field(line, *row.rep_error);
    }
    line += "\n";
}

}  // namespace

std::vector<ResultRow> run_convergence_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const StateBundle state = resolve_state(spec.state, spec);
    const Plan plan = build_plan(spec, state);
    const ReportGrid grid = run_jobs(spec, plan);
    return assemble_rows(spec, plan, grid);
}

std::vector<ResultRow> run_size_scaling_experiment(const ExperimentSpec& spec) {
    ExperimentSpec s = spec;
    if (s.observables.empty()) s.observables = {"Z1", "X1", "Z1Z2", "X1X2"};
    if (s.state.empty()) s.state = "tfim";  // per-size names are synthesized below
    s.validate();
    if (s.sizes.empty()) throw std::invalid_argument("size-scaling: 'sizes' is required");
    if (s.schedule.size() != 1)
        throw std::invalid_argument("size-scaling: exactly one sample count is required");

    std::vector<ResultRow> all;
    for (int n : s.sizes) {
        ExperimentSpec per = s;
        per.state = "tfim:" + std::to_string(n);
        const StateBundle state = resolve_state(per.state, per);
        const Plan plan = build_plan(per, state);
        const ReportGrid grid = run_jobs(per, plan);
        std::vector<ResultRow> rows = assemble_rows(per, plan, grid);
        for (ResultRow& row : rows) {
            row.size = n;
            if (row.exact_ed) row.rep_error = std::abs(row.exact - *row.exact_ed);
            all.push_back(std::move(row));
        }
    }
    return all;
}

void write_convergence_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "observable,basis,n_samples,value,std_error,exact,abs_dev,undersampled,seed,repeat,"
           "state_id,params_hash,exact_ed,abs_dev_ed,pred_error\n";
    std::string line;
    for (const ResultRow& r : rows) {
        write_row(line, r, false);
        out << line;
    }
}

void write_size_scaling_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "size,observable,basis,n_samples,value,std_error,exact,abs_dev,undersampled,seed,"
           "repeat,state_id,params_hash,exact_ed,abs_dev_ed,pred_error,rep_error\n";
    std::string line;
    for (const ResultRow& r : rows) {
        write_row(line, r, true);
        out << line;
    }
}

}  // namespace nqs
