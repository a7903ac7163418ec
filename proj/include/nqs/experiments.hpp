#ifndef NQS_EXPERIMENTS_HPP
#define NQS_EXPERIMENTS_HPP

#include "nqs/estimator.hpp"
#include "nqs/network.hpp"
#include "nqs/oracle.hpp"
#include "nqs/pauli.hpp"
#include "nqs/rotations.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace nqs {

// Parsed experiment description (config file or CLI flags). Observables are
// kept as text: either full axis strings ("ZZI"), site-indexed products
// ("Z1Z2", 1-based), or "chsh".
struct ExperimentSpec {
    std::string state;
    std::vector<std::string> observables;
    std::vector<long> schedule;
    int repeats = 5;
    std::uint64_t seed = 20240801;
    int chains = 4;
    long burn_in = 1000;
    long thin = 1;
    int threads = 0;
    std::string basis = "auto";
    std::vector<int> sizes;
    double field = 1.0;
    double coupling = 1.0;
    std::uint64_t train_seed = 1;
    int train_iters = 2000;
    double learning_rate = 0.05;
    std::string params_dir;

    void validate() const;
};

ExperimentSpec parse_config(std::istream& in);
ExperimentSpec parse_config_file(const std::string& path);

PauliString parse_observable(const std::string& text, int n_sites);

// Measurement basis used for an observable when none is forced: uniform
// all-X (all-Y) when every non-identity factor is X (Y), otherwise the
// per-site diagonalizing basis.
MeasurementBasis auto_basis(const PauliString& op, int n_sites);

// A state source resolved to parameters plus the available references.
struct StateBundle {
    std::string id;
    NetworkParams params;
    std::optional<StateVector> target;  // independent exact state, when known
};

// "bell-complex" | "bell-imag" | "ghz:N" | "tfim:N" (trains, or loads a
// cached parameter file from spec.params_dir) | "file:PATH"
StateBundle resolve_state(const std::string& name, const ExperimentSpec& spec);

struct ResultRow {
    std::string observable;
    std::string basis;
    long n_samples = 0;
    double value = 0.0;
    double std_error = 0.0;
    double exact = 0.0;    // full-enumeration value of the encoded state
    double abs_dev = 0.0;  // |value - exact|: pure sampling error
    bool undersampled = false;
    std::uint64_t seed = 0;
    int repeat = 0;
    std::string state_id;
    std::uint64_t params_hash = 0;
    std::optional<double> exact_ed;    // independent target / diagonalization value
    std::optional<double> abs_dev_ed;
    std::optional<double> pred_error;  // explicit-variance prediction sigma/sqrt(Q)
    int size = 0;                      // size-scaling only
    std::optional<double> rep_error;   // |exact - exact_ed|, size-scaling column
};

std::vector<ResultRow> run_convergence_experiment(const ExperimentSpec& spec);
std::vector<ResultRow> run_size_scaling_experiment(const ExperimentSpec& spec);

void write_convergence_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_size_scaling_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// deterministic per-job seed, recorded in each row
std::uint64_t job_seed(std::uint64_t base, int q_index, int repeat, int group);

}  // namespace nqs

#endif
