#ifndef SIGKIT_VERIFY_HPP
#define SIGKIT_VERIFY_HPP

#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigkit/tensor_series.hpp"

namespace sigkit {

// Randomized identity suites behind `verify <suite>`. Exact checks report a
// residual of 0 on success; toleranced checks report the worst residual seen.

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    bool passed = false;
    std::vector<CheckResult> checks;
};

struct VerifyOptions {
    int dim = 2;
    int level = 4;
    int count = 10;       // random repetitions per check
    int depth = 3;        // tree depth
    int branching = 3;    // tree fan-out bound
    std::uint64_t seed = 20240901;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    double step = 1.0 / 256;
    std::string tree_input;  // optional fixture path for the tree suite
};

extern const std::vector<std::string> kVerifySuites;  // algebra bch chen tree multivariate radius

SuiteReport run_verify_suite(const std::string& suite, const VerifyOptions& opt);

nlohmann::json to_json(const SuiteReport& report);

// Uniform small-rational series, the workhorse of the randomized suites.
TensorSeries<Rat> random_rational_series(std::mt19937_64& rng, int dim, int level,
                                         bool t_zero = true, int coeff_range = 3);

}  // namespace sigkit

#endif
