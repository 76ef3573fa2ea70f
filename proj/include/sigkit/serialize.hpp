#ifndef SIGKIT_SERIALIZE_HPP
#define SIGKIT_SERIALIZE_HPP

#include <optional>
#include <string>
#include <variant>

#include "json.hpp"
#include "sigkit/filtration_tree.hpp"
#include "sigkit/models.hpp"
#include "sigkit/monte_carlo.hpp"
#include "sigkit/sym_series.hpp"
#include "sigkit/tensor_series.hpp"

namespace sigkit {

using nlohmann::json;

// TensorSeries wire format: {"dim", "level", "scalar": "rational"|"float64",
// "data": [{"word": [...], "num": "...", "den": "..."} | {"word": [...],
// "value": x}]}, zero coefficients omitted, words sorted by (length, index).
// Round-trips bit-exactly for float64 and value-exactly for rational.
json to_json(const TensorSeries<Rat>& x);
json to_json(const TensorSeries<double>& x);

using AnyTensor = std::variant<TensorSeries<Rat>, TensorSeries<double>>;
AnyTensor tensor_from_json(const json& j);
TensorSeries<Rat> rational_tensor_from_json(const json& j);
TensorSeries<double> float_tensor_from_json(const json& j);

// SymSeries wire format: data entries keyed by "degree" (length-d exponent
// vector).
json to_json(const SymSeries<Rat>& x);
json to_json(const SymSeries<double>& x);
SymSeries<Rat> rational_sym_from_json(const json& j);
SymSeries<double> float_sym_from_json(const json& j);

// Filtration tree: {"dim", "level", "nodes": [{"id", "parent", "prob":
// "num/den", "value": tensor}]}, nodes listed parent-first.
json to_json(const FiltrationTree& tree);
FiltrationTree tree_from_json(const json& j);

json to_json(const McReport& report);

// Tagged model description. "kind" selects which member is populated.
struct RandomWalkModel {
    std::variant<AtomDistribution<Rat>, AtomDistribution<double>> atoms;
    long horizon = 1;
};

struct ModelSpecAny {
    std::string kind;
    std::optional<RandomWalkModel> random_walk;
    std::optional<MarkovChainSpec> markov;
    std::optional<GaussianMartingaleSpec> gaussian;
    std::optional<BrownianRoughPathSpec> brownian;
    std::optional<LevyTriplet> levy;
};

ModelSpecAny model_from_json(const json& j);
json load_json_file(const std::string& path);

}  // namespace sigkit

#endif
