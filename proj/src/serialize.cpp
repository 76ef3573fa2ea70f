#include "sigkit/serialize.hpp"

#include <fstream>

namespace sigkit {

namespace {

template <class S>
json tensor_to_json_impl(const TensorSeries<S>& x) {
    json data = json::array();
    for (int k = 0; k <= x.level(); ++k) {
        const auto& comp = x.degree(k);
        for (std::size_t idx = 0; idx < comp.size(); ++idx) {
            if (scalar_traits<S>::is_zero(comp[idx])) continue;
            json entry;
            entry["word"] = index_word(k, idx, x.dim());
            if constexpr (scalar_traits<S>::exact) {
                entry["num"] = comp[idx].get_num().get_str();
                entry["den"] = comp[idx].get_den().get_str();
            } else {
                entry["value"] = comp[idx];
            }
            data.push_back(std::move(entry));
        }
    }
    json j;
    j["dim"] = x.dim();
    j["level"] = x.level();
    j["scalar"] = scalar_traits<S>::name();
    j["data"] = std::move(data);
    return j;
}

Word word_from_json(const json& j) {
    Word w;
    for (const auto& v : j) w.push_back(v.get<int>());
    return w;
}

template <class S>
TensorSeries<S> tensor_from_json_impl(const json& j) {
    TensorSeries<S> x(j.at("dim").get<int>(), j.at("level").get<int>());
    for (const auto& entry : j.at("data")) {
        const Word w = word_from_json(entry.at("word"));
        if constexpr (scalar_traits<S>::exact) {
            const Rat v = rat_from_string(entry.at("num").get<std::string>() + "/" +
                                          entry.at("den").get<std::string>());
            x.set(w, v);
        } else {
            x.set(w, entry.at("value").get<double>());
        }
    }
    return x;
}

std::string scalar_kind(const json& j) { return j.at("scalar").get<std::string>(); }

}  // namespace

json to_json(const TensorSeries<Rat>& x) { return tensor_to_json_impl(x); }
json to_json(const TensorSeries<double>& x) { return tensor_to_json_impl(x); }

AnyTensor tensor_from_json(const json& j) {
    const std::string kind = scalar_kind(j);
    if (kind == "rational") return tensor_from_json_impl<Rat>(j);
    if (kind == "float64") return tensor_from_json_impl<double>(j);
    throw std::runtime_error("tensor_from_json: unknown scalar kind '" + kind + "'");
}

TensorSeries<Rat> rational_tensor_from_json(const json& j) {
    if (scalar_kind(j) != "rational")
        throw std::runtime_error("expected a rational tensor, got '" + scalar_kind(j) + "'");
    return tensor_from_json_impl<Rat>(j);
}

TensorSeries<double> float_tensor_from_json(const json& j) {
    if (scalar_kind(j) != "float64")
        throw std::runtime_error("expected a float64 tensor, got '" + scalar_kind(j) + "'");
    return tensor_from_json_impl<double>(j);
}

namespace {

template <class S>
json sym_to_json_impl(const SymSeries<S>& x) {
    json data = json::array();
    for (const auto& [m, v] : x.data()) {
        json entry;
        entry["degree"] = m;
        if constexpr (scalar_traits<S>::exact) {
            entry["num"] = v.get_num().get_str();
            entry["den"] = v.get_den().get_str();
        } else {
            entry["value"] = v;
        }
        data.push_back(std::move(entry));
    }
    json j;
    j["dim"] = x.dim();
    j["level"] = x.level();
    j["scalar"] = scalar_traits<S>::name();
    j["data"] = std::move(data);
    return j;
}

template <class S>
SymSeries<S> sym_from_json_impl(const json& j) {
    SymSeries<S> x(j.at("dim").get<int>(), j.at("level").get<int>());
    for (const auto& entry : j.at("data")) {
        MultiDegree m;
        for (const auto& v : entry.at("degree")) m.push_back(v.get<int>());
        if constexpr (scalar_traits<S>::exact) {
            x.set(m, rat_from_string(entry.at("num").get<std::string>() + "/" +
                                     entry.at("den").get<std::string>()));
        } else {
            x.set(m, entry.at("value").get<double>());
        }
    }
    return x;
}

}  // namespace

json to_json(const SymSeries<Rat>& x) { return sym_to_json_impl(x); }
json to_json(const SymSeries<double>& x) { return sym_to_json_impl(x); }
SymSeries<Rat> rational_sym_from_json(const json& j) { return sym_from_json_impl<Rat>(j); }
SymSeries<double> float_sym_from_json(const json& j) { return sym_from_json_impl<double>(j); }

json to_json(const FiltrationTree& tree) {
    json nodes = json::array();
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(int(id));
        json entry;
        entry["id"] = id;
        entry["parent"] = n.parent;
        entry["prob"] = rat_to_string(n.prob);
        entry["value"] = to_json(n.value);
        nodes.push_back(std::move(entry));
    }
    json j;
    j["dim"] = tree.dim();
    j["level"] = tree.level();
    j["nodes"] = std::move(nodes);
    return j;
}

FiltrationTree tree_from_json(const json& j) {
    const int dim = j.at("dim").get<int>();
    const int level = j.at("level").get<int>();
    std::vector<TreeNode> nodes;
    for (const auto& entry : j.at("nodes")) {
        if (entry.at("id").get<std::size_t>() != nodes.size())
            throw std::runtime_error("tree_from_json: node ids must be 0,1,2,... in order");
        TreeNode n;
        n.parent = entry.at("parent").get<int>();
        n.prob = rat_from_string(entry.at("prob").get<std::string>());
        n.value = rational_tensor_from_json(entry.at("value"));
        nodes.push_back(std::move(n));
    }
    return FiltrationTree(dim, level, std::move(nodes));
}

json to_json(const McReport& report) {
    json words = json::array();
    for (const auto& e : report.entries) {
        json entry;
        entry["word"] = e.word;
        entry["mean"] = e.mean;
        entry["se"] = e.se;
        entry["ref"] = e.ref;
        entry["z"] = e.z;
        if (e.exact_mismatch) entry["exact_mismatch"] = true;
        words.push_back(std::move(entry));
    }
    json j;
    j["words"] = std::move(words);
    j["summary"] = {{"n", report.n},
                    {"seed", report.seed},
                    {"steps", report.steps},
                    {"max_abs_z", report.max_abs_z},
                    {"frac_gt_3", report.frac_gt_3},
                    {"count_gt_2", report.count_gt_2},
                    {"count_gt_3", report.count_gt_3},
                    {"count_gt_4", report.count_gt_4},
                    {"exact_mismatch", report.any_exact_mismatch}};
    return j;
}

namespace {

Rat rat_field(const json& j) { return rat_from_string(j.get<std::string>()); }

std::vector<Word> words_field(const json& j) {
    std::vector<Word> out;
    for (const auto& w : j) out.push_back(word_from_json(w));
    return out;
}

RandomWalkModel random_walk_from_json(const json& j) {
    RandomWalkModel m;
    m.horizon = j.at("horizon").get<long>();
    const json& atoms = j.at("atoms");
    if (atoms.empty()) throw std::runtime_error("random_walk: no atoms");
    const bool exact = scalar_kind(atoms.front().at("value")) == "rational";
    if (exact) {
        AtomDistribution<Rat> dist;
        for (const auto& a : atoms)
            dist.atoms.emplace_back(rat_field(a.at("prob")),
                                    rational_tensor_from_json(a.at("value")));
        dist.validate();
        m.atoms = std::move(dist);
    } else {
        AtomDistribution<double> dist;
        for (const auto& a : atoms)
            dist.atoms.emplace_back(rat_field(a.at("prob")), float_tensor_from_json(a.at("value")));
        dist.validate();
        m.atoms = std::move(dist);
    }
    return m;
}

MarkovChainSpec markov_from_json(const json& j) {
    MarkovChainSpec spec;
    spec.dim = j.at("dim").get<int>();
    spec.level = j.at("level").get<int>();
    spec.horizon = j.at("horizon").get<int>();
    for (const auto& s : j.at("states")) {
        std::vector<Rat> state;
        for (const auto& v : s) state.push_back(rat_field(v));
        spec.states.push_back(std::move(state));
    }
    for (const auto& kernel : j.at("kernels")) {
        std::vector<std::vector<Rat>> k;
        for (const auto& row : kernel) {
            std::vector<Rat> r;
            for (const auto& v : row) r.push_back(rat_field(v));
            k.push_back(std::move(r));
        }
        spec.kernels.push_back(std::move(k));
    }
    spec.validate();
    return spec;
}

GaussianMartingaleSpec gaussian_from_json(const json& j) {
    GaussianMartingaleSpec spec;
    spec.dim = j.at("dim").get<int>();
    spec.level = j.at("level").get<int>();
    spec.grid = j.at("grid").get<std::vector<double>>();
    for (const auto& s : j.at("sigma"))
        spec.sigma.push_back(s.get<std::vector<std::vector<double>>>());
    spec.validate();
    return spec;
}

BrownianRoughPathSpec brownian_from_json(const json& j) {
    BrownianRoughPathSpec spec;
    spec.dim = j.at("dim").get<int>();
    spec.lie_level = j.at("lie_level").get<int>();
    spec.level = j.value("level", 2 * spec.lie_level);
    spec.horizon = j.at("horizon").get<double>();
    spec.directions = words_field(j.at("directions"));
    for (const auto& row : j.at("correlation")) {
        std::vector<Rat> r;
        for (const auto& v : row) r.push_back(rat_field(v));
        spec.correlation.push_back(std::move(r));
    }
    if (j.contains("drift"))
        spec.drift = rational_tensor_from_json(j.at("drift"));
    else
        spec.drift = TensorSeries<Rat>(spec.dim, spec.level);
    spec.validate();
    return spec;
}

LevyTriplet levy_from_json(const json& j) {
    LevyTriplet triplet;
    triplet.dim = j.at("dim").get<int>();
    triplet.level = j.at("level").get<int>();
    triplet.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("cov_directions")) triplet.cov_directions = words_field(j.at("cov_directions"));
    for (const auto& p : j.at("pieces")) {
        LevyPiece piece;
        if (p.contains("drift"))
            piece.drift = float_tensor_from_json(p.at("drift"));
        else
            piece.drift = TensorSeries<double>(triplet.dim, triplet.level);
        if (p.contains("cov"))
            piece.cov = p.at("cov").get<std::vector<std::vector<double>>>();
        else
            piece.cov.assign(triplet.cov_directions.size(),
                             std::vector<double>(triplet.cov_directions.size(), 0.0));
        if (p.contains("jumps"))
            for (const auto& jump : p.at("jumps"))
                piece.jumps.push_back(
                    {jump.at("rate").get<double>(), float_tensor_from_json(jump.at("value"))});
        triplet.pieces.push_back(std::move(piece));
    }
    triplet.validate();
    return triplet;
}

}  // namespace

ModelSpecAny model_from_json(const json& j) {
    ModelSpecAny spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "random_walk")
        spec.random_walk = random_walk_from_json(j);
    else if (spec.kind == "markov_chain")
        spec.markov = markov_from_json(j);
    else if (spec.kind == "gaussian_martingale")
        spec.gaussian = gaussian_from_json(j);
    else if (spec.kind == "brownian_rough_path")
        spec.brownian = brownian_from_json(j);
    else if (spec.kind == "levy")
        spec.levy = levy_from_json(j);
    else
        throw std::runtime_error("model_from_json: unknown model kind '" + spec.kind + "'");
    return spec;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

}  // namespace sigkit
