#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "arbphase/saddle.hpp"
#include "arbphase/sweep.hpp"

namespace arbphase::io {

inline constexpr const char* kVersion = "0.1.0";

inline nlohmann::json spec_to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["param"] = line_param_name(spec.param);
    j["param_grid"] = spec.param_grid;
    j["n_grid"] = spec.n_grid;
    j["assets"] = spec.assets;
    j["realizations"] = spec.realizations;
    j["master_seed"] = spec.master_seed;
    j["parallelism"] = spec.parallelism;
    j["delta"] = spec.delta;
    j["alpha"] = spec.alpha;
    j["hard_constraint"] = spec.hard_constraint;
    j["bernoulli_subsets"] = spec.bernoulli_subsets;
    j["detector"] = {{"tol", spec.detector.tol},
                     {"max_pivots", spec.detector.max_pivots},
                     {"pivot_rule", spec.detector.pivot_rule == PivotRule::Bland ? "bland" : "dantzig"}};
    return j;
}

inline LineParam line_param_from_string(const std::string& s) {
    if (s == "kappa") return LineParam::SubsetKappa;
    if (s == "alpha") return LineParam::PerturbedAlpha;
    if (s == "delta") return LineParam::PerturbedDelta;
    throw std::invalid_argument("unknown sweep parameter: " + s);
}

inline SweepSpec spec_from_json(const nlohmann::json& j) {
    SweepSpec spec;
    spec.param = line_param_from_string(j.at("param").get<std::string>());
    spec.param_grid = j.at("param_grid").get<std::vector<double>>();
    spec.n_grid = j.at("n_grid").get<std::vector<double>>();
    spec.assets = j.at("assets").get<std::size_t>();
    spec.realizations = j.at("realizations").get<std::size_t>();
    spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    spec.parallelism = j.at("parallelism").get<unsigned>();
    spec.delta = j.at("delta").get<double>();
    spec.alpha = j.at("alpha").get<double>();
    spec.hard_constraint = j.at("hard_constraint").get<bool>();
    spec.bernoulli_subsets = j.at("bernoulli_subsets").get<bool>();
    const auto& d = j.at("detector");
    spec.detector.tol = d.at("tol").get<double>();
    spec.detector.max_pivots = d.at("max_pivots").get<int>();
    spec.detector.pivot_rule =
        d.at("pivot_rule").get<std::string>() == "bland" ? PivotRule::Bland : PivotRule::DantzigBlandFallback;
    return spec;
}

inline nlohmann::json grid_to_json(const PhaseGrid& grid) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["spec"] = spec_to_json(grid.spec);
    nlohmann::json cells = nlohmann::json::array();
    for (const CellResult& c : grid.cells) {
        cells.push_back({{"fraction", c.fraction},
                         {"infinite", c.infinite},
                         {"marginal", c.marginal},
                         {"undecided", c.undecided},
                         {"omega", c.omega},
                         {"cell_seed", c.cell_seed}});
    }
    j["cells"] = std::move(cells);
    return j;
}

inline PhaseGrid grid_from_json(const nlohmann::json& j) {
    PhaseGrid grid;
    grid.spec = spec_from_json(j.at("spec"));
    for (const auto& cj : j.at("cells")) {
        CellResult c;
        c.fraction = cj.at("fraction").get<double>();
        c.infinite = cj.at("infinite").get<std::uint32_t>();
        c.marginal = cj.at("marginal").get<std::uint32_t>();
        c.undecided = cj.at("undecided").get<std::uint32_t>();
        c.omega = cj.at("omega").get<std::uint32_t>();
        c.cell_seed = cj.at("cell_seed").get<std::uint64_t>();
        grid.cells.push_back(c);
    }
    return grid;
}

inline nlohmann::json line_to_json(const CriticalLine& line) {
    nlohmann::json j;
    j["family"] = line.family;
    j["param"] = line_param_name(line.param);
    j["interpretation"] = interpretation_name(line.interpretation);
    if (std::isfinite(line.omega)) j["omega"] = line.omega;
    else j["omega"] = "thermodynamic";
    if (line.finite_assets) j["finite_assets"] = *line.finite_assets;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [p, n] : line.points) pts.push_back({{"param", p}, {"n_c", n}});
    j["points"] = std::move(pts);
    return j;
}

inline nlohmann::json transition_to_json(const TransitionLine& line) {
    nlohmann::json j;
    j["level"] = line.level;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [p, n] : line.points) pts.push_back({{"param", p}, {"n", n}});
    j["points"] = std::move(pts);
    nlohmann::json cens = nlohmann::json::array();
    for (const auto& [p, why] : line.censored) cens.push_back({{"param", p}, {"reason", why}});
    j["censored"] = std::move(cens);
    return j;
}

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

}  // namespace arbphase::io
