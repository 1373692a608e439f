#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "alphadiv/bounds.hpp"
#include "alphadiv/measures.hpp"
#include "alphadiv/oracle.hpp"
#include "alphadiv/relations.hpp"

namespace alphadiv {

using json = nlohmann::json;

/// "inf" stands in for +infinity; finite values serialize as JSON numbers,
/// which round-trip bit-faithfully.
inline json to_json(const ExtendedValue& v) {
    if (v.is_infinite()) return json("inf");
    return json(v.value());
}

inline ExtendedValue extended_value_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtendedValue::infinity();
        throw Error("expected a number or \"inf\"");
    }
    return ExtendedValue::of(j.get<double>());
}

inline json to_json(const DiscreteMeasure& m) {
    return json{{"points", m.points()}, {"weights", m.weights()}};
}

inline DiscreteMeasure measure_from_json(const json& j) {
    return make_measure(j.at("points").get<std::vector<double>>(),
                        j.at("weights").get<std::vector<double>>());
}

inline json to_json(const MeasurePair& pair) {
    return json{{"p", to_json(pair.p())}, {"q", to_json(pair.q())}};
}

inline MeasurePair pair_from_json(const json& j) {
    return make_pair(measure_from_json(j.at("p")), measure_from_json(j.at("q")));
}

inline json to_json(const MomentSpec& s) {
    return json{{"mean_p", s.mean_p},
                {"sigma_p", s.sigma_p},
                {"mean_q", s.mean_q},
                {"sigma_q", s.sigma_q}};
}

inline json to_json(const BinaryPair& bp) {
    return json{{"r", bp.r}, {"s", bp.s}, {"u1", bp.u1},
                {"u2", bp.u2}, {"a", bp.a}, {"v", bp.v}};
}

inline json to_json(const BoundReport& rep) {
    json j{{"bound", to_json(rep.bound)},
           {"tight_guaranteed", rep.tight_guaranteed},
           {"equal_means", rep.equal_means}};
    j["witness"] = rep.witness ? to_json(*rep.witness) : json(nullptr);
    return j;
}

inline json to_json(const RelationResidual& r) {
    return json{{"lhs", r.lhs},
                {"rhs", r.rhs},
                {"abs_residual", r.abs_residual},
                {"rel_residual", r.rel_residual},
                {"method_detail", r.method_detail}};
}

inline json to_json(const SearchResult& r) {
    json j{{"best_value", to_json(r.best_value)},
           {"bound", to_json(r.bound_value)},
           {"gap", r.gap},
           {"evaluations", r.evaluations},
           {"feasibility_ratio", r.feasibility_ratio}};
    j["best_pair"] = r.best_pair ? to_json(*r.best_pair) : json(nullptr);
    return j;
}

}  // namespace alphadiv
