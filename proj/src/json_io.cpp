#include "cxorder/json_io.hpp"

#include <string>

namespace cxorder {

nlohmann::json scalar_to_json(const Scalar& s) {
    if (s.is_exact()) {
        return s.to_string();
    }
    return s.to_double();
}

Scalar scalar_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        return Scalar::parse(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return Scalar(j.get<long>());
    }
    if (j.is_number()) {
        return Scalar(j.get<double>());
    }
    throw InvalidArgument("expected a number or a \"num/den\" string, got " + j.dump());
}

nlohmann::json measure_to_json(const FiniteMeasure& m) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : m.atoms()) {
        atoms.push_back({{"x", scalar_to_json(a.x)}, {"w", scalar_to_json(a.w)}});
    }
    return {{"regime", std::string(to_string(m.regime()))},
            {"atoms", std::move(atoms)},
            {"mass_defect", scalar_to_json(m.mass_defect())}};
}

FiniteMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
        throw InvalidArgument("measure JSON needs an \"atoms\" array");
    }
    Regime regime = Regime::exact;
    if (j.contains("regime")) {
        const auto tag = j.at("regime").get<std::string>();
        if (tag == "float") {
            regime = Regime::floating;
        } else if (tag != "exact") {
            throw InvalidArgument("unknown regime '" + tag + "'");
        }
    }
    auto coerce = [regime](const Scalar& s) {
        if (regime == Regime::exact && !s.is_exact()) {
            throw InvalidArgument("float value " + s.to_string() + " in an exact-regime measure");
        }
        return s.in_regime(regime);
    };
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.contains("x") || !a.contains("w")) {
            throw InvalidArgument("atom needs \"x\" and \"w\": " + a.dump());
        }
        atoms.push_back(Atom{coerce(scalar_from_json(a.at("x"))), coerce(scalar_from_json(a.at("w")))});
    }
    Scalar defect = j.contains("mass_defect") ? coerce(scalar_from_json(j.at("mass_defect")))
                                              : Scalar(0).in_regime(regime);
    return FiniteMeasure::from_atoms(std::move(atoms), std::move(defect));
}

}  // namespace cxorder
