#include "pollinglab/config.hpp"

#include <fstream>
#include <set>

namespace pollinglab::config {

namespace {

double number_at(const Json& doc, const std::string& key, const std::string& path) {
    if (!doc.contains(key))
        fail(Errc::validation, "missing key \"" + path + key + "\"");
    const Json& v = doc.at(key);
    if (!v.is_number())
        fail(Errc::validation, "key \"" + path + key + "\" must be a number");
    return v.get<double>();
}

void reject_unknown_keys(const Json& doc, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, value] : doc.items())
        if (allowed.find(key) == allowed.end())
            fail(Errc::validation, "unknown key \"" + path + key + "\"");
}

} // namespace

ServiceDistribution parse_service(const Json& doc, const std::string& key_path) {
    const std::string path = key_path + ".";
    if (!doc.is_object())
        fail(Errc::validation, "key \"" + key_path + "\" must be an object");
    if (!doc.contains("kind"))
        fail(Errc::validation, "missing key \"" + path + "kind\"");
    const std::string kind = doc.at("kind").get<std::string>();

    if (kind == "exponential") {
        reject_unknown_keys(doc, {"kind", "rate"}, path);
        return ServiceDistribution::exponential(number_at(doc, "rate", path));
    }
    if (kind == "deterministic") {
        reject_unknown_keys(doc, {"kind", "value"}, path);
        return ServiceDistribution::deterministic(number_at(doc, "value", path));
    }
    if (kind == "erlang") {
        reject_unknown_keys(doc, {"kind", "shape", "rate"}, path);
        if (!doc.contains("shape") || !doc.at("shape").is_number_integer())
            fail(Errc::validation, "key \"" + path + "shape\" must be an integer");
        return ServiceDistribution::erlang(doc.at("shape").get<int>(),
                                           number_at(doc, "rate", path));
    }
    if (kind == "hyperexponential") {
        reject_unknown_keys(doc, {"kind", "probs", "rates"}, path);
        if (!doc.contains("probs") || !doc.at("probs").is_array() ||
            !doc.contains("rates") || !doc.at("rates").is_array())
            fail(Errc::validation,
                 "keys \"" + path + "probs\" and \"" + path + "rates\" must be arrays");
        return ServiceDistribution::hyper_exponential(
            doc.at("probs").get<std::vector<double>>(),
            doc.at("rates").get<std::vector<double>>());
    }
    if (kind == "pareto") {
        reject_unknown_keys(doc, {"kind", "index", "scale"}, path);
        return ServiceDistribution::pareto(number_at(doc, "index", path),
                                           number_at(doc, "scale", path));
    }
    fail(Errc::validation, "unknown service kind \"" + kind + "\" at \"" + key_path + "\"");
}

PollingModel parse_model(const Json& doc) {
    if (!doc.is_object()) fail(Errc::validation, "model document must be an object");
    reject_unknown_keys(doc, {"lambda1", "service1", "c1", "lambda2", "service2", "c2"},
                        "");
    for (const char* key : {"service1", "service2"})
        if (!doc.contains(key))
            fail(Errc::validation, std::string("missing key \"") + key + "\"");

    const double lambda1 = number_at(doc, "lambda1", "");
    const double c1 = number_at(doc, "c1", "");
    const double lambda2 = number_at(doc, "lambda2", "");
    const double c2 = number_at(doc, "c2", "");
    require(lambda1 >= 0.0, Errc::validation, "key \"lambda1\" must be >= 0");
    require(lambda2 >= 0.0, Errc::validation, "key \"lambda2\" must be >= 0");
    require(c1 > 0.0, Errc::validation, "key \"c1\" must be > 0");
    require(c2 > 0.0, Errc::validation, "key \"c2\" must be > 0");

    return PollingModel({lambda1, parse_service(doc.at("service1"), "service1"), c1},
                        {lambda2, parse_service(doc.at("service2"), "service2"), c2});
}

PollingModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::parse, "cannot open model file \"" + path + "\"");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail(Errc::parse, std::string("model file is not valid JSON: ") + e.what());
    }
    return parse_model(doc);
}

namespace {

Json service_to_json(const ServiceDistribution& s) {
    using Kind = ServiceDistribution::Kind;
    switch (s.kind()) {
        case Kind::exponential:
            return {{"kind", "exponential"}, {"rate", s.param_a()}};
        case Kind::deterministic:
            return {{"kind", "deterministic"}, {"value", s.param_a()}};
        case Kind::erlang:
            return {{"kind", "erlang"}, {"shape", s.shape()}, {"rate", s.param_a()}};
        case Kind::hyper_exponential:
            return {{"kind", "hyperexponential"}, {"probs", s.probs()}, {"rates", s.rates()}};
        case Kind::pareto:
            return {{"kind", "pareto"}, {"index", s.param_a()}, {"scale", s.param_b()}};
    }
    return {};
}

} // namespace

Json model_to_json(const PollingModel& model) {
    return {{"lambda1", model.q1().lambda}, {"service1", service_to_json(model.q1().service)},
            {"c1", model.q1().c},           {"lambda2", model.q2().lambda},
            {"service2", service_to_json(model.q2().service)},
            {"c2", model.q2().c}};
}

} // namespace pollinglab::config
