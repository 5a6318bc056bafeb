#include <nlohmann/json.hpp>

#include "wzmap/gmm.hpp"

namespace wzmap {

void to_json(nlohmann::json& j, const Mixture& mixture) {
  j = nlohmann::json::array();
  for (const auto& c : mixture.components) {
    j.push_back({{"weight", c.weight},
                 {"mean", {c.mean.x(), c.mean.y()}},
                 {"cov", {{c.cov(0, 0), c.cov(0, 1)}, {c.cov(1, 0), c.cov(1, 1)}}}});
  }
}

void from_json(const nlohmann::json& j, Mixture& mixture) {
  if (!j.is_array()) throw nlohmann::json::type_error::create(302, "mixture must be a list", &j);
  mixture.components.clear();
  for (const auto& e : j) {
    Component c;
    c.weight = e.at("weight").get<double>();
    c.mean = {e.at("mean").at(0).get<double>(), e.at("mean").at(1).get<double>()};
    const auto& cov = e.at("cov");
    c.cov << cov.at(0).at(0).get<double>(), cov.at(0).at(1).get<double>(),
        cov.at(1).at(0).get<double>(), cov.at(1).at(1).get<double>();
    mixture.components.push_back(c);
  }
}

void to_json(nlohmann::json& j, const FitReport& r) {
  j = {{"k", r.k},
       {"n", r.n},
       {"log_likelihood_trace", r.log_likelihood_trace},
       {"iterations", r.iterations},
       {"converged", r.converged},
       {"stalled", r.stalled},
       {"aic", r.aic},
       {"bic", r.bic}};
}

void from_json(const nlohmann::json& j, FitReport& r) {
  j.at("k").get_to(r.k);
  j.at("n").get_to(r.n);
  j.at("log_likelihood_trace").get_to(r.log_likelihood_trace);
  j.at("iterations").get_to(r.iterations);
  j.at("converged").get_to(r.converged);
  r.stalled = j.value("stalled", false);
  j.at("aic").get_to(r.aic);
  j.at("bic").get_to(r.bic);
}

void to_json(nlohmann::json& j, const ModelScore& s) {
  j = {{"k", s.k}, {"log_likelihood", s.log_likelihood}, {"aic", s.aic}, {"bic", s.bic}};
}

}  // namespace wzmap
