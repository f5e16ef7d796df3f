#include "hombfc/records_json.hpp"

#include <stdexcept>

namespace hombfc {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

const char* version() { return HOMBFC_VERSION; }

Json to_json(const CombParams& params) {
  return Json{{"m", params.m},         {"mu", params.mu},  {"sigma", params.sigma},
              {"delta", params.delta}, {"phi", params.phi}};
}

Json to_json(const Channel& channel) {
  return Json{{"gamma", channel.gamma}, {"visibility", channel.visibility}};
}

Json to_json(const QuadSpec& spec) {
  return Json{{"abs_tol", spec.abs_tol},
              {"rel_tol", spec.rel_tol},
              {"max_subdivisions", spec.max_subdivisions}};
}

Json to_json(const MeasurementRecord& record) {
  return Json{{"n0", record.n0},
              {"n1", record.n1},
              {"n2", record.n2},
              {"n_total", record.n_total()}};
}

Json to_json(const SpectralRecord& record) {
  return Json{{"bin_edges", record.bin_edges},
              {"counts2", record.counts2},
              {"counts1", record.counts1},
              {"n0", record.n0}};
}

Json to_json(const EstimatorReport& report) {
  Json j{{"scheme", to_string(report.scheme)},
         {"tau_true", report.tau_true},
         {"n_events", report.n_events},
         {"tau_hat_mean", optional_number(report.tau_hat_mean)},
         {"tau_hat_std", optional_number(report.tau_hat_std)},
         {"crb_prediction", optional_number(report.crb_prediction)},
         {"n_trials", report.n_trials},
         {"n_failures", report.n_failures},
         {"failure_fraction",
          static_cast<double>(report.n_failures) / static_cast<double>(report.n_trials)},
         {"seed", report.seed},
         {"fisher", report.fisher},
         {"window", {report.window.lo, report.window.hi}}};
  if (report.scheme == Scheme::resolved) {
    j["bins"] = report.bins;
    j["fisher_binned"] = optional_number(report.fisher_binned);
  }
  return j;
}

MeasurementRecord measurement_record_from_json(const Json& j) {
  MeasurementRecord r;
  r.n0 = field<long long>(j, "n0");
  r.n1 = field<long long>(j, "n1");
  r.n2 = field<long long>(j, "n2");
  if (j.contains("n_total") && field<long long>(j, "n_total") != r.n_total()) {
    throw std::invalid_argument("n_total does not equal n0 + n1 + n2");
  }
  r.validate();
  return r;
}

SpectralRecord spectral_record_from_json(const Json& j) {
  SpectralRecord r;
  r.bin_edges = field<std::vector<double>>(j, "bin_edges");
  r.counts2 = field<std::vector<long long>>(j, "counts2");
  r.counts1 = field<std::vector<long long>>(j, "counts1");
  r.n0 = field<long long>(j, "n0");
  r.validate();
  return r;
}

}  // namespace hombfc
