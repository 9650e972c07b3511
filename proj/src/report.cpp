#include "spikedeig/report.hpp"

#include <cmath>
#include <fstream>

#include "spikedeig/errors.hpp"

namespace spikedeig {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + path + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw Error(Errc::Io, "write failed for " + path);
}

}  // namespace

Json to_json(const SmReport& r) {
  return Json{{"reps", r.reps},         {"violations", r.violations}, {"rate", num(r.rate)},
              {"lower", num(r.lower)},  {"upper", num(r.upper)},      {"max_s1", num(r.max_s1)},
              {"min_sq", num(r.min_sq)}};
}

Json to_json(const HwReport& r) {
  return Json{{"reps", r.reps},
              {"op_norm", num(r.op_norm)},
              {"t_grid", nums(r.t_grid)},
              {"tail_quadratic", nums(r.tail_quadratic)},
              {"tail_bilinear", nums(r.tail_bilinear)},
              {"fitted_c_quadratic", num(r.fitted_c_quadratic)},
              {"fitted_c_bilinear", num(r.fitted_c_bilinear)},
              {"slope_quadratic", num(r.slope_quadratic)},
              {"slope_bilinear", num(r.slope_bilinear)}};
}

Json to_json(const ReplicateRecord& rec) {
  Json j{{"index", rec.index}, {"seed", rec.seed}, {"ok", rec.ok}};
  if (!rec.flag.empty()) j["flag"] = rec.flag;
  j["value"] = rec.ok ? num(rec.value) : Json(nullptr);
  for (const auto& [k, v] : rec.extras) j[k] = num(v);
  return j;
}

Json to_json(const ExperimentReport& r) {
  Json j{{"statistic", to_string(r.statistic)},
         {"n", r.n},
         {"N", r.N},
         {"M", r.M},
         {"nu", r.nu},
         {"replicates", r.replicates},
         {"successful", r.successful},
         {"flagged", r.flagged},
         {"master_seed", r.master_seed},
         {"mode", r.mode},
         {"x_mode", r.x_mode},
         {"x", num(r.x)},
         {"x_residual", num(r.x_residual)},
         {"x_method", r.x_method},
         {"empirical", r.empirical},
         {"separated", r.separated},
         {"ks_normal", num(r.ks_normal)},
         {"mean", num(r.mean)},
         {"variance", num(r.variance)},
         {"skewness", num(r.skewness)},
         {"kurtosis", num(r.kurtosis)},
         {"median", num(r.median)}};
  if (!r.reference_law.empty()) j["reference_law"] = r.reference_law;
  if (r.ks_reference) j["ks_reference"] = num(*r.ks_reference);
  j["violations"] = r.violations;
  if (r.sm) j["sm"] = to_json(*r.sm);
  if (r.hw) j["hw"] = to_json(*r.hw);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ConsistencyReport& r) {
  return Json{{"replicates", r.replicates},
              {"successful", r.successful},
              {"flagged", r.flagged},
              {"divergent", r.divergent},
              {"median_inner_sq", nums(r.median_inner_sq)},
              {"median_ratio_error", nums(r.median_ratio_error)}};
}

Json to_json(const PolynomialCoefficients& c) {
  return Json{{"s", c.s},         {"n", c.n},         {"M", c.M},
              {"nu", c.nu},       {"a", nums(c.a)},   {"b", nums(c.b)},
              {"c", nums(c.c)},   {"O_bar", num(c.O_bar)}, {"O_j", nums(c.O_j)}};
}

Json to_json(const XRoot& r) {
  return Json{{"x", num(r.x)}, {"residual", num(r.residual)}, {"method", r.method}, {"iterations", r.iterations}};
}

Json to_json(const CenteringBundle& b) {
  return Json{{"c_tr", num(b.c_tr)}, {"stat_sum", num(b.stat_sum)}, {"oracle", num(b.oracle)},
              {"x", num(b.x)},       {"x_tilde", num(b.x_tilde)},   {"scale", num(b.scale)}};
}

Json to_json(const MasterResiduals& r) {
  return Json{{"r4", num(r.r4)}, {"r5", num(r.r5)}, {"r5_scale", num(r.r5_scale)}};
}

Json to_json(const SeriesReport& r) {
  return Json{{"residual_alignment", num(r.residual_alignment)},
              {"residual_sigma3", num(r.residual_sigma3)},
              {"decay_ratio", num(r.decay_ratio)},
              {"norm_M", num(r.norm_M)}};
}

void write_records_jsonl(const std::string& path, const std::vector<ReplicateRecord>& records,
                         const Json& context) {
  auto os = open_out(path);
  for (const auto& rec : records) {
    Json line = context;
    const Json fields = to_json(rec);
    for (auto it = fields.begin(); it != fields.end(); ++it) line[it.key()] = it.value();
    os << line.dump() << '\n';
  }
  finish(os, path);
}

void write_samples_csv(const std::string& path, const std::vector<ReplicateRecord>& records) {
  auto os = open_out(path);
  os << "index,seed,ok,value\n";
  for (const auto& rec : records) {
    os << rec.index << ',' << rec.seed << ',' << (rec.ok ? 1 : 0) << ',';
    if (rec.ok && std::isfinite(rec.value)) os << num(rec.value).dump();
    os << '\n';
  }
  finish(os, path);
}

void write_json(const std::string& path, const Json& value) {
  auto os = open_out(path);
  os << value.dump(2) << '\n';
  finish(os, path);
}

}  // namespace spikedeig
