#include "freeclt/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "freeclt/errors.hpp"

namespace freeclt {

namespace {

Json complex_to_json(Complex v) { return Json::array({v.real(), v.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error("complex entries must be [re, im] number pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error("matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

Json model_to_json(const CovarianceModel& model) {
  Json j;
  j["N"] = model.N;
  j["d"] = model.d;
  Json coeffs = Json::array();
  for (const ComplexMatrix& b : model.coefficients) coeffs.push_back(matrix_to_json(b));
  j["coefficients"] = std::move(coeffs);
  j["sigma"] = matrix_to_json(model.sigma);
  if (model.fourth_moments) {
    Json m4 = Json::array();
    for (const Complex v : *model.fourth_moments) m4.push_back(complex_to_json(v));
    j["fourth_moments"] = std::move(m4);
  }
  return j;
}

CovarianceModel model_from_json(const Json& j) {
  if (!j.is_object()) throw Error("model must be a JSON object");
  for (const char* key : {"N", "d", "coefficients", "sigma"}) {
    if (!j.contains(key)) throw Error(std::string("model is missing \"") + key + "\"");
  }
  const auto N = j.at("N").get<Eigen::Index>();
  const auto d = j.at("d").get<Eigen::Index>();
  std::vector<ComplexMatrix> coeffs;
  for (const Json& b : j.at("coefficients")) coeffs.push_back(matrix_from_json(b));
  if (static_cast<Eigen::Index>(coeffs.size()) != d) {
    throw Error("model: coefficients count does not match d");
  }
  ComplexMatrix sigma = matrix_from_json(j.at("sigma"));
  std::optional<std::vector<Complex>> m4;
  if (j.contains("fourth_moments")) {
    std::vector<Complex> tensor;
    for (const Json& v : j.at("fourth_moments")) tensor.push_back(complex_from_json(v));
    m4 = std::move(tensor);
  }
  return make_model(N, std::move(coeffs), std::move(sigma), std::move(m4));
}

NormBoundFn NormBoundSpec::to_fn() const {
  if (kind == Kind::constant) {
    const double L = constant;
    return [L](int) { return L; };
  }
  std::map<int, double> table(per_n.begin(), per_n.end());
  return [table](int n) {
    const auto it = table.find(n);
    if (it == table.end()) {
      throw Error("norm bound table has no entry for n = " + std::to_string(n));
    }
    return it->second;
  };
}

Json norm_bound_to_json(const NormBoundSpec& spec) {
  Json j;
  if (spec.kind == NormBoundSpec::Kind::constant) {
    j["type"] = "constant";
    j["L"] = spec.constant;
  } else {
    j["type"] = "per_n";
    Json values = Json::array();
    for (const auto& [n, L] : spec.per_n) values.push_back(Json::array({n, L}));
    j["values"] = std::move(values);
  }
  return j;
}

NormBoundSpec norm_bound_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw Error("norm bound must carry a \"type\"");
  NormBoundSpec spec;
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    spec.kind = NormBoundSpec::Kind::constant;
    spec.constant = j.at("L").get<double>();
    if (!(spec.constant > 0.0)) throw Error("norm bound constant must be positive");
  } else if (type == "per_n") {
    spec.kind = NormBoundSpec::Kind::per_n;
    for (const Json& v : j.at("values")) {
      if (!v.is_array() || v.size() != 2) throw Error("per_n values must be [n, L] pairs");
      const int n = v[0].get<int>();
      const double L = v[1].get<double>();
      if (n < 1 || !(L > 0.0)) throw Error("per_n entries need n >= 1 and L > 0");
      spec.per_n.emplace_back(n, L);
    }
    if (spec.per_n.empty()) throw Error("per_n norm bound needs at least one entry");
  } else {
    throw Error("unknown norm bound type \"" + type + "\"");
  }
  return spec;
}

Json family_to_json(const CumulantFamily& fam, const NormBoundSpec& bound) {
  Json j;
  j["model"] = model_to_json(fam.model);
  j["M_max"] = fam.M_max;
  Json entries = Json::array();
  for (const CumulantMap& km : fam.cumulants) {
    for (const auto& [word, value] : km) {
      Json e;
      e["word"] = word;
      e["value"] = complex_to_json(value);
      entries.push_back(std::move(e));
    }
  }
  j["scalar_cumulants"] = std::move(entries);
  j["norm_bound"] = norm_bound_to_json(bound);
  return j;
}

CumulantFamily family_from_json(const Json& j) {
  if (!j.is_object()) throw Error("cumulant family must be a JSON object");
  for (const char* key : {"model", "scalar_cumulants", "norm_bound"}) {
    if (!j.contains(key)) throw Error(std::string("cumulant family is missing \"") + key + "\"");
  }
  CovarianceModel model = model_from_json(j.at("model"));
  std::vector<CumulantEntry> entries;
  for (const Json& e : j.at("scalar_cumulants")) {
    CumulantEntry entry;
    entry.word = e.at("word").get<Word>();
    entry.value = complex_from_json(e.at("value"));
    entries.push_back(std::move(entry));
  }
  const NormBoundSpec bound = norm_bound_from_json(j.at("norm_bound"));
  const int M_max = j.contains("M_max") ? j.at("M_max").get<int>() : 16;
  return make_cumulant_family(std::move(model), entries, bound.to_fn(), M_max);
}

Json scalar_spec_to_json(const ScalarFamilySpec& spec) {
  Json j;
  j["type"] = spec.type;
  if (spec.type == "two_point") j["p"] = spec.p;
  if (spec.type == "semicircle") j["variance"] = spec.variance;
  return j;
}

ScalarFamilySpec scalar_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw Error("scalar family needs a \"type\"");
  ScalarFamilySpec spec;
  spec.type = j.at("type").get<std::string>();
  if (j.contains("p")) spec.p = j.at("p").get<double>();
  if (j.contains("variance")) spec.variance = j.at("variance").get<double>();
  return spec;
}

ScalarFamily make_family(const ScalarFamilySpec& spec) {
  if (spec.type == "semicircle") return make_semicircle_family(spec.variance);
  if (spec.type == "bernoulli_sym") return make_bernoulli_family();
  if (spec.type == "two_point") return make_two_point_family(spec.p);
  throw Error("unknown scalar family \"" + spec.type + "\"");
}

Json solution_to_json(const MdeSolution& sol) {
  Json j;
  j["G"] = matrix_to_json(sol.G);
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["near_real_axis"] = sol.near_real_axis;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string rate_records_to_csv(const std::vector<RateRecord>& records) {
  std::string out =
      "point_id,n,method,lhs_value,lhs_tail,c_n,rhs,ratio,alpha2,alpha4_upper,b_norm,"
      "im_inv_norm\n";
  for (const RateRecord& r : records) {
    out += r.point_id;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += r.method;
    for (const double v : {r.lhs_value, r.lhs_tail, r.c_n, r.rhs, r.ratio, r.alpha2,
                           r.alpha4_upper, r.b_norm, r.im_inv_norm}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

Json rate_records_to_json(const std::vector<RateRecord>& records) {
  Json arr = Json::array();
  for (const RateRecord& r : records) {
    Json e;
    e["point_id"] = r.point_id;
    e["n"] = r.n;
    e["method"] = r.method;
    e["skipped"] = r.skipped;
    if (r.skipped) {
      e["skip_reason"] = r.skip_reason;
    } else {
      e["lhs_value"] = r.lhs_value;
      e["lhs_tail"] = r.lhs_tail;
      e["ratio"] = r.ratio;
    }
    e["c_n"] = r.c_n;
    e["rhs"] = r.rhs;
    e["alpha2"] = r.alpha2;
    e["alpha4_upper"] = r.alpha4_upper;
    e["b_norm"] = r.b_norm;
    e["im_inv_norm"] = r.im_inv_norm;
    arr.push_back(std::move(e));
  }
  return arr;
}

std::string density_to_csv(const ScalarDensity& density) {
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    out += format_double(density.grid[i]);
    out += ',';
    out += format_double(density.values[i]);
    out += '\n';
  }
  return out;
}

std::string cdf_to_csv(const ScalarDensity& density) {
  const std::vector<double> cdf = cdf_values(density);
  std::string out = "x,cdf\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    out += format_double(density.grid[i]);
    out += ',';
    out += format_double(cdf[i]);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open \"" + path + "\" for writing");
  f << content;
  if (!f) throw Error("failed writing \"" + path + "\"");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace freeclt
