// JSON input/output for models, cumulant families, scalar family selection
// and solver results, plus deterministic CSV writers ('.' decimal point,
// %.17g round-trip precision, '\n' line endings).
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "freeclt/berry_esseen.hpp"
#include "freeclt/covariance.hpp"
#include "freeclt/cumulants.hpp"
#include "freeclt/mde.hpp"
#include "freeclt/scalar_lab.hpp"

namespace freeclt {

using Json = nlohmann::json;

// Matrices are row-major arrays of rows; every entry is a [re, im] pair.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// {"N":., "d":., "coefficients":[matrix...], "sigma":matrix,
//  "fourth_moments":[[re,im] x d^4]?}; reading revalidates via make_model.
Json model_to_json(const CovarianceModel& model);
CovarianceModel model_from_json(const Json& j);

// Serializable description of the certified norm bound: either a constant or
// an explicit (n, L) table that only answers the listed n.
struct NormBoundSpec {
  enum class Kind { constant, per_n };
  Kind kind = Kind::constant;
  double constant = 0.0;
  std::vector<std::pair<int, double>> per_n;

  NormBoundFn to_fn() const;
};

Json norm_bound_to_json(const NormBoundSpec& spec);
NormBoundSpec norm_bound_from_json(const Json& j);

// {"model":..., "M_max":., "scalar_cumulants":[{"word":[0-based indices],
//  "value":[re,im]}...], "norm_bound":...}. Validation happens in
// make_cumulant_family on read.
Json family_to_json(const CumulantFamily& fam, const NormBoundSpec& bound);
CumulantFamily family_from_json(const Json& j);

// {"type":"semicircle"|"bernoulli_sym"|"two_point", "p":?, "variance":?}
struct ScalarFamilySpec {
  std::string type;
  double p = 0.5;          // two_point only
  double variance = 1.0;   // semicircle only
};

Json scalar_spec_to_json(const ScalarFamilySpec& spec);
ScalarFamilySpec scalar_spec_from_json(const Json& j);
ScalarFamily make_family(const ScalarFamilySpec& spec);

Json solution_to_json(const MdeSolution& sol);

// Shortest text that parses back to the same double; C locale, never a comma.
std::string format_double(double v);

// Header: point_id,n,method,lhs_value,lhs_tail,c_n,rhs,ratio,alpha2,
//         alpha4_upper,b_norm,im_inv_norm
// One row per record in input order; skipped records carry nan lhs fields.
std::string rate_records_to_csv(const std::vector<RateRecord>& records);
Json rate_records_to_json(const std::vector<RateRecord>& records);

std::string density_to_csv(const ScalarDensity& density);  // header x,density
std::string cdf_to_csv(const ScalarDensity& density);      // header x,cdf

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace freeclt
