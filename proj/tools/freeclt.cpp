// Command-line front end.
//
//   freeclt solve   --model FILE --points LIST|@FILE [--tol F] [--out FILE]
//   freeclt rate    --family NAME|FILE --points LIST|@FILE --ns LIST
//                   [--order I] [--out FILE]
//   freeclt density --model FILE | --family NAME|FILE [--n I]
//                   [--grid LO:HI:COUNT] [--epsilon F] [--tol F] [--out FILE]
//   freeclt verify  [--suite mde|cumulants|rate|all]
//
// Exit codes:
//   0  success
//   1  input / configuration error (bad files, malformed points, bad grid)
//   2  solver failed to converge
//   3  computed rate bound violated -- indicates a software bug, not a
//      failure of the underlying mathematics
//   4  verification criterion failed
#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include <freeclt/berry_esseen.hpp>
#include <freeclt/covariance.hpp>
#include <freeclt/cumulants.hpp>
#include <freeclt/errors.hpp>
#include <freeclt/matrix.hpp>
#include <freeclt/mde.hpp>
#include <freeclt/scalar_lab.hpp>
#include <freeclt/serialization.hpp>
#include <freeclt/verify.hpp>

namespace {

using namespace freeclt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitBoundViolated = 3;
constexpr int kExitVerifyFailed = 4;

std::string strip(const std::string& s) {
  std::string out;
  for (const char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
  return out;
}

double parse_real(const std::string& s) {
  if (s.empty()) throw Error("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw Error("cannot parse number '" + s + "'");
  return v;
}

// "2i", "1+2i", "-1+0.5i", "i", "1-i", "3" -> complex
Complex parse_complex(const std::string& raw) {
  const std::string s = strip(raw);
  if (s.empty()) throw Error("empty point literal");
  if (s.back() != 'i') return Complex(parse_real(s), 0.0);
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign and not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return Complex(0.0, imag_of(body));
  return Complex(parse_real(body.substr(0, split)), imag_of(body.substr(split)));
}

// A solve point is either a scalar to lift or a full matrix from a file.
using PointSpec = std::variant<Complex, ComplexMatrix>;

std::vector<PointSpec> parse_points(const std::string& arg) {
  std::vector<PointSpec> out;
  if (!arg.empty() && arg[0] == '@') {
    const Json j = Json::parse(read_text_file(arg.substr(1)));
    if (!j.is_array()) throw Error("points file must hold a JSON array");
    for (const Json& item : j) {
      if (item.is_string()) {
        out.emplace_back(parse_complex(item.get<std::string>()));
      } else {
        out.emplace_back(matrix_from_json(item));
      }
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t comma = arg.find(',', start);
    const std::string token =
        arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!strip(token).empty()) out.emplace_back(parse_complex(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_ns(const std::string& arg) {
  std::vector<int> ns;
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t comma = arg.find(',', start);
    const std::string token =
        strip(arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!token.empty()) {
      const double v = parse_real(token);
      const int n = static_cast<int>(v);
      if (v != n) throw Error("n must be an integer, got '" + token + "'");
      ns.push_back(n);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw Error("every n must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw Error("ns must be strictly increasing");
  }
  if (ns.empty()) throw Error("--ns needs at least one value");
  return ns;
}

struct GridSpec {
  double lo = -4.0;
  double hi = 4.0;
  int count = 801;
};

GridSpec parse_grid(const std::string& arg) {
  GridSpec g;
  const std::size_t c1 = arg.find(':');
  const std::size_t c2 = arg.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw Error("grid must look like LO:HI:COUNT");
  g.lo = parse_real(strip(arg.substr(0, c1)));
  g.hi = parse_real(strip(arg.substr(c1 + 1, c2 - c1 - 1)));
  const double count = parse_real(strip(arg.substr(c2 + 1)));
  g.count = static_cast<int>(count);
  if (count != g.count) throw Error("grid count must be an integer");
  if (!(g.hi > g.lo)) throw Error("grid needs LO < HI");
  if (g.count < 2) throw Error("grid needs at least two points");
  return g;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fputs(content.c_str(), stdout);
  } else {
    write_text_file(out_path, content);
  }
}

// --family accepts a built-in name or a JSON file. A file holding a
// {"type": ...} object selects a scalar family; {"model": ...} loads a
// cumulant family and routes the sweep through the series evaluator.
struct FamilyChoice {
  std::optional<ScalarFamily> scalar;
  std::optional<CumulantFamily> series;
};

FamilyChoice load_family(const std::string& arg, double p, double variance) {
  FamilyChoice choice;
  if (arg == "bernoulli_sym" || arg == "semicircle" || arg == "two_point") {
    ScalarFamilySpec spec;
    spec.type = arg;
    spec.p = p;
    spec.variance = variance;
    choice.scalar = make_family(spec);
    return choice;
  }
  const Json j = Json::parse(read_text_file(arg));
  if (j.is_object() && j.contains("model")) {
    choice.series = family_from_json(j);
  } else {
    choice.scalar = make_family(scalar_spec_from_json(j));
  }
  return choice;
}

int cmd_solve(const std::string& model_path, const std::string& points_arg, double tol,
              const std::string& out_path) {
  const CovarianceModel model = model_from_json(Json::parse(read_text_file(model_path)));
  const std::vector<PointSpec> specs = parse_points(points_arg);
  std::vector<OperatorPoint> points;
  for (const PointSpec& spec : specs) {
    if (std::holds_alternative<Complex>(spec)) {
      points.push_back(lift_scalar_point(std::get<Complex>(spec), model.N));
    } else {
      points.push_back(make_point(std::get<ComplexMatrix>(spec)));
    }
  }

  MdeOptions options;
  options.tol = tol;
  Json out = Json::array();
  bool all_converged = true;
  for (const OperatorPoint& pt : points) {
    try {
      out.push_back(solution_to_json(solve_mde(model, pt, options)));
    } catch (const NoConvergence& e) {
      all_converged = false;
      Json entry;
      entry["error"] = e.what();
      entry["best_residual"] = e.best_residual;
      out.push_back(entry);
    }
  }
  emit(out_path, out.dump(2) + "\n");
  return all_converged ? kExitOk : kExitNoConvergence;
}

int cmd_rate(const std::string& family_arg, double p, double variance,
             const std::string& points_arg, const std::string& ns_arg, int order,
             const std::string& out_path) {
  const FamilyChoice family = load_family(family_arg, p, variance);
  const std::vector<int> ns = parse_ns(ns_arg);
  const std::vector<PointSpec> specs = parse_points(points_arg);
  if (specs.empty()) throw Error("rate needs at least one point");

  std::vector<RateRecord> records;
  if (family.scalar) {
    std::vector<Complex> zs;
    for (const PointSpec& spec : specs) {
      if (!std::holds_alternative<Complex>(spec))
        throw Error("scalar families take scalar points only");
      zs.push_back(std::get<Complex>(spec));
    }
    records = run_sweep(*family.scalar, zs, ns);
  } else {
    std::vector<LabeledPoint> pts;
    for (const PointSpec& spec : specs) {
      if (std::holds_alternative<Complex>(spec)) {
        const Complex z = std::get<Complex>(spec);
        pts.push_back({format_point_id(z), lift_scalar_point(z, family.series->model.N)});
      } else {
        const OperatorPoint pt = make_point(std::get<ComplexMatrix>(spec));
        pts.push_back({"matrix_" + std::to_string(pts.size()), pt});
      }
    }
    records = run_sweep(*family.series, pts, ns, order);
  }

  const std::string csv_path = out_path.empty() ? "rate.csv" : out_path;
  write_text_file(csv_path, rate_records_to_csv(records));
  write_text_file(csv_path + ".json", rate_records_to_json(records).dump(2) + "\n");

  for (const RateRecord& r : records) {
    if (!r.skipped && r.ratio > 1.0) {
      std::fprintf(stderr,
                   "rate bound violated at point %s, n = %d (ratio %.6g). This indicates a "
                   "software bug in this toolkit, not a failure of the underlying "
                   "mathematics.\n",
                   r.point_id.c_str(), r.n, r.ratio);
      return kExitBoundViolated;
    }
  }
  std::fprintf(stdout, "wrote %zu records to %s (json mirror %s.json)\n", records.size(),
               csv_path.c_str(), csv_path.c_str());
  return kExitOk;
}

int cmd_density(const std::string& model_path, const std::string& family_arg, double p,
                double variance, int n, const std::string& grid_arg, double epsilon, double tol,
                const std::string& out_path) {
  if (!(epsilon > 0.0)) throw Error("--epsilon must be positive");
  if (model_path.empty() == family_arg.empty())
    throw Error("density needs exactly one of --model or --family");
  const GridSpec spec = parse_grid(grid_arg);
  const std::vector<double> grid = make_grid(spec.lo, spec.hi, spec.count);

  ScalarDensity density;
  if (!model_path.empty()) {
    const CovarianceModel model = model_from_json(Json::parse(read_text_file(model_path)));
    MdeOptions options;
    options.tol = tol;
    // spectral density of the scalar reduction: -Im (tr G / N) / pi
    density = stieltjes_invert(
        [&](Complex z) {
          const MdeSolution sol = solve_mde(model, lift_scalar_point(z, model.N), options);
          return sol.G.trace() / double(model.N);
        },
        grid, epsilon);
  } else {
    const FamilyChoice family = load_family(family_arg, p, variance);
    if (!family.scalar) throw Error("density --family needs a scalar family");
    density = stieltjes_invert(
        [&](Complex z) { return free_power_cauchy(*family.scalar, n, z); }, grid, epsilon);
  }
  emit(out_path, density_to_csv(density));
  return kExitOk;
}

int cmd_verify(const std::string& suite) {
  const auto results = run_acceptance(suite);
  std::fputs(format_results(results).c_str(), stdout);
  return all_pass(results) ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-valued free probability toolkit"};
  app.require_subcommand(1);

  std::string model_path, family_arg, points_arg, ns_arg, out_path, grid_arg = "-4:4:801";
  std::string suite = "all";
  double tol = 1e-12, epsilon = 0.01, p = 0.5, variance = 1.0;
  int order = 16, n = 1;

  CLI::App* solve = app.add_subcommand("solve", "solve the fixed-point equation at given points");
  solve->add_option("--model", model_path, "covariance model JSON file")->required();
  solve->add_option("--points", points_arg, "comma-separated complex scalars, or @file.json");
  solve->add_option("--tol", tol, "residual tolerance");
  solve->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* rate = app.add_subcommand("rate", "sweep the distance to the limit against n");
  rate->add_option("--family", family_arg,
                   "bernoulli_sym | semicircle | two_point, or a family JSON file")
      ->required();
  rate->add_option("--p", p, "two_point atom weight");
  rate->add_option("--variance", variance, "semicircle variance");
  rate->add_option("--points", points_arg, "comma-separated complex scalars, or @file.json")
      ->required();
  rate->add_option("--ns", ns_arg, "strictly increasing free-power orders")->required();
  rate->add_option("--order", order, "series truncation order");
  rate->add_option("--out", out_path, "CSV path (default rate.csv); JSON mirror at PATH.json");

  CLI::App* density = app.add_subcommand("density", "sample a spectral density on a grid");
  density->add_option("--model", model_path, "covariance model JSON file");
  density->add_option("--family", family_arg, "scalar family name or JSON file");
  density->add_option("--p", p, "two_point atom weight");
  density->add_option("--variance", variance, "semicircle variance");
  density->add_option("--n", n, "free-power order for --family");
  density->add_option("--grid", grid_arg, "LO:HI:COUNT sample grid");
  density->add_option("--epsilon", epsilon, "imaginary offset of the sampling line");
  density->add_option("--tol", tol, "solver residual tolerance");
  density->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--suite", suite, "mde | cumulants | rate | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(model_path, points_arg, tol, out_path);
    if (rate->parsed())
      return cmd_rate(family_arg, p, variance, points_arg, ns_arg, order, out_path);
    if (density->parsed())
      return cmd_density(model_path, family_arg, p, variance, n, grid_arg, epsilon, tol,
                         out_path);
    if (verify->parsed()) return cmd_verify(suite);
  } catch (const NoConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
