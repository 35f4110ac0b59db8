#include <cstddef>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fstress/instance.hpp"
#include "fstress/optimize.hpp"
#include "fstress/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;      // domain or validation failure
constexpr int kExitCheckFailed = 2;  // a verification check did not pass
constexpr int kExitNoConverge = 3;   // fit stopped above tolerance

struct SourceArgs {
  std::string instance_path;
  std::string delta_csv;
  std::string weights_csv;
  std::string coords_csv;
  std::string function_tag;
  double power = 1.0;
};

void add_source_options(CLI::App* cmd, SourceArgs& args) {
  auto* inst = cmd->add_option("-i,--instance", args.instance_path,
                               "instance JSON file");
  auto* dcsv = cmd->add_option(
      "--delta-csv", args.delta_csv,
      "square symmetric dissimilarity matrix as CSV (alternative input)");
  cmd->add_option("--weights-csv", args.weights_csv,
                  "square symmetric weight matrix as CSV; all ones when "
                  "omitted")
      ->needs(dcsv);
  cmd->add_option("--coords-csv", args.coords_csv,
                  "coordinate table as CSV, one row per point")
      ->needs(dcsv);
  cmd->add_option("--function", args.function_tag,
                  "base function for CSV input: log, identity, exp, bounded "
                  "or log1p")
      ->needs(dcsv);
  cmd->add_option("--power", args.power, "power for CSV input (default 1)")
      ->needs(dcsv);
  inst->excludes(dcsv);
  dcsv->excludes(inst);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fstress::ParseError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fstress::Instance load_source(const SourceArgs& args) {
  if (!args.instance_path.empty()) {
    return fstress::load_instance(args.instance_path);
  }
  if (args.delta_csv.empty()) {
    throw fstress::ParseError(
        "no input given; supply --instance or --delta-csv");
  }
  const fstress::MatrixCsv deltas =
      fstress::parse_csv_matrix(read_file(args.delta_csv));

  fstress::Instance ins;
  ins.n = deltas.n;
  ins.delta = deltas.lower;
  if (!args.weights_csv.empty()) {
    const fstress::MatrixCsv weights =
        fstress::parse_csv_matrix(read_file(args.weights_csv));
    if (weights.n != deltas.n) {
      throw fstress::ParseError("weight matrix covers " +
                                std::to_string(weights.n) +
                                " points, dissimilarities cover " +
                                std::to_string(deltas.n));
    }
    ins.weights = weights.lower;
  } else {
    ins.weights.assign(fstress::pair_count(ins.n), 1.0);
  }
  if (args.function_tag.empty()) {
    throw fstress::ParseError("CSV input needs --function");
  }
  ins.spec.base = fstress::base_function_from_string(args.function_tag);
  ins.spec.power = args.power;
  if (!args.coords_csv.empty()) {
    std::size_t n = 0, p = 0;
    std::vector<double> x =
        fstress::parse_csv_coords(read_file(args.coords_csv), n, p);
    if (n != ins.n) {
      throw fstress::ParseError("coordinate table has " + std::to_string(n) +
                                " rows, dissimilarities cover " +
                                std::to_string(ins.n) + " points");
    }
    ins.p = p;
    ins.x = std::move(x);
  }
  return ins;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fstress::Error("cannot write output file '" + path + "'");
  out << text;
}

int run_value(const SourceArgs& src, const std::string& out) {
  const fstress::Instance ins = load_source(src);
  const fstress::LossReport rep =
      fstress::fstress_eval(ins.configuration(), ins.data(), ins.spec, 0);
  write_output(out, fstress::serialize_value_report(rep));
  return kExitOk;
}

int run_derivs(const SourceArgs& src, int max_order, const std::string& out,
               bool hex, bool force) {
  const fstress::Instance ins = load_source(src);
  const std::size_t cap = force ? std::numeric_limits<std::size_t>::max()
                                : fstress::kDefaultDimCap;
  const fstress::LossReport rep = fstress::fstress_eval(
      ins.configuration(), ins.data(), ins.spec, max_order, cap);
  write_output(out, fstress::serialize_tensors(
                        rep.tensors, hex ? fstress::FloatFormat::Hex
                                         : fstress::FloatFormat::Shortest));
  return kExitOk;
}

int run_check(const SourceArgs& src, const fstress::CheckOptions& options) {
  const fstress::Instance ins = load_source(src);
  const fstress::CheckReport report = fstress::check_instance(
      ins.configuration(), ins.data(), ins.spec, options);
  for (const fstress::CheckLine& line : report.lines) {
    std::cout << (line.pass ? "PASS" : "FAIL") << " " << line.name
              << " deviation " << fstress::format_double(line.deviation)
              << " tolerance " << fstress::format_double(line.tolerance)
              << "\n";
  }
  std::cout << (report.all_pass() ? "all checks passed"
                                  : "verification failed")
            << "\n";
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int run_fit(const SourceArgs& src, const std::string& method_tag,
            std::size_t axes, const fstress::FitOptions& base_options,
            const std::string& out) {
  const fstress::Instance ins = load_source(src);
  fstress::FitOptions options = base_options;
  if (method_tag == "gd") {
    options.method = fstress::FitMethod::GradientDescent;
  } else if (method_tag == "newton") {
    options.method = fstress::FitMethod::Newton;
  } else {
    throw fstress::ParseError("unknown method '" + method_tag +
                              "'; use gd or newton");
  }

  const fstress::DissimilarityData data = ins.data();
  const fstress::FitResult res =
      ins.x ? fstress::fit(ins.configuration(), data, ins.spec, options)
            : fstress::fit(data, ins.spec, axes != 0 ? axes : ins.p, options);

  nlohmann::ordered_json j;
  j["converged"] = res.converged;
  j["stress"] = res.stress;
  j["gradient_norm"] = res.gradient_norm;
  j["iterations"] = res.trace.empty() ? 0 : res.trace.back().iteration;
  j["n"] = res.configuration.n;
  j["p"] = res.configuration.p;
  j["x"] = res.configuration.x;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const fstress::IterationRecord& rec : res.trace) {
    nlohmann::ordered_json row;
    row["iteration"] = rec.iteration;
    row["stress"] = rec.stress;
    row["gradient_norm"] = rec.gradient_norm;
    row["step"] = rec.step;
    row["kind"] = rec.kind == 'N'   ? "newton"
                  : rec.kind == 'G' ? "gradient"
                                    : "start";
    trace.push_back(row);
  }
  j["trace"] = trace;
  write_output(out, j.dump(2) + "\n");
  return res.converged ? kExitOk : kExitNoConverge;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "evaluate, differentiate, verify and fit weighted least-squares "
      "distance embeddings"};
  app.require_subcommand(1);

  SourceArgs value_src;
  std::string value_out = "-";
  CLI::App* value_cmd = app.add_subcommand(
      "value", "print the loss value, its constant/rho/eta split and the "
               "per-pair distances");
  add_source_options(value_cmd, value_src);
  value_cmd->add_option("-o,--out", value_out, "output file ('-' = stdout)");

  SourceArgs derivs_src;
  std::string derivs_out = "-";
  int derivs_order = 2;
  bool derivs_hex = false;
  bool derivs_force = false;
  CLI::App* derivs_cmd = app.add_subcommand(
      "derivs", "write the derivative tensors up to --max-order");
  add_source_options(derivs_cmd, derivs_src);
  derivs_cmd->add_option("--max-order", derivs_order, "highest order, 0..4")
      ->check(CLI::Range(0, 4));
  derivs_cmd->add_option("-o,--out", derivs_out, "output file ('-' = stdout)");
  derivs_cmd->add_flag("--hex", derivs_hex,
                       "write hexadecimal floats instead of shortest decimal");
  derivs_cmd->add_flag(
      "--force", derivs_force,
      "allow order >= 3 tensors beyond the default coordinate cap");

  SourceArgs check_src;
  fstress::CheckOptions check_options;
  CLI::App* check_cmd = app.add_subcommand(
      "check", "verify analytic derivatives against finite differences; "
               "exits 0 only if every check passes");
  add_source_options(check_cmd, check_src);
  check_cmd->add_option("--max-order", check_options.max_order,
                        "highest order to verify, 0..4")
      ->check(CLI::Range(0, 4));
  check_cmd->add_option("--seed", check_options.seed,
                        "seed for probe directions");
  check_cmd->add_option("--probes", check_options.probes,
                        "random probes per directional check");
  check_cmd->add_option("--tol-gradient", check_options.tol_gradient,
                        "gradient tolerance");
  check_cmd->add_option("--tol-hessian", check_options.tol_hessian,
                        "Hessian tolerance");
  check_cmd->add_option("--tol-order3", check_options.tol_order3,
                        "order-3 tolerance");
  check_cmd->add_option("--tol-order4", check_options.tol_order4,
                        "order-4 tolerance");

  SourceArgs fit_src;
  fstress::FitOptions fit_options;
  std::string fit_method = "newton";
  std::string fit_out = "-";
  std::size_t fit_axes = 0;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "minimize the loss; exits 3 when the gradient tolerance is not "
             "reached");
  add_source_options(fit_cmd, fit_src);
  fit_cmd->add_option("--method", fit_method, "gd or newton");
  fit_cmd->add_option("--tol", fit_options.tol,
                      "gradient infinity-norm stopping tolerance");
  fit_cmd->add_option("--max-iter", fit_options.max_iter, "iteration budget");
  fit_cmd->add_option("--seed", fit_options.seed,
                      "seed for the random start (used when the instance has "
                      "no coordinates)");
  fit_cmd->add_option("--axes", fit_axes,
                      "dimensions for the random start (default: instance p)");
  fit_cmd->add_flag("--center", fit_options.center,
                    "translate the result to zero mean per axis");
  fit_cmd->add_option("-o,--out", fit_out, "output file ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (value_cmd->parsed()) return run_value(value_src, value_out);
    if (derivs_cmd->parsed()) {
      return run_derivs(derivs_src, derivs_order, derivs_out, derivs_hex,
                        derivs_force);
    }
    if (check_cmd->parsed()) return run_check(check_src, check_options);
    if (fit_cmd->parsed()) {
      return run_fit(fit_src, fit_method, fit_axes, fit_options, fit_out);
    }
  } catch (const fstress::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
