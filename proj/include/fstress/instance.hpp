#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fstress/loss.hpp"

namespace fstress {

// One self-contained problem: point/axis counts, the function specification,
// dissimilarities with weights in pair order, and optionally a configuration
// (needed for evaluation, optional for fitting).
//
// The JSON file form carries fields n, p, function (log | identity | exp |
// bounded | log1p), power, optional x (length n*p, column-major), and the
// pair data either dense ("weights" and "delta" arrays in pair order) or as
// records ("pairs": [{"i":, "j":, "delta":, "w":}, ...], w defaulting to 1,
// unlisted pairs to weight 0).  Serialization always emits the dense form,
// so parse -> serialize -> parse is the identity.
struct Instance {
  std::size_t n = 0;
  std::size_t p = 1;
  FSpec spec;
  std::optional<std::vector<double>> x;
  std::vector<double> weights;
  std::vector<double> delta;

  Configuration configuration() const;  // throws when x is absent
  DissimilarityData data() const;

  bool operator==(const Instance&) const = default;
};

Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string serialize_instance(const Instance& instance);
void save_instance(const Instance& instance, const std::string& path);

// Square symmetric matrix of comma-separated values -> lower triangle in
// pair order.  Row/column counts must agree, off-diagonal entries must match
// their mirror exactly, the diagonal is ignored.
struct MatrixCsv {
  std::size_t n = 0;
  std::vector<double> lower;
};
MatrixCsv parse_csv_matrix(const std::string& text);

// Coordinate table: n rows with p comma-separated values each, returned
// column-major.
std::vector<double> parse_csv_coords(const std::string& text, std::size_t& n,
                                     std::size_t& p);

// Number rendering for tensor files: shortest decimal digits that parse back
// to the same double, or hexadecimal floating point.
enum class FloatFormat { Shortest, Hex };
std::string format_double(double v, FloatFormat fmt = FloatFormat::Shortest);
double parse_double(const std::string& text);

// Flat tensor file: a fixed preamble (dim, max_order, value), then for each
// order a "tensor <order> shape m ... strides ... " line followed by the
// entries in row-major order.  Both float formats round-trip bit-exactly.
std::string serialize_tensors(const DerivTensors& t,
                              FloatFormat fmt = FloatFormat::Shortest);
DerivTensors parse_tensors(const std::string& text);

// Evaluation summary as JSON: stress in both conventions, the
// constant/rho/eta split, and the per-pair squared and transformed
// distances (null for unweighted pairs).
std::string serialize_value_report(const LossReport& rep);

}  // namespace fstress
