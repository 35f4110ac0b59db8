#include "fstress/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fstress {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t get_count(const ordered_json& j, const char* key,
                      std::size_t minimum) {
  if (!j.contains(key)) {
    throw ParseError(std::string("instance is missing required field '") +
                     key + "'");
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ParseError(std::string("field '") + key +
                     "' must be a non-negative integer");
  }
  const auto raw = v.get<long long>();
  if (raw < static_cast<long long>(minimum)) {
    throw ParseError(std::string("field '") + key + "' must be at least " +
                     std::to_string(minimum));
  }
  return static_cast<std::size_t>(raw);
}

std::vector<double> get_number_array(const ordered_json& v, const char* key,
                                     std::size_t expected) {
  if (!v.is_array()) {
    throw ParseError(std::string("field '") + key + "' must be an array");
  }
  if (v.size() != expected) {
    throw ParseError(std::string("field '") + key + "' has " +
                     std::to_string(v.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw ParseError(std::string("field '") + key +
                       "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

Configuration Instance::configuration() const {
  if (!x) {
    throw ParseError(
        "instance carries no coordinates (x); supply them to evaluate");
  }
  return Configuration(n, p, *x);
}

DissimilarityData Instance::data() const {
  return DissimilarityData(n, weights, delta);
}

Instance parse_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid instance JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance file must hold a JSON object");

  static const char* known[] = {"n", "p",       "function", "power",
                                "x", "weights", "delta",    "pairs"};
  for (const auto& item : j.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return item.key() == k; }) ==
        std::end(known)) {
      throw ParseError("unknown instance field '" + item.key() + "'");
    }
  }

  Instance ins;
  ins.n = get_count(j, "n", 1);
  ins.p = j.contains("p") ? get_count(j, "p", 1) : 1;

  if (!j.contains("function")) {
    throw ParseError("instance is missing required field 'function'");
  }
  if (!j.at("function").is_string()) {
    throw ParseError("field 'function' must be a string tag");
  }
  ins.spec.base = base_function_from_string(j.at("function").get<std::string>());
  if (j.contains("power")) {
    if (!j.at("power").is_number()) {
      throw ParseError("field 'power' must be a number");
    }
    ins.spec.power = j.at("power").get<double>();
  }

  if (j.contains("x")) {
    ins.x = get_number_array(j.at("x"), "x", ins.n * ins.p);
  }

  const std::size_t pairs = pair_count(ins.n);
  const bool dense = j.contains("weights") || j.contains("delta");
  const bool records = j.contains("pairs");
  if (dense && records) {
    throw ParseError(
        "instance mixes dense 'weights'/'delta' arrays with 'pairs' records; "
        "use one form");
  }
  if (dense) {
    if (!j.contains("weights") || !j.contains("delta")) {
      throw ParseError("dense form needs both 'weights' and 'delta'");
    }
    ins.weights = get_number_array(j.at("weights"), "weights", pairs);
    ins.delta = get_number_array(j.at("delta"), "delta", pairs);
  } else if (records) {
    const auto& recs = j.at("pairs");
    if (!recs.is_array()) throw ParseError("'pairs' must be an array");
    ins.weights.assign(pairs, 0.0);
    ins.delta.assign(pairs, 0.0);
    std::vector<bool> seen(pairs, false);
    for (const auto& r : recs) {
      if (!r.is_object()) throw ParseError("each pair record must be an object");
      for (const auto& item : r.items()) {
        if (item.key() != "i" && item.key() != "j" && item.key() != "delta" &&
            item.key() != "w") {
          throw ParseError("unknown pair-record field '" + item.key() + "'");
        }
      }
      const std::size_t i = get_count(r, "i", 1);
      const std::size_t jj = get_count(r, "j", 1);
      if (i > ins.n || jj > ins.n || i == jj) {
        throw ParseError("pair record (" + std::to_string(i) + ", " +
                         std::to_string(jj) + ") is not a valid point pair");
      }
      if (!r.contains("delta") || !r.at("delta").is_number()) {
        throw ParseError("pair record needs a numeric 'delta'");
      }
      const std::size_t k =
          pair_index(std::max(i, jj), std::min(i, jj), ins.n);
      if (seen[k]) {
        throw ParseError("pair (" + std::to_string(i) + ", " +
                         std::to_string(jj) + ") listed twice");
      }
      seen[k] = true;
      ins.delta[k] = r.at("delta").get<double>();
      if (r.contains("w")) {
        if (!r.at("w").is_number()) {
          throw ParseError("pair-record field 'w' must be a number");
        }
        ins.weights[k] = r.at("w").get<double>();
      } else {
        ins.weights[k] = 1.0;
      }
    }
  } else {
    throw ParseError(
        "instance needs pair data: either 'weights'+'delta' arrays or "
        "'pairs' records");
  }

  for (std::size_t k = 0; k < pairs; ++k) {
    if (ins.weights[k] < 0.0) {
      throw ParseError("weights must be non-negative; pair position " +
                       std::to_string(k) + " has " +
                       std::to_string(ins.weights[k]));
    }
  }
  return ins;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize_instance(const Instance& instance) {
  ordered_json j;
  j["n"] = instance.n;
  j["p"] = instance.p;
  j["function"] = std::string(to_string(instance.spec.base));
  j["power"] = instance.spec.power;
  if (instance.x) j["x"] = *instance.x;
  j["weights"] = instance.weights;
  j["delta"] = instance.delta;
  return j.dump(2) + "\n";
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write instance file '" + path + "'");
  out << serialize_instance(instance);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const std::string t = trim(cell);
      if (t.empty()) {
        throw ParseError("empty cell in CSV line " + std::to_string(lineno));
      }
      try {
        row.push_back(parse_double(t));
      } catch (const ParseError&) {
        throw ParseError("CSV line " + std::to_string(lineno) +
                         ": cannot parse number '" + t + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("CSV line " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("CSV input holds no rows");
  return rows;
}

}  // namespace

MatrixCsv parse_csv_matrix(const std::string& text) {
  const auto rows = parse_csv_rows(text);
  const std::size_t n = rows.size();
  if (rows.front().size() != n) {
    throw ParseError("matrix CSV must be square, got " + std::to_string(n) +
                     " rows of " + std::to_string(rows.front().size()) +
                     " cells");
  }
  MatrixCsv out;
  out.n = n;
  out.lower.assign(pair_count(n), 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[i][j] != rows[j][i]) {
        throw ParseError("matrix CSV is not symmetric at (" +
                         std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                         ")");
      }
      out.lower[pair_index(i + 1, j + 1, n)] = rows[i][j];
    }
  }
  return out;
}

std::vector<double> parse_csv_coords(const std::string& text, std::size_t& n,
                                     std::size_t& p) {
  const auto rows = parse_csv_rows(text);
  n = rows.size();
  p = rows.front().size();
  std::vector<double> x(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < p; ++s) {
      x[s * n + i] = rows[i][s];
    }
  }
  return x;
}

std::string format_double(double v, FloatFormat fmt) {
  char buf[64];
  if (fmt == FloatFormat::Shortest) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::hex);
  std::string body(buf, res.ptr);
  if (!body.empty() && body.front() == '-') {
    return "-0x" + body.substr(1);
  }
  return "0x" + body;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty string where a number was expected");
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + t.size()) {
    throw ParseError("cannot parse number '" + t + "'");
  }
  return v;
}

std::string serialize_tensors(const DerivTensors& t, FloatFormat fmt) {
  std::ostringstream out;
  out << "fstress-tensors 1\n";
  out << "dim " << t.dim << "\n";
  out << "max_order " << t.max_order << "\n";
  out << "format " << (fmt == FloatFormat::Hex ? "hex" : "decimal") << "\n";
  out << "value " << format_double(t.value, fmt) << "\n";
  for (int r = 1; r <= t.max_order; ++r) {
    out << "tensor " << r << " shape";
    for (int k = 0; k < r; ++k) out << " " << t.dim;
    out << " strides";
    std::size_t stride = 1;
    std::vector<std::size_t> strides(r);
    for (int k = r - 1; k >= 0; --k) {
      strides[k] = stride;
      stride *= t.dim;
    }
    for (int k = 0; k < r; ++k) out << " " << strides[k];
    out << "\n";
    const std::vector<double>& data = t.order(r);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << format_double(data[i], fmt);
      out << (((i + 1) % t.dim == 0) ? "\n" : " ");
    }
  }
  return out.str();
}

DerivTensors parse_tensors(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  auto next = [&](const char* what) {
    if (!(in >> tok)) {
      throw ParseError(std::string("tensor file ended while reading ") + what);
    }
    return tok;
  };
  auto expect = [&](const char* word) {
    if (next(word) != word) {
      throw ParseError("tensor file: expected '" + std::string(word) +
                       "', got '" + tok + "'");
    }
  };
  auto next_size = [&](const char* what) {
    const std::string s = next(what);
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError("tensor file: bad count '" + s + "' for " + what);
    }
    return v;
  };

  expect("fstress-tensors");
  if (next_size("version") != 1) {
    throw ParseError("unsupported tensor file version");
  }
  expect("dim");
  const std::size_t m = next_size("dim");
  expect("max_order");
  const std::size_t order = next_size("max_order");
  if (order > 4) throw ParseError("tensor file order exceeds 4");
  expect("format");
  const std::string fmt_tag = next("format");
  if (fmt_tag != "decimal" && fmt_tag != "hex") {
    throw ParseError("unknown tensor file format '" + fmt_tag + "'");
  }
  expect("value");
  DerivTensors t(m, static_cast<int>(order));
  t.value = parse_double(next("value"));

  for (std::size_t r = 1; r <= order; ++r) {
    expect("tensor");
    if (next_size("tensor order") != r) {
      throw ParseError("tensor file: orders out of sequence");
    }
    expect("shape");
    for (std::size_t k = 0; k < r; ++k) {
      if (next_size("shape") != m) {
        throw ParseError("tensor file: shape does not match dim");
      }
    }
    expect("strides");
    std::size_t stride = 1;
    std::vector<std::size_t> want(r);
    for (std::size_t k = r; k-- > 0;) {
      want[k] = stride;
      stride *= m;
    }
    for (std::size_t k = 0; k < r; ++k) {
      if (next_size("strides") != want[k]) {
        throw ParseError("tensor file: unexpected strides");
      }
    }
    std::vector<double>& data = t.order(static_cast<int>(r));
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = parse_double(next("tensor entry"));
    }
  }
  if (in >> tok) {
    throw ParseError("tensor file has trailing content starting at '" + tok +
                     "'");
  }
  return t;
}

std::string serialize_value_report(const LossReport& rep) {
  ordered_json j;
  j["stress"] = rep.stress;
  j["stress_unscaled"] = rep.stress_unscaled;
  j["constant"] = rep.constant;
  j["rho"] = rep.rho;
  j["eta"] = rep.eta;
  j["qdist"] = rep.qdist;
  j["fdist"] = rep.fdist;  // NaN entries render as null
  return j.dump(2) + "\n";
}

}  // namespace fstress
