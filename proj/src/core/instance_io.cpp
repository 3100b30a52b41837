#include "sparsecs/core/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sparsecs {

namespace {

using nlohmann::json;

double real_field(const json& node, const char* what) {
  if (!node.is_number()) throw Error(ErrorCode::ParseError, std::string("expected a number for ") + what);
  return node.get<double>();
}

Vector parse_vector(const json& node, const char* what) {
  if (!node.is_array()) throw Error(ErrorCode::ParseError, std::string("expected an array for ") + what);
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Index>(i)) = real_field(node[i], what);
  return v;
}

void append_vector(std::ostringstream& out, const Vector& v) {
  out << '[';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << format_real(v(i));
  }
  out << ']';
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "null";
  if (std::isinf(value)) return value > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ProblemInstance parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid instance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "instance must be a JSON object");
  for (const char* key : {"A", "b", "epsilon"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  }

  const json& rows = doc["A"];
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "\"A\" must be a non-empty array of rows");
  const auto m = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows[0].is_array() ? rows[0].size() : 0);
  Matrix A(m, n);
  for (Index i = 0; i < m; ++i) {
    const Vector row = parse_vector(rows[static_cast<std::size_t>(i)], "A row");
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "ragged rows in \"A\"");
    A.row(i) = row.transpose();
  }
  if (doc.contains("m") && doc["m"].get<Index>() != m) {
    throw Error(ErrorCode::DimensionMismatch, "\"m\" disagrees with the number of rows of \"A\"");
  }
  if (doc.contains("n") && doc["n"].get<Index>() != n) {
    throw Error(ErrorCode::DimensionMismatch, "\"n\" disagrees with the number of columns of \"A\"");
  }

  std::optional<double> gamma;
  if (doc.contains("gamma") && !doc["gamma"].is_null()) gamma = real_field(doc["gamma"], "gamma");
  std::optional<Vector> weights;
  if (doc.contains("weights") && !doc["weights"].is_null()) weights = parse_vector(doc["weights"], "weights");

  ProblemInstance instance = ProblemInstance::make(std::move(A), parse_vector(doc["b"], "b"),
                                                   real_field(doc["epsilon"], "epsilon"), gamma,
                                                   std::move(weights));
  validate(instance);
  return instance;
}

ProblemInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open instance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string format_instance(const ProblemInstance& instance) {
  std::ostringstream out;
  out << "{\n  \"m\": " << instance.rows() << ",\n  \"n\": " << instance.cols()
      << ",\n  \"epsilon\": " << format_real(instance.epsilon)
      << ",\n  \"gamma\": " << format_real(instance.gamma) << ",\n  \"weights\": ";
  append_vector(out, instance.weights);
  out << ",\n  \"A\": [";
  for (Index i = 0; i < instance.rows(); ++i) {
    out << (i ? ",\n    " : "\n    ");
    append_vector(out, instance.A.row(i).transpose());
  }
  out << "\n  ],\n  \"b\": ";
  append_vector(out, instance.b);
  out << "\n}\n";
  return out.str();
}

void write_instance(const std::filesystem::path& path, const ProblemInstance& instance) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write instance file " + path.string());
  out << format_instance(instance);
}

}  // namespace sparsecs
