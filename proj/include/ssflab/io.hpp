#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ssflab/errors.hpp"
#include "ssflab/functionals.hpp"
#include "ssflab/hermitian_operator.hpp"
#include "ssflab/property_suite.hpp"
#include "ssflab/spectral_shift.hpp"
#include "ssflab/step_function.hpp"
#include "ssflab/weight.hpp"

namespace ssflab {

using json = nlohmann::json;

// Operators serialize as {dim, entries_re, entries_im}, row-major.
template <typename Scalar>
json operator_to_json(const HermitianOperator<Scalar>& a) {
  const Index n = a.dim();
  std::vector<double> re(static_cast<std::size_t>(n * n));
  std::vector<double> im(re.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(i * n + j);
      re[k] = std::real(a(i, j));
      im[k] = std::imag(a(i, j));
    }
  return json{{"dim", n}, {"entries_re", re}, {"entries_im", im}};
}

/// Accepts the {dim, entries_re, entries_im} object or a nested array of
/// real rows. A real operator rejects nonzero imaginary parts.
template <typename Scalar>
HermitianOperator<Scalar> operator_from_json(const json& j) {
  if (j.is_array()) {
    const auto n = static_cast<Index>(j.size());
    Matrix<Scalar> m(n, n);
    for (Index i = 0; i < n; ++i) {
      const auto& row = j.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Index>(row.size()) != n) {
        throw DomainError("matrix: row " + std::to_string(i) + " does not have " + std::to_string(n) + " entries");
      }
      for (Index c = 0; c < n; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return HermitianOperator<Scalar>(m);
  }
  if (!j.is_object()) throw DomainError("matrix: expected an array of rows or an object with dim/entries_re");
  const auto n = j.at("dim").get<Index>();
  const auto re = j.at("entries_re").get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("entries_im")) im = j.at("entries_im").get<std::vector<double>>();
  if (n < 1 || re.size() != static_cast<std::size_t>(n * n) || im.size() != re.size()) {
    throw DomainError("matrix: entries do not match dim " + std::to_string(n));
  }
  Matrix<Scalar> m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < n; ++c) {
      const auto k = static_cast<std::size_t>(i * n + c);
      if constexpr (is_complex_v<Scalar>) {
        m(i, c) = Scalar(re[k], im[k]);
      } else {
        if (im[k] != 0.0) throw DomainError("matrix: imaginary entries in a real operator");
        m(i, c) = re[k];
      }
    }
  return HermitianOperator<Scalar>(m);
}

/// True when a matrix JSON value carries a nonzero imaginary part.
bool json_matrix_is_complex(const json& j);

json step_function_to_json(const StepFunction& xi);
StepFunction step_function_from_json(const json& j);

/// {"kind": ..., parameters}; custom weights cannot be serialized.
json weight_to_json(const Weight& w);
Weight weight_from_json(const json& j);

json trace_function_to_json(const TraceTestFunction& f);
TraceTestFunction trace_function_from_json(const json& j);

json report_to_json(const PropertyReport& r);

/// Shortest round-trip decimal form, as used in every CSV file.
std::string format_number(double x);

/// "breakpoint,value" rows: each breakpoint with the value on the piece
/// that starts there (0 after the last).
std::string step_function_csv(const StepFunction& xi);

/// "lambda,value" rows of the integrated shift function on the given side,
/// sampled at the breakpoints and the midpoints between them, plus one
/// point beyond each end.
std::string integrated_ssf_csv(const StepFunction& xi, Side side);

/// "alpha,value" rows.
std::string coupling_curve_csv(const CouplingCurve& curve);

}  // namespace ssflab
