#pragma once

#include <string>

#include <json.hpp>

#include "spectrakit/operator.hpp"

namespace spectrakit {

using json = nlohmann::json;

// Operator spec files are JSON:
//   scalar: {re, im}
//   block: {n, entries: flat row-major [{re, im}, ...]}            (optional)
//   tail:  {terms: [{c, r, p}, ...]}  entries sum c * r^n * n^-p   (optional)
//   rank_one: [{u: [{i, re, im}, ...], v: [...]}, ...]             (optional)
// Rank-one parts u (x) v are folded into the block at parse time.

namespace detail {

inline cplx parse_cplx(const json& j, const char* where) {
  if (!j.is_object() || !j.contains("re"))
    throw parse_error(std::string(where) + ": expected {re, im}");
  return {j.at("re").get<double>(), j.value("im", 0.0)};
}

inline json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline FinVector parse_sparse(const json& j, const char* where) {
  if (!j.is_array()) throw parse_error(std::string(where) + ": expected a coordinate list");
  FinVector v;
  for (const auto& e : j) {
    const std::int64_t i = e.at("i").get<std::int64_t>();
    if (i < 1) throw parse_error(std::string(where) + ": coordinate index must be >= 1");
    v.set(i, parse_cplx(e, where));
  }
  return v;
}

}  // namespace detail

inline StructuredOperator parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("spec is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw parse_error("spec root must be an object");
    const cplx scalar = j.contains("scalar") ? detail::parse_cplx(j.at("scalar"), "scalar")
                                             : cplx{0.0, 0.0};
    std::int64_t n = 0;
    std::vector<cplx> block;
    if (j.contains("block")) {
      const json& b = j.at("block");
      n = b.at("n").get<std::int64_t>();
      if (n < 0) throw parse_error("block.n must be nonnegative");
      const json& entries = b.at("entries");
      if (!entries.is_array() || entries.size() != static_cast<std::size_t>(n) * n)
        throw parse_error("block.entries must hold n*n values");
      for (const auto& e : entries) block.push_back(detail::parse_cplx(e, "block.entries"));
    }
    TermList terms;
    if (j.contains("tail")) {
      for (const auto& t : j.at("tail").at("terms")) {
        const double c = t.at("c").get<double>();
        const double r = t.at("r").get<double>();
        const double p = t.value("p", 0.0);
        if (!(r > 0.0 && r <= 1.0)) throw parse_error("tail term rate must lie in (0,1]");
        if (!(p >= 0.0)) throw parse_error("tail term exponent must be nonnegative");
        if (r == 1.0 && p == 0.0 && c != 0.0)
          throw nonvanishing_tail("tail term with r=1, p=0 does not vanish");
        terms.push_back({cplx{c, 0.0}, r, p});
      }
    }
    StructuredOperator t = make_operator(scalar, n, std::move(block),
                                         TailRule::from_terms(std::move(terms)));
    if (j.contains("rank_one")) {
      for (const auto& ro : j.at("rank_one")) {
        t = add(t, outer_op(detail::parse_sparse(ro.at("u"), "rank_one.u"),
                            detail::parse_sparse(ro.at("v"), "rank_one.v")));
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw parse_error(std::string("malformed spec: ") + e.what());
  }
}

/// Serializes an operator back to the spec format. Only term-sum tails are
/// representable at this boundary; derived symbolic tails do not serialize.
inline std::string emit(const StructuredOperator& t) {
  json j;
  j["scalar"] = detail::cplx_json(t.scalar());
  if (t.block_size() > 0) {
    json entries = json::array();
    for (const auto& v : t.block()) entries.push_back(detail::cplx_json(v));
    j["block"] = json{{"n", t.block_size()}, {"entries", std::move(entries)}};
  }
  if (!t.tail().is_zero()) {
    const TermList* terms = t.tail().terms();
    if (!terms)
      throw precondition_failed("tail rule is not a plain term sum; cannot serialize");
    json ts = json::array();
    for (const auto& term : *terms) {
      if (term.c.imag() != 0.0)
        throw precondition_failed("complex tail coefficients are not serializable");
      ts.push_back(json{{"c", term.c.real()}, {"r", term.r}, {"p", term.p}});
    }
    j["tail"] = json{{"terms", std::move(ts)}};
  }
  return j.dump(2);
}

/// FNV-1a 64-bit content digest, hex encoded.
inline std::string digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json vector_json(const FinVector& v) {
  json out = json::array();
  for (const auto& [i, z] : v.coords)
    out.push_back(json{{"i", i}, {"re", z.real()}, {"im", z.imag()}});
  return out;
}

/// Structural summary of an operator for reports.
inline json operator_json(const StructuredOperator& t) {
  json out;
  out["scalar"] = detail::cplx_json(t.scalar());
  out["block_size"] = t.block_size();
  if (const TermList* terms = t.tail().terms()) {
    json ts = json::array();
    for (const auto& term : *terms)
      ts.push_back(json{{"c_re", term.c.real()}, {"c_im", term.c.imag()}, {"r", term.r}, {"p", term.p}});
    out["tail_terms"] = std::move(ts);
  } else {
    out["tail"] = t.tail().is_zero() ? "zero" : "symbolic";
  }
  return out;
}

}  // namespace spectrakit
