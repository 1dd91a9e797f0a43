#pragma once

#include <string>

#include <json.hpp>

#include "emext/algebra.hpp"

namespace emext {

/* Model-description language, one statement per line, '#' comments:
 *
 *   format 1                      (optional, version header)
 *   field Q | field F <p>
 *   flavor sullivan | adams-hilton
 *   gen <name> <degree>
 *   d <name> = <expr>             (omitted d lines default to 0)
 *
 * expr is a signed sum of terms; a term is an optional integer or fraction
 * coefficient and '*'-separated factors name or name^k. Names may contain
 * primes (a') and digits. Errors carry line/column positions (ParseError). */
DgaPresentation parse_model(const std::string& text);

/* Canonical printer; parse(print(parse(t))) == parse(t). */
std::string print_model(const DgaPresentation& pres);

enum class ReportFormat { json, csv, table };

ReportFormat report_format_of(const std::string& name);

/* Canonical serialization: JSON with sorted keys (rationals already rendered
 * as "num/den" strings by the report builders), CSV flattening of per-degree
 * tables, or aligned text. */
std::string emit_report(const nlohmann::json& report, ReportFormat fmt);

}  // namespace emext
