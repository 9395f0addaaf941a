#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace egv::dbtext {

struct FieldDef {
    std::string name;
    std::string type;  // opaque, e.g. "bigint(10)"
    std::string null;  // "No" / "Yes"
    std::string default_value;

    friend bool operator==(const FieldDef&, const FieldDef&) = default;
};

struct TableDump {
    std::string database_name;
    std::string table_name;
    std::vector<FieldDef> schema;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const TableDump&, const TableDump&) = default;
};

enum class CellMode {
    Strict,   // '|', '\n' and '\r' in a cell are rejected
    Escaped,  // backslash escapes: \| \\ \n \r
};

/// Dump text as in
///
///   ====Database E-GOV
///
///   == Table structure for table ssn
///
///   |-----
///   |Field|Type|Null|Default
///   |-----
///   |SSN_ID|bigint(10)|No|
///
///   == Dumping data for table ssn
///
///   | WB191134355525|DAIBIKJ33998822|9434538808
///
/// The data marker is always written, even for a table with no rows.
/// Throws InvalidCell in strict mode for delimiter characters, and
/// std::invalid_argument for empty names, an empty schema, or ragged rows.
std::string export_dump(const TableDump& table, CellMode mode = CellMode::Strict);

/// Throws ParseError carrying the 1-based line number.
TableDump parse_dump(std::string_view text, CellMode mode = CellMode::Strict);

/// RFC 4180 records. Throws ParseError on unterminated quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// First record is the header. Columns are typed "text" unless `schema` is
/// given, in which case its field names must match the header. Throws
/// ParseError on empty input or ragged records.
TableDump load_csv(std::string_view csv, std::string database_name, std::string table_name,
                   const std::optional<std::vector<FieldDef>>& schema = std::nullopt);

/// Reads a sidecar schema: a CSV with header Field,Type,Null,Default.
std::vector<FieldDef> load_schema_csv(std::string_view csv);

/// The table back out as CSV (header row of field names, CRLF line ends,
/// quoting only where needed).
std::string to_csv(const TableDump& table);

} // namespace egv::dbtext
