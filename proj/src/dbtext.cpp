#include "egv/dbtext.hpp"

#include <stdexcept>

#include "egv/errors.hpp"

namespace egv::dbtext {

namespace {

constexpr std::string_view kDatabasePrefix = "====Database ";
constexpr std::string_view kStructurePrefix = "== Table structure for table ";
constexpr std::string_view kDataPrefix = "== Dumping data for table ";
constexpr std::string_view kRuler = "|-----";
constexpr std::string_view kSchemaHeader = "|Field|Type|Null|Default";

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

std::string encode_cell(std::string_view cell, CellMode mode) {
    std::string out;
    out.reserve(cell.size());
    for (char c : cell) {
        const bool special = c == '|' || c == '\n' || c == '\r';
        if (mode == CellMode::Strict) {
            if (special) {
                throw InvalidCell("cell contains a delimiter character: \"" + std::string(cell) +
                                  "\"");
            }
            out.push_back(c);
            continue;
        }
        switch (c) {
        case '\\':
            out += "\\\\";
            break;
        case '|':
            out += "\\|";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

void append_cells(std::string& out, const std::vector<std::string>& cells, CellMode mode) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i != 0) {
            out.push_back('|');
        }
        out += encode_cell(cells[i], mode);
    }
}

std::vector<std::string> split_cells(std::string_view line, CellMode mode, std::size_t line_no) {
    std::vector<std::string> cells(1);
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '|') {
            cells.emplace_back();
        } else if (c == '\\' && mode == CellMode::Escaped) {
            if (i + 1 == line.size()) {
                throw ParseError(line_no, "dangling escape at end of line");
            }
            const char e = line[++i];
            switch (e) {
            case '\\':
            case '|':
                cells.back().push_back(e);
                break;
            case 'n':
                cells.back().push_back('\n');
                break;
            case 'r':
                cells.back().push_back('\r');
                break;
            default:
                throw ParseError(line_no, std::string("unknown escape \\") + e);
            }
        } else {
            cells.back().push_back(c);
        }
    }
    return cells;
}

void require_name(const std::string& name, const char* what) {
    if (name.empty()) {
        throw std::invalid_argument(std::string(what) + " name is empty");
    }
    if (name.find_first_of("\r\n") != std::string::npos) {
        throw InvalidCell(std::string(what) + " name contains a line break");
    }
}

std::vector<std::string> field_cells(const FieldDef& f) {
    return {f.name, f.type, f.null, f.default_value};
}

} // namespace

std::string export_dump(const TableDump& table, CellMode mode) {
    require_name(table.database_name, "database");
    require_name(table.table_name, "table");
    if (table.schema.empty()) {
        throw std::invalid_argument("table has no fields");
    }

    std::string out;
    out += kDatabasePrefix;
    out += table.database_name;
    out += "\n\n";
    out += kStructurePrefix;
    out += table.table_name;
    out += "\n\n";
    out += kRuler;
    out += '\n';
    out += kSchemaHeader;
    out += '\n';
    out += kRuler;
    out += '\n';
    for (const auto& field : table.schema) {
        if (field.name.empty()) {
            throw std::invalid_argument("field name is empty");
        }
        out.push_back('|');
        append_cells(out, field_cells(field), mode);
        out.push_back('\n');
    }
    out += '\n';
    out += kDataPrefix;
    out += table.table_name;
    out += "\n\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.schema.size()) {
            throw std::invalid_argument("row " + std::to_string(r) + " has " +
                                        std::to_string(row.size()) + " cells, schema has " +
                                        std::to_string(table.schema.size()));
        }
        out += "| ";
        append_cells(out, row, mode);
        out.push_back('\n');
    }
    return out;
}

TableDump parse_dump(std::string_view text, CellMode mode) {
    struct Line {
        std::size_t number;
        std::string_view text;
    };
    std::vector<Line> lines;
    std::size_t start = 0;
    std::size_t number = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            lines.push_back({number, line});
        }
        start = end + 1;
        ++number;
    }

    std::size_t i = 0;
    const std::size_t last_line = number - 1;
    auto expect_prefix = [&](std::string_view prefix, const char* what) -> std::string {
        if (i == lines.size()) {
            throw ParseError(last_line, std::string("missing ") + what + " marker");
        }
        if (!starts_with(lines[i].text, prefix)) {
            throw ParseError(lines[i].number, std::string("expected ") + what + " marker");
        }
        std::string rest(lines[i].text.substr(prefix.size()));
        if (rest.empty()) {
            throw ParseError(lines[i].number, std::string(what) + " name is empty");
        }
        ++i;
        return rest;
    };
    auto expect_exact = [&](std::string_view want) {
        if (i == lines.size()) {
            throw ParseError(last_line, "missing \"" + std::string(want) + "\"");
        }
        if (lines[i].text != want) {
            throw ParseError(lines[i].number, "expected \"" + std::string(want) + "\"");
        }
        ++i;
    };

    TableDump table;
    table.database_name = expect_prefix(kDatabasePrefix, "database");
    table.table_name = expect_prefix(kStructurePrefix, "table structure");
    expect_exact(kRuler);
    expect_exact(kSchemaHeader);
    expect_exact(kRuler);

    for (; i < lines.size() && lines[i].text.front() == '|'; ++i) {
        if (lines[i].text == kRuler) {
            continue;
        }
        auto cells = split_cells(lines[i].text.substr(1), mode, lines[i].number);
        if (cells.size() != 4) {
            throw ParseError(lines[i].number, "schema line has " + std::to_string(cells.size()) +
                                                  " columns, expected 4");
        }
        if (cells[0].empty()) {
            throw ParseError(lines[i].number, "field name is empty");
        }
        table.schema.push_back(FieldDef{std::move(cells[0]), std::move(cells[1]),
                                        std::move(cells[2]), std::move(cells[3])});
    }
    if (table.schema.empty()) {
        throw ParseError(i < lines.size() ? lines[i].number : last_line, "table has no fields");
    }

    const std::size_t data_line = i < lines.size() ? lines[i].number : last_line;
    const std::string data_table = expect_prefix(kDataPrefix, "\"== Dumping data\"");
    if (data_table != table.table_name) {
        throw ParseError(data_line, "data section names table \"" + data_table +
                                        "\" but structure names \"" + table.table_name + "\"");
    }

    for (; i < lines.size(); ++i) {
        std::string_view line = lines[i].text;
        if (line.front() != '|') {
            throw ParseError(lines[i].number, "data row must start with '|'");
        }
        line.remove_prefix(1);
        if (!line.empty() && line.front() == ' ') {
            line.remove_prefix(1);
        }
        auto cells = split_cells(line, mode, lines[i].number);
        if (cells.size() != table.schema.size()) {
            throw ParseError(lines[i].number, "row has " + std::to_string(cells.size()) +
                                                  " cells, schema has " +
                                                  std::to_string(table.schema.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // anything seen since the last record break
    std::size_t line = 1;
    std::size_t quote_line = 0;

    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) {
                throw ParseError(line, "quote inside an unquoted field");
            }
            in_quotes = true;
            quote_line = line;
            field_started = true;
            break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                break;
            }
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw ParseError(quote_line, "unterminated quoted field");
    }
    if (field_started || !record.empty()) {
        end_record();
    }
    return records;
}

TableDump load_csv(std::string_view csv, std::string database_name, std::string table_name,
                   const std::optional<std::vector<FieldDef>>& schema) {
    auto records = parse_csv(csv);
    if (records.empty()) {
        throw ParseError(1, "CSV is empty");
    }
    const auto& header = records.front();
    TableDump table;
    table.database_name = std::move(database_name);
    table.table_name = std::move(table_name);
    if (schema) {
        if (schema->size() != header.size()) {
            throw ParseError(1, "schema has " + std::to_string(schema->size()) +
                                    " fields, CSV header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            if ((*schema)[c].name != header[c]) {
                throw ParseError(1, "CSV column \"" + header[c] + "\" does not match schema field \"" +
                                        (*schema)[c].name + "\"");
            }
        }
        table.schema = *schema;
    } else {
        for (const auto& name : header) {
            if (name.empty()) {
                throw ParseError(1, "empty column name in CSV header");
            }
            table.schema.push_back(FieldDef{name, "text", "No", ""});
        }
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw ParseError(r + 1, "record has " + std::to_string(records[r].size()) +
                                        " fields, header has " + std::to_string(header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::vector<FieldDef> load_schema_csv(std::string_view csv) {
    const auto records = parse_csv(csv);
    if (records.empty()) {
        throw ParseError(1, "schema CSV is empty");
    }
    if (records.front() != std::vector<std::string>{"Field", "Type", "Null", "Default"}) {
        throw ParseError(1, "schema CSV header must be Field,Type,Null,Default");
    }
    std::vector<FieldDef> fields;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != 4) {
            throw ParseError(r + 1, "schema record must have 4 fields");
        }
        fields.push_back(FieldDef{rec[0], rec[1], rec[2], rec[3]});
    }
    return fields;
}

std::string to_csv(const TableDump& table) {
    auto put = [](std::string& out, const std::string& cell) {
        if (cell.find_first_of(",\"\r\n") == std::string::npos) {
            out += cell;
            return;
        }
        out.push_back('"');
        for (char c : cell) {
            if (c == '"') {
                out.push_back('"');
            }
            out.push_back(c);
        }
        out.push_back('"');
    };
    auto put_row = [&](std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i != 0) {
                out.push_back(',');
            }
            put(out, cells[i]);
        }
        out += "\r\n";
    };

    std::string out;
    std::vector<std::string> header;
    for (const auto& f : table.schema) {
        header.push_back(f.name);
    }
    put_row(out, header);
    for (const auto& row : table.rows) {
        put_row(out, row);
    }
    return out;
}

} // namespace egv::dbtext
