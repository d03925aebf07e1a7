#include "sheetmind/workbook_io.hpp"

#include <fstream>
#include <sstream>

#include "sheetmind/error.hpp"
#include "sheetmind/hash.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::vector<std::string>> parse_csv_records(std::string_view in) {
    if (in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    std::size_t i = 0;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    while (i < in.size()) {
        char c = in[i];
        if (c == '"' && !field_started) {
            std::size_t open = i++;
            bool closed = false;
            while (i < in.size()) {
                if (in[i] == '"') {
                    if (i + 1 < in.size() && in[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    closed = true;
                    ++i;
                    break;
                }
                field += in[i++];
            }
            if (!closed) throw ParseError("unterminated quoted CSV field", open, "\"");
            field_started = true;
            if (i < in.size() && in[i] != ',' && in[i] != '\n' && in[i] != '\r') {
                throw ParseError("unexpected character after closing quote", i, "',' or newline");
            }
            continue;
        }
        if (c == ',') {
            end_field();
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            end_record();
            i += (c == '\r' && i + 1 < in.size() && in[i + 1] == '\n') ? 2 : 1;
            continue;
        }
        if (c == '"') throw ParseError("quote inside unquoted CSV field", i);
        field += c;
        field_started = true;
        ++i;
    }
    if (field_started || !record.empty()) end_record();
    return records;
}

bool needs_quotes(std::string_view s) {
    if (s.empty()) return false;
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

CellValue cell_from_json(const ojson& cell, const std::string& where) {
    if (!cell.is_object() || !cell.contains("t")) throw ParseError("cell " + where + " lacks a type tag");
    const auto& t = cell.at("t");
    if (!t.is_string() || t.get_ref<const std::string&>().size() != 1) {
        throw ParseError("cell " + where + " has a malformed type tag");
    }
    char tag = t.get_ref<const std::string&>()[0];
    if (tag == 'e') return Empty{};
    if (!cell.contains("v")) throw ParseError("cell " + where + " lacks a value");
    const auto& v = cell.at("v");
    switch (tag) {
        case 'n':
            if (!v.is_number()) throw ParseError("cell " + where + ": expected a number");
            return v.get<double>();
        case 'b':
            if (!v.is_boolean()) throw ParseError("cell " + where + ": expected a boolean");
            return v.get<bool>();
        case 's':
        case 'd':
        case 'f': {
            if (!v.is_string()) throw ParseError("cell " + where + ": expected a string");
            const auto& s = v.get_ref<const std::string&>();
            if (tag == 's') return Text{s};
            if (tag == 'd') {
                if (!is_valid_date(s)) throw ParseError("cell " + where + ": invalid date '" + s + "'");
                return Date{s};
            }
            if (s.empty() || s.front() != '=') throw ParseError("cell " + where + ": formula must start with '='");
            return Formula{s};
        }
        default: throw ParseError("cell " + where + " has unknown type tag '" + std::string(1, tag) + "'");
    }
}

ojson cell_to_json(const CellValue& v) {
    ojson out;
    out["t"] = std::string(1, type_tag(v));
    switch (v.index()) {
        case 0: out["v"] = nullptr; break;
        case 2: out["v"] = std::get<double>(v); break;
        case 3: out["v"] = std::get<bool>(v); break;
        default: out["v"] = render(v); break;
    }
    return out;
}

Workbook load_csv(std::string_view content) {
    Sheet sheet("Sheet1");
    auto records = parse_csv_records(content);
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (std::size_t c = 0; c < records[r].size(); ++c) {
            CellValue v = infer_cell(records[r][c]);
            if (is_empty(v)) continue;
            sheet.set({static_cast<std::uint32_t>(c + 1), static_cast<std::uint32_t>(r + 1)}, std::move(v));
        }
    }
    std::vector<Sheet> sheets;
    sheets.push_back(std::move(sheet));
    return Workbook(std::move(sheets));
}

std::string save_csv(const Workbook& wb) {
    const Sheet& s = wb.active_sheet();
    std::string out;
    for (std::uint32_t r = 1; r <= s.used_rows(); ++r) {
        for (std::uint32_t c = 1; c <= s.used_cols(); ++c) {
            if (c > 1) out += ',';
            std::string text = render(s.get({c, r}));
            if (needs_quotes(text)) {
                out += '"';
                for (char ch : text) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                out += '"';
            } else {
                out += text;
            }
        }
        out += '\n';
    }
    return out;
}

ojson workbook_to_json(const Workbook& wb) {
    ojson sheets = ojson::array();
    for (const auto& s : wb.sheets()) {
        ojson cells = ojson::object();
        for (const auto& [addr, value] : s.cells()) cells[format_address(addr)] = cell_to_json(value);
        ojson sheet;
        sheet["name"] = s.name();
        sheet["cells"] = std::move(cells);
        sheets.push_back(std::move(sheet));
    }
    ojson out;
    out["sheets"] = std::move(sheets);
    out["active"] = wb.active_index();
    return out;
}

Workbook workbook_from_json(const ojson& j) {
    if (!j.is_object() || !j.contains("sheets") || !j.at("sheets").is_array()) {
        throw ParseError("workbook-json needs a \"sheets\" array");
    }
    std::vector<Sheet> sheets;
    for (const auto& js : j.at("sheets")) {
        if (!js.is_object() || !js.contains("name") || !js.at("name").is_string()) {
            throw ParseError("every sheet needs a string \"name\"");
        }
        const auto& name = js.at("name").get_ref<const std::string&>();
        if (!is_valid_sheet_name(name)) throw ParseError("invalid sheet name '" + name + "'");
        Sheet sheet(name);
        if (js.contains("cells")) {
            const auto& cells = js.at("cells");
            if (!cells.is_object()) throw ParseError("sheet '" + name + "': \"cells\" must be an object");
            for (const auto& [key, cell] : cells.items()) {
                Range r = parse_range(key);
                if (!r.is_single_cell() || r.sheet) throw ParseError("cell key '" + key + "' is not a single cell");
                try {
                    sheet.set(r.top_left, cell_from_json(cell, name + "!" + key));
                } catch (const BoundsError& e) {
                    throw ParseError(e.what());
                }
            }
        }
        sheets.push_back(std::move(sheet));
    }
    std::size_t active = 0;
    if (j.contains("active")) {
        const auto& a = j.at("active");
        if (!a.is_number_unsigned() && !(a.is_number_integer() && a.get<long long>() >= 0)) {
            throw ParseError("\"active\" must be a non-negative integer");
        }
        active = a.get<std::size_t>();
    }
    try {
        return Workbook(std::move(sheets), active);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

Workbook load_workbook(std::string_view content, WorkbookFormat format) {
    if (format == WorkbookFormat::csv) return load_csv(content);
    ojson j;
    try {
        j = ojson::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed workbook-json: ") + e.what(), e.byte);
    }
    return workbook_from_json(j);
}

std::string save_workbook(const Workbook& wb, WorkbookFormat format) {
    if (format == WorkbookFormat::csv) return save_csv(wb);
    return workbook_to_json(wb).dump(2) + "\n";
}

WorkbookFormat format_for_path(std::string_view path) {
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && iequals(path.substr(path.size() - suffix.size()), suffix);
    };
    return ends_with(".csv") ? WorkbookFormat::csv : WorkbookFormat::json;
}

Workbook read_workbook_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_workbook(buf.str(), format_for_path(path));
}

void write_workbook_file(const Workbook& wb, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << save_workbook(wb, format_for_path(path));
    if (!out) throw Error("failed writing " + path);
}

ojson diff_to_json(const SheetDiff& d) {
    ojson out;
    out["cells"] = ojson::array();
    for (const auto& c : d.cell_changes) {
        out["cells"].push_back({{"sheet", c.sheet},
                                {"addr", format_address(c.addr)},
                                {"before", cell_to_json(c.before)},
                                {"after", cell_to_json(c.after)}});
    }
    out["structural"] = ojson::array();
    for (const auto& s : d.structural_changes) {
        out["structural"].push_back(
            {{"sheet", s.sheet}, {"kind", std::string(to_string(s.kind))}, {"at", s.at}, {"count", s.count}});
    }
    out["sheets"] = ojson::array();
    for (const auto& s : d.sheet_changes) {
        out["sheets"].push_back({{"kind", std::string(to_string(s.kind))}, {"name", s.name}, {"index", s.index}});
    }
    out["active_after"] = d.active_after ? ojson(*d.active_after) : ojson(nullptr);
    return out;
}

SheetDiff diff_from_json(const ojson& j) {
    SheetDiff d;
    try {
        for (const auto& c : j.at("cells")) {
            std::string addr = c.at("addr").get<std::string>();
            Range r = parse_range(addr);
            if (!r.is_single_cell() || r.sheet) throw ParseError("bad diff address '" + addr + "'");
            d.cell_changes.push_back({c.at("sheet").get<std::string>(), r.top_left,
                                      cell_from_json(c.at("before"), addr), cell_from_json(c.at("after"), addr)});
        }
        for (const auto& s : j.at("structural")) {
            std::string kind = s.at("kind").get<std::string>();
            StructuralKind k;
            if (kind == "rows_inserted") k = StructuralKind::rows_inserted;
            else if (kind == "rows_deleted") k = StructuralKind::rows_deleted;
            else if (kind == "cols_inserted") k = StructuralKind::cols_inserted;
            else if (kind == "cols_deleted") k = StructuralKind::cols_deleted;
            else throw ParseError("unknown structural change '" + kind + "'");
            d.structural_changes.push_back(
                {s.at("sheet").get<std::string>(), k, s.at("at").get<std::uint32_t>(), s.at("count").get<std::uint32_t>()});
        }
        for (const auto& s : j.at("sheets")) {
            std::string kind = s.at("kind").get<std::string>();
            if (kind != "sheet_added" && kind != "sheet_removed") throw ParseError("unknown sheet change '" + kind + "'");
            d.sheet_changes.push_back({kind == "sheet_added" ? SheetChangeKind::sheet_added : SheetChangeKind::sheet_removed,
                                       s.at("name").get<std::string>(), s.at("index").get<std::size_t>()});
        }
        if (j.contains("active_after") && !j.at("active_after").is_null()) {
            d.active_after = j.at("active_after").get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed diff: ") + e.what());
    }
    return d;
}

std::string workbook_hash(const Workbook& wb) { return sha256_hex(save_workbook(wb, WorkbookFormat::json)); }

}  // namespace sheetmind
