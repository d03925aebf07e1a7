#include "sheetmind/context.hpp"

namespace sheetmind {

std::string_view type_name(char tag) {
    switch (tag) {
        case 's': return "text";
        case 'n': return "number";
        case 'b': return "bool";
        case 'd': return "date";
        case 'f': return "formula";
        default: return "empty";
    }
}

std::string truncate_text(const std::string& text, std::size_t limit) {
    if (text.size() <= limit) return text;
    std::size_t keep = limit > kTruncationMarker.size() ? limit - kTruncationMarker.size() : 0;
    // Back up over continuation bytes so the cut lands on a code point start.
    while (keep > 0 && (static_cast<unsigned char>(text[keep]) & 0xC0) == 0x80) --keep;
    return text.substr(0, keep) + std::string(kTruncationMarker);
}

SheetContext extract_context(const Workbook& wb) {
    SheetContext ctx;
    ctx.active = wb.active_index();
    for (const Sheet& s : wb.sheets()) {
        ctx.sheets.push_back({s.name(), s.used_rows(), s.used_cols()});
        for (const auto& [addr, value] : s.cells()) ++ctx.histogram[std::string(type_name(type_tag(value)))];
    }
    for (const auto& [addr, value] : wb.active_sheet().cells()) {
        if (addr.row > kSampleRows) break;
        if (addr.col > kSampleCols) continue;
        ctx.sample.push_back({addr, type_tag(value), truncate_text(render(value))});
    }
    return ctx;
}

std::string SheetContext::render() const {
    std::string out = "Sheets:";
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        const auto& s = sheets[i];
        out += "\n- " + s.name + ": " + std::to_string(s.rows) + " rows x " + std::to_string(s.cols) + " columns";
        if (i == active) out += " (active)";
    }
    out += "\nCell types:";
    if (histogram.empty()) out += " none";
    for (const auto& [name, n] : histogram) out += " " + name + "=" + std::to_string(n);
    if (active < sheets.size()) {
        out += "\nCells of " + sheets[active].name + " (first " + std::to_string(kSampleRows) + " rows, " +
               std::to_string(kSampleCols) + " columns):";
        if (sample.empty()) out += " none";
        for (const auto& c : sample) {
            out += "\n" + format_address(c.addr) + " " + std::string(type_name(c.type)) + ": " + c.text;
        }
    }
    return out;
}

}  // namespace sheetmind
