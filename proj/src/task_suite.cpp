#include "sheetmind/task_suite.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>

#include "sheetmind/workbook_io.hpp"

namespace sheetmind {

namespace {

constexpr std::size_t kMaxDifferences = 10;

std::string required(const YAML::Node& n, const char* key, const std::string& where) {
    if (!n[key] || !n[key].IsScalar()) throw ParseError(where + ": missing '" + key + "'");
    return n[key].as<std::string>();
}

Workbook workbook_field(const YAML::Node& n, const char* key, const std::filesystem::path& base,
                        const std::string& where) {
    std::string value = required(n, key, where);
    std::string_view trimmed = value;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\n')) trimmed.remove_prefix(1);
    if (!trimmed.empty() && trimmed.front() == '{') {
        try {
            return load_workbook(trimmed, WorkbookFormat::json);
        } catch (const Error& e) {
            throw ParseError(where + ": inline '" + key + "' workbook: " + e.what());
        }
    }
    return read_workbook_file((base / value).string());
}

}  // namespace

std::string_view to_string(TaskCategory c) { return c == TaskCategory::single_step ? "single_step" : "multi_step"; }

TaskSpec load_task(const std::filesystem::path& file) {
    std::string where = file.filename().string();
    YAML::Node root;
    try {
        root = YAML::LoadFile(file.string());
    } catch (const YAML::Exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    if (!root.IsMap()) throw ParseError(where + ": task must be a YAML map");
    TaskSpec t;
    try {
        t.id = required(root, "id", where);
        std::string category = required(root, "category", where);
        if (category == "single_step") {
            t.category = TaskCategory::single_step;
        } else if (category == "multi_step") {
            t.category = TaskCategory::multi_step;
        } else {
            throw ParseError(where + ": unknown category '" + category + "'");
        }
        t.family = root["family"] ? root["family"].as<std::string>() : "";
        t.description = required(root, "description", where);
        auto base = file.parent_path();
        t.initial = workbook_field(root, "initial", base, where);
        t.expected = workbook_field(root, "expected", base, where);
        if (root["script"]) t.script = script_from_yaml(root["script"]);
    } catch (const YAML::Exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    return t;
}

std::vector<TaskSpec> load_suite(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("suite directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 10 && name.ends_with(".task.yaml")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<TaskSpec> out;
    for (const auto& f : files) out.push_back(load_task(f));
    return out;
}

std::string CheckResult::detail() const {
    std::string out;
    for (const auto& d : differences) out += (out.empty() ? "" : "; ") + d;
    return out;
}

CheckResult check_task(const Workbook& expected, const Workbook& actual) {
    CheckResult r;
    auto add = [&](std::string d) {
        r.pass = false;
        if (r.differences.size() < kMaxDifferences) r.differences.push_back(std::move(d));
    };
    const auto& es = expected.sheets();
    const auto& as = actual.sheets();
    if (es.size() != as.size()) {
        add("expected " + std::to_string(es.size()) + " sheets, got " + std::to_string(as.size()));
    }
    for (std::size_t i = 0; i < std::min(es.size(), as.size()); ++i) {
        const Sheet& e = es[i];
        const Sheet& a = as[i];
        if (!iequals(e.name(), a.name())) add("sheet " + std::to_string(i + 1) + ": expected '" + e.name() + "', got '" + a.name() + "'");
        // Walk both sparse maps in row-major order.
        auto ei = e.cells().begin(), ai = a.cells().begin();
        RowMajor less;
        while (ei != e.cells().end() || ai != a.cells().end()) {
            CellAddress at;
            if (ai == a.cells().end() || (ei != e.cells().end() && less(ei->first, ai->first))) {
                at = ei->first;
            } else {
                at = ai->first;
            }
            const CellValue& ev = e.get(at);
            const CellValue& av = a.get(at);
            if (ev != av) add(e.name() + "!" + format_address(at) + ": expected " + describe(ev) + ", got " + describe(av));
            if (ei != e.cells().end() && ei->first == at) ++ei;
            if (ai != a.cells().end() && ai->first == at) ++ai;
        }
    }
    return r;
}

BackendScript project_script(const BackendScript& script, const PipelineConfig& config) {
    BackendScript out;
    for (const auto& e : script) {
        if (e.agent) {
            if (!config.manager && *e.agent == "manager") continue;
            if (!config.reflection && (*e.agent == "judge_pre" || *e.agent == "judge_post")) continue;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace sheetmind
