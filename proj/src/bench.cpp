#include "sheetmind/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "sheetmind/orchestrator.hpp"
#include "sheetmind/session.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

namespace {

constexpr TaskCategory kCategories[] = {TaskCategory::single_step, TaskCategory::multi_step};

double rate(std::size_t passes, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(passes) / static_cast<double>(total);
}

TaskResult run_one(const TaskSpec& task, const std::string& label, const BenchOptions& options) {
    PipelineConfig config = PipelineConfig::for_ablation(label);
    TaskResult r;
    r.id = task.id;
    r.category = task.category;
    r.family = task.family;
    Session session("bench-" + task.id + "-" + label, task.initial, config, options.test_mode);

    std::shared_ptr<ChatBackend> backend;
    ScriptedBackend* scripted = nullptr;
    if (options.live) {
        backend = std::make_shared<HttpBackend>(*options.live);
    } else {
        auto s = std::make_shared<ScriptedBackend>(project_script(*task.script, config));
        scripted = s.get();
        backend = s;
    }

    InstructionOutcome outcome = run_instruction(session, task.description, *backend);
    r.status = std::string(to_string(outcome.status));
    CheckResult check = check_task(task.expected, session.workbook());
    r.pass = check.pass;
    if (!r.pass) {
        r.reason = outcome.failure_reason ? *outcome.failure_reason + "; " : "";
        r.reason += "workbook differs: " + check.detail();
    }
    if (scripted) r.backend_calls = scripted->calls();
    if (options.keep_transcripts) r.transcript = session.transcript().to_jsonl();
    return r;
}

}  // namespace

std::size_t ConfigReport::passes() const {
    std::size_t n = 0;
    for (const auto& t : tasks) n += t.pass;
    return n;
}

std::size_t ConfigReport::passes(TaskCategory c) const {
    std::size_t n = 0;
    for (const auto& t : tasks) n += t.pass && t.category == c;
    return n;
}

std::size_t ConfigReport::total(TaskCategory c) const {
    std::size_t n = 0;
    for (const auto& t : tasks) n += t.category == c;
    return n;
}

const ConfigReport* BenchReport::find(const std::string& label) const {
    for (const auto& c : configs)
        if (c.label == label) return &c;
    return nullptr;
}

ojson BenchReport::to_json() const {
    ojson out;
    out["suite"] = suite;
    out["tasks"] = configs.empty() ? 0 : configs.front().tasks.size();
    out["wall_clock_seconds"] = wall_seconds;
    out["configs"] = ojson::array();
    for (const auto& c : configs) {
        ojson cj;
        cj["label"] = c.label;
        cj["passes"] = c.passes();
        cj["total"] = c.tasks.size();
        cj["rate"] = rate(c.passes(), c.tasks.size());
        ojson by = ojson::object();
        for (auto cat : kCategories) {
            by[std::string(to_string(cat))] = {
                {"passes", c.passes(cat)}, {"total", c.total(cat)}, {"rate", rate(c.passes(cat), c.total(cat))}};
        }
        cj["by_category"] = by;
        cj["results"] = ojson::array();
        for (const auto& t : c.tasks) {
            cj["results"].push_back({{"id", t.id},
                                     {"category", std::string(to_string(t.category))},
                                     {"family", t.family},
                                     {"pass", t.pass},
                                     {"status", t.status},
                                     {"reason", t.reason},
                                     {"backend_calls", t.backend_calls}});
        }
        out["configs"].push_back(std::move(cj));
    }
    return out;
}

std::string BenchReport::table() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-15s %-16s %-16s %-16s\n", "config", "single_step", "multi_step", "overall");
    out += line;
    auto cell = [](std::size_t p, std::size_t t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%zu/%zu %5.1f%%", p, t, 100.0 * rate(p, t));
        return std::string(buf);
    };
    for (const auto& c : configs) {
        std::snprintf(line, sizeof line, "%-15s %-16s %-16s %-16s\n", c.label.c_str(),
                      cell(c.passes(TaskCategory::single_step), c.total(TaskCategory::single_step)).c_str(),
                      cell(c.passes(TaskCategory::multi_step), c.total(TaskCategory::multi_step)).c_str(),
                      cell(c.passes(), c.tasks.size()).c_str());
        out += line;
    }
    return out;
}

BenchReport run_bench(const std::vector<TaskSpec>& suite, const BenchOptions& options) {
    for (const auto& label : options.configs) PipelineConfig::for_ablation(label);
    if (!options.live) {
        for (const auto& t : suite)
            if (!t.script) throw Error("task " + t.id + " has no script; scripted runs need one");
    }
    if (options.live) options.live->check();

    auto started = std::chrono::steady_clock::now();
    BenchReport report;
    report.suite = options.suite_name;
    for (const auto& label : options.configs) report.configs.push_back({label, std::vector<TaskResult>(suite.size())});

    std::size_t jobs_total = suite.size() * options.configs.size();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs_total; k = next++) {
            std::size_t c = k / suite.size(), t = k % suite.size();
            try {
                report.configs[c].tasks[t] = run_one(suite[t], options.configs[c], options);
            } catch (const std::exception& e) {
                TaskResult& r = report.configs[c].tasks[t];
                r.id = suite[t].id;
                r.category = suite[t].category;
                r.family = suite[t].family;
                r.status = "failure";
                r.reason = e.what();
            }
        }
    };
    unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1 || jobs_total <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < std::min<std::size_t>(jobs, jobs_total); ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace sheetmind
