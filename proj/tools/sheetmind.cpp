#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "sheetmind/agents.hpp"
#include "sheetmind/bench.hpp"
#include "sheetmind/grammar.hpp"
#include "sheetmind/orchestrator.hpp"
#include "sheetmind/server.hpp"
#include "sheetmind/workbook_io.hpp"

namespace fs = std::filesystem;
using namespace sheetmind;

namespace {

// Accepts a bare script list or a task file with a `script:` key.
BackendScript read_script(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (root.IsMap() && root["script"]) return script_from_yaml(root["script"]);
    return script_from_yaml(root);
}

std::vector<std::string> split_labels(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        if (comma > start) out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

struct RunArgs {
    std::string sheet, instruction, script, ablation = "full", out, transcript;
};

int cmd_run(const RunArgs& a) {
    PipelineConfig config = PipelineConfig::for_ablation(a.ablation);
    Workbook initial = read_workbook_file(a.sheet);
    std::unique_ptr<ChatBackend> backend;
    if (!a.script.empty()) {
        backend = std::make_unique<ScriptedBackend>(project_script(read_script(a.script), config));
    } else {
        backend = std::make_unique<HttpBackend>(config_from_env());
    }
    Session session("cli", initial, config, true);
    InstructionOutcome outcome = run_instruction(session, a.instruction, *backend);
    Workbook final_wb = session.workbook();

    std::string out = a.out;
    if (out.empty()) {
        fs::path p(a.sheet);
        out = (p.parent_path() / (p.stem().string() + ".result.json")).string();
    }
    write_workbook_file(final_wb, out);
    if (!a.transcript.empty()) write_text(a.transcript, session.transcript().to_jsonl());

    std::cout << outcome.summary << "\n";
    SheetDiff d = diff(initial, final_wb);
    for (const auto& c : d.cell_changes) {
        std::cout << "  " << c.sheet << "!" << format_address(c.addr) << ": " << describe(c.before) << " -> "
                  << describe(c.after) << "\n";
    }
    std::cout << "status: " << to_string(outcome.status);
    if (outcome.failure_reason) std::cout << " (" << *outcome.failure_reason << ")";
    std::cout << "\nwrote " << out << "\n";
    return outcome.status == InstructionOutcome::Status::success ? 0 : 1;
}

struct ServeArgs {
    std::string host = "127.0.0.1", store = "sheetmind-sessions", script;
    int port = 8080;
    bool test_mode = false;
};

int cmd_serve(const ServeArgs& a) {
    // Handle SIGINT/SIGTERM on a dedicated thread so stop() runs outside a signal handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServerConfig cfg;
    cfg.host = a.host;
    cfg.port = a.port;
    cfg.store = a.store;
    cfg.test_mode = a.test_mode;
    if (!a.script.empty()) {
        cfg.backend = std::make_shared<ScriptedBackend>(read_script(a.script));
    } else {
        BackendConfig env = config_from_env();
        if (!env.base_url.empty() && !env.model.empty()) cfg.backend = std::make_shared<HttpBackend>(env);
    }
    Server server(cfg);
    int port = server.bind();
    std::cerr << "listening on http://" << a.host << ":" << port << "\n";
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.run();
    // run() can also end on its own; wake the waiter so it can be joined.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

struct BenchArgs {
    std::string suite, configs = "full,no_reflection,no_manager,action_only", json;
    unsigned jobs = 1;
    bool live = false;
};

int cmd_bench(const BenchArgs& a) {
    BenchOptions opts;
    opts.configs = split_labels(a.configs);
    opts.jobs = a.jobs;
    opts.suite_name = fs::path(a.suite).lexically_normal().string();
    if (a.live) opts.live = config_from_env();
    BenchReport report = run_bench(load_suite(a.suite), opts);
    std::cout << report.table();
    for (const auto& c : report.configs)
        for (const auto& t : c.tasks)
            if (!t.pass) std::cout << "  " << c.label << " " << t.id << ": " << t.reason << "\n";
    if (!a.json.empty()) write_text(a.json, report.to_json().dump(2) + "\n");
    return 0;
}

int cmd_parse(const std::string& text) {
    try {
        for (const auto& action : parse_script(text)) std::cout << serialize_action(action) << "\n";
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        if (e.position() != std::string::npos) {
            std::cerr << "  " << text << "\n  " << std::string(e.position(), ' ') << "^\n";
        }
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spreadsheet editing from natural-language instructions"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Apply one instruction to a workbook file");
    run_cmd->add_option("--sheet", run.sheet, "Workbook (.csv or .json)")->required();
    run_cmd->add_option("--instruction", run.instruction, "Instruction text")->required();
    run_cmd->add_option("--script", run.script, "Scripted backend replies (YAML)");
    run_cmd->add_option("--ablation", run.ablation, "full|no_reflection|no_manager|action_only")
        ->check(CLI::IsMember({"full", "no_reflection", "no_manager", "action_only"}));
    run_cmd->add_option("--out", run.out, "Result workbook path");
    run_cmd->add_option("--transcript", run.transcript, "Write the transcript (JSONL) here");

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", serve.host);
    serve_cmd->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--store", serve.store, "Session directory");
    serve_cmd->add_option("--script", serve.script, "Default scripted backend (YAML)");
    serve_cmd->add_flag("--test-mode", serve.test_mode, "Use sequence numbers as timestamps");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a task suite under ablation configurations");
    bench_cmd->add_option("--suite", bench.suite, "Directory of *.task.yaml")->required();
    bench_cmd->add_option("--configs", bench.configs, "Comma-separated ablation labels");
    bench_cmd->add_option("--json", bench.json, "Write the JSON report here");
    bench_cmd->add_option("--jobs", bench.jobs)->check(CLI::PositiveNumber);
    bench_cmd->add_flag("--live", bench.live, "Use the HTTP backend from the environment");

    std::string action_text;
    auto* parse_cmd = app.add_subcommand("parse", "Parse actions and print them canonically");
    parse_cmd->add_option("action", action_text, "Action text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*serve_cmd) return cmd_serve(serve);
        if (*bench_cmd) return cmd_bench(bench);
        if (*parse_cmd) return cmd_parse(action_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
