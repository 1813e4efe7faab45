#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "panto/edits.hpp"
#include "panto/session.hpp"
#include "ws_server.hpp"

using namespace panto;

namespace {

constexpr int kRejected = 1;
constexpr int kBadInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Term loadProgram(const std::string& path) {
    Term t;
    try {
        t = parseTerm(readFile(path));
    } catch (const ParseError& e) {
        throw InputError(path + ":" + e.what());
    }
    if (auto err = typeCheck({}, t)) throw InputError(path + ": " + err->what());
    return t;
}

SchedulerConfig schedulerFrom(const std::string& arg) {
    SchedulerConfig cfg = SchedulerConfig::fromEnv();
    if (arg.empty() || arg == "leftmost") return cfg;
    const std::string prefix = "seed=";
    if (arg.rfind(prefix, 0) != 0) throw InputError("--scheduler expects seed=N or leftmost");
    try {
        size_t used = 0;
        uint64_t seed = std::stoull(arg.substr(prefix.size()), &used);
        if (used != arg.size() - prefix.size()) throw std::invalid_argument("trailing text");
        cfg.mode = SchedulerConfig::Mode::SeededRandom;
        cfg.seed = seed;
    } catch (const std::logic_error&) {
        throw InputError("--scheduler seed must be a non-negative integer");
    }
    return cfg;
}

int runScript(const std::string& programPath, const std::string& scriptPath, bool trace, const std::string& sched) {
    SchedulerConfig cfg = schedulerFrom(sched);
    EditState state{loadProgram(programPath), std::nullopt};
    std::vector<EditAction> actions;
    try {
        actions = parseEditScript(readFile(scriptPath));
    } catch (const ParseError& e) {
        throw InputError(scriptPath + ":" + e.what());
    }
    std::optional<Diff> change;
    // A program saved mid-propagation is settled before the script runs.
    if (!boundarySites(state.program).empty()) {
        NormalizeResult r;
        try {
            r = normalize(state.program, cfg);
        } catch (const EngineError& e) {
            throw InputError(programPath + ": " + e.what());
        }
        if (trace)
            for (const auto& e : r.trace) std::cout << traceLine(e) << "\n";
        state.program = std::move(r.program);
        change = r.finalTypeChange;
    }
    for (const auto& a : actions) {
        EditOutcome out;
        try {
            out = applyEdit(state, a, cfg);
        } catch (const EditError& e) {
            std::cerr << "rejected " << toString(a) << ": " << e.what() << "\n";
            return kRejected;
        }
        if (trace)
            for (const auto& e : out.trace) std::cout << traceLine(e) << "\n";
        if (out.finalTypeChange) {
            if (change) {
                Diff d = collapseNoOpReplaces(compose(*change, *out.finalTypeChange));
                change = isIdentity(d) ? std::nullopt : std::optional<Diff>(d);
            } else {
                change = out.finalTypeChange;
            }
        }
    }
    std::cout << toString(state.program) << "\n";
    if (change) std::cout << "; type change: " << toString(*change) << "\n";
    return 0;
}

int check(const std::string& path) {
    std::string text = readFile(path);
    std::vector<SExpr> forms;
    try {
        forms = readAll(text);
    } catch (const ParseError& e) {
        throw InputError(path + ":" + e.what());
    }
    if (forms.empty()) throw InputError(path + ": no program");
    for (const auto& f : forms) {
        Term t;
        try {
            t = parseTerm(f);
        } catch (const ParseError& e) {
            throw InputError(path + ":" + e.what());
        }
        try {
            Ty ty = infer({}, t);
            std::cout << toString(ty) << "\n";
        } catch (const TypeError& e) {
            throw InputError(path + ":" + std::to_string(f.line) + ": " + e.what());
        }
    }
    return 0;
}

int serveStdio(const std::string& sched) {
    SessionState state;
    state.scheduler = schedulerFrom(sched);
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::cout << handleLine(state, line) << std::endl;
    }
    return 0;
}

int serveWs(unsigned short port, const std::string& sched) {
    WsServer server(port, schedulerFrom(sched));
    std::cerr << "listening on ws://127.0.0.1:" << server.port() << "\n";
    server.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typed zipper editing with diff propagation"};
    app.require_subcommand(1);

    std::string program, script, sched;
    bool trace = false;
    auto* run = app.add_subcommand("run", "Apply an edit script to a program and print the result");
    run->add_option("program", program, "Program file")->required();
    run->add_option("script", script, "Edit script")->required();
    run->add_flag("--trace", trace, "Print one JSON line per propagation step");
    run->add_option("--scheduler", sched, "leftmost (default) or seed=N");

    std::string checkPath;
    auto* chk = app.add_subcommand("check", "Type-check every program in a file and print its type");
    chk->add_option("program", checkPath, "Program file")->required();

    auto* stdio = app.add_subcommand("serve-stdio", "Session protocol as JSON lines on stdin/stdout");
    stdio->add_option("--scheduler", sched, "leftmost (default) or seed=N");

    unsigned short port = 8765;
    auto* wsCmd = app.add_subcommand("serve-ws", "Session protocol over a websocket on 127.0.0.1");
    wsCmd->add_option("--port", port, "TCP port, 0 for any free port")->capture_default_str();
    wsCmd->add_option("--scheduler", sched, "leftmost (default) or seed=N");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kBadInput;
    }

    try {
        if (*run) return runScript(program, script, trace, sched);
        if (*chk) return check(checkPath);
        if (*stdio) return serveStdio(sched);
        if (*wsCmd) return serveWs(port, sched);
    } catch (const InputError& e) {
        std::cerr << e.what() << "\n";
        return kBadInput;
    }
    return 0;
}
