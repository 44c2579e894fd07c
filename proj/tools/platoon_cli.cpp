// platoon: run scenarios, validate scenario files, re-check logs, or serve
// the coordination endpoints over HTTP.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "platoon/comms/server.hpp"
#include "platoon/comms/transport.hpp"
#include "platoon/harness/metrics.hpp"
#include "platoon/harness/runner.hpp"
#include "platoon/harness/scenario.hpp"

namespace {

using namespace platoon;

comms::HttpServer* g_server = nullptr;

void on_signal(int)
{
    if (g_server) g_server->stop();
}

void print_violations(const std::vector<harness::Violation>& vs)
{
    for (const auto& v : vs)
        std::cout << "violation tick=" << v.tick << " agent=" << v.agent << " invariant=" << v.invariant
                  << ": " << v.detail << '\n';
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& transport)
{
    const auto scenario = harness::load_scenario(path);
    harness::RunOptions opt;
    opt.seed = seed;
    opt.transport = harness::parse_transport(transport);
    const auto result = harness::run(scenario, opt);
    harness::write_outputs(result, opt.transport, out_dir);

    // The written log must pass on its own, independently of the in-memory run.
    const auto verdict = harness::replay_check(std::filesystem::path(out_dir) / "log.csv");
    const bool metrics_match = verdict.metrics == result.metrics;

    const auto& m = result.metrics;
    std::cout << "scenario " << scenario.name << " seed " << result.header.seed << " transport "
              << transport << ": " << m.ticks << " ticks, mean |range error| " << m.mean_abs_error
              << " m, id switches " << m.id_switches << '\n';
    print_violations(result.violations);
    if (!metrics_match) std::cout << "replayed metrics differ from the run\n";
    const bool ok = result.ok() && verdict.ok() && metrics_match;
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 1;
}

int cmd_validate(const std::string& path)
{
    const auto scenario = harness::load_scenario(path);
    std::cout << "ok: " << scenario.name << " (" << scenario.agents.size() << " agents, "
              << scenario.duration_ticks << " ticks)\n";
    return 0;
}

int cmd_replay(const std::string& path)
{
    const auto verdict = harness::replay_check(path);
    print_violations(verdict.violations);
    std::cout << (verdict.ok() ? "PASS" : "FAIL") << " (" << verdict.metrics.ticks << " ticks)\n";
    return verdict.ok() ? 0 : 1;
}

int cmd_serve(const std::string& path, const std::string& host, int port)
{
    const auto scenario = harness::load_scenario(path);
    comms::StatusServer status({scenario.leader().id, scenario.network.auto_resolve});
    comms::PerceptionServerConfig pc;
    pc.camera = scenario.camera;
    pc.noise = scenario.noise.detection;
    pc.depth = scenario.depth;
    pc.tracker = scenario.tracker;
    pc.seed = scenario.seed;
    comms::PerceptionServer perception(pc);

    world::World w(scenario.dt, scenario.limits, scenario.noise.imu_sigma, scenario.seed);
    const auto embeddings =
        harness::distinct_embeddings(scenario.agents.size(), scenario.embedding_dim, scenario.seed);
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& a = scenario.agents[i];
        w.add({a.id, a.role, a.pose, 0.0, 0.0, embeddings[i], a.pose.theta, a.footprint});
        status.register_agent(a.id);
        if (a.role == world::Role::Follower) perception.register_agent(a.id);
    }
    // Only the initial frame exists in service mode.
    perception.publish(w.snapshot());

    comms::CoordinationService service(status, perception);
    comms::HttpServer server(service);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen_blocking(host, port);
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Leader-follower platoon simulator and coordination service"};
    app.require_subcommand(1);
    std::string level = "warn";
    app.add_option("--log-level", level, "trace, debug, info, warn, error")->capture_default_str();

    std::string scenario_path, out_dir = "out", transport = "sim", csv_path, host = "127.0.0.1";
    std::optional<std::uint64_t> seed;
    int port = 8080;

    auto* run = app.add_subcommand("run", "Run a scenario and write log.csv and summary.json");
    run->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--transport", transport, "sim or http")
        ->check(CLI::IsMember({"sim", "http"}))
        ->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario file")->required();

    auto* replay = app.add_subcommand("replay-check", "Re-check invariants from a log");
    replay->add_option("csv", csv_path, "log.csv from a run")->required()->check(CLI::ExistingFile);

    auto* serve = app.add_subcommand("serve", "Serve the coordination endpoints over HTTP");
    serve->add_option("scenario", scenario_path, "Scenario defining the agents")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(level));

    try {
        if (*run) return cmd_run(scenario_path, seed, out_dir, transport);
        if (*validate) return cmd_validate(scenario_path);
        if (*replay) return cmd_replay(csv_path);
        if (*serve) return cmd_serve(scenario_path, host, port);
    } catch (const harness::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
