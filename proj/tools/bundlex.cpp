#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace bundlex;
using namespace bundlex::cli;

namespace {

void add_format(CLI::App* cmd, Format& format) {
    cmd->add_option_function<std::string>(
           "--format", [&format](const std::string& v) { format = v == "text" ? Format::text : Format::json; },
           "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->type_name("FORMAT");
}

std::vector<std::string> parse_priority(const std::string& s) { return s.empty() ? std::vector<std::string>{} : split_list(s); }

std::vector<std::pair<std::size_t, std::size_t>> parse_grid(const std::string& s) {
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    for (const auto& cell : split_list(s)) {
        auto colon = cell.find(':');
        if (colon == std::string::npos) throw input_error("grid cells look like AGENTS:OBJECTS, got '" + cell + "'");
        try {
            grid.emplace_back(std::stoul(cell.substr(0, colon)), std::stoul(cell.substr(colon + 1)));
        } catch (const std::exception&) {
            throw input_error("bad grid cell '" + cell + "'");
        }
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Individually rational priority exchange of object bundles, with audits"};
    app.require_subcommand(1);

    RunConfig run;
    std::string run_priority;
    auto* run_cmd = app.add_subcommand("run", "run the mechanism on an instance file");
    run_cmd->add_option("--input,-i", run.input, "instance JSON")->required();
    run_cmd->add_option("--output,-o", run.output, "write here instead of stdout");
    run_cmd->add_option("--priority", run_priority, "comma-separated agent order");
    run_cmd->add_flag("--trace", run.trace, "include every round");
    add_format(run_cmd, run.format);

    AuditConfig audit;
    std::string audit_priority;
    auto* audit_cmd = app.add_subcommand("audit", "audit a matching or the mechanism's output");
    audit_cmd->add_option("--input,-i", audit.input, "instance JSON")->required();
    auto* matching_opt = audit_cmd->add_option("--matching", audit.matching, "matching JSON to audit");
    audit_cmd->add_flag("--mechanism", "audit the mechanism's output (default)")->excludes(matching_opt);
    audit_cmd->add_option("--priority", audit_priority, "comma-separated agent order for the mechanism");
    audit_cmd->add_flag("--sp", audit.sp, "search for profitable misreports");
    audit_cmd->add_option("--domain", audit.domain, "misreport domain: trichotomous or strongly-trichotomous");
    audit_cmd->add_flag("--truncation", audit.truncation, "search bearable-set misreports");
    audit_cmd->add_flag("--obvious", audit.obvious, "search for obvious manipulations");
    audit_cmd->add_flag("--core", audit.core, "check weak-core membership");
    audit_cmd->add_flag("--strict-acceptability", audit.strict_acceptability, "core check under strict acceptability");
    audit_cmd->add_option("--max-objects", audit.max_objects, "enumeration bound");
    add_format(audit_cmd, audit.format);

    GenerateConfig gen;
    auto* gen_cmd = app.add_subcommand("generate", "write a seeded random instance");
    gen_cmd->add_option("--agents", gen.gen.agents, "number of agents");
    gen_cmd->add_option("--max-endowment", gen.gen.max_endowment, "largest endowment size");
    gen_cmd->add_option("--objects", gen.gen.total_objects, "total objects (overrides --max-endowment)");
    gen_cmd->add_option("--seed", gen.gen.seed, "random seed");
    gen_cmd->add_flag("--strongly", gen.gen.strongly, "strongly trichotomous preferences");
    gen_cmd->add_option("--p-attractive", gen.gen.p_attractive, "chance an object is attractive");
    gen_cmd->add_option("--p-bearable", gen.gen.p_bearable, "chance a non-endowed object is bearable");
    gen_cmd->add_option("--output,-o", gen.output, "write here instead of stdout");

    BenchConfig bench;
    std::string grid;
    auto* bench_cmd = app.add_subcommand("bench", "time the mechanism over a size grid (CSV)");
    bench_cmd->add_option("--grid", grid, "comma-separated AGENTS:OBJECTS cells");
    bench_cmd->add_option("--seed", bench.seed, "first seed");
    bench_cmd->add_option("--repeats", bench.repeats, "instances per cell");
    bench_cmd->add_option("--p-attractive", bench.p_attractive, "chance an object is attractive");
    bench_cmd->add_option("--p-bearable", bench.p_bearable, "chance a non-endowed object is bearable");

    FixtureConfig fixture;
    auto* fixture_cmd = app.add_subcommand("fixture", "print a built-in fixture and its expected artifacts");
    fixture_cmd->add_option("name", fixture.name, "fixture name");
    fixture_cmd->add_flag("--list", fixture.list, "list fixture names");
    fixture_cmd->add_flag("--verify", fixture.verify, "recompute and compare every expected artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : invalid_input;
    }

    return guarded(
        [&] {
            if (*run_cmd) {
                run.priority = parse_priority(run_priority);
                return cmd_run(run, std::cout);
            }
            if (*audit_cmd) {
                audit.priority = parse_priority(audit_priority);
                return cmd_audit(audit, std::cout);
            }
            if (*gen_cmd) return cmd_generate(gen, std::cout);
            if (*bench_cmd) {
                if (!grid.empty()) bench.grid = parse_grid(grid);
                return cmd_bench(bench, std::cout);
            }
            if (!fixture.list && fixture.name.empty()) throw input_error("fixture needs a name or --list");
            return cmd_fixture(fixture, std::cout);
        },
        std::cerr);
}
