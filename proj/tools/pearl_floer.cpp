#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <pearl_floer/cli.hpp>

namespace {

void add_common(CLI::App* sub, pearl::RunConfig& c)
{
    sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", c.output, "Output file");
}

void add_source(CLI::App* sub, pearl::RunConfig& c)
{
    sub->add_option("--in", c.input, "Input file");
    sub->add_option("--model", c.model, "Built-in model");
    sub->add_option("--dim", c.dim, "Complex dimension n");
}

} // namespace

int main(int argc, char** argv)
{
    pearl::RunConfig c;
    CLI::App app{"Pearly Floer cohomology of immersed Lagrangians in C^n"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "Run the geometry pipeline on a built-in immersion");
    add_source(analyze, c);
    add_common(analyze, c);
    analyze->add_option("--resolution", c.resolution, "Mesh steps per parameter direction");
    analyze->add_option("--tol-frame", c.tol_frame, "Unitarity tolerance for tangent frames");
    analyze->add_option("--tol-exact", c.tol_exact, "Maximum loop integral of the Liouville form");
    analyze->add_option("--tol-index", c.tol_index, "Maximum distance of a raw index from an integer");
    analyze->add_flag("--require-strong", c.require_strong, "Exit 1 unless strong positivity holds");

    auto* homology = app.add_subcommand("homology", "Floer cohomology of a datum");
    add_source(homology, c);
    add_common(homology, c);

    auto* spectral = app.add_subcommand("spectral", "Action spectral sequence and rank inequality");
    add_source(spectral, c);
    add_common(spectral, c);
    spectral->add_option("--pages", c.r_max, "Last page to print");
    spectral->add_option("--random", c.random, "Run this many random property trials instead");
    spectral->add_option("--seed", c.seed, "Seed for --random");

    auto* audit = app.add_subcommand("audit", "Index budget of a degeneration pattern");
    audit->add_option("--in", c.input, "Pattern file")->required();
    audit->add_option("--dim", c.dim, "Complex dimension n");
    add_common(audit, c);

    auto* verify = app.add_subcommand("verify-map", "Check a chain map between two datums");
    verify->add_option("--in", c.input, "Source datum")->required();
    verify->add_option("--target", c.target, "Target datum")->required();
    verify->add_option("--map", c.map, "Map file")->required();
    add_common(verify, c);

    auto* exp = app.add_subcommand("export", "Write the datum of a built-in model");
    exp->add_option("--model", c.model, "Built-in model")->required();
    exp->add_option("--dim", c.dim, "Complex dimension n");
    exp->add_option("--resolution", c.resolution, "Mesh steps for pipeline models");
    add_common(exp, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pearl::kExitUsage;
    }
    for (auto* sub : app.get_subcommands())
        c.command = sub->get_name();
    return pearl::run(c, std::cout, std::cerr);
}
