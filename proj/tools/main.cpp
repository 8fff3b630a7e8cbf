#include <CLI11.hpp>

#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) {
  using dirac::cli::Format;
  CLI::App app{"Checks Dirac structures given in a block-structured input file"};
  app.require_subcommand(1);
  dirac::cli::Options opts;
  std::string path;
  std::string format = "json";
  const std::pair<const char*, const char*> commands[] = {
      {"verify", "almost Dirac, Dirac and leaf-parity checks plus the Courant axioms on the frame"},
      {"coupling", "normal distribution, coupling test, geometric data and integrability"},
      {"linearize", "coefficients near the leaf y = 0, the linear model and its checks"},
      {"submanifold", "K(N), properness, induced structure, second fundamental form and verdicts"},
      {"axioms", "Courant algebroid axioms on the frame sections"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("input", path, "input file")->required();
    sub->add_option("--samples", opts.samples, "number of sample points");
    sub->add_option("--seed", opts.seed, "sampler seed");
    sub->add_option("--tol", opts.tol, "tolerance for floating-point comparisons");
    sub->add_option("--box", opts.box, "half-width of the sampling box (rational)");
    sub->add_option("--structure", opts.structure, "structure block to use (default: the first)");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--exact-only", opts.exact_only, "reject transcendental coefficients");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }
  opts.format = format == "text" ? Format::Text : Format::Json;
  return dirac::cli::run(app.get_subcommands().front()->get_name(), path, opts, std::cout, std::cerr);
}
