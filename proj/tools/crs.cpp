// Command-line driver: generate estimated distributions, evaluate them
// against ground truth, and export report tables / plot data.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crscore/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"competitive-ratio evaluation of estimated distributions"};
  app.require_subcommand(1);

  std::string config_path;
  auto add = [&](const std::string& name, const std::string& desc) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    return sub;
  };
  auto* gen = add("gen", "generate estimated distributions (LLM or baseline)");
  auto* eval = add("eval", "evaluate stored distributions and write a results CSV");
  auto* report = add("report", "print a results CSV as an aligned table");
  auto* plot = add("plot-data", "export survival-curve points for plotting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = crscore::load_config(config_path);
    if (gen->parsed()) crscore::cmd_gen(config);
    if (eval->parsed()) crscore::cmd_eval(config);
    if (report->parsed()) crscore::cmd_report(config, std::cout);
    if (plot->parsed()) crscore::cmd_plot_data(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return crscore::exit_code_for(e);
  }
  return 0;
}
