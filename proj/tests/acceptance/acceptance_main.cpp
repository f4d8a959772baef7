#include "xtal/io.hpp"
#include "xtal/verify.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  xtal::AcceptanceOptions opts;
  std::string json_out;
  app.add_option("--only", opts.only, "Criterion ids to run");
  app.add_option("--json", json_out, "Write the report JSON here");
  CLI11_PARSE(app, argc, argv);

  const auto report = xtal::run_acceptance(opts);
  std::cout << xtal::summary_lines(report) << std::flush;
  if (!json_out.empty()) xtal::write_text_file(json_out, xtal::dump_json(xtal::to_json(report, true)) + "\n");
  return report.all_passed() ? 0 : 1;
}
