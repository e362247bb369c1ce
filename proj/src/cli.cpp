#include "irqsim/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "irqsim/presets.hpp"
#include "irqsim/runner.hpp"
#include "irqsim/scenario.hpp"

namespace irqsim {

namespace {

bool is_usage_error(Errc c) {
  switch (c) {
    case Errc::parse_error:
    case Errc::unknown_key:
    case Errc::bad_unit:
    case Errc::bad_value:
    case Errc::bad_distribution:
    case Errc::config_error:
      return true;
    default:
      return false;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::config_error, "cannot read scenario file \"" + path + "\"");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

Scenario resolve_scenario(const std::string& target) {
  if (is_preset(target)) return preset(target);
  return parse_scenario(slurp(target));
}

int do_run(const std::string& target, const std::optional<std::uint64_t>& seed,
           const std::string& out, bool csv, bool trace) {
  Scenario sc = resolve_scenario(target);
  RunOptions opt;
  opt.seed = seed;
  opt.write_samples = csv;
  opt.write_trace = trace;
  std::filesystem::path dir =
      out.empty() ? std::filesystem::path("runs") / sc.name : std::filesystem::path(out);
  RunResult res = run_to_dir(std::move(sc), dir, opt);
  std::cout << render_table({res.report});
  std::printf("\n%llu clean cycles, %llu overruns, seed %llu -> %s\n",
              static_cast<unsigned long long>(res.report.sample_count),
              static_cast<unsigned long long>(res.report.overrun_count),
              static_cast<unsigned long long>(res.report.seed),
              res.dir.string().c_str());
  return 0;
}

int do_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<RunReport> reports;
  reports.reserve(inputs.size());
  for (const std::string& in : inputs) reports.push_back(load_report_file(in));
  std::string table = render_table(reports);
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "table.txt", table);
  std::cout << table;
  return 0;
}

int do_presets() {
  for (const std::string& name : preset_names()) std::cout << name << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Deterministic interrupt-dispatch and scheduling-latency simulator"};
  app.name("irqsim");
  app.require_subcommand(1);

  std::string target;
  std::optional<std::uint64_t> seed;
  std::string run_out;
  bool csv = false;
  bool trace = false;
  CLI::App* run = app.add_subcommand("run", "Run one scenario file or preset");
  run->add_option("scenario", target, "Scenario file path or preset name")->required();
  run->add_option("--seed", seed, "Override the scenario's seed");
  run->add_option("--out", run_out, "Output directory (default: runs/<name>)");
  run->add_flag("--csv", csv, "Also write per-cycle samples.csv");
  run->add_flag("--trace", trace, "Also write the full event trace (large)");

  std::vector<std::string> inputs;
  std::string cmp_out = ".";
  CLI::App* cmp = app.add_subcommand("compare", "Merge run outputs into one table");
  cmp->add_option("runs", inputs, "Run directories or report.json files")
      ->required()
      ->expected(-1);
  cmp->add_option("--out", cmp_out, "Directory for the merged table.txt (default: .)");

  app.add_subcommand("presets", "List the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(target, seed, run_out, csv, trace);
    if (cmp->parsed()) return do_compare(inputs, cmp_out);
    return do_presets();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_usage_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace irqsim
