// verify <experiment> [options]   run one experiment and write its report
// verify diff <a.json> <b.json>   compare two reports, ignoring timings
// verify pencil [options]         build a certified pencil and dump it as JSON
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cutpaste/experiment.hpp"

using namespace cutpaste;

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

void add_run_options(CLI::App* app, ExperimentConfig& cfg, std::string& csv) {
  app->add_option("--q", cfg.q, "prime field size (>= 5)")->capture_default_str();
  app->add_option("--m", cfg.m, "pencil degree in t")->capture_default_str();
  app->add_option("--seed", cfg.seeds, "seeds; consecutive seeds pair up")->capture_default_str();
  app->add_option("--ext-degree", cfg.ext_degrees, "extension degrees k to count over")->capture_default_str();
  app->add_option("--budget", cfg.budget, "cap on point evaluations (default from CUTPASTE_BUDGET)")
      ->capture_default_str();
  app->add_option("--workers", cfg.workers, "worker threads, 0 = all cores")->capture_default_str();
  app->add_option("--out", cfg.out, "report path (default stdout)");
  app->add_option("--shared-from", cfg.shared_from, "pencil JSON whose G, F are reused");
  app->add_option("--k-sing", cfg.k_sing, "certify genericity over F_q^k for k <= this")->capture_default_str();
  app->add_option("--samples", cfg.samples, "valid phi round trips per pencil")->capture_default_str();
  app->add_option("--csv", csv, "also write count tables as CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-count and class checks for pencils of cubic surfaces"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string csv;
  for (const auto& name : experiment_names()) add_run_options(app.add_subcommand(name, "run " + name), cfg, csv);

  std::string diff_a, diff_b;
  auto* diff = app.add_subcommand("diff", "compare two reports");
  diff->add_option("a", diff_a)->required();
  diff->add_option("b", diff_b)->required();

  ExperimentConfig pcfg;
  pcfg.seeds = {1};
  std::string pout;
  auto* pencil = app.add_subcommand("pencil", "build a certified pencil and write it as JSON");
  pencil->add_option("--q", pcfg.q)->capture_default_str();
  pencil->add_option("--m", pcfg.m)->capture_default_str();
  pencil->add_option("--seed", pcfg.seeds)->capture_default_str();
  pencil->add_option("--k-sing", pcfg.k_sing)->capture_default_str();
  pencil->add_option("--out", pout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (diff->parsed()) {
      const auto lines = report_diff(read_json(diff_a), read_json(diff_b));
      for (const auto& l : lines) std::cout << l << "\n";
      return lines.empty() ? 0 : 1;
    }
    if (pencil->parsed()) {
      pcfg.experiment = "equality";
      pcfg.validate();
      const Field f = Field::create(pcfg.q, 1);
      const Pencil p = make_pencil(f, pcfg.m, pcfg.seeds.front(), nullptr, {pcfg.k_sing, kDefaultMaxAttempts, {}});
      write_text(pout, to_json(p).dump(2) + "\n");
      return 0;
    }
    cfg.experiment = app.get_subcommands().front()->get_name();
    const Report rep = run(cfg);
    write_text(cfg.out, rep.dump());
    if (!csv.empty()) write_text(csv, report_csv(rep.doc));
    if (rep.doc.contains("error")) std::cerr << "error: " << rep.doc["error"]["message"].get<std::string>() << "\n";
    return rep.exit_code;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const CertificationFailure& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kExitCertification;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
