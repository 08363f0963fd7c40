#include "rmtlab/errors.hpp"
#include "rmtlab/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <sstream>

namespace {

using rmtlab::ExperimentConfig;

std::complex<double> parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  in >> re;
  if (in.fail()) throw CLI::ValidationError("complex", "expected RE or RE,IM: " + text);
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw CLI::ValidationError("complex", "expected RE or RE,IM: " + text);
  }
  return {re, im};
}

int report(const rmtlab::ResultStore& store) {
  std::cout << "run-id: " << store.run_id << "\n"
            << "directory: " << store.directory.string() << "\n"
            << store.summary;
  for (const auto& f : store.failures) std::cerr << "FAILED: " << f << "\n";
  return store.deterministic_ok ? 0 : 1;
}

struct EnsembleFlags {
  std::string law = "gaussian";
  std::string third_moment = "generic";
  bool complex_field = false;

  void add(CLI::App* app) {
    app->add_option("--law", law, "Entry law")->capture_default_str();
    app->add_option("--third-moment", third_moment, "generic or vanishing")->capture_default_str();
    app->add_flag("--complex", complex_field, "Complex entries");
  }

  void apply(ExperimentConfig& c) const {
    c.law = rmtlab::entry_law_from_string(law);
    if (third_moment == "vanishing") c.third_moment = rmtlab::ThirdMomentMode::vanishing;
    else if (third_moment != "generic") throw rmtlab::InvalidArgument("third moment mode must be generic or vanishing");
    c.field = complex_field ? rmtlab::ScalarField::complex : rmtlab::ScalarField::real;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random matrix local law experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  std::string run_id;
  std::string which;
  auto* emit = app.add_subcommand("emit", "Write plot data for a stored run");
  emit->add_option("run-id", run_id)->required();
  emit->add_option("which", which, "density, eigenvalues, scaling, probes or a table name")->required();

  app.add_subcommand("list", "List stored runs");

  ExperimentConfig ll;
  ll.experiment = rmtlab::Experiment::scaling;
  ll.params.sizes = {256, 512, 1024, 2048};
  ll.params.trials = 30;
  EnsembleFlags ll_ens;
  std::string ll_z0 = "1";
  auto* locallaw = app.add_subcommand("locallaw", "Local statistic scaling in N");
  ll_ens.add(locallaw);
  locallaw->add_option("--s", ll.params.s)->capture_default_str();
  locallaw->add_option("--z0", ll_z0, "RE or RE,IM")->capture_default_str();
  locallaw->add_option("--N-list", ll.params.sizes)->delimiter(',')->capture_default_str();
  locallaw->add_option("--trials", ll.params.trials)->capture_default_str();
  locallaw->add_option("--seed", ll.params.seed)->capture_default_str();
  locallaw->add_option("--threads", ll.threads)->capture_default_str();

  ExperimentConfig cmp;
  cmp.experiment = rmtlab::Experiment::compare;
  cmp.params.sizes = {40};
  EnsembleFlags cmp_ens;
  std::string law_prime = "gaussian";
  std::vector<std::size_t> ab;
  std::string cmp_w = "1,0.05";
  std::string cmp_z = "1";
  auto* compare = app.add_subcommand("compare", "Single-entry swap expansion");
  cmp_ens.add(compare);
  compare->add_option("--law-prime", law_prime)->capture_default_str();
  compare->add_option("--N", cmp.params.sizes[0])->capture_default_str();
  auto* k_opt = compare->add_option("--k", cmp.params.k, "Swap counter in 1..N^2");
  compare->add_option("--ab", ab, "Entry a,b (0-based)")->delimiter(',')->expected(2)->excludes(k_opt);
  compare->add_option("--w", cmp_w)->capture_default_str();
  compare->add_option("--z", cmp_z)->capture_default_str();
  compare->add_option("--v-sweep", cmp.params.v)->delimiter(',');
  compare->add_option("--seed", cmp.params.seed)->capture_default_str();

  std::string fn_which;
  std::string fn_config;
  auto* functional = app.add_subcommand("functional", "A, Z or script P of one sample");
  functional->add_option("--which", fn_which)->required()->check(CLI::IsMember({"A", "Z", "P1", "P2", "P3"}));
  functional->add_option("--config", fn_config)->required()->check(CLI::ExistingFile);

  ExperimentConfig den;
  den.experiment = rmtlab::Experiment::density;
  std::vector<std::string> den_z{"0"};
  std::vector<std::string> den_w;
  auto* density = app.add_subcommand("density", "Limiting singular-square density curves");
  density->add_option("--z", den_z, "RE or RE,IM; repeatable")->capture_default_str();
  density->add_option("--w", den_w, "Self-consistent table points; repeatable");
  density->add_option("--x-min", den.params.x_min)->capture_default_str();
  density->add_option("--x-max", den.params.x_max)->capture_default_str();
  density->add_option("--points", den.params.points)->capture_default_str();
  density->add_option("--eta", den.params.eta)->capture_default_str();

  ExperimentConfig spc;
  spc.experiment = rmtlab::Experiment::spectra;
  spc.params.sizes = {1000};
  spc.params.trials = 1;
  EnsembleFlags spc_ens;
  std::vector<std::string> spc_z;
  auto* spectra = app.add_subcommand("spectra", "Eigenvalue scatter and headcount");
  spc_ens.add(spectra);
  spectra->add_option("--N", spc.params.sizes)->delimiter(',')->capture_default_str();
  spectra->add_option("--trials", spc.params.trials)->capture_default_str();
  spectra->add_option("--seed", spc.params.seed)->capture_default_str();
  spectra->add_option("--z", spc_z, "Singular-square KS comparison points; repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return report(rmtlab::run(rmtlab::load_config(config_path)));
    if (*emit) {
      std::cout << rmtlab::emit_plotdata(rmtlab::load_store(run_id), which).string() << "\n";
      return 0;
    }
    if (app.got_subcommand("list")) {
      for (const auto& id : rmtlab::list_runs()) std::cout << id << "\n";
      return 0;
    }
    if (*locallaw) {
      ll_ens.apply(ll);
      ll.params.z0 = parse_complex(ll_z0);
      return report(rmtlab::run(ll));
    }
    if (*compare) {
      cmp_ens.apply(cmp);
      cmp.params.law_prime = rmtlab::entry_law_from_string(law_prime);
      if (!ab.empty()) {
        cmp.params.a = ab[0];
        cmp.params.b = ab[1];
      }
      cmp.params.w = {parse_complex(cmp_w)};
      cmp.params.z = {parse_complex(cmp_z)};
      return report(rmtlab::run(cmp));
    }
    if (*functional) {
      ExperimentConfig c = rmtlab::load_config(fn_config);
      c.experiment = rmtlab::Experiment::functional;
      const auto store = rmtlab::run(c);
      const auto summary = nlohmann::json::parse(store.summary);
      std::cout << fn_which << " = " << summary.at(fn_which).get<double>() << "\n";
      return report(store);
    }
    if (*density) {
      den.params.z.clear();
      for (const auto& z : den_z) den.params.z.push_back(parse_complex(z));
      for (const auto& w : den_w) den.params.w.push_back(parse_complex(w));
      return report(rmtlab::run(den));
    }
    if (*spectra) {
      spc_ens.apply(spc);
      for (const auto& z : spc_z) spc.params.z.push_back(parse_complex(z));
      return report(rmtlab::run(spc));
    }
  } catch (const rmtlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return 0;
}
