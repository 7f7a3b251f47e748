#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "rsk/cli/experiment.hpp"
#include "rsk/error.hpp"

namespace {

struct SubOptions {
  std::string config;
  std::string t;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<double> q;
};

const std::map<std::string, std::string> kDescriptions{
    {"noise-check", "covariance seminorm bounds and Gram positivity on occupation densities"},
    {"lt-scaling", "small-time scaling of local-time norms (or gamma seminorms with \"gamma\": true)"},
    {"trace", "Feynman-Kac mean and variance of the semigroup trace"},
    {"variance-scan", "trace variance over t with a log-log exponent fit"},
    {"spectrum", "finite-difference eigenvalues, optionally with noise realizations"},
    {"airy", "stochastic Airy trace variance: closed form vs quadrature"},
    {"report", "variance scan plus rigidity verdict and predicted exponent"},
};

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << rsk::cli::error_json(kind, message) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Schroedinger operator rigidity toolkit"};
  app.require_subcommand(1);
  std::map<std::string, SubOptions> opts;
  for (const auto& name : rsk::cli::subcommands()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    auto& o = opts[name];
    sub->add_option("--config", o.config, "JSON experiment configuration");
    sub->add_option("--t", o.t, "comma-separated times, e.g. 0.25,0.5,1");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--out", o.out, "output directory");
    if (name == "lt-scaling") sub->add_option("--q", o.q, "norm exponent q in [1, 2]");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto& o = opts[name];
  try {
    rsk::cli::Overrides ov;
    if (!o.t.empty()) ov.t_list = rsk::cli::parse_list(o.t);
    ov.seed = o.seed;
    ov.threads = o.threads;
    ov.out = o.out;
    ov.q = o.q;
    const auto raw = o.config.empty() ? rsk::cli::Json::object() : rsk::cli::load_json(o.config);
    const auto config = rsk::cli::parse_config(name, raw, ov);
    const auto artifacts = rsk::cli::run(config);
    rsk::cli::write_artifacts(config, artifacts);
    std::cout << artifacts.text;
    return 0;
  } catch (const rsk::Error& e) {
    const int code = (e.kind() == rsk::ErrorKind::Input || e.kind() == rsk::ErrorKind::Config ||
                      e.kind() == rsk::ErrorKind::Model)
                         ? 2
                         : 3;
    return fail(code, std::string(rsk::to_string(e.kind())), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(2, "io", e.what());
  } catch (const std::exception& e) {
    return fail(3, "internal", e.what());
  }
}
