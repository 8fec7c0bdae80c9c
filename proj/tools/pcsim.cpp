#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pcs/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
};

pcs::ExperimentConfig resolve(const Options& o) {
  pcs::ExperimentConfig cfg = pcs::make_config(o.preset.empty() ? pcs::Preset::desk : pcs::parse_preset(o.preset));
  if (!o.config.empty()) cfg = pcs::load_config(o.config, cfg);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

template <typename Write>
void emit(const Options& o, Write write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + o.out);
  write(f);
  if (!f) throw std::runtime_error("failed writing " + o.out);
}

template <typename Row>
int report_aborted(const std::vector<Row>& rows) {
  const auto bad = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.ok; });
  for (const auto& r : rows)
    if (!r.ok) std::cerr << "aborted: spans=" << r.spans << " launch_dbm=" << r.launch_dbm << " mode="
                         << pcs::mode_name(r.mode) << ": " << r.error << '\n';
  return bad == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic-shaping link simulator"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value experiment file")->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "fidelity preset (desk | paper | custom)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    sub->add_option("--out", o.out, "output CSV path (default stdout)");
  };
  auto* mi = app.add_subcommand("mi-sweep", "MI versus distance over the simulated fibre link");
  auto* ber = app.add_subcommand("ber-sweep", "coded BER versus distance over the simulated fibre link");
  auto* awgn = app.add_subcommand("awgn-validate", "coded BER versus SNR over synthetic AWGN");
  auto* grid = app.add_subcommand("gn-grid", "GN-model SNR over the span and launch-power grid");
  for (auto* s : {mi, ber, awgn, grid}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(o);
    if (mi->parsed()) {
      const auto rows = pcs::run_mi_sweep(cfg);
      emit(o, [&](std::ostream& os) { pcs::write_mi_sweep_csv(os, cfg, rows); });
      return report_aborted(rows);
    }
    if (ber->parsed()) {
      const auto rows = pcs::run_ber_sweep(cfg);
      emit(o, [&](std::ostream& os) { pcs::write_ber_sweep_csv(os, cfg, rows); });
      return report_aborted(rows);
    }
    if (awgn->parsed()) {
      const auto summary = pcs::run_awgn_validation(cfg);
      emit(o, [&](std::ostream& os) { pcs::write_awgn_csv(os, cfg, summary); });
      return 0;
    }
    emit(o, [&](std::ostream& os) { pcs::write_snr_grid_csv(os, cfg.link, cfg.spans, cfg.launch_dbm); });
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
