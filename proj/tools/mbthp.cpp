// mbthp: link simulations, FSB codebook training and complexity tables.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mbthp/complexity.hpp"
#include "mbthp/config.hpp"
#include "mbthp/errors.hpp"
#include "mbthp/multibranch.hpp"
#include "mbthp/report.hpp"
#include "mbthp/simulation.hpp"

namespace {

using namespace mbthp;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::optional<std::string> scheme;
  std::optional<std::size_t> branches;
  std::optional<std::string> covariance;
  std::optional<double> si_error;
  std::optional<std::string> baseline;
  std::optional<std::uint64_t> blocks;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--scheme", o.scheme, "single, psp, fsb or exhaustive");
  cmd->add_option("--branches", o.branches, "number of branches L");
  cmd->add_option("--case", o.covariance, "covariance case A or B");
  cmd->add_option("--si-error", o.si_error, "side-information error rate");
  cmd->add_option("--baseline", o.baseline, "mbthp, thp_single, thp_nonrobust or naf");
  cmd->add_option("--blocks", o.blocks, "blocks per SNR point");
}

SimConfig resolve(const Overrides& o) {
  SimConfig c = o.config.empty() ? SimConfig{} : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.scheme) c.scheme = parse_scheme(*o.scheme);
  if (o.branches) c.l = *o.branches;
  if (o.covariance) c.covariance = parse_case(*o.covariance);
  if (o.si_error) c.si_error_rate = *o.si_error;
  if (o.baseline) c.baseline = parse_baseline(*o.baseline);
  if (o.blocks) c.blocks = *o.blocks;
  if (c.scheme == CodebookScheme::kSingle && !o.branches) c.l = 1;
  validate(c);
  return c;
}

void print_points(const SimResult& r) {
  std::printf("# %s, L=%zu, case %s, %llu blocks/point\n", r.label.c_str(), r.branches,
              std::string(to_string(r.config.covariance)).c_str(),
              static_cast<unsigned long long>(r.config.blocks));
  std::printf("%10s %14s %14s %10s\n", "snr_rd_db", "ber", "mse", "converged");
  for (const auto& p : r.points) {
    std::printf("%10.2f %14.6e %14.6e %10.4f\n", p.snr_rd_db, p.ber, p.mse, p.converged_fraction);
  }
}

int simulate(SimConfig c, const std::string& out) {
  const SimResult r = sweep(c);
  print_points(r);
  const OutputPaths paths = write_outputs(r, out);
  std::printf("wrote %s and %s\n", paths.csv.c_str(), paths.plot.c_str());
  return 0;
}

int fsb_command(const SimConfig& c, const std::string& out) {
  const FsbTraining t = train_fsb(c, c.fsb_experiments);
  FsbFile f;
  f.n_s = c.dims.n_d;
  f.l = c.l;
  f.n_e = t.experiments;
  f.seed = c.seed;
  f.codebook = t.codebook;
  std::filesystem::create_directories(out);
  const std::string path =
      (std::filesystem::path(out) / ("fsb_n" + std::to_string(f.n_s) + "_L" +
                                     std::to_string(f.l) + ".txt"))
          .string();
  write_fsb_file(path, f);
  std::printf("wrote %s (%llu experiments)\n", path.c_str(),
              static_cast<unsigned long long>(t.experiments));
  return 0;
}

int complexity_command(const SimConfig& c, std::uint64_t i_s, std::uint64_t i_r,
                       std::uint64_t i_i) {
  ComplexityInputs in;
  in.n_s = c.dims.n_s;
  in.n_r = c.dims.n_r;
  in.n_d = c.dims.n_d;
  in.i_s = i_s;
  in.i_r = i_r;
  in.i_i = i_i;
  in.l = c.l;
  in.k = c.k;
  std::cout << format_complexity(complexity_estimate(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-branch THP for two-hop AF MIMO relays"};
  app.require_subcommand(1);

  Overrides o;
  auto* run = app.add_subcommand("run", "simulate the first SNR point of a configuration");
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate every configured SNR point");
  auto* fsb = app.add_subcommand("fsb-train", "train and write an FSB codebook");
  auto* cx = app.add_subcommand("complexity", "print the per-branch FLOP table");
  for (auto* cmd : {run, sweep_cmd, fsb, cx}) add_common(cmd, o);

  std::optional<double> snr;
  run->add_option("--snr-rd", snr, "relay-destination SNR in dB");
  std::uint64_t i_s = 1, i_r = 1, i_i = 1;
  cx->add_option("--source-steps", i_s, "bisection steps for source powers");
  cx->add_option("--relay-steps", i_r, "bisection steps for relay powers");
  cx->add_option("--sweeps", i_i, "outer water-filling sweeps");

  CLI11_PARSE(app, argc, argv);
  try {
    SimConfig c = resolve(o);
    if (run->parsed()) {
      c.snr_rd_db = {snr ? *snr : c.snr_rd_db.front()};
      return simulate(c, o.out);
    }
    if (sweep_cmd->parsed()) return simulate(c, o.out);
    if (fsb->parsed()) return fsb_command(c, o.out);
    return complexity_command(c, i_s, i_r, i_i);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mbthp: %s\n", e.what());
    return 2;
  }
}
