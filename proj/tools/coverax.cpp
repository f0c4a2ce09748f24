#include "coverax/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using coverax::ErrorCode;

struct Options {
  coverax::RunConfig config;
  std::string format;
  std::string dilation_mode = "offset";
  std::string candidates_file;
};

void add_common(CLI::App* cmd, Options& o, bool target_v_required) {
  auto& c = o.config;
  cmd->add_option("--input", c.input, "Mesh (obj/off/ply) or point cloud (xyz/ply)")->required();
  cmd->add_option("--format", o.format, "obj|off|ply|xyz (default: from extension)");
  cmd->add_option("--samples", c.samples, "Surface samples m")->capture_default_str();
  cmd->add_option("--candidates", c.candidates, "Interior candidates n")->capture_default_str();
  auto* v = cmd->add_option("--target-v", c.target_v, "Target number of skeletal points |V|");
  if (target_v_required) v->required();
  cmd->add_option("--delta-r", c.delta_r, "Dilation delta_r")->capture_default_str();
  cmd->add_option("--dilation-mode", o.dilation_mode, "offset|scale")
      ->check(CLI::IsMember({"offset", "scale"}))
      ->capture_default_str();
  cmd->add_option("--omega", c.omega, "Uniformity weight")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_flag("--baseline", c.baseline, "Also run the greedy set-cover baseline");
  cmd->add_option("--candidates-file", o.candidates_file, "Candidate points (x y z per line) instead of sampling");
  cmd->add_flag("--argmin", c.argmin, "Select the lowest score each iteration");
  cmd->add_option("--eval-samples", c.eval_samples, "Dense surface samples for the errors")->capture_default_str();
  cmd->add_option("--envelope-samples", c.envelope_samples, "Envelope samples for the errors")
      ->capture_default_str();
}

void finish(Options& o) {
  if (!o.format.empty()) o.config.format = coverax::parse_format(o.format);
  o.config.dilation_mode =
      o.dilation_mode == "scale" ? coverax::DilationMode::Scale : coverax::DilationMode::Offset;
  if (!o.candidates_file.empty()) o.config.candidates_file = o.candidates_file;
}

void emit_csv(const coverax::RunConfig& config, const std::string& name, const std::string& csv) {
  std::filesystem::create_directories(config.out);
  const auto path = config.out / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw coverax::Error(ErrorCode::IoError, "cannot write " + path.string());
  out << csv;
  std::cout << csv;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::RejectionStarvation:
    case ErrorCode::DegenerateInput:
    case ErrorCode::EmptyCandidates:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeletal point selection and medial skeleton reconstruction"};
  app.require_subcommand(1);

  Options run_opts, v_opts, d_opts, b_opts;
  std::vector<Eigen::Index> v_list, sizes;
  std::vector<double> delta_list;
  std::string axis = "V";

  auto* run = app.add_subcommand("run", "Full pipeline on one shape");
  add_common(run, run_opts, true);

  auto* ablate_v = app.add_subcommand("ablate-v", "Sweep the target |V| on shared samples and candidates");
  add_common(ablate_v, v_opts, false);
  ablate_v->add_option("--v-list", v_list, "Target |V| values")->required()->delimiter(',');

  auto* ablate_d = app.add_subcommand("ablate-dilation", "Sweep delta_r on shared samples and candidates");
  add_common(ablate_d, d_opts, true);
  ablate_d->add_option("--delta-list", delta_list, "delta_r values")->required()->delimiter(',');

  auto* bench = app.add_subcommand("bench", "Selection-stage timing against one of |P|, |S|, |V|");
  add_common(bench, b_opts, true);
  bench->add_option("--axis", axis, "P|S|V")->capture_default_str();
  bench->add_option("--sizes", sizes, "Sizes along the axis")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "coverax: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*run) {
      finish(run_opts);
      const auto result = coverax::run_pipeline(run_opts.config);
      const auto& e = result.outcome.errors;
      double total = 0.0;
      for (const auto& [stage, ms] : result.prepared.runtime_ms) total += ms;
      for (const auto& [stage, ms] : result.outcome.runtime_ms) total += ms;
      std::printf("n_selected=%zu coverage_rate=%.6f eps_two_sided=%.4f%% total_ms=%.1f\n",
                  result.outcome.selection.state.selected().size(), e.coverage_rate, 100.0 * e.eps_two_sided,
                  total);
    } else if (*ablate_v) {
      finish(v_opts);
      if (v_list.empty()) throw coverax::Error(ErrorCode::UsageError, "--v-list is empty");
      v_opts.config.target_v = v_list.front();
      emit_csv(v_opts.config, "ablation_v.csv", coverax::ablation_v_csv(coverax::ablate_v(v_opts.config, v_list)));
    } else if (*ablate_d) {
      finish(d_opts);
      emit_csv(d_opts.config, "ablation_dilation.csv",
               coverax::ablation_dilation_csv(coverax::ablate_dilation(d_opts.config, delta_list)));
    } else if (*bench) {
      finish(b_opts);
      const auto rows = coverax::scaling_bench(b_opts.config, coverax::parse_bench_axis(axis), sizes);
      emit_csv(b_opts.config, "bench.csv", coverax::bench_csv(rows));
    }
  } catch (const coverax::Error& e) {
    std::cerr << "coverax: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "coverax: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
