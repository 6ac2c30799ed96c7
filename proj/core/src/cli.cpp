#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgdm/harness.hpp"
#include "mgdm/models.hpp"
#include "mgdm/pipeline.hpp"

namespace mgdm::harness {

namespace {

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) parts.push_back(token);
  return parts;
}

std::vector<overlaps::OverlapKind> parse_outputs(const std::string& text) {
  std::vector<overlaps::OverlapKind> kinds;
  for (const std::string& token : split_list(text, ',')) {
    if (token == "m")
      kinds.push_back(overlaps::OverlapKind::m);
    else if (token == "q")
      kinds.push_back(overlaps::OverlapKind::q);
    else if (token == "Q")
      kinds.push_back(overlaps::OverlapKind::Q);
    else if (token == "Qstar")
      kinds.push_back(overlaps::OverlapKind::Qstar);
    else
      throw std::invalid_argument("outputs: unknown kind '" + token +
                                  "' (expected m,q,Q,Qstar)");
  }
  if (kinds.empty()) throw std::invalid_argument("outputs: empty list");
  return kinds;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text(out_path, content);
}

models::Dataset read_csv_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& token : split_list(line, ',')) {
      const char* begin = token.c_str();
      char* end = nullptr;
      double value = std::strtod(begin, &end);
      if (end == begin || *end != '\0')
        throw std::runtime_error("bad CSV value '" + token + "' in " + path);
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV file " + path);
  models::Dataset ds;
  ds.samples.resize(Eigen::Index(rows.size()), Eigen::Index(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      ds.samples(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  ds.provenance = "csv:" + path;
  return ds;
}

std::string samples_csv(const models::Dataset& ds) {
  std::string out;
  for (Eigen::Index i = 0; i < ds.samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.samples.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_double(ds.samples(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

struct TheoryArgs {
  double beta = 0.0;
  double sigma = 0.0;
  int d = 500;
  std::string gammas;
  std::string out;
};

struct SweepArgs {
  std::string model = "spiked";
  int d = 500;
  double beta = 0.0;
  double sigma = 0.0;
  double alpha = 1.0;
  std::string gammas;
  int trials = 5;
  int latents = 64;
  std::uint64_t seed = 0;
  std::string outputs = "m,q,Q";
  bool subtract_baseline = false;
  int workers = 1;
  std::string format = "csv";
  std::string out;
};

struct QstarArgs {
  std::string a, b;
  bool phase_randomize = false;
  bool center = false;
  std::uint64_t seed = 0;
  std::string out;
};

struct SpectrumArgs {
  std::string input;
  bool center = false;
  bool drop_dc = false;
  bool no_drop_dc = false;
  bool complex_input = false;
  std::string out;
};

struct PhaseArgs {
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  bool real_control = false;
};

struct ConvertArgs {
  std::string input;
  std::string out;
  std::string to;
  int height = 0;
  int width = 0;
};

int run_theory(const TheoryArgs& args) {
  emit_theory_curves(parse_gamma_grid(args.gammas), args.beta, args.sigma,
                     args.d, args.out);
  return 0;
}

int run_sweep_cmd(const SweepArgs& args) {
  SweepConfig config;
  config.model_kind =
      args.model == "spiked" ? ModelKind::spiked : ModelKind::powerlaw;
  config.d = args.d;
  config.beta = args.beta;
  config.sigma_reg = args.sigma;
  config.alpha = args.alpha;
  config.gamma_grid = parse_gamma_grid(args.gammas);
  config.n_trials = args.trials;
  config.n_latents = args.latents;
  config.master_seed = args.seed;
  config.outputs = parse_outputs(args.outputs);
  config.subtract_baseline = args.subtract_baseline;
  config.workers = args.workers;
  std::vector<ResultRow> rows = run_sweep(config);
  write_text(args.out,
             args.format == "jsonl" ? sweep_jsonl(rows) : sweep_csv(rows));
  return 0;
}

int run_qstar(const QstarArgs& args) {
  pipeline::LoadedContainer a = pipeline::read_container(args.a);
  pipeline::LoadedContainer b = pipeline::read_container(args.b);
  if (a.h != b.h || a.w != b.w)
    throw std::runtime_error("qstar: containers have different shapes");
  auto e = pipeline::qstar_on_corpora(a.dataset, b.dataset, a.h, a.w,
                                      args.phase_randomize, args.seed);
  long long n = a.dataset.samples.rows();
  long long d = (long long)a.h * a.w;
  std::string out =
      "n_a,n_b,h,w,d,gamma_n_over_w,gamma_n_over_d,phase_randomized,qstar\n";
  out += std::to_string(n) + "," + std::to_string(b.dataset.samples.rows()) +
         "," + std::to_string(a.h) + "," + std::to_string(a.w) + "," +
         std::to_string(d) + "," + format_double(double(n) / double(a.w)) +
         "," + format_double(double(n) / double(d)) + "," +
         (args.phase_randomize ? "1" : "0") + "," + format_double(e.mean) +
         "\n";
  emit(args.out, out);
  return 0;
}

int run_spectrum(const SpectrumArgs& args) {
  pipeline::LoadedContainer loaded = pipeline::read_container(args.input);
  pipeline::FourierCorpus corpus;
  if (args.complex_input) {
    if (loaded.w % 2 != 0)
      throw std::runtime_error(
          "spectrum: interleaved complex container needs even width");
    int w = loaded.w / 2;
    const Eigen::MatrixXd& raw = loaded.dataset.samples;
    corpus.h = loaded.h;
    corpus.w = w;
    corpus.coefficients.resize(raw.rows(), Eigen::Index(loaded.h) * w);
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
      for (Eigen::Index k = 0; k < corpus.coefficients.cols(); ++k)
        corpus.coefficients(i, k) =
            std::complex<double>(raw(i, 2 * k), raw(i, 2 * k + 1));
    for (int k1 = 0; k1 < corpus.h; ++k1)
      for (int k2 = 0; k2 < w; ++k2) corpus.freq_index.emplace_back(k1, k2);
  } else {
    corpus = pipeline::to_fourier(loaded.dataset, loaded.h, loaded.w);
  }
  std::optional<bool> drop_dc;
  if (args.drop_dc) drop_dc = true;
  if (args.no_drop_dc) drop_dc = false;
  pipeline::SpectrumReport report =
      pipeline::fourier_spectrum_report(corpus, args.center, drop_dc);
  std::string out = "kind,index,k1,k2,value\n";
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i)
    out += "eigenvalue," + std::to_string(i) + ",,," +
           format_double(report.eigenvalues(i)) + "\n";
  for (Eigen::Index k = 0; k < report.variances.size(); ++k)
    out += "variance," + std::to_string(k) + "," +
           std::to_string(corpus.freq_index[size_t(k)].first) + "," +
           std::to_string(corpus.freq_index[size_t(k)].second) + "," +
           format_double(report.variances(k)) + "\n";
  emit(args.out, out);
  return 0;
}

int run_phase_randomize(const PhaseArgs& args) {
  pipeline::LoadedContainer loaded = pipeline::read_container(args.input);
  if (args.real_control) {
    models::Dataset out = pipeline::phase_randomize_real(
        loaded.dataset, loaded.h, loaded.w, args.seed);
    pipeline::write_container(out, loaded.h, loaded.w, args.out);
    return 0;
  }
  pipeline::FourierCorpus corpus =
      pipeline::to_fourier(loaded.dataset, loaded.h, loaded.w);
  Eigen::MatrixXcd coeff = models::phase_randomize(corpus.coefficients,
                                                   args.seed);
  models::Dataset interleaved;
  interleaved.samples.resize(coeff.rows(), 2 * coeff.cols());
  for (Eigen::Index i = 0; i < coeff.rows(); ++i)
    for (Eigen::Index k = 0; k < coeff.cols(); ++k) {
      interleaved.samples(i, 2 * k) = coeff(i, k).real();
      interleaved.samples(i, 2 * k + 1) = coeff(i, k).imag();
    }
  interleaved.provenance = loaded.dataset.provenance + "+phase-randomized";
  pipeline::write_container(interleaved, loaded.h, 2 * loaded.w, args.out);
  return 0;
}

int run_inspect(const std::string& input) {
  pipeline::LoadedContainer loaded = pipeline::read_container(input);
  const Eigen::MatrixXd& samples = loaded.dataset.samples;
  std::cout << "n=" << samples.rows() << " h=" << loaded.h
            << " w=" << loaded.w << " d=" << samples.cols()
            << " min=" << format_double(samples.minCoeff())
            << " max=" << format_double(samples.maxCoeff())
            << " mean=" << format_double(samples.mean()) << "\n";
  return 0;
}

int run_convert(const ConvertArgs& args) {
  if (args.to == "container") {
    if (args.height < 1 || args.width < 1)
      throw std::invalid_argument(
          "convert: --height and --width are required for --to container");
    models::Dataset ds = read_csv_samples(args.input);
    pipeline::write_container(ds, args.height, args.width, args.out);
  } else {
    pipeline::LoadedContainer loaded = pipeline::read_container(args.input);
    write_text(args.out, samples_csv(loaded.dataset));
  }
  return 0;
}

}  // namespace

int cli_entry(int argc, const char* const* argv) {
  CLI::App app{"Order-parameter laboratory for linear generative models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mgdm 0.1.0");
  app.set_config("--config")->description(
      "Config file with the same keys as the flags; flags override");

  TheoryArgs th;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "Write analytical curves for a gamma grid");
  theory_cmd->add_option("--beta", th.beta, "Spike strength")
      ->capture_default_str();
  theory_cmd->add_option("--sigma", th.sigma, "Regularisation sigma")
      ->capture_default_str();
  theory_cmd
      ->add_option("--d", th.d, "Reference dimension for n = round(gamma*d)")
      ->capture_default_str();
  theory_cmd
      ->add_option("--gammas", th.gammas,
                   "Gamma grid: comma list or lo:hi:{lin|log}:count")
      ->required();
  theory_cmd->add_option("--out", th.out, "Output CSV path")->required();

  SweepArgs sw;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Empirical sweep over a gamma grid");
  sweep_cmd->add_option("--model", sw.model, "Population model")
      ->check(CLI::IsMember({"spiked", "powerlaw"}))
      ->capture_default_str();
  sweep_cmd->add_option("--d", sw.d, "Sample dimension")
      ->capture_default_str();
  sweep_cmd->add_option("--beta", sw.beta, "Spike strength")
      ->capture_default_str();
  sweep_cmd->add_option("--sigma", sw.sigma, "Regularisation sigma")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--alpha", sw.alpha, "Power-law exponent (powerlaw model)")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--gammas", sw.gammas,
                   "Gamma grid: comma list or lo:hi:{lin|log}:count")
      ->required();
  sweep_cmd->add_option("--trials", sw.trials, "Trials per grid point")
      ->capture_default_str();
  sweep_cmd->add_option("--latents", sw.latents, "Latents per estimate")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Master seed")->required();
  sweep_cmd
      ->add_option("--outputs", sw.outputs,
                   "Comma list from m,q,Q,Qstar")
      ->capture_default_str();
  sweep_cmd->add_flag("--subtract-baseline", sw.subtract_baseline,
                      "Subtract the sqrt(2 log n / d) chance level from m");
  sweep_cmd->add_option("--workers", sw.workers, "Worker threads")
      ->capture_default_str();
  sweep_cmd->add_option("--format", sw.format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "Output path")->required();

  QstarArgs qs;
  CLI::App* qstar_cmd = app.add_subcommand(
      "qstar", "Fourier-domain Q* between two containers");
  qstar_cmd->add_option("--a", qs.a, "First container")->required();
  qstar_cmd->add_option("--b", qs.b, "Second container")->required();
  CLI::Option* qstar_seed =
      qstar_cmd->add_option("--seed", qs.seed, "Seed for phase randomisation");
  qstar_cmd
      ->add_flag("--phase-randomize", qs.phase_randomize,
                 "Randomise coefficient phases first (spectrum-preserving null)")
      ->needs(qstar_seed);
  qstar_cmd->add_option("--out", qs.out, "Output CSV path (default stdout)");

  SpectrumArgs sp;
  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "Eigenvalues of the Fourier correlation matrix");
  spectrum_cmd->add_option("--input", sp.input, "Input container")->required();
  spectrum_cmd->add_flag("--center", sp.center,
                         "Center coefficients before correlating");
  CLI::Option* drop_opt = spectrum_cmd->add_flag(
      "--drop-dc", sp.drop_dc, "Drop near-zero-variance frequencies");
  spectrum_cmd
      ->add_flag("--no-drop-dc", sp.no_drop_dc,
                 "Error on zero-variance frequencies instead of dropping")
      ->excludes(drop_opt);
  spectrum_cmd->add_flag(
      "--complex", sp.complex_input,
      "Input stores interleaved complex coefficients (h, 2w)");
  spectrum_cmd->add_option("--out", sp.out, "Output CSV path (default stdout)");

  PhaseArgs ph;
  CLI::App* phase_cmd = app.add_subcommand(
      "phase-randomize", "Randomise Fourier phases of a container");
  phase_cmd->add_option("--input", ph.input, "Input container")->required();
  phase_cmd->add_option("--out", ph.out, "Output container")->required();
  phase_cmd->add_option("--seed", ph.seed, "Seed")->required();
  phase_cmd->add_flag(
      "--real-control", ph.real_control,
      "Hermitian-paired phases: output stays real with the same shape");

  CLI::App* container_cmd =
      app.add_subcommand("container", "Inspect or convert MGDM1 containers");
  container_cmd->require_subcommand(1);
  std::string inspect_input;
  CLI::App* inspect_cmd =
      container_cmd->add_subcommand("inspect", "Print container summary");
  inspect_cmd->add_option("--input", inspect_input, "Input container")
      ->required();
  ConvertArgs cv;
  CLI::App* convert_cmd = container_cmd->add_subcommand(
      "convert", "Convert between CSV sample tables and containers");
  convert_cmd->add_option("--input", cv.input, "Input path")->required();
  convert_cmd->add_option("--out", cv.out, "Output path")->required();
  convert_cmd->add_option("--to", cv.to, "Target format")
      ->check(CLI::IsMember({"csv", "container"}))
      ->required();
  convert_cmd->add_option("--height", cv.height, "Sample height (h)");
  convert_cmd->add_option("--width", cv.width, "Sample width (w)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (theory_cmd->parsed()) return run_theory(th);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sw);
    if (qstar_cmd->parsed()) return run_qstar(qs);
    if (spectrum_cmd->parsed()) return run_spectrum(sp);
    if (phase_cmd->parsed()) return run_phase_randomize(ph);
    if (container_cmd->parsed()) {
      if (inspect_cmd->parsed()) return run_inspect(inspect_input);
      if (convert_cmd->parsed()) return run_convert(cv);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace mgdm::harness
