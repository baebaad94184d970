#include "ssimdecomp/cli.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ssimdecomp/associations.hpp"
#include "ssimdecomp/codes.hpp"
#include "ssimdecomp/dictionary.hpp"
#include "ssimdecomp/error.hpp"
#include "ssimdecomp/imageio.hpp"

namespace ssimdecomp::cli {

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
      return kUsage;
    case Errc::Io:
    case Errc::MalformedHeader:
    case Errc::TruncatedData:
    case Errc::UnsupportedMaxval:
    case Errc::InvalidSample:
    case Errc::MalformedDictFile:
    case Errc::MalformedCodesFile:
      return kIo;
    default:
      return kDomain;
  }
}

// Thrown by command bodies for flag combinations CLI11 cannot express.
struct UsageError {
  std::string message;
};

std::string num(double v) { return fmt::format("{}", v); }

struct DictBuildArgs {
  std::string from_image;
  std::size_t block = 0;
  std::size_t atoms = 0;
  std::uint64_t seed = 0;
  bool dct = false;
  std::string out;
};

int cmd_dict_build(const DictBuildArgs& a, std::ostream& out) {
  if (a.dct == !a.from_image.empty()) throw UsageError{"give exactly one of --dct or --from-image"};
  if (a.block < 2) throw UsageError{"--block must be at least 2"};
  std::optional<Dictionary> dict;
  if (a.dct) {
    dict.emplace(build_dct(a.block));
  } else {
    if (a.atoms == 0) throw UsageError{"--from-image needs --atoms >= 1"};
    dict.emplace(build_random_patches(read_pgm_file(a.from_image), a.block, a.atoms, a.seed));
  }
  write_dictionary_file(*dict, a.out);
  out << fmt::format("atoms={} p={}\n", dict->size(), dict->atom_length());
  return kOk;
}

struct DecomposeArgs {
  std::string image;
  std::string dict;
  std::size_t sparsity = 0;
  std::string cost;
  std::string coeffs;
  std::string search = "greedy";
  std::string orientation = "max";
  std::string out;
  unsigned threads = 0;
};

int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.sparsity == 0) throw UsageError{"--sparsity must be at least 1"};
  const GrayImage img = read_pgm_file(a.image);
  const Dictionary dict = read_dictionary_file(a.dict);
  if (a.sparsity > dict.size()) {
    throw UsageError{fmt::format("--sparsity {} exceeds the {} dictionary atoms", a.sparsity, dict.size())};
  }
  if (!dict.block_edge()) {
    throw Error(Errc::DimensionMismatch, fmt::format("atom length {} is not a square block", dict.atom_length()));
  }
  DecomposeOptions opts;
  opts.sparsity = a.sparsity;
  opts.cost = *parse_cost_kind(a.cost);
  if (a.coeffs.empty()) {
    opts.coeffs = opts.cost == CostKind::SSIM ? CostKind::SSIM : CostKind::MSE;
  } else {
    opts.coeffs = *parse_cost_kind(a.coeffs);
  }
  opts.search = a.search == "exhaustive" ? SearchKind::exhaustive : SearchKind::greedy;
  opts.orientation = a.orientation == "min" ? Orientation::minimize : Orientation::maximize;
  opts.threads = a.threads;

  const DecomposeResult result = decompose_image(img, dict, opts);
  write_codes_file(result.codes, a.out);
  if (result.degenerate_blocks > 0) {
    err << fmt::format("warning: {} block(s) uncorrelated with every atom were stored offset-only\n",
                       result.degenerate_blocks);
  }
  out << fmt::format("mean_mse={} mean_ssim={} mean_pcc={}\n", num(result.mean_mse), num(result.mean_ssim),
                     num(result.mean_pcc));
  return kOk;
}

struct ReconstructArgs {
  std::string codes;
  std::string dict;
  std::string out;
  std::string format = "p5";
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  const CodesFile codes = read_codes_file(a.codes);
  const Dictionary dict = read_dictionary_file(a.dict);
  const GrayImage img = reconstruct_image(codes, dict);
  write_pgm_file(img, a.out, a.format == "p2" ? PgmFormat::P2 : PgmFormat::P5);
  out << fmt::format("width={} height={}\n", img.width, img.height);
  return kOk;
}

struct MetricsArgs {
  std::string ref;
  std::string test;
  std::size_t block = 0;
  double eps1 = kDefaultSsimEps1;
  double eps2 = kDefaultSsimEps2;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  if (a.block < 2) throw UsageError{"--block must be at least 2"};
  if (!(a.eps1 > 0.0) || !(a.eps2 > 0.0)) throw UsageError{"--eps1 and --eps2 must be positive"};
  const GrayImage ref = read_pgm_file(a.ref);
  const GrayImage test = read_pgm_file(a.test);
  if (ref.width != test.width || ref.height != test.height) {
    throw Error(Errc::DimensionMismatch, fmt::format("image sizes {}x{} and {}x{} differ", ref.width, ref.height,
                                                     test.width, test.height));
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < ref.pixels.size(); ++i) {
    const double d = test.pixels[i] - ref.pixels[i];
    sq += d * d;
  }
  const double image_mse = sq / static_cast<double>(ref.pixels.size());
  const double image_psnr =
      image_mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(255.0 * 255.0 / image_mse);

  const BlockGrid gr = tile(ref, a.block);
  const BlockGrid gt = tile(test, a.block);
  double ssim_sum = 0.0;
  double pcc_sum = 0.0;
  std::size_t pcc_count = 0;
  for (std::size_t b = 0; b < gr.blocks.size(); ++b) {
    ssim_sum += ssim_eps(gr.blocks[b], gt.blocks[b], a.eps1, a.eps2);
    if (!is_constant(gr.blocks[b]) && !is_constant(gt.blocks[b])) {
      pcc_sum += pcc(gr.blocks[b], gt.blocks[b]);
      ++pcc_count;
    }
  }
  const double mean_ssim = ssim_sum / static_cast<double>(gr.blocks.size());
  const double mean_pcc =
      pcc_count ? pcc_sum / static_cast<double>(pcc_count) : std::numeric_limits<double>::quiet_NaN();
  out << fmt::format("mse={} psnr={} mean_ssim={} mean_pcc={}\n", num(image_mse), num(image_psnr), num(mean_ssim),
                     num(mean_pcc));
  return kOk;
}

struct VerifyArgs {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::size_t atoms = 0;
  std::size_t sparsity = 0;
  std::size_t trials = 0;
  std::string dist = "gaussian";
  std::string check = "all";
  unsigned threads = 0;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  TrialConfig cfg;
  cfg.seed = a.seed;
  cfg.p = a.dim;
  cfg.n = a.atoms;
  cfg.m = a.sparsity;
  cfg.trials = a.trials;
  cfg.distribution = a.dist == "uniform" ? Distribution::uniform01 : Distribution::gaussian01;
  cfg.threads = a.threads;
  cfg.validate();

  static const std::map<std::string, std::vector<Check>> kChecks = {
      {"all", {Check::selection, Check::cost, Check::ratio, Check::identities}},
      {"selection", {Check::selection}},
      {"cost", {Check::cost}},
      {"ratio", {Check::ratio}},
      {"identities", {Check::identities}},
  };
  const AssocReport report = run_checks(cfg, kChecks.at(a.check));
  out << format_report(report);
  if (!report.ok()) {
    for (const CheckReport& c : report.checks) {
      if (c.pass == 0 && c.fail == 0) err << fmt::format("{}: every trial was skipped\n", c.name);
      if (!c.first_failure.empty()) err << fmt::format("{}: {}\n", c.name, c.first_failure);
    }
    return kCheckFailed;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse block decomposition under MSE, SSIM and correlation costs", "ssimdecomp"};
  app.require_subcommand(1);

  DictBuildArgs dict_args;
  auto* dict_cmd = app.add_subcommand("dict-build", "Build a dictionary from image patches or the DCT");
  dict_cmd->add_option("--from-image", dict_args.from_image, "Sample random patches from this PGM");
  dict_cmd->add_option("--block", dict_args.block, "Block edge l (atoms have l*l samples)")->required();
  dict_cmd->add_option("--atoms", dict_args.atoms, "Number of patches to sample");
  dict_cmd->add_option("--seed", dict_args.seed, "Patch sampling seed");
  dict_cmd->add_flag("--dct", dict_args.dct, "Use the l*l-1 non-DC DCT atoms");
  dict_cmd->add_option("--out", dict_args.out, "Output dictionary file")->required();

  DecomposeArgs dec_args;
  auto* dec_cmd = app.add_subcommand("decompose", "Decompose every block of an image");
  dec_cmd->add_option("--image", dec_args.image, "Input PGM")->required();
  dec_cmd->add_option("--dict", dec_args.dict, "Dictionary file")->required();
  dec_cmd->add_option("--sparsity", dec_args.sparsity, "Atoms per block")->required();
  dec_cmd->add_option("--cost", dec_args.cost, "Selection cost")
      ->required()
      ->check(CLI::IsMember({"mse", "ssim", "pcc"}));
  dec_cmd->add_option("--coeffs", dec_args.coeffs, "Coefficient scheme (default follows --cost)")
      ->check(CLI::IsMember({"mse", "ssim"}));
  dec_cmd->add_option("--search", dec_args.search, "Subset search")->check(CLI::IsMember({"greedy", "exhaustive"}));
  dec_cmd->add_option("--orientation", dec_args.orientation, "SSIM target +1 or -1")
      ->check(CLI::IsMember({"max", "min"}));
  dec_cmd->add_option("--out", dec_args.out, "Output codes file")->required();
  dec_cmd->add_option("--threads", dec_args.threads, "Worker threads (0 = all cores)");

  ReconstructArgs rec_args;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Rebuild an image from a codes file");
  rec_cmd->add_option("--codes", rec_args.codes, "Codes file")->required();
  rec_cmd->add_option("--dict", rec_args.dict, "Dictionary file")->required();
  rec_cmd->add_option("--out", rec_args.out, "Output PGM")->required();
  rec_cmd->add_option("--format", rec_args.format, "PGM flavour")->check(CLI::IsMember({"p2", "p5"}));

  MetricsArgs met_args;
  auto* met_cmd = app.add_subcommand("metrics", "Compare two images block by block");
  met_cmd->add_option("--ref", met_args.ref, "Reference PGM")->required();
  met_cmd->add_option("--test", met_args.test, "Test PGM")->required();
  met_cmd->add_option("--block", met_args.block, "Block edge")->required();
  met_cmd->add_option("--eps1", met_args.eps1, "SSIM luminance constant");
  met_cmd->add_option("--eps2", met_args.eps2, "SSIM contrast-structure constant");

  VerifyArgs ver_args;
  auto* ver_cmd = app.add_subcommand("verify", "Run the randomized association checks");
  ver_cmd->add_option("--seed", ver_args.seed, "Batch seed")->required();
  ver_cmd->add_option("--dim", ver_args.dim, "Block length p")->required();
  ver_cmd->add_option("--atoms", ver_args.atoms, "Atoms per trial")->required();
  ver_cmd->add_option("--sparsity", ver_args.sparsity, "Atoms per decomposition")->required();
  ver_cmd->add_option("--trials", ver_args.trials, "Number of trials")->required();
  ver_cmd->add_option("--dist", ver_args.dist, "Entry distribution")->check(CLI::IsMember({"uniform", "gaussian"}));
  ver_cmd->add_option("--check", ver_args.check, "Which check to run")
      ->check(CLI::IsMember({"all", "selection", "cost", "ratio", "identities"}));
  ver_cmd->add_option("--threads", ver_args.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dict_cmd->parsed()) return cmd_dict_build(dict_args, out);
    if (dec_cmd->parsed()) return cmd_decompose(dec_args, out, err);
    if (rec_cmd->parsed()) return cmd_reconstruct(rec_args, out);
    if (met_cmd->parsed()) return cmd_metrics(met_args, out);
    if (ver_cmd->parsed()) return cmd_verify(ver_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace ssimdecomp::cli
