#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maj/classical.hpp"
#include "maj/errors.hpp"
#include "maj/io.hpp"
#include "maj/itpfi.hpp"
#include "maj/locc.hpp"
#include "maj/quantum.hpp"
#include "maj/stepfn.hpp"

namespace {

using maj::io::json;

struct Common {
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--tol", c.tol, "numerical tolerance")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", c.out, "write output to this file instead of stdout");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    maj::io::save_text(c.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string stem(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

// Named built-in scales accepted wherever a distribution file is expected.
std::optional<maj::StepFunction> builtin_scale(const std::string& name) {
  if (name == "bell") return maj::StepFunction{{{0.5, 2.0}}};
  if (name == "point") return maj::StepFunction{{{1.0, 1.0}}};
  return std::nullopt;
}

maj::StepFunction scale_arg(const std::string& arg) {
  if (auto s = builtin_scale(arg)) return *s;
  return maj::io::any_scale_from_json(maj::io::load_json(arg));
}

std::vector<int> parse_n_list(const std::vector<std::string>& specs) {
  std::vector<int> ns;
  for (const std::string& spec : specs) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::size_t dots = part.find("..");
      if (dots != std::string::npos) {
        int lo = std::stoi(part.substr(0, dots));
        int hi = std::stoi(part.substr(dots + 2));
        if (lo < 1 || hi < lo) throw maj::InputError("bad n range " + part);
        for (int n = lo; n <= hi; ++n) ns.push_back(n);
      } else {
        ns.push_back(std::stoi(part));
      }
    }
  }
  if (ns.empty()) throw maj::InputError("empty n list");
  return ns;
}

std::string g17(double x) { return maj::io::format_g17(x); }

int cmd_lorenz(const Common& c, const std::string& input) {
  maj::StepFunction s = scale_arg(input);
  maj::LorenzCurve curve = maj::lorenz(s);
  if (c.format == "csv") {
    std::string text = "t,L\n";
    for (std::size_t i = 0; i < curve.knots_t.size(); ++i)
      text += g17(curve.knots_t[i]) + "," + g17(curve.knots_L[i]) + "\n";
    emit(c, text);
  } else {
    emit(c, dump(maj::io::lorenz_to_json(curve)));
  }
  return 0;
}

int cmd_majorize(const Common& c, const std::string& fa, const std::string& fb,
                 bool strict) {
  maj::StepFunction a = scale_arg(fa), b = scale_arg(fb);
  bool fwd_sub = maj::dominates(a, b, c.tol);
  bool bwd_sub = maj::dominates(b, a, c.tol);
  bool equal_int =
      std::abs(a.integral() - b.integral()) <= c.tol * std::max(1.0, a.integral());
  bool fwd = strict ? fwd_sub && equal_int : fwd_sub;
  std::string na = stem(fa), nb = stem(fb);
  std::string rel;
  if (fwd_sub && bwd_sub)
    rel = na + " ≈ " + nb;
  else if (fwd_sub)
    rel = na + (equal_int ? " ≻ " : " ≻_w ") + nb;
  else if (bwd_sub)
    rel = nb + (equal_int ? " ≻ " : " ≻_w ") + na;
  else
    rel = na + " and " + nb + " are incomparable";
  if (c.format == "csv") {
    emit(c, "relation,forward,backward,equal_integrals\n\"" + rel + "\"," +
                (fwd_sub ? "1" : "0") + "," + (bwd_sub ? "1" : "0") + "," +
                (equal_int ? "1" : "0") + "\n");
  } else {
    emit(c, dump(json{{"relation", rel},
                      {"forward", fwd_sub},
                      {"backward", bwd_sub},
                      {"equal_integrals", equal_int},
                      {"holds", fwd}}));
  }
  return fwd ? 0 : 1;
}

bool density_like(const json& j) {
  return maj::io::detect(j) == maj::io::Payload::DensityLike;
}

int cmd_synth(const Common& c, const std::string& fa, const std::string& fb,
              bool strict) {
  json ja = maj::io::load_json(fa), jb = maj::io::load_json(fb);
  if (density_like(ja) || density_like(jb)) {
    maj::Density rho = maj::io::density_from_json(ja);
    maj::Density sigma = maj::io::density_from_json(jb);
    if (strict && !maj::q_majorizes(rho, sigma, c.tol))
      throw maj::NotMajorized("the source does not majorize the target");
    maj::KrausChannel ch = maj::synthesize_dss_channel(rho, sigma, c.tol);
    emit(c, dump(maj::io::channel_to_json(ch)));
    return 0;
  }
  maj::WeightedVector a = maj::io::weighted_from_json(ja);
  maj::WeightedVector b = maj::io::weighted_from_json(jb);
  maj::StochasticMap m = strict ? maj::synthesize_ds(a, b, c.tol)
                                : maj::synthesize_dss(a, b, c.tol);
  if (c.format == "csv") {
    std::string text;
    for (Eigen::Index r = 0; r < m.matrix.rows(); ++r) {
      for (Eigen::Index k = 0; k < m.matrix.cols(); ++k)
        text += (k ? "," : "") + g17(m.matrix(r, k));
      text += "\n";
    }
    emit(c, text);
  } else {
    emit(c, dump(maj::io::map_to_json(m)));
  }
  return 0;
}

int cmd_convert(const Common& c, const std::string& fpsi,
                const std::string& fphi, const std::string& proto_out) {
  maj::BipartitePureState psi =
      maj::io::state_from_json(maj::io::load_json(fpsi));
  maj::BipartitePureState phi =
      maj::io::state_from_json(maj::io::load_json(fphi));
  bool ok = maj::locc_convertible(psi, phi, c.tol);
  double fid = maj::locc_conversion_fidelity(psi, phi);
  if (ok && !proto_out.empty()) {
    maj::LoccProtocol p = maj::synthesize_nielsen_protocol(psi, phi, c.tol);
    maj::io::save_text(proto_out, dump(maj::io::protocol_to_json(p)));
  }
  if (c.format == "csv")
    emit(c, "convertible,fidelity\n" + std::string(ok ? "1" : "0") + "," +
                g17(fid) + "\n");
  else
    emit(c, dump(json{{"convertible", ok}, {"fidelity", fid}}));
  return ok ? 0 : 1;
}

int cmd_simulate(const Common& c, const std::string& fpsi,
                 const std::string& fproto, const std::string& ftarget) {
  maj::BipartitePureState psi =
      maj::io::state_from_json(maj::io::load_json(fpsi));
  maj::LoccProtocol p = maj::io::protocol_from_json(maj::io::load_json(fproto));
  std::vector<maj::SimBranch> branches = maj::simulate_protocol(psi, p);
  std::optional<maj::BipartitePureState> target;
  if (!ftarget.empty())
    target = maj::io::state_from_json(maj::io::load_json(ftarget));
  double total = 0.0;
  for (const maj::SimBranch& b : branches) total += b.probability;
  if (c.format == "csv") {
    std::string text = target ? "transcript,probability,overlap\n"
                              : "transcript,probability\n";
    for (const maj::SimBranch& b : branches) {
      std::string t;
      for (std::size_t i = 0; i < b.transcript.size(); ++i)
        t += (i ? "/" : "") + b.transcript[i];
      text += "\"" + t + "\"," + g17(b.probability);
      if (target) text += "," + g17(maj::overlap_with(*target, b.state));
      text += "\n";
    }
    emit(c, text);
  } else {
    json arr = json::array();
    for (const maj::SimBranch& b : branches) {
      json jb{{"transcript", b.transcript},
              {"probability", b.probability},
              {"state", maj::io::matrix_to_json(b.state)}};
      if (target) jb["overlap"] = maj::overlap_with(*target, b.state);
      arr.push_back(std::move(jb));
    }
    emit(c, dump(json{{"branches", std::move(arr)},
                      {"total_probability", total}}));
  }
  return 0;
}

int cmd_monotones(const Common& c, const std::string& fpsi,
                  std::vector<double> alphas) {
  maj::BipartitePureState psi =
      maj::io::state_from_json(maj::io::load_json(fpsi));
  if (alphas.empty()) alphas = {0.0, 0.5, 1.0, 2.0};
  maj::MonotoneReport rep = maj::monotones(psi, alphas);
  if (c.format == "csv") {
    std::string text = "alpha,entropy\n";
    for (std::size_t i = 0; i < rep.alphas.size(); ++i)
      text += g17(rep.alphas[i]) + "," + g17(rep.renyi[i]) + "\n";
    emit(c, text);
  } else {
    emit(c, dump(json{{"alphas", rep.alphas},
                      {"entropies", rep.renyi},
                      {"schmidt_rank", rep.traced_rank},
                      {"lorenz", maj::io::lorenz_to_json(rep.lorenz)}}));
  }
  return 0;
}

int cmd_slocc(const Common& c, const std::string& fpsi,
              const std::string& fphi) {
  maj::BipartitePureState psi =
      maj::io::state_from_json(maj::io::load_json(fpsi));
  maj::BipartitePureState phi =
      maj::io::state_from_json(maj::io::load_json(fphi));
  bool ok = maj::slocc_convertible(psi, phi, c.tol);
  double f2 = maj::slocc_fidelity(psi, phi);
  if (c.format == "csv")
    emit(c, "convertible,fidelity_sq,fidelity\n" +
                std::string(ok ? "1" : "0") + "," + g17(f2) + "," +
                g17(std::sqrt(f2)) + "\n");
  else
    emit(c, dump(json{{"convertible", ok},
                      {"fidelity_sq", f2},
                      {"fidelity", std::sqrt(f2)}}));
  return ok ? 0 : 1;
}

int cmd_powers(const Common& c, double lambda,
               const std::vector<std::string>& nspecs, std::string mode,
               const std::string& source, const std::string& target,
               const std::string& config, int restarts, int iters) {
  std::uint64_t seed = c.seed;
  std::vector<int> ns = nspecs.empty() ? std::vector<int>{}
                                       : parse_n_list(nspecs);
  maj::StepFunction src{{{1.0, 1.0}}};
  maj::StepFunction tgt{{{0.5, 2.0}}};
  if (!source.empty()) src = scale_arg(source);
  if (!target.empty()) tgt = scale_arg(target);
  if (!config.empty()) {
    json j = maj::io::load_json(config);
    if (j.contains("lambda")) lambda = j["lambda"].get<double>();
    if (j.contains("n_list")) {
      ns.clear();
      for (const json& e : j["n_list"]) ns.push_back(e.get<int>());
    }
    if (j.contains("targets")) {
      const json& t = j["targets"];
      auto one = [](const json& e) {
        return e.is_string() ? scale_arg(e.get<std::string>())
                             : maj::io::any_scale_from_json(e);
      };
      if (t.is_array() && t.size() == 2) {
        src = one(t[0]);
        tgt = one(t[1]);
      } else if (t.is_array() && t.size() == 1) {
        tgt = one(t[0]);
      } else {
        tgt = one(t);
      }
    }
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("restarts")) restarts = j["restarts"].get<int>();
  }
  if (ns.empty()) ns = {1, 2, 4, 8, 12, 16, 20};

  if (mode == "distill") {
    if (ns.size() != 1)
      throw maj::InputError("distill mode takes a single n");
    maj::StepFunction out = maj::distill_target_scale(src, ns[0]);
    if (c.format == "csv") {
      std::string text = "value,width\n";
      for (const maj::Piece& p : out.pieces)
        text += g17(p.value) + "," + g17(p.width) + "\n";
      emit(c, text);
    } else {
      emit(c, dump(maj::io::scale_to_json(out)));
    }
    return 0;
  }

  // Trend mode. The beta column is the single-pair CHSH value of the
  // lambda state, constant down the column.
  std::vector<std::pair<int, double>> trend =
      maj::trivialization_trend(lambda, src, tgt, ns);
  double norm = 1.0 + lambda;
  Eigen::VectorXcd pair(4);
  pair.setZero();
  pair[0] = 1.0 / std::sqrt(norm);
  pair[3] = std::sqrt(lambda / norm);
  Eigen::MatrixXcd rho = pair * pair.adjoint();
  maj::SeesawOptions sopt;
  sopt.restarts = restarts;
  sopt.iters = iters;
  sopt.seed = seed;
  double beta = maj::chsh_seesaw(rho, 2, 2, sopt);
  if (c.format == "csv") {
    std::string text = "n,fidelity,beta\n";
    for (auto [n, f] : trend)
      text += std::to_string(n) + "," + g17(f) + "," + g17(beta) + "\n";
    emit(c, text);
  } else {
    json rows = json::array();
    for (auto [n, f] : trend)
      rows.push_back(json{{"n", n}, {"fidelity", f}, {"beta", beta}});
    emit(c, dump(json{{"lambda", lambda}, {"rows", std::move(rows)}}));
  }
  return 0;
}

int cmd_bell(const Common& c, const std::string& input, int restarts,
             int iters, std::vector<int> dims) {
  json j = maj::io::load_json(input);
  Eigen::MatrixXcd rho;
  int da = 0, db = 0;
  if (maj::io::detect(j) == maj::io::Payload::State) {
    maj::BipartitePureState psi = maj::io::state_from_json(j);
    Eigen::VectorXcd v = maj::state_vector(psi);
    rho = v * v.adjoint();
    da = psi.dim_a();
    db = psi.dim_b();
  } else {
    maj::Density d = maj::io::density_from_json(j);
    if (!d.matrix_backed)
      throw maj::InputError("bell needs a matrix-backed density or a state");
    rho = d.matrix;
    if (dims.size() != 2)
      throw maj::InputError("bell needs --dims da db for a density input");
    da = dims[0];
    db = dims[1];
  }
  maj::SeesawOptions sopt;
  sopt.restarts = restarts;
  sopt.iters = iters;
  sopt.seed = c.seed;
  double beta = maj::chsh_seesaw(rho, da, db, sopt);
  if (c.format == "csv")
    emit(c, "beta\n" + g17(beta) + "\n");
  else
    emit(c, dump(json{{"beta", beta}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"majorization calculus, LOCC synthesis, and factor-model experiments"};
  app.require_subcommand(1);
  Common c;

  std::string in_a, in_b, proto_out, target_file, source_file, config_file;
  std::string mode = "trend";
  bool strict = false;
  std::vector<double> alphas;
  std::vector<std::string> nspecs;
  std::vector<int> dims;
  double lambda = 0.5;
  int restarts = 16, iters = 200;

  CLI::App* lorenz = app.add_subcommand("lorenz", "Lorenz curve of a distribution");
  lorenz->add_option("input", in_a)->required();
  add_common(lorenz, c);

  CLI::App* majorize = app.add_subcommand("majorize", "decide majorization order");
  majorize->add_option("a", in_a)->required();
  majorize->add_option("b", in_b)->required();
  majorize->add_flag("--strict", strict, "require equal integrals");
  add_common(majorize, c);

  CLI::App* sds = app.add_subcommand("synth-ds", "synthesize a doubly stochastic witness");
  sds->add_option("source", in_a)->required();
  sds->add_option("target", in_b)->required();
  add_common(sds, c);

  CLI::App* sdss = app.add_subcommand("synth-dss", "synthesize a doubly substochastic witness");
  sdss->add_option("source", in_a)->required();
  sdss->add_option("target", in_b)->required();
  add_common(sdss, c);

  CLI::App* convert = app.add_subcommand("convert", "decide pure-state convertibility");
  convert->add_option("source", in_a)->required();
  convert->add_option("target", in_b)->required();
  convert->add_option("--protocol", proto_out, "write the protocol here");
  add_common(convert, c);

  CLI::App* simulate = app.add_subcommand("simulate", "run a protocol on a state");
  simulate->add_option("state", in_a)->required();
  simulate->add_option("protocol", in_b)->required();
  simulate->add_option("--target", target_file, "report overlap with this state");
  add_common(simulate, c);

  CLI::App* monotones = app.add_subcommand("monotones", "entanglement monotone table");
  monotones->add_option("state", in_a)->required();
  monotones->add_option("--alpha", alphas, "entropy orders");
  add_common(monotones, c);

  CLI::App* slocc = app.add_subcommand("slocc", "stochastic convertibility and fidelity");
  slocc->add_option("source", in_a)->required();
  slocc->add_option("target", in_b)->required();
  add_common(slocc, c);

  CLI::App* powers = app.add_subcommand("powers", "product-state catalysis experiments");
  powers->add_option("--lambda", lambda, "one-site weight ratio");
  powers->add_option("--n", nspecs, "copy counts, e.g. 1,2,4 or 1..8");
  powers->add_option("--mode", mode)->check(CLI::IsMember({"trend", "distill"}));
  powers->add_option("--source", source_file, "source scale (file, bell, point)");
  powers->add_option("--target", target_file, "target scale (file, bell, point)");
  powers->add_option("--config", config_file, "experiment config JSON");
  powers->add_option("--restarts", restarts);
  powers->add_option("--iters", iters);
  add_common(powers, c);

  CLI::App* bell = app.add_subcommand("bell", "best CHSH value by seesaw");
  bell->add_option("input", in_a)->required();
  bell->add_option("--dims", dims, "local dimensions for a density input")->expected(2);
  bell->add_option("--restarts", restarts);
  bell->add_option("--iters", iters);
  add_common(bell, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (lorenz->parsed()) return cmd_lorenz(c, in_a);
    if (majorize->parsed()) return cmd_majorize(c, in_a, in_b, strict);
    if (sds->parsed()) return cmd_synth(c, in_a, in_b, true);
    if (sdss->parsed()) return cmd_synth(c, in_a, in_b, false);
    if (convert->parsed()) return cmd_convert(c, in_a, in_b, proto_out);
    if (simulate->parsed()) return cmd_simulate(c, in_a, in_b, target_file);
    if (monotones->parsed()) return cmd_monotones(c, in_a, alphas);
    if (slocc->parsed()) return cmd_slocc(c, in_a, in_b);
    if (powers->parsed())
      return cmd_powers(c, lambda, nspecs, mode, source_file, target_file,
                        config_file, restarts, iters);
    if (bell->parsed()) return cmd_bell(c, in_a, restarts, iters, dims);
  } catch (const maj::NotMajorized& e) {
    std::cerr << "not majorized: " << e.what() << "\n";
    return 1;
  } catch (const maj::NotSubmajorized& e) {
    std::cerr << "not submajorized: " << e.what() << "\n";
    return 1;
  } catch (const maj::NotConvertible& e) {
    std::cerr << "not convertible: " << e.what() << "\n";
    return 1;
  } catch (const maj::NotExtendable& e) {
    std::cerr << "not extendable: " << e.what() << "\n";
    return 1;
  } catch (const maj::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const maj::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
