#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "chandiv/dilation.hpp"
#include "chandiv/divisibility.hpp"
#include "chandiv/errors.hpp"
#include "chandiv/json_io.hpp"
#include "chandiv/lbdecomp.hpp"
#include "chandiv/lorentz.hpp"

namespace chandiv::cli {

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string generator;
  std::string to = "ptm";
  std::string format = "csv";
  std::string side = "left";
  double tol_eig = 1e-9;
  double tol_t = 1e-10;
  long long shots = 20000;
  std::uint64_t seed = 1;
  int trials = 10;
  double t_max = 0;  // 0: derive
  int steps = 101;
  int n = 2;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
  json detail = json::object();
};

struct Outcome {
  int code = 0;
  std::string text;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("chandiv", sink);
  log->set_pattern("[%l] %v");
  spdlog::level::level_enum lvl = spdlog::level::warn;
  if (const char* env = std::getenv("CHANDIV_LOG")) lvl = spdlog::level::from_str(env);
  log->set_level(lvl);
  return log;
}

json read_json(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing --") + what);
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& ex) {
    InputError e("malformed JSON in " + path + ": " + ex.what());
    e.detail = {{"path", path}, {"byte", ex.byte}};
    throw e;
  }
}

std::string error_type(const std::exception& ex) {
  if (dynamic_cast<const NotCompletelyPositive*>(&ex)) return "NotCompletelyPositive";
  if (dynamic_cast<const DimensionError*>(&ex)) return "DimensionError";
  if (dynamic_cast<const DegenerateFamily*>(&ex)) return "DegenerateFamily";
  if (dynamic_cast<const NoCrossing*>(&ex)) return "NoCrossing";
  if (dynamic_cast<const UnitaryInput*>(&ex)) return "UnitaryInput";
  if (dynamic_cast<const NormalFormError*>(&ex)) return "NormalFormError";
  if (dynamic_cast<const NotInfinitesimallyDivisible*>(&ex)) return "NotInfinitesimallyDivisible";
  if (dynamic_cast<const RankTooLarge*>(&ex)) return "RankTooLarge";
  if (dynamic_cast<const InvalidArgument*>(&ex)) return "InvalidArgument";
  return "Error";
}

json error_object(const std::exception& ex) {
  json e{{"type", error_type(ex)}, {"message", ex.what()}};
  if (const auto* ncp = dynamic_cast<const NotCompletelyPositive*>(&ex)) e["min_eigenvalue"] = num(ncp->min_eigenvalue());
  return {{"error", e}};
}

std::string label(ClassLabel c) {
  switch (c) {
    case ClassLabel::Indivisible:
      return "indivisible";
    case ClassLabel::DivisibleNonInfinitesimal:
      return "divisible_non_infinitesimal";
    case ClassLabel::InfinitesimallyDivisible:
      return "infinitesimally_divisible";
    case ClassLabel::Unitary:
      return "unitary";
    case ClassLabel::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Tolerances tolerances(const Options& o) {
  Tolerances t;
  t.eig_zero = o.tol_eig;
  t.t_tol = o.tol_t;
  t.validate();
  return t;
}

Side side_of(const Options& o) {
  if (o.side == "left") return Side::Left;
  if (o.side == "right") return Side::Right;
  throw InvalidArgument("--side must be left or right");
}


std::string text(const json& j) { return j.dump(2) + "\n"; }
json normal_form_json(const LorentzNormalForm& nf) {
  json j{{"kind", std::string(to_string(nf.kind))}, {"sigma", nullptr}, {"params", nullptr}};
  if (nf.kind == FormKind::Indeterminate) {
    j["reconstruction_error"] = nullptr;
    j["diagnostics"] = nf.diagnostics;
    return j;
  }
  if (nf.kind == FormKind::Diagonal) {
    json s = json::array();
    for (double x : nf.diagonal_entries) s.push_back(num(x));
    j["sigma"] = s;
  } else {
    j["params"] = {{"v", num(nf.params.v)}, {"x", num(nf.params.x)}, {"z", num(nf.params.z)}};
  }
  j["reconstruction_error"] = num(nf.reconstruction_error);
  j["t1"] = rmatrix_to_json(nf.t1);
  j["t2"] = rmatrix_to_json(nf.t2);
  return j;
}

json lb_json(const LBDecomposition& d, const ChannelRep& e) {
  return {{"t_min", num(d.t_min)},
          {"side", d.side == Side::Left ? "left" : "right"},
          {"generator", generator_to_json(d.generator)},
          {"boundary", channel_to_json(d.boundary, Representation::Ptm)},
          {"min_choi_eig_at_tmin", num(d.min_choi_eig_at_tmin)},
          {"bracket_hint", num(d.bracket_hint)},
          {"recomposition_error", num(recomposition_error(e, d))}};
}

std::vector<ChannelRep> rank2_chain(const ChannelRep& e, const Tolerances& tol) {
  if (kraus_rank(e, tol) <= 2) return {e};
  return factor_rank2(e, tol);
}

Outcome cmd_validate(const Options& o, spdlog::logger& log) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  log.info("validate: dim {} representation {}", e.dim(), to_string(e.representation()));
  const CpCheck cp = is_cp(e, tol);
  const bool tp = is_tp(e, tol);
  if (!cp.completely_positive) {
    NotCompletelyPositive ex("not completely positive: Choi matrix has a negative eigenvalue", cp.min_eigenvalue);
    return {2, text(error_object(ex))};
  }
  if (!tp) {
    InvalidArgument ex("not trace preserving: residual " + std::to_string(e.tp_residual()));
    return {2, text(error_object(ex))};
  }
  json j{{"valid", true},
         {"dim", e.dim()},
         {"completely_positive", true},
         {"trace_preserving", true},
         {"min_choi_eigenvalue", num(cp.min_eigenvalue)},
         {"tp_residual", num(e.tp_residual())},
         {"kraus_rank", kraus_rank(e, tol)}};
  return {0, text(j)};
}

Outcome cmd_convert(const Options& o, spdlog::logger&) {
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  const Representation r = representation_from_string(o.to);
  if (r == Representation::Kraus) require_channel(e, tolerances(o), "convert");
  return {0, text(channel_to_json(e, r))};
}

Outcome cmd_classify(const Options& o, spdlog::logger& log) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  const DivisibilityReport rep = classify(e, tol);
  log.info("classify: {} (Kraus rank {})", to_string(rep.label), rep.kraus_rank);
  json j{{"class", label(rep.label)}, {"kraus_rank", rep.kraus_rank}, {"eta_conditions", nullptr}};
  if (rep.eta_test) {
    json c = json::array();
    for (double x : rep.eta_test->conditions) c.push_back(num(x));
    j["eta_conditions"] = c;
  }
  json w = json::object();
  if (rep.normal_form) w["normal_form"] = normal_form_json(*rep.normal_form);
  w["markovian_candidate"] = rep.markovian_candidate;
  if (rep.lb_witness) {
    w["lb_decomposition"] = lb_json(*rep.lb_witness, e);
    w["boundary_class"] = label(*rep.boundary_label);
  }
  if (!rep.factors.empty()) {
    json fs = json::array();
    for (const auto& f : rep.factors) fs.push_back(channel_to_json(f, Representation::Ptm));
    w["rank2_factors"] = fs;
  }
  if (rep.eta_test) {
    json s = json::array();
    for (int x : rep.eta_test->signs) s.push_back(x);
    w["pauli_signs"] = s;
  }
  if (!rep.note.empty()) w["note"] = rep.note;
  j["witness"] = w;
  return {rep.label == ClassLabel::Indeterminate ? 3 : 0, text(j)};
}

Outcome cmd_decompose(const Options& o, spdlog::logger& log) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  LbOptions opts;
  opts.side = side_of(o);
  if (o.t_max > 0) opts.t_max = o.t_max;
  LBDecomposition d = [&] {
    if (!o.generator.empty()) return lb_decompose(e, generator_from_json(read_json(o.generator, "generator"), tol), tol, opts);
    if (opts.side == Side::Left && !opts.t_max) return lb_decompose_auto(e, tol);
    const GeneratorChoice g = select_generator(e, tol);
    if (!opts.t_max && g.bracket_hint > 0) opts.t_max = 10 * g.bracket_hint;
    return lb_decompose(e, g.generator, tol, opts);
  }();
  log.info("decompose-lb: t_min {}", d.t_min);
  return {0, text(lb_json(d, e))};
}

Outcome cmd_normal_form(const Options& o, spdlog::logger&) {
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  const LorentzNormalForm nf = normal_form(e, tolerances(o));
  return {nf.kind == FormKind::Indeterminate ? 3 : 0, text(normal_form_json(nf))};
}

Outcome cmd_factor(const Options& o, spdlog::logger&) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  const auto fs = factor_rank2(e, tol);
  json list = json::array(), ranks = json::array();
  for (const auto& f : fs) {
    list.push_back(channel_to_json(f, Representation::Ptm));
    ranks.push_back(kraus_rank(f, tol));
  }
  const double err = (compose_all(fs).superop() - e.superop()).norm();
  return {0, text({{"factors", list}, {"kraus_ranks", ranks}, {"recomposition_error", num(err)}})};
}

Outcome cmd_dilate(const Options& o, spdlog::logger&) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  const DilationCircuit c = build_circuit(rank2_chain(e, tol), tol);
  json stages = json::array();
  for (const auto& s : c.stages)
    stages.push_back({{"unitary", cmatrix_to_json(s.unitary)}, {"reset_ancilla_after", s.reset_ancilla_after}});
  const double err = (simulate_exact(c).superop() - e.superop()).norm();
  return {0, text({{"ordering", "ancilla_system"}, {"stages", stages}, {"simulation_error", num(err)}})};
}

Outcome cmd_tomography(const Options& o, spdlog::logger& log) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  if (o.shots < 0) throw InvalidArgument("--shots must be >= 0 (0 selects exact probabilities)");
  if (o.trials < 1) throw InvalidArgument("--trials must be >= 1");
  const DilationCircuit c = build_circuit(rank2_chain(e, tol), tol);
  const CMatrix target = e.choi();
  std::vector<double> fid;
  bool clipped = false;
  for (int k = 0; k < o.trials; ++k) {
    const TomographyResult r = simulate_tomography(c, o.shots, o.seed + static_cast<std::uint64_t>(k));
    const Fidelity f = choi_fidelity(target, r.reconstructed_choi);
    clipped = clipped || f.clipped;
    fid.push_back(f.value);
    log.debug("trial {} fidelity {}", k, f.value);
  }
  std::vector<double> sorted = fid;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2;
  const double mean = std::accumulate(fid.begin(), fid.end(), 0.0) / static_cast<double>(m);
  json fj = json::array();
  for (double f : fid) fj.push_back(num(f));
  json j{{"shots", o.shots},
         {"seed", o.seed},
         {"trials", o.trials},
         {"fidelities", fj},
         {"summary", {{"min", num(sorted.front())}, {"median", num(median)}, {"mean", num(mean)}, {"max", num(sorted.back())}}},
         {"clipped", clipped}};
  return {0, text(j)};
}

Outcome cmd_scan(const Options& o, spdlog::logger&) {
  const Tolerances tol = tolerances(o);
  const ChannelRep e = channel_from_json(read_json(o.input, "input"));
  std::optional<LindbladGenerator> g;
  double t_max = o.t_max;
  if (!o.generator.empty()) {
    g = generator_from_json(read_json(o.generator, "generator"), tol);
  } else {
    const GeneratorChoice c = select_generator(e, tol);
    g = c.generator;
    if (t_max <= 0 && c.bracket_hint > 0) t_max = 2 * c.bracket_hint;
  }
  if (t_max <= 0) t_max = 5.0;
  const auto rows = crossing_scan(e, *g, t_max, o.steps, side_of(o), tol);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"t", num(r.t)}, {"min_choi_eig", num(r.min_choi_eig)}, {"det", num(r.det)}, {"is_cp", r.is_cp}});
    return {0, text(arr)};
  }
  if (o.format != "csv") throw InvalidArgument("--format must be json or csv");
  std::ostringstream s;
  s << "t,min_choi_eig,det,is_cp\n";
  s.precision(12);
  for (const auto& r : rows) s << r.t << ',' << r.min_choi_eig << ',' << r.det << ',' << (r.is_cp ? 1 : 0) << '\n';
  return {0, s.str()};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divisibility analysis of quantum channels", "chandiv"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", o.input, "channel spec (JSON)");
    sub->add_option("--output,-o", o.output, "write the result here instead of stdout");
    sub->add_option("--tol-eig", o.tol_eig, "Choi eigenvalue zero threshold");
    sub->add_option("--tol-t", o.tol_t, "bisection tolerance on t");
  };
  using Handler = Outcome (*)(const Options&, spdlog::logger&);
  std::vector<std::pair<CLI::App*, Handler>> cmds;
  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    cmds.emplace_back(sub, h);
    return sub;
  };
  add("validate", "check that the input is a CPTP map", cmd_validate);
  add("convert", "rewrite the channel in another representation", cmd_convert)
      ->add_option("--to", o.to, "ptm|choi|kraus|superop");
  add("classify", "divisibility class of a qubit channel", cmd_classify);
  {
    CLI::App* s = add("decompose-lb", "E = e^L E_boundary", cmd_decompose);
    s->add_option("--generator,-g", o.generator, "generator spec (JSON)");
    s->add_option("--t-max", o.t_max, "scan horizon");
    s->add_option("--side", o.side, "left|right");
  }
  add("normal-form", "Lorentz normal form of a qubit channel", cmd_normal_form);
  add("factor-rank2", "factorization into Kraus rank <= 2 channels", cmd_factor);
  add("dilate", "one-ancilla circuit for the channel", cmd_dilate);
  {
    CLI::App* s = add("simulate-tomography", "sampled process tomography of the dilation circuit", cmd_tomography);
    s->add_option("--shots", o.shots, "shots per setting, 0 for exact probabilities");
    s->add_option("--seed", o.seed, "seed of the first trial");
    s->add_option("--trials", o.trials, "number of tomography runs");
  }
  {
    CLI::App* s = add("scan", "min Choi eigenvalue along F_t", cmd_scan);
    s->add_option("--generator,-g", o.generator, "generator spec (JSON)");
    s->add_option("--t-max", o.t_max, "scan horizon");
    s->add_option("--steps", o.steps, "grid points");
    s->add_option("--side", o.side, "left|right");
    s->add_option("--format", o.format, "csv|json");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 1;
  }

  auto log = make_logger(err);
  Outcome res;
  try {
    if (!o.output.empty()) {
      std::ofstream probe(o.output, std::ios::app);
      if (!probe) throw InputError("cannot write " + o.output);
    }
    for (const auto& [sub, handler] : cmds)
      if (sub->parsed()) res = handler(o, *log);
  } catch (const InputError& ex) {
    json e{{"error", {{"type", "InputError"}, {"message", ex.what()}}}};
    for (const auto& [k, v] : ex.detail.items()) e["error"][k] = v;
    log->error("{}", ex.what());
    res = {1, text(e)};
  } catch (const Error& ex) {
    log->error("{}", ex.what());
    res = {2, text(error_object(ex))};
  }

  if (!o.output.empty() && res.code != 1) {
    std::ofstream f(o.output);
    f << res.text;
  } else {
    out << res.text;
  }
  return res.code;
}

}  // namespace chandiv::cli
