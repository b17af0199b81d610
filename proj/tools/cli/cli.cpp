#include "cli.hpp"

#include "amalgam/errors.hpp"
#include "amalgam/spec_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef AMALGAM_VERSION
#define AMALGAM_VERSION "0.0.0"
#endif

namespace amalgam::cli {

namespace {

using io::json;

// Problems with the invocation itself rather than with the inputs' math.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Result {
  json doc;
  std::string text;
  int code = kOk;
};

struct Context {
  std::vector<std::string> args;
  int max_n = nc::kDefaultMaxN;

  json header(std::optional<std::uint64_t> seed = std::nullopt) const {
    return {{"version", AMALGAM_VERSION},
            {"command_line", args},
            {"seed", seed ? json(*seed) : json(nullptr)}};
  }

  void require_lattice(std::size_t n, const std::string& what) const {
    if (n > static_cast<std::size_t>(max_n)) {
      throw UsageError(what + " needs NC(" + std::to_string(n) + "), above the safety cap " + std::to_string(max_n) +
                       " (raise it with --max-n or AMALGAM_MAX_N)");
    }
  }
};

int resolve_max_n(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("AMALGAM_MAX_N"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 64) throw UsageError(std::string("invalid AMALGAM_MAX_N '") + env + "'");
    return static_cast<int>(v);
  }
  return nc::kDefaultMaxN;
}

std::string tuple_text(const IndexTuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::to_string(t[i]);
  return out + ")";
}

std::string basis_text(std::size_t d, const std::vector<std::size_t>& basis) {
  std::string out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out += (i ? "," : "") + std::string("E") + std::to_string(basis[i] / d + 1) + std::to_string(basis[i] % d + 1);
  }
  return out;
}

std::string spec_text(const SeriesTable& t, SeriesKind kind) {
  std::vector<const std::pair<const IndexTuple, MultilinearMap>*> items;
  for (const auto& item : t.entries()) items.push_back(&item);
  std::stable_sort(items.begin(), items.end(), [](const auto* a, const auto* b) {
    if (a->first.size() != b->first.size()) return a->first.size() < b->first.size();
    return a->first < b->first;
  });
  std::ostringstream out;
  out << io::kind_name(kind) << " spec: d=" << t.dim() << " s=" << t.variables() << " N=" << t.truncation() << ", "
      << items.size() << " nonzero coefficients\n";
  for (const auto* item : items) {
    const MultilinearMap& m = item->second;
    out << tuple_text(item->first) << '\n';
    for (std::size_t flat = 0; flat < m.input_count(); ++flat) {
      const BMatrix col = m.column(flat);
      if (col.is_zero()) continue;
      const auto basis = decode_tuple(t.dim(), m.arity(), flat);
      out << "  " << (basis.empty() ? std::string("value") : "at " + basis_text(t.dim(), basis)) << ": "
          << col.to_string() << '\n';
    }
  }
  return out.str();
}

Result spec_result(const SeriesTable& t, SeriesKind kind) { return {io::spec_to_json(t, kind), spec_text(t, kind)}; }

json named(const std::string& name, const Verdict& v) {
  json out = io::verdict_to_json(v);
  out["name"] = name;
  return out;
}

// --- nc ---------------------------------------------------------------------

struct NcOptions {
  int n = 0;
  bool even = false;
  bool kreweras = false;
  bool mobius = false;
};

Result cmd_nc(const NcOptions& o, const Context& ctx) {
  if (o.n < 1) throw UsageError("--n must be positive");
  ctx.require_lattice(static_cast<std::size_t>(o.n), "nc --n " + std::to_string(o.n));
  const auto& lattice = nc::NcLattice::get(o.n, ctx.max_n);
  const auto& elements = lattice.elements();
  Result r;
  r.doc = ctx.header();
  r.doc["command"] = "nc";
  r.doc["n"] = o.n;
  r.doc["count"] = elements.size();
  json parts = json::array();
  for (const auto& p : elements) parts.push_back(p.blocks());
  r.doc["partitions"] = std::move(parts);
  std::ostringstream text;
  text << "NC(" << o.n << "): " << elements.size() << " partitions\n";
  for (const auto& p : elements) text << "  " << p.to_string() << '\n';
  if (o.even) {
    std::vector<nc::SetPartition> even;
    if (o.n % 2 == 0) even = nc::enumerate_nc_even(o.n, ctx.max_n);
    json list = json::array();
    for (const auto& p : even) list.push_back(p.blocks());
    r.doc["even"] = {{"count", even.size()}, {"partitions", std::move(list)}};
    text << "even blocks only: " << even.size() << " partitions\n";
    for (const auto& p : even) text << "  " << p.to_string() << '\n';
  }
  if (o.kreweras) {
    json table = json::array();
    text << "Kreweras complements\n";
    for (const auto& p : elements) {
      const auto k = nc::kreweras(p);
      table.push_back({{"partition", p.blocks()}, {"complement", k.blocks()}});
      text << "  " << p.to_string() << " -> " << k.to_string() << '\n';
    }
    r.doc["kreweras"] = std::move(table);
  }
  if (o.mobius) {
    json table = json::array();
    text << "mu(pi, 1_" << o.n << ")\n";
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const Rational& mu = lattice.mobius_to_top(i);
      table.push_back({{"partition", elements[i].blocks()}, {"mu", to_string(mu)}});
      text << "  " << elements[i].to_string() << ": " << to_string(mu) << '\n';
    }
    r.doc["mobius"] = std::move(table);
  }
  r.text = text.str();
  return r;
}

// --- transforms -------------------------------------------------------------

struct SpecOrderOptions {
  std::string spec;
  std::size_t order = 0;
};

Result cmd_moments(const SpecOrderOptions& o, const Context& ctx) {
  ctx.require_lattice(o.order, "moments to order " + std::to_string(o.order));
  const auto c = io::load_spec(o.spec).cumulants();
  return spec_result(moments_from_cumulants(c, o.order), SeriesKind::moment);
}

Result cmd_cumulants(const SpecOrderOptions& o, const Context& ctx) {
  ctx.require_lattice(o.order, "cumulants to order " + std::to_string(o.order));
  const auto m = io::load_spec(o.spec).moments();
  return spec_result(cumulants_from_moments(m, o.order), SeriesKind::cumulant);
}

JointCumulantSpec as_cumulants(const io::SpecFile& f, std::size_t order) {
  if (f.kind == SeriesKind::cumulant) return f.cumulants();
  return cumulants_from_moments(f.moments(), order);
}

JointMomentSpec as_moments(const io::SpecFile& f, std::size_t order) {
  if (f.kind == SeriesKind::moment) return f.moments();
  return moments_from_cumulants(f.cumulants(), order);
}

// --- diagnostics ------------------------------------------------------------

Result verdict_result(const Context& ctx, const std::string& command, const SpecOrderOptions& o, const Verdict& v) {
  Result r;
  r.doc = ctx.header();
  r.doc["command"] = command;
  r.doc["spec"] = o.spec;
  r.doc["order"] = o.order;
  r.doc["verdict"] = io::verdict_to_json(v);
  r.text = command + " order " + std::to_string(o.order) + ": " + io::verdict_to_text(v) + "\n";
  r.code = v.pass ? kOk : kDiagnosticFailed;
  return r;
}

struct CheckEvenOptions {
  SpecOrderOptions base;
  int var = 1;
  bool formula = false;
};

Result cmd_check_even(const CheckEvenOptions& o, const Context& ctx) {
  ctx.require_lattice(o.base.order, "check-even to order " + std::to_string(o.base.order));
  const auto f = io::load_spec(o.base.spec);
  const Verdict v = f.kind == SeriesKind::cumulant ? is_b_even(f.cumulants(), o.var, o.base.order)
                                                   : is_b_even(f.moments(), o.var, o.base.order);
  Result r = verdict_result(ctx, "check-even", o.base, v);
  r.doc["var"] = o.var;
  if (o.formula && v.pass) {
    const auto u = as_cumulants(f, o.base.order);
    json list = json::array();
    for (std::size_t k = 1; 2 * k <= o.base.order; ++k) {
      const Verdict fv = check_even_moment_formula(u, o.var, k);
      json item = io::verdict_to_json(fv);
      item["k"] = k;
      list.push_back(std::move(item));
      r.text += "even-partition formula k=" + std::to_string(k) + ": " + io::verdict_to_text(fv) + "\n";
      if (!fv.pass) r.code = kDiagnosticFailed;
    }
    r.doc["formula"] = std::move(list);
  }
  return r;
}

Result cmd_check_trace(const SpecOrderOptions& o, const Context& ctx) {
  ctx.require_lattice(o.order, "check-trace to order " + std::to_string(o.order));
  const auto m = as_moments(io::load_spec(o.spec), o.order);
  return verdict_result(ctx, "check-trace", o, check_b_trace(m, o.order));
}

Result cmd_check_rdiag(const SpecOrderOptions& o, const Context& ctx) {
  ctx.require_lattice(o.order, "check-rdiag to order " + std::to_string(o.order));
  const auto u = as_cumulants(io::load_spec(o.spec), o.order);
  return verdict_result(ctx, "check-rdiag", o, is_r_diagonal(u, o.order));
}

Result cmd_det_series(const SpecOrderOptions& o, const Context& ctx) {
  ctx.require_lattice(2 * o.order, "det-series to order " + std::to_string(o.order));
  const auto f = io::load_spec(o.spec);
  const auto u = as_cumulants(f, std::min(f.table.truncation(), 2 * o.order));
  Result r;
  r.doc = ctx.header();
  r.doc["command"] = "det-series";
  r.doc["spec"] = o.spec;
  r.doc["order"] = o.order;
  const Verdict support = is_r_diagonal(u, 2 * o.order);
  r.doc["precondition"] = io::verdict_to_json(support);
  if (!support.pass) {
    r.doc["f"] = nullptr;
    r.doc["g"] = nullptr;
    r.doc["reconstruction"] = nullptr;
    r.text = "precondition (R-diagonal to order " + std::to_string(2 * o.order) + "): " +
             io::verdict_to_text(support) + "\n";
    r.code = kDiagnosticFailed;
    return r;
  }
  const DeterminingSeries ds = determining_series(u, o.order);
  r.doc["f"] = io::spec_to_json(ds.f);
  r.doc["g"] = io::spec_to_json(ds.g);
  r.doc["reconstruction"] = io::verdict_to_json(ds.reconstruction);
  r.text = "f: " + spec_text(ds.f, SeriesKind::cumulant) + "g: " + spec_text(ds.g, SeriesKind::cumulant) +
           "reconstruction: " + io::verdict_to_text(ds.reconstruction) + "\n";
  r.code = ds.reconstruction.pass ? kOk : kDiagnosticFailed;
  return r;
}

// --- boxed convolution --------------------------------------------------------

struct BoxconvOptions {
  std::string f;
  std::string g;
  std::string gargs = "trivial";
  std::optional<std::size_t> order;
};

Result cmd_boxconv(const BoxconvOptions& o, const Context& ctx) {
  const auto f = io::load_spec(o.f).cumulants();
  const auto g = io::load_spec(o.g).cumulants();
  BoxedArgs args;
  if (o.gargs.rfind("symm:", 0) == 0) {
    args = BoxedArgs::symmetric(io::load_matrix(o.gargs.substr(5)));
  } else if (o.gargs != "trivial") {
    throw UsageError("--gargs must be 'trivial' or 'symm:FILE', got '" + o.gargs + "'");
  }
  const std::size_t order = o.order.value_or(std::min(f.truncation(), g.truncation()));
  ctx.require_lattice(2 * order, "boxconv to order " + std::to_string(order));
  return spec_result(boxed_convolution(f, g, args, order), SeriesKind::cumulant);
}

// --- even product harness ---------------------------------------------------

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t dim = 2;
  std::size_t order = 3;
  std::size_t count = 1;
  std::string inject_mean;
};

Verdict combined_r_diagonal(const EvenProductReport& rep) {
  Verdict v = !rep.r_diagonal.pass ? rep.r_diagonal : rep.r_diagonal_swapped;
  if (!rep.r_diagonal.pass) {
    v.detail = "(aa', a'a): " + v.detail;
  } else if (!rep.r_diagonal_swapped.pass) {
    v.detail = "(a'a, aa'): " + v.detail;
  }
  return v;
}

Result cmd_verify(const VerifyOptions& o, const Context& ctx) {
  if (o.dim < 1) throw UsageError("--dim must be positive");
  if (o.order < 1) throw UsageError("--order must be positive");
  if (o.count < 1) throw UsageError("--count must be positive");
  ctx.require_lattice(2 * o.order, "verify-thm27 at pair order " + std::to_string(o.order));
  EvenProductOptions options;
  if (!o.inject_mean.empty()) {
    options.inject_mean = BMatrix::scalar(o.dim, parse_rational(o.inject_mean));
  }
  Result r;
  r.doc = ctx.header(o.seed);
  r.doc["command"] = "verify-thm27";
  r.doc["dim"] = o.dim;
  r.doc["order"] = o.order;
  r.doc["count"] = o.count;
  if (!o.inject_mean.empty()) r.doc["inject_mean"] = o.inject_mean;
  json seeds = json::array();
  std::ostringstream text;
  bool all = true;
  for (std::size_t i = 0; i < o.count; ++i) {
    const EvenProductReport rep = verify_even_product_pair(o.seed + i, o.dim, o.order, options);
    const Verdict rdiag = combined_r_diagonal(rep);
    json rd = named("r_diagonal", rdiag);
    rd["orderings"] = {{"aa', a'a", io::verdict_to_json(rep.r_diagonal)},
                       {"a'a, aa'", io::verdict_to_json(rep.r_diagonal_swapped)}};
    json items = json::array({named("lemma", rep.mean_vanishes), named("sum_even", rep.sum_even), std::move(rd),
                              named("determining_series", rep.determining_series)});
    seeds.push_back({{"seed", rep.seed},
                     {"pass", rep.pass()},
                     {"items", std::move(items)},
                     {"informational", json::array({named("trace", rep.trace)})}});
    all = all && rep.pass();
    text << "seed " << rep.seed << " (d=" << o.dim << ", pair order " << o.order << "): "
         << (rep.pass() ? "pass" : "FAIL") << '\n'
         << "  lemma: " << io::verdict_to_text(rep.mean_vanishes) << '\n'
         << "  sum_even: " << io::verdict_to_text(rep.sum_even) << '\n'
         << "  r_diagonal: " << io::verdict_to_text(rdiag) << '\n'
         << "  determining_series: " << io::verdict_to_text(rep.determining_series) << '\n'
         << "  trace (informational): " << io::verdict_to_text(rep.trace) << '\n';
  }
  r.doc["seeds"] = std::move(seeds);
  r.doc["pass"] = all;
  r.text = text.str();
  r.code = all ? kOk : kDiagnosticFailed;
  return r;
}

// --- driver -----------------------------------------------------------------

void add_spec_order(CLI::App* sub, SpecOrderOptions& o) {
  sub->add_option("--spec", o.spec, "Spec file (JSON)")->required();
  sub->add_option("--order", o.order, "Truncation order")->required()->check(CLI::PositiveNumber);
}

void emit(const Result& r, const std::string& format, const std::string& path, std::ostream& out) {
  const std::string body = format == "text" ? r.text : io::dump_canonical(r.doc);
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  file << body;
  if (!file) throw UsageError("failed writing " + path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact operator-valued free probability at finite truncation order", "amalgam"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(AMALGAM_VERSION));

  std::string out_path;
  std::string format = "json";
  int max_n = 0;
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--max-n", max_n, "Largest NC(n) a command may build")->check(CLI::PositiveNumber);

  NcOptions nc_opts;
  auto* nc_cmd = app.add_subcommand("nc", "Dump the noncrossing partition lattice NC(n)");
  nc_cmd->add_option("--n", nc_opts.n, "Ground set size")->required();
  nc_cmd->add_flag("--even", nc_opts.even, "Also list partitions with even blocks only");
  nc_cmd->add_flag("--kreweras", nc_opts.kreweras, "Kreweras complement table");
  nc_cmd->add_flag("--mobius", nc_opts.mobius, "mu(pi, 1_n) table");

  SpecOrderOptions moments_opts, cumulants_opts, trace_opts, rdiag_opts, det_opts;
  add_spec_order(app.add_subcommand("moments", "Moments from a cumulant spec"), moments_opts);
  add_spec_order(app.add_subcommand("cumulants", "Cumulants from a moment spec"), cumulants_opts);
  CheckEvenOptions even_opts;
  auto* even_cmd = app.add_subcommand("check-even", "Odd pure cumulants (or moments) of one variable vanish");
  add_spec_order(even_cmd, even_opts.base);
  even_cmd->add_option("--var", even_opts.var, "Variable index, 1-based")->required();
  even_cmd->add_flag("--formula", even_opts.formula, "Also check the even-partition lattice sums");
  add_spec_order(app.add_subcommand("check-trace", "Cyclic rotation identity of the moments"), trace_opts);
  add_spec_order(app.add_subcommand("check-rdiag", "Support on alternating even tuples (two variables)"), rdiag_opts);
  add_spec_order(app.add_subcommand("det-series", "Determining series of an R-diagonal pair"), det_opts);

  BoxconvOptions box_opts;
  std::size_t box_order = 0;
  auto* box_cmd = app.add_subcommand("boxconv", "Boxed convolution of two single-variable series");
  box_cmd->add_option("--f", box_opts.f, "First series (cumulant spec)")->required();
  box_cmd->add_option("--g", box_opts.g, "Second series (cumulant spec)")->required();
  box_cmd->add_option("--gargs", box_opts.gargs, "trivial or symm:B0FILE");
  auto* box_order_opt = box_cmd->add_option("--order", box_order, "Output order (default: smaller input order)")
                            ->check(CLI::PositiveNumber);

  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify-thm27", "Harness for the pair (a a', a' a) of free even elements");
  verify_cmd->add_option("--seed", verify_opts.seed, "First seed")->required();
  verify_cmd->add_option("--dim", verify_opts.dim, "Matrix size d of B = M_d")->capture_default_str();
  verify_cmd->add_option("--order", verify_opts.order, "Pair truncation order")->capture_default_str();
  verify_cmd->add_option("--count", verify_opts.count, "Number of consecutive seeds")->capture_default_str();
  verify_cmd->add_option("--inject-mean", verify_opts.inject_mean,
                         "Negative control: set k_1(a) to this multiple of 1_B (p/q)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    Context ctx{args, resolve_max_n(max_n)};
    Result r;
    if (nc_cmd->parsed()) {
      r = cmd_nc(nc_opts, ctx);
    } else if (app.got_subcommand("moments")) {
      r = cmd_moments(moments_opts, ctx);
    } else if (app.got_subcommand("cumulants")) {
      r = cmd_cumulants(cumulants_opts, ctx);
    } else if (even_cmd->parsed()) {
      r = cmd_check_even(even_opts, ctx);
    } else if (app.got_subcommand("check-trace")) {
      r = cmd_check_trace(trace_opts, ctx);
    } else if (app.got_subcommand("check-rdiag")) {
      r = cmd_check_rdiag(rdiag_opts, ctx);
    } else if (app.got_subcommand("det-series")) {
      r = cmd_det_series(det_opts, ctx);
    } else if (box_cmd->parsed()) {
      if (box_order_opt->count() > 0) box_opts.order = box_order;
      r = cmd_boxconv(box_opts, ctx);
    } else {
      r = cmd_verify(verify_opts, ctx);
    }
    emit(r, format, out_path, out);
    return r.code;
  } catch (const UsageError& e) {
    err << "amalgam: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "amalgam: " << e.what() << '\n';
  } catch (const io::json::exception& e) {
    err << "amalgam: " << e.what() << '\n';
  }
  return kUsageError;
}

}  // namespace amalgam::cli
