// lattice-ortho: construct hypergeometric orthogonal polynomial families on
// linear/quadratic lattices, compute their discrete-orthogonality weights,
// and verify orthogonality numerically.
//
// Exit codes: 0 success; 1 invalid configuration or family (machine-readable
// error object on stderr); 2 per-entry computation failure or a verification
// that did not meet its bound.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ortho/families.hpp"
#include "ortho/lattice.hpp"
#include "ortho/verify.hpp"
#include "ortho/weights.hpp"

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Configuration shared by all subcommands
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string family_id;
  std::vector<std::string> named_args;  // repeatable --arg k=v
  std::vector<std::string> raw_args;    // --raw a1=..,a2=..,...
  long precision_bits = 0;              // 0 = unset (env or default 256)
  double tolerance = 1e-30;
  std::string format = "json";
  std::string out_path;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool family_selector = true) {
  if (family_selector) {
    cmd->add_option("--family", o.family_id, "named family preset (see `families`)");
    cmd->add_option("--arg", o.named_args, "family argument as name=value (repeatable)");
    cmd->add_option("--raw", o.raw_args,
                    "raw lattice parameters a1=..,a2=..,b0=..,b1=..,b2=..,d1=..,d2=..");
  }
  cmd->add_option("--precision", o.precision_bits, "working precision in bits [64, 4096]");
  cmd->add_option("--tol", o.tolerance, "target tolerance for series tails and verification");
  cmd->add_option("--format", o.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out_path, "write output to this path (atomic temp+rename)");
}

int resolve_precision(const CommonOpts& o) {
  long bits = o.precision_bits;
  if (bits == 0) {
    if (const char* env = std::getenv("LATTICE_ORTHO_PRECISION")) {
      char* end = nullptr;
      bits = std::strtol(env, &end, 10);
      if (end == env || *end != '\0')
        throw UsageError("LATTICE_ORTHO_PRECISION is not an integer: " + std::string(env));
    } else {
      bits = 256;
    }
  }
  if (bits < 64 || bits > 4096)
    throw UsageError("precision must be in [64, 4096] bits, got " + std::to_string(bits));
  return static_cast<int>(bits);
}

std::map<std::string, ortho::Complex> parse_kv(const std::vector<std::string>& items) {
  std::map<std::string, ortho::Complex> out;
  for (const std::string& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("expected name=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    try {
      out[key] = ortho::parse_complex(value);
    } catch (const std::exception& e) {
      throw UsageError("cannot parse value for '" + key + "': " + e.what());
    }
  }
  return out;
}

// The resolved family: either a named preset or raw parameters.
struct Selection {
  std::optional<ortho::FamilySpec> spec;
  ortho::FamilyParams params;
  json descriptor;  // for the output header
};

Selection resolve_family(const CommonOpts& o, int digits) {
  bool has_named = !o.family_id.empty();
  bool has_raw = !o.raw_args.empty();
  if (has_named == has_raw)
    throw UsageError("exactly one of --family or --raw is required");

  Selection sel;
  if (has_named) {
    auto args = parse_kv(o.named_args);
    sel.spec = ortho::make_family(o.family_id, args);
    sel.params = sel.spec->params;
    json jargs = json::object();
    for (const auto& [k, v] : sel.spec->args)
      jargs[k] = {{"re", to_decimal(v.re, digits)}, {"im", to_decimal(v.im, digits)}};
    sel.descriptor = {{"id", sel.spec->id}, {"args", jargs}};
  } else {
    if (!o.named_args.empty()) throw UsageError("--arg requires --family");
    std::vector<std::string> pieces;
    for (const std::string& chunk : o.raw_args) {
      std::stringstream ss(chunk);
      std::string piece;
      while (std::getline(ss, piece, ','))
        if (!piece.empty()) pieces.push_back(piece);
    }
    auto kv = parse_kv(pieces);
    const char* names[] = {"a1", "a2", "b0", "b1", "b2", "d1", "d2"};
    for (const char* name : names)
      if (!kv.count(name)) throw UsageError(std::string("--raw is missing '") + name + "'");
    if (kv.size() != 7) throw UsageError("--raw takes exactly a1,a2,b0,b1,b2,d1,d2");
    sel.params.a1 = kv["a1"];
    sel.params.a2 = kv["a2"];
    sel.params.b0 = kv["b0"];
    sel.params.b1 = kv["b1"];
    sel.params.b2 = kv["b2"];
    sel.params.d1 = kv["d1"];
    sel.params.d2 = kv["d2"];
    sel.descriptor = {{"id", nullptr}};
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Serialization helpers
// ---------------------------------------------------------------------------

json cplx(const ortho::Complex& z, int digits) {
  return {{"re", to_decimal(z.re, digits)}, {"im", to_decimal(z.im, digits)}};
}

json real_str(const ortho::Real& x, int digits) { return to_decimal(x, digits); }

json params_json(const ortho::FamilyParams& p, int digits) {
  return {{"a1", cplx(p.a1, digits)}, {"a2", cplx(p.a2, digits)}, {"b0", cplx(p.b0, digits)},
          {"b1", cplx(p.b1, digits)}, {"b2", cplx(p.b2, digits)}, {"d1", cplx(p.d1, digits)},
          {"d2", cplx(p.d2, digits)}};
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += "\"\"";
    quoted += c;
  }
  quoted += "\"";
  return quoted;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string row;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) row += ",";
    row += csv_quote(fields[i]);
  }
  row += "\r\n";
  return row;
}

void emit(const CommonOpts& o, const std::string& payload) {
  if (o.out_path.empty()) {
    std::cout << payload;
    return;
  }
  namespace fs = std::filesystem;
  fs::path target(o.out_path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream) throw UsageError("cannot open output file: " + tmp.string());
    stream << payload;
    if (!stream.flush()) throw UsageError("cannot write output file: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void emit_json(const CommonOpts& o, const json& j) { emit(o, j.dump(2) + "\n"); }

int fail_usage(const std::string& type, const std::string& message) {
  json err = {{"error", {{"type", type}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return 1;
}

// Classifies a thrown error for the machine-readable error object.
int fail_with(const std::exception& e) {
  std::string type = "Error";
  if (dynamic_cast<const ortho::ParameterError*>(&e)) type = "ParameterError";
  else if (dynamic_cast<const ortho::NodeCollisionError*>(&e)) type = "NodeCollisionError";
  else if (dynamic_cast<const ortho::EigenvalueCollisionError*>(&e)) type = "EigenvalueCollisionError";
  else if (dynamic_cast<const ortho::ConvergenceError*>(&e)) type = "ConvergenceError";
  else if (dynamic_cast<const ortho::CertificationError*>(&e)) type = "CertificationError";
  else if (dynamic_cast<const UsageError*>(&e)) type = "UsageError";
  return fail_usage(type, e.what());
}

json header_json(const char* command, const Selection& sel, int bits, const CommonOpts& o,
                 int digits) {
  json j = {{"command", command},
            {"precision_bits", bits},
            {"tolerance", o.tolerance},
            {"parameters", params_json(sel.params, digits)}};
  if (sel.spec)
    j["family"] = sel.descriptor;
  else
    j["family"] = nullptr;
  return j;
}

ortho::SummationOptions sum_opts(const CommonOpts& o) {
  ortho::SummationOptions opts;
  opts.tolerance = o.tolerance;
  return opts;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_weights(const CommonOpts& o, long count_flag) {
  int bits = resolve_precision(o);
  ortho::set_working_precision(bits);
  int digits = ortho::decimal_digits_for(bits);
  Selection sel = resolve_family(o, digits);

  ortho::FamilyContext ctx(sel.params);
  long count = count_flag;
  if (count <= 0) {
    auto T = ctx.termination(1025);
    count = T ? *T : 10;  // full finite family by default, else 10 rows
  }
  ortho::WeightTable table = ortho::weight_table(ctx, count, sum_opts(o));

  bool entry_failure = false;
  for (const auto& e : table.entries)
    if (e.diagnostics.status == ortho::SeriesStatus::FailedToConverge) entry_failure = true;

  if (o.format == "csv") {
    std::string payload = csv_row({"k", "node_re", "node_im", "weight_re", "weight_im",
                                   "status", "terms_used", "tail_estimate"});
    for (const auto& e : table.entries) {
      payload += csv_row({std::to_string(e.k), to_decimal(e.node.re, digits),
                          to_decimal(e.node.im, digits), to_decimal(e.weight.re, digits),
                          to_decimal(e.weight.im, digits),
                          ortho::series_status_label(e.diagnostics.status),
                          std::to_string(e.diagnostics.terms_used),
                          to_decimal(e.diagnostics.tail_estimate, 6)});
    }
    emit(o, payload);
    return entry_failure ? 2 : 0;
  }

  json j = header_json("weights", sel, bits, o, digits);
  j["case"] = ortho::case_label(ctx.lattice_case());
  j["count"] = table.count;
  j["finite_family"] = table.finite_family ? json(*table.finite_family) : json(nullptr);
  json entries = json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"k", e.k},
                       {"node", cplx(e.node, digits)},
                       {"weight", cplx(e.weight, digits)},
                       {"status", ortho::series_status_label(e.diagnostics.status)},
                       {"terms_used", e.diagnostics.terms_used},
                       {"tail_estimate", real_str(e.diagnostics.tail_estimate, 6)},
                       {"precision_bits", static_cast<long>(e.diagnostics.precision_bits)}});
  }
  j["entries"] = entries;
  j["sum"] = cplx(table.sum_check, digits);
  j["one_minus_sum"] = cplx(ortho::Complex(1L) - table.sum_check, digits);
  emit_json(o, j);
  return entry_failure ? 2 : 0;
}

int cmd_verify(const CommonOpts& o, long nmax, long K) {
  int bits = resolve_precision(o);
  ortho::set_working_precision(bits);
  int digits = ortho::decimal_digits_for(bits);
  Selection sel = resolve_family(o, digits);
  if (o.format == "csv") throw UsageError("verify reports are json-only");

  ortho::FamilyContext ctx(sel.params);
  if (K <= 0) K = std::max<long>(50, nmax + 1);
  ortho::GramReport rep = ortho::gram_matrix(ctx, nmax, K, sum_opts(o));

  ortho::Real bound = ortho::Real(o.tolerance) + rep.tail_allowance;
  bool pass = rep.tail_allowance.is_finite() && !(rep.offdiag_max > bound) &&
              !(rep.diag_rel_err > bound);

  json j = header_json("verify", sel, bits, o, digits);
  j["case"] = ortho::case_label(ctx.lattice_case());
  j["nmax"] = rep.nmax;
  j["K"] = rep.K;
  j["truncated"] = rep.truncated;
  json gram = json::array();
  for (const auto& row : rep.gram) {
    json jrow = json::array();
    for (const auto& entry : row) jrow.push_back(cplx(entry, digits));
    gram.push_back(jrow);
  }
  j["gram"] = gram;
  json norms = json::array();
  for (const auto& kn : rep.norms) norms.push_back(cplx(kn, digits));
  j["norms"] = norms;
  json diag = json::array();
  for (const auto& d : rep.diag_rel) diag.push_back(real_str(d, 6));
  j["diag_rel_err"] = diag;
  j["diag_rel_err_max"] = real_str(rep.diag_rel_err, 6);
  j["offdiag_max"] = real_str(rep.offdiag_max, 6);
  j["tail_allowance"] = real_str(rep.tail_allowance, 6);
  j["pass"] = pass;
  emit_json(o, j);
  return pass ? 0 : 2;
}

int cmd_recurrence(const CommonOpts& o, long nmax) {
  int bits = resolve_precision(o);
  ortho::set_working_precision(bits);
  int digits = ortho::decimal_digits_for(bits);
  Selection sel = resolve_family(o, digits);
  if (nmax < 0) throw UsageError("--n must be >= 0");

  ortho::FamilyContext ctx(sel.params);
  struct Row {
    long n;
    ortho::Complex beta, alpha, K;
  };
  std::vector<Row> rows;
  ortho::Complex K(1L);
  for (long n = 0; n <= nmax; ++n) {
    Row row;
    row.n = n;
    row.beta = ortho::beta(ctx, n);
    if (n >= 1) {
      row.alpha = ortho::alpha(ctx, n);
      K *= row.alpha;
    }
    row.K = K;
    rows.push_back(row);
  }

  if (o.format == "csv") {
    std::string payload =
        csv_row({"n", "beta_re", "beta_im", "alpha_re", "alpha_im", "K_re", "K_im"});
    for (const Row& r : rows) {
      payload += csv_row({std::to_string(r.n), to_decimal(r.beta.re, digits),
                          to_decimal(r.beta.im, digits),
                          r.n ? to_decimal(r.alpha.re, digits) : "",
                          r.n ? to_decimal(r.alpha.im, digits) : "",
                          to_decimal(r.K.re, digits), to_decimal(r.K.im, digits)});
    }
    emit(o, payload);
    return 0;
  }

  json j = header_json("recurrence", sel, bits, o, digits);
  j["case"] = ortho::case_label(ctx.lattice_case());
  json jrows = json::array();
  for (const Row& r : rows) {
    json jr = {{"n", r.n}, {"beta", cplx(r.beta, digits)}, {"K", cplx(r.K, digits)}};
    jr["alpha"] = r.n ? cplx(r.alpha, digits) : json(nullptr);
    jrows.push_back(jr);
  }
  j["rows"] = jrows;
  emit_json(o, j);
  return 0;
}

int cmd_moments(const CommonOpts& o, long count, long K) {
  int bits = resolve_precision(o);
  ortho::set_working_precision(bits);
  int digits = ortho::decimal_digits_for(bits);
  Selection sel = resolve_family(o, digits);
  if (count < 1) throw UsageError("--count must be >= 1");

  ortho::FamilyContext ctx(sel.params);
  std::vector<ortho::Complex> ms;
  for (long k = 0; k < count; ++k) ms.push_back(ctx.moment(k));

  std::optional<ortho::MomentRecovery> rec;
  if (K > 0) rec = ortho::moment_recovery(ctx, count - 1, K, sum_opts(o));

  if (o.format == "csv") {
    std::string payload = csv_row(rec ? std::vector<std::string>{"k", "m_re", "m_im", "rel_error"}
                                      : std::vector<std::string>{"k", "m_re", "m_im"});
    for (long k = 0; k < count; ++k) {
      std::vector<std::string> fields = {std::to_string(k), to_decimal(ms[k].re, digits),
                                         to_decimal(ms[k].im, digits)};
      if (rec) fields.push_back(to_decimal(rec->rel_errors[static_cast<size_t>(k)], 6));
      payload += csv_row(fields);
    }
    emit(o, payload);
    return 0;
  }

  json j = header_json("moments", sel, bits, o, digits);
  j["case"] = ortho::case_label(ctx.lattice_case());
  json jm = json::array();
  for (long k = 0; k < count; ++k)
    jm.push_back({{"k", k}, {"value", cplx(ms[static_cast<size_t>(k)], digits)}});
  j["moments"] = jm;
  if (rec) {
    json errs = json::array();
    for (const auto& e : rec->rel_errors) errs.push_back(real_str(e, 6));
    j["recovery"] = {{"K", rec->K}, {"rel_errors", errs}, {"worst", real_str(rec->worst, 6)}};
  }
  emit_json(o, j);
  return 0;
}

int cmd_validate(const CommonOpts& o, long horizon) {
  int bits = resolve_precision(o);
  ortho::set_working_precision(bits);
  int digits = ortho::decimal_digits_for(bits);
  Selection sel = resolve_family(o, digits);
  if (o.format == "csv") throw UsageError("validate reports are json-only");
  if (horizon < 1) throw UsageError("--horizon must be >= 1");

  ortho::ValidationReport rep = ortho::validate(sel.params, horizon);

  json j = header_json("validate", sel, bits, o, digits);
  j["case"] = ortho::case_label(rep.case_id);
  j["ok"] = rep.ok();
  j["x_nonconstant"] = rep.x_nonconstant;
  j["h_nonconstant"] = rep.h_nonconstant;
  j["h_distinct"] = rep.h_distinct;
  j["x_distinct"] = rep.x_distinct;
  j["terminating_at"] = rep.terminating_at ? json(*rep.terminating_at) : json(nullptr);
  j["alpha_zero_at"] = rep.alpha_zero_at ? json(*rep.alpha_zero_at) : json(nullptr);
  j["messages"] = rep.messages;
  emit_json(o, j);
  return rep.ok() ? 0 : 2;
}

int cmd_families(const CommonOpts& o) {
  if (o.format == "csv") {
    std::string payload = csv_row({"id", "args", "case", "description"});
    for (const auto& fi : ortho::family_catalog()) {
      std::string args;
      for (size_t i = 0; i < fi.arg_names.size(); ++i) {
        if (i) args += " ";
        args += fi.arg_names[i];
      }
      payload += csv_row({fi.id, args, fi.case_label, fi.description});
    }
    emit(o, payload);
    return 0;
  }
  json list = json::array();
  for (const auto& fi : ortho::family_catalog()) {
    list.push_back({{"id", fi.id},
                    {"args", fi.arg_names},
                    {"case", fi.case_label},
                    {"description", fi.description}});
  }
  json j = {{"command", "families"}, {"families", list}};
  emit_json(o, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal polynomial families on linear/quadratic lattices: "
               "weights, recurrence coefficients, and orthogonality checks"};
  app.require_subcommand(1);

  CommonOpts common;
  long count = 0, nmax = -1, K = 0, nrec = 5, horizon = 50;

  CLI::App* weights = app.add_subcommand("weights", "compute the weight table r_k");
  add_common(weights, common);
  weights->add_option("--count", count, "number of weights (default: family size, or 10)")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "Gram-matrix orthogonality report");
  add_common(verify, common);
  verify->add_option("--nmax", nmax, "highest polynomial degree (default 4)")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--K", K, "number of lattice nodes (default max(50, nmax + 1))")
      ->check(CLI::PositiveNumber);

  CLI::App* recurrence =
      app.add_subcommand("recurrence", "three-term recurrence coefficients beta_n, alpha_n, K_n");
  add_common(recurrence, common);
  recurrence->add_option("--n", nrec, "highest index n (default 5)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* moments = app.add_subcommand("moments", "generalized moments m_k");
  add_common(moments, common);
  moments->add_option("--count", count, "number of moments (default 10)")
      ->check(CLI::PositiveNumber);
  moments->add_option("--K", K, "also recover moments from K weights and report residuals")
      ->check(CLI::PositiveNumber);

  CLI::App* validate = app.add_subcommand("validate", "structural validation report");
  add_common(validate, common);
  validate->add_option("--horizon", horizon, "scan indices up to this bound (default 50)")
      ->check(CLI::PositiveNumber);

  CLI::App* families = app.add_subcommand("families", "list the named family presets");
  add_common(families, common, /*family_selector=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_usage("UsageError", e.what());
  }

  try {
    if (common.tolerance <= 0) throw UsageError("--tol must be positive");
    if (app.got_subcommand(weights)) return cmd_weights(common, count);
    if (app.got_subcommand(verify)) return cmd_verify(common, nmax < 0 ? 4 : nmax, K);
    if (app.got_subcommand(recurrence)) return cmd_recurrence(common, nrec);
    if (app.got_subcommand(moments)) return cmd_moments(common, count > 0 ? count : 10, K);
    if (app.got_subcommand(validate)) return cmd_validate(common, horizon);
    if (app.got_subcommand(families)) return cmd_families(common);
    return fail_usage("UsageError", "no subcommand given");
  } catch (const std::exception& e) {
    return fail_with(e);
  }
}
