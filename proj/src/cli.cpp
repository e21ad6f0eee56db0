#include "gqads/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gqads/adversary.hpp"
#include "gqads/analysis.hpp"
#include "gqads/errors.hpp"
#include "gqads/figures.hpp"
#include "gqads/keyfile.hpp"
#include "gqads/protocol.hpp"

namespace gqads::cli {

namespace {

namespace an = analysis;
using json = nlohmann::ordered_json;

enum class Format { Pretty, JsonLines, Csv };

struct ParamFlags {
  std::uint32_t n = 64;
  std::uint32_t r = 64;
  std::optional<std::uint32_t> S;
  std::optional<std::int64_t> V_B;
  std::optional<std::int64_t> V_C;
  std::string mode = "gqads";
  std::uint32_t tag_len = 128;

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "blocks per key")->capture_default_str();
    app->add_option("--r", r, "bits per block")->capture_default_str();
    app->add_option("--S", S, "blocks shared each way [default n/2]");
    app->add_option("--vb", V_B, "Bob's threshold [default n+S]");
    app->add_option("--vc", V_C, "Charlie's threshold [default 2S+1]");
    app->add_option("--mode", mode, "legacy | gqads | deterministic")->capture_default_str();
    app->add_option("--tag-len", tag_len, "MAC tag bits")->capture_default_str();
  }

  ProtocolParams resolve() const {
    ProtocolParams p;
    p.n = n;
    p.r = r;
    p.S = S.value_or(n / 2);
    p.V_B = V_B.value_or(std::int64_t{n} + p.S);
    p.V_C = V_C.value_or(2 * std::int64_t{p.S} + 1);
    p.mode = parse_mode(mode);
    p.tag_len = tag_len;
    return p;
  }
};

std::string params_echo(const ProtocolParams& p) {
  std::ostringstream os;
  os << " --n " << p.n << " --r " << p.r << " --S " << p.S << " --vb " << p.V_B << " --vc " << p.V_C << " --mode "
     << to_string(p.mode) << " --tag-len " << p.tag_len;
  return os.str();
}

Format parse_format(const std::string& s) {
  if (s == "pretty") return Format::Pretty;
  if (s == "json-lines") return Format::JsonLines;
  if (s == "csv") return Format::Csv;
  throw Error(ErrorCode::InvalidParams, "unknown format '" + s + "'");
}

Seed resolve_seed(const std::optional<std::string>& flag) {
  if (flag) return parse_seed(*flag);
  if (const char* env = std::getenv("GQADS_SEED"); env != nullptr && *env != '\0') return parse_seed(env);
  std::random_device rd;
  Seed s{};
  for (std::size_t i = 0; i < s.size(); i += 4) {
    const std::uint32_t w = rd();
    for (std::size_t j = 0; j < 4; ++j) s[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
  }
  return s;
}

// Key/value report rendered in the selected format. Rows are emitted in
// insertion order.
class Report {
 public:
  explicit Report(Format f) : format_(f) {}

  Report& add(const std::string& key, json value) {
    fields_.emplace_back(key, std::move(value));
    return *this;
  }

  void write(std::ostream& os) const {
    switch (format_) {
      case Format::Pretty:
        for (const auto& [k, v] : fields_) os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        break;
      case Format::JsonLines: {
        json obj = json::object();
        for (const auto& [k, v] : fields_) obj[k] = v;
        os << obj.dump() << '\n';
        break;
      }
      case Format::Csv: {
        for (std::size_t i = 0; i < fields_.size(); ++i) os << (i ? "," : "") << fields_[i].first;
        os << '\n';
        for (std::size_t i = 0; i < fields_.size(); ++i) {
          const json& v = fields_[i].second;
          os << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
        }
        os << '\n';
        break;
      }
    }
  }

 private:
  Format format_;
  std::vector<std::pair<std::string, json>> fields_;
};

// POSIX shell word: bare when every character is safe, else single-quoted.
std::string shell_word(const std::string& s) {
  const bool bare = !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) {
    return std::isalnum(ch) != 0 || std::string_view("_./:=+,@%-").find(static_cast<char>(ch)) != std::string_view::npos;
  });
  if (bare) return s;
  std::string q = "'";
  for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return q + "'";
}

std::string out_echo(const std::string& path) { return path.empty() ? "" : " --out " + shell_word(path); }

void echo_config(std::ostream& os, Format f, const std::string& command) {
  if (f == Format::JsonLines) {
    os << json{{"config", command}}.dump() << '\n';
  } else {
    os << "# " << command << '\n';
  }
}

std::string sci(const an::BigRational& q) { return an::to_scientific(q, 12); }

// Output sink: --out file when given, else the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& os() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Common {
  ParamFlags params;
  std::optional<std::string> seed;
  std::string format = "pretty";
  std::string out;
};

int cmd_keygen(const Common& c, bool hex, std::ostream& out) {
  ProtocolParams p = c.params.resolve();
  if (p.n == 0 || p.r == 0) throw Error(ErrorCode::InvalidParams, "n and r must be positive");
  const Seed seed = resolve_seed(c.seed);
  const std::string prefix = c.out.empty() ? "gqads" : c.out;
  const Format f = parse_format(c.format);
  echo_config(out, f,
              "gqads keygen --n " + std::to_string(p.n) + " --r " + std::to_string(p.r) + " --seed " +
                  seed_to_hex(seed) + " --out " + shell_word(prefix) + (hex ? " --hex" : "") + " --format " + c.format);

  // Key generation does not depend on thresholds; reuse the distribution streams.
  Csprng k1_rng(seed, 1), k2_rng(seed, 2);
  const std::size_t nbits = std::size_t{p.n} * p.r;
  const Key k1(p.n, p.r, k1_rng.bits(nbits));
  const Key k2(p.n, p.r, k2_rng.bits(nbits));
  const std::string path1 = prefix + ".k1", path2 = prefix + ".k2";
  write_key_file(path1, k1, hex);
  write_key_file(path2, k2, hex);
  Report(f)
      .add("k1", path1)
      .add("k2", path2)
      .add("n", p.n)
      .add("r", p.r)
      .add("key_bits", static_cast<std::uint64_t>(nbits))
      .write(out);
  return kExitOk;
}

struct RunFlags {
  std::string message_file;
  std::string text = "hello";
  std::string key1, key2;
  std::string tamper = "none";
  bool charlie_offline = false;
};

std::string report_text(const std::optional<VerificationReport>& r) {
  if (!r) return "not reached";
  return std::string(to_string(r->outcome)) + " matches " + std::to_string(r->match_count) + "/" +
         std::to_string(r->checkable.size()) + " threshold " + std::to_string(r->threshold);
}

int cmd_run(const Common& c, const RunFlags& rf, std::ostream& out) {
  const ProtocolParams p = c.params.resolve();
  const Seed seed = resolve_seed(c.seed);
  const Format f = parse_format(c.format);
  std::string cmd = "gqads run" + params_echo(p) + " --seed " + seed_to_hex(seed);
  if (!rf.message_file.empty()) {
    cmd += " --message " + shell_word(rf.message_file);
  } else {
    cmd += " --text " + shell_word(rf.text);
  }
  if (!rf.key1.empty()) cmd += " --key1 " + shell_word(rf.key1) + " --key2 " + shell_word(rf.key2);
  cmd += " --tamper " + rf.tamper;
  if (rf.charlie_offline) cmd += " --charlie-offline";
  cmd += out_echo(c.out) + " --format " + c.format;
  echo_config(out, f, cmd);

  const ValidatedParams params = validate_params(p);
  const MacConfig cfg = MacConfig::carter_wegman(p.tag_len);
  if (rf.key1.empty() != rf.key2.empty()) throw Error(ErrorCode::InvalidParams, "--key1 and --key2 go together");
  const Parties parties = rf.key1.empty()
                              ? distribute(seed, params, cfg)
                              : distribute_with_keys(read_key_file(rf.key1), read_key_file(rf.key2), seed, params, cfg);
  Bytes message = rf.message_file.empty() ? Bytes(rf.text.begin(), rf.text.end()) : read_file(rf.message_file);

  SignedMessage sm = sign(parties.alice, message);
  if (!c.out.empty()) write_file(c.out, encode_signed_message(sm, params, cfg));
  if (rf.tamper == "flip-bit") {
    if (sm.message.empty()) sm.message.push_back(0);
    sm.message[0] ^= 0x01;
  } else if (rf.tamper == "flip-tag") {
    sm.signature.tags.at(0).flip(0);
  } else if (rf.tamper != "none") {
    throw Error(ErrorCode::InvalidParams, "unknown tamper '" + rf.tamper + "'");
  }

  const TranscriptRecord t = deliver(parties.bob, parties.charlie, sm, {.charlie_online = !rf.charlie_offline});
  const std::uint64_t expected = expected_signature_bits(params, cfg);
  Report(f)
      .add("mode", std::string(to_string(t.mode)))
      .add("signature_bits", t.signature_bits)
      .add("expected_signature_bits", expected)
      .add("bob", report_text(t.bob_report))
      .add("bob_outcome", std::string(to_string(t.bob_outcome)))
      .add("bob_contingent_on_charlie", t.bob_contingent_on_charlie)
      .add("forwarded", t.forwarded)
      .add("charlie", report_text(t.charlie_report))
      .add("charlie_outcome", std::string(to_string(t.charlie_outcome)))
      .write(out);
  const bool accepted = t.bob_outcome == Outcome::Accept && t.charlie_outcome == Outcome::Accept;
  return accepted ? kExitOk : kExitReject;
}

struct AttackFlags {
  std::string attack = "repudiation";
  std::uint64_t trials = 1000;
  std::optional<std::int64_t> errors;
  std::uint32_t toy_r = 8;
  unsigned threads = 1;
};

int cmd_attack(const Common& c, const AttackFlags& af, std::ostream& out, std::ostream& err) {
  if (af.trials == 0) throw CLI::ValidationError("--trials", "must be at least 1");
  const ProtocolParams p = c.params.resolve();
  const Seed seed = resolve_seed(c.seed);
  const Format f = parse_format(c.format);
  AttackSpec spec;
  spec.kind = parse_attack(af.attack);
  spec.params = p;
  spec.mac = MacConfig::carter_wegman(p.tag_len);
  spec.errors = af.errors;
  spec.toy_r = af.toy_r;
  std::string cmd = "gqads attack --attack " + af.attack + params_echo(p) + " --seed " + seed_to_hex(seed) +
                    " --trials " + std::to_string(af.trials);
  if (spec.kind == AttackKind::Repudiation) {
    if (af.errors) cmd += " --errors " + std::to_string(*af.errors);
  } else {
    cmd += " --toy-r " + std::to_string(af.toy_r);
  }
  cmd += " --threads " + std::to_string(af.threads) + out_echo(c.out) + " --format " + c.format;
  echo_config(out, f, cmd);

  const ValidatedParams params = validate_params(p);
  CampaignOptions opts;
  opts.threads = af.threads;
  if (af.trials >= 100000) {
    opts.progress = [&err, total = af.trials](std::uint64_t done) {
      err << "progress " << done << "/" << total << '\n';
    };
  }
  const CampaignResult r = run_campaign(spec, af.trials, seed, opts);

  Report rep(f);
  rep.add("attack", std::string(to_string(spec.kind)))
      .add("trial_count", r.trials)
      .add("successes", r.successes)
      .add("rate", an::format_double(r.rate()))
      .add("stderr", an::format_double(r.rate_stderr()))
      .add("mean_cost", an::format_double(r.mean_cost().get_d()))
      .add("fingerprint", to_hex(Bytes(r.fingerprint.begin(), r.fingerprint.end())));
  double empirical = 0, exact = 0, sigma = 0;
  if (spec.kind == AttackKind::Repudiation) {
    const std::int64_t e = af.errors.value_or(params.checkable() - params.V_C() + 1);
    exact = repudiation_exact(params, e).get_d();
    empirical = r.rate();
    sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(r.trials));
    rep.add("errors", e);
  } else {
    exact = an::c_forge(p.n, p.S, p.V_C, af.toy_r).get_d();
    empirical = r.mean_cost().get_d();
    sigma = r.cost_stderr();
    rep.add("toy_r", af.toy_r);
  }
  const double z = sigma > 0 ? (empirical - exact) / sigma : (empirical == exact ? 0.0 : INFINITY);
  rep.add("empirical", an::format_double(empirical))
      .add("exact", an::format_double(exact))
      .add("z_score", an::format_double(z))
      .add("resamples", r.resamples)
      .write(out);
  return kExitOk;
}

struct OptimizeFlags {
  std::optional<std::int64_t> L;
  std::optional<std::string> targets;
  std::optional<std::string> figure;
  bool sweep = false;
  std::string rule = "beta_star";
  bool exact = false;
  bool have_n = false;
  bool have_r = false;
};

an::BetaRule parse_rule(const std::string& s) {
  if (s == "half") return an::BetaRule::Half;
  if (s == "beta_star") return an::BetaRule::BetaStar;
  throw Error(ErrorCode::InvalidParams, "unknown rule '" + s + "'");
}

std::pair<std::int64_t, std::int64_t> parse_targets(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    const std::int64_t bR = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const std::int64_t bF = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {bR, bF};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::ParseError, "--targets expects bR:bF, got '" + s + "'");
  }
}

void add_slice(Report& rep, const an::GridPoint& g, const std::string& prefix) {
  rep.add(prefix + "S", g.S).add(prefix + "V_C", g.V_C).add(prefix + "gamma", g.gamma.str());
  rep.add(prefix + "beta", an::format_double(g.beta));
  rep.add(prefix + "log2P_R", an::format_double(g.log2_p_rep)).add(prefix + "log2P_F", an::format_double(g.log2_p_forge));
}

int cmd_optimize(const Common& c, const OptimizeFlags& of, std::ostream& out) {
  const Format f = parse_format(c.format);
  const an::BetaRule rule = parse_rule(of.rule);
  // The optimiser is deterministic; the seed is echoed so every config line carries one.
  std::string cmd = "gqads optimize --rule " + of.rule + " --seed " + seed_to_hex(resolve_seed(c.seed));

  if (of.figure || of.sweep) {
    an::FigureGrid grid;
    grid.rule = rule;
    grid.exact_rationals = of.exact;
    if (of.have_r) grid.r = c.params.r;
    std::vector<an::FigureId> ids = of.figure ? std::vector{an::parse_figure(*of.figure)} : an::all_figures();
    if (of.figure) cmd += " --figure " + shell_word(*of.figure);
    if (of.sweep) cmd += " --sweep";
    if (of.have_r) cmd += " --r " + std::to_string(c.params.r);
    if (of.exact) cmd += " --exact";
    cmd += out_echo(c.out);
    echo_config(out, Format::Csv, cmd);
    for (an::FigureId id : ids) {
      if (ids.size() > 1) out << "# figure " << an::to_string(id) << '\n';
      out << an::to_csv(an::figure_data(id, grid));
    }
    return kExitOk;
  }

  if (of.L) {
    cmd += " --L " + std::to_string(*of.L);
    if (of.targets) cmd += " --targets " + shell_word(*of.targets);
    cmd += out_echo(c.out) + " --format " + c.format;
    echo_config(out, f, cmd);
    Report rep(f);
    an::Optimum o;
    bool meets = true;
    if (of.targets) {
      const auto [bR, bF] = parse_targets(*of.targets);
      const an::AsymOptimum a = an::n_opt_asym(*of.L, bR, bF, rule);
      o = a.optimum;
      meets = a.meets_targets;
      rep.add("b_R", bR).add("b_F", bF).add("r_aux", a.r_aux).add("L_aux", a.L_aux).add("meets_targets", a.meets_targets);
    } else {
      o = an::n_opt(*of.L, rule);
    }
    rep.add("L", o.L).add("n_opt", o.n_opt).add("r_opt", o.r_opt).add("S", o.S).add("V_C", o.V_C);
    rep.add("gamma_star", o.gamma_star.str()).add("beta", an::format_double(o.beta_star));
    const an::BigRational& pr = o.achieved.p_rep_exact;
    const an::BigRational& pf = o.achieved.p_forge;
    rep.add("P_R", sci(pr)).add("P_F", sci(pf)).add("maxP", sci(pr < pf ? pf : pr));
    if (of.targets) rep.add("objective", sci(o.objective));
    rep.add("security_bits_rep", an::format_double(o.achieved.security_bits_rep));
    rep.add("security_bits_forge", an::format_double(o.achieved.security_bits_forge));
    rep.add("balanced_square", o.balanced_square);
    rep.write(out);
    return meets ? kExitOk : kExitInfeasible;
  }

  if (of.targets) {
    cmd += " --targets " + shell_word(*of.targets) + out_echo(c.out) + " --format " + c.format;
    echo_config(out, f, cmd);
    const auto [bR, bF] = parse_targets(*of.targets);
    const an::KeyLengthReport k = an::min_key_length(bR, bF);
    Report(f)
        .add("b_R", bR)
        .add("b_F", bF)
        .add("L", k.L)
        .add("n", k.n)
        .add("r", k.r)
        .add("S", k.S)
        .add("V_C", k.V_C)
        .add("P_R", sci(k.p_rep))
        .add("P_F", sci(k.p_forge))
        .add("security_bits_rep", an::format_double(-an::log2_of(k.p_rep)))
        .add("security_bits_forge", an::format_double(-an::log2_of(k.p_forge)))
        .write(out);
    return kExitOk;
  }

  const std::int64_t n = c.params.n, r = c.params.r;
  cmd += " --n " + std::to_string(n) + " --r " + std::to_string(r) + out_echo(c.out) + " --format " + c.format;
  echo_config(out, f, cmd);
  const an::OptimumSlice s = an::gamma_star(n, r, rule);
  const an::SecurityFigures sf = an::security_figures(n, s.exact.S, s.exact.V_C, r);
  Report rep(f);
  rep.add("n", n).add("r", r);
  add_slice(rep, s.exact, "");
  rep.add("P_R", sci(sf.p_rep_exact)).add("P_F", sci(sf.p_forge));
  rep.add("security_bits_rep", an::format_double(sf.security_bits_rep));
  rep.add("security_bits_forge", an::format_double(sf.security_bits_forge));
  add_slice(rep, s.approx, "approx_");
  rep.write(out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GQaDS protocol simulator and security analysis", "gqads"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub, bool with_params) {
    if (with_params) common.params.add_to(sub);
    sub->add_option("--seed", common.seed, "256-bit hex seed [default $GQADS_SEED, else random]");
    sub->add_option("--format", common.format, "pretty | json-lines | csv")->capture_default_str();
    sub->add_option("--out", common.out, "output path");
  };

  CLI::App* keygen = app.add_subcommand("keygen", "write k1 and k2 key files (<out>.k1, <out>.k2)");
  add_common(keygen, true);
  bool hex = false;
  keygen->add_flag("--hex", hex, "write the hex text form");

  CLI::App* run = app.add_subcommand("run", "distribute, sign and verify one message");
  add_common(run, true);
  RunFlags rf;
  run->add_option("--message", rf.message_file, "message file");
  run->add_option("--text", rf.text, "inline message")->capture_default_str();
  run->add_option("--key1", rf.key1, "k1 key file");
  run->add_option("--key2", rf.key2, "k2 key file");
  run->add_option("--tamper", rf.tamper, "none | flip-bit | flip-tag")->capture_default_str();
  run->add_flag("--charlie-offline", rf.charlie_offline, "Charlie never answers");

  CLI::App* attack = app.add_subcommand("attack", "Monte Carlo attack campaign");
  add_common(attack, true);
  AttackFlags af;
  attack->add_option("--attack", af.attack, "repudiation | forgery-toy")->capture_default_str();
  attack->add_option("--trials", af.trials, "number of trials")->capture_default_str();
  attack->add_option("--errors", af.errors, "corrupted blocks [default e* = n+S-V_C+1]");
  attack->add_option("--toy-r", af.toy_r, "toy key block bits (<= 20)")->capture_default_str();
  attack->add_option("--threads", af.threads, "worker threads, 0 = all cores")->capture_default_str();

  CLI::App* optimize = app.add_subcommand("optimize", "threshold and key-length optimisation");
  add_common(optimize, true);
  OptimizeFlags of;
  optimize->add_option("--L", of.L, "key length to split as n * r");
  optimize->add_option("--targets", of.targets, "security targets bR:bF in bits");
  optimize->add_option("--figure", of.figure, "emit one figure table as CSV");
  optimize->add_flag("--sweep", of.sweep, "emit every figure table");
  optimize->add_option("--rule", of.rule, "half | beta_star")->capture_default_str();
  optimize->add_flag("--exact", of.exact, "add num/den columns to figure tables");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (keygen->parsed()) return cmd_keygen(common, hex, out);
    if (run->parsed()) return cmd_run(common, rf, out);
    if (attack->parsed()) {
      Sink sink(common.out, out);
      return cmd_attack(common, af, sink.os(), err);
    }
    of.have_n = optimize->count("--n") > 0;
    of.have_r = optimize->count("--r") > 0;
    Sink sink(common.out, out);
    return cmd_optimize(common, of, sink.os());
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InfeasibleTargets:
      case ErrorCode::EmptyFeasibleSet:
      case ErrorCode::NoDivisors:
        return kExitInfeasible;
      case ErrorCode::IOError:
        return kExitIoError;
      default:
        return kExitUsage;
    }
  }
}

}  // namespace gqads::cli
