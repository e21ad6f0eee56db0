#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gqads/cli.hpp"
#include "gqads/keyfile.hpp"
#include "gqads/protocol.hpp"

using namespace gqads;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// POSIX shell word splitting: whitespace separates, '...' is literal and a
// backslash escapes the next character outside quotes.
std::vector<std::string> shell_split(const std::string& line) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '\'') {
      const std::size_t close = line.find('\'', i + 1);
      REQUIRE(close != std::string::npos);
      cur += line.substr(i + 1, close - i - 1);
      i = close;
      in_word = true;
    } else if (ch == '\\' && i + 1 < line.size()) {
      cur += line[++i];
      in_word = true;
    } else if (ch == ' ') {
      if (in_word) words.push_back(cur);
      cur.clear();
      in_word = false;
    } else {
      cur += ch;
      in_word = true;
    }
  }
  if (in_word) words.push_back(cur);
  return words;
}

// Arguments recovered from the echoed config line (without the program name).
std::vector<std::string> echoed_args(const std::string& output) {
  std::string line = first_line(output);
  if (line.starts_with("{")) {
    line = nlohmann::json::parse(line).at("config").get<std::string>();
  } else {
    REQUIRE(line.starts_with("# "));
    line = line.substr(2);
  }
  std::vector<std::string> words = shell_split(line);
  REQUIRE(!words.empty());
  CHECK(words.front() == "gqads");
  words.erase(words.begin());
  return words;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gqads_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string field(const std::string& output, const std::string& key) {
  std::istringstream in(output);
  for (std::string line; std::getline(in, line);) {
    if (line.starts_with(key + ": ")) return line.substr(key.size() + 2);
  }
  FAIL("missing field " << key);
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("keygen writes deterministic key files") {
    TempDir dir;
    const Result a = invoke({"keygen", "--n", "64", "--r", "64", "--seed", "7", "--out", dir / "a"});
    const Result b = invoke({"keygen", "--n", "64", "--r", "64", "--seed", "7", "--out", dir / "b"});
    REQUIRE(a.code == cli::kExitOk);
    REQUIRE(b.code == cli::kExitOk);
    CHECK(fs::file_size(dir / "a.k1") == 8 + 4 + 4 + 512);
    CHECK(read_file(dir / "a.k1") == read_file(dir / "b.k1"));
    CHECK(read_file(dir / "a.k2") == read_file(dir / "b.k2"));
    CHECK(read_file(dir / "a.k1") != read_file(dir / "a.k2"));

    // Hex form holds the same key, and keygen matches the in-process distribution.
    REQUIRE(invoke({"keygen", "--n", "64", "--r", "64", "--seed", "7", "--hex", "--out", dir / "h"}).code == 0);
    CHECK(read_key_file(dir / "h.k1") == read_key_file(dir / "a.k1"));
    const auto params = validate_params({64, 64, 32, 96, 65, Mode::GQaDS, 128});
    const Parties p = distribute(parse_seed("7"), params, MacConfig::carter_wegman());
    CHECK(read_key_file(dir / "a.k1") == p.alice.keys.own_keys[0]);
    CHECK(read_key_file(dir / "a.k2") == p.alice.keys.own_keys[1]);
  }

  TEST_CASE("run: honest, tampered and offline exit codes") {
    const Result ok = invoke({"run", "--n", "4", "--r", "64", "--seed", "3"});
    CHECK(ok.code == cli::kExitOk);
    CHECK(field(ok.out, "bob_outcome") == "ACC");
    CHECK(field(ok.out, "charlie_outcome") == "ACC");
    CHECK(field(ok.out, "signature_bits") == field(ok.out, "expected_signature_bits"));

    const Result bit = invoke({"run", "--n", "4", "--r", "64", "--seed", "3", "--tamper", "flip-bit"});
    CHECK(bit.code == cli::kExitReject);
    CHECK(field(bit.out, "bob") == "REJ matches 0/6 threshold 6");
    CHECK(field(bit.out, "forwarded") == "false");

    const Result tag = invoke({"run", "--n", "4", "--r", "64", "--seed", "3", "--tamper", "flip-tag"});
    CHECK(tag.code == cli::kExitReject);
    CHECK(field(tag.out, "bob") == "REJ matches 5/6 threshold 6");

    const std::vector<std::string> det = {"run", "--mode", "deterministic", "--n", "2", "--r", "256", "--seed", "3"};
    const Result online = invoke(det);
    CHECK(online.code == cli::kExitOk);
    CHECK(field(online.out, "bob_contingent_on_charlie") == "true");
    CHECK(field(online.out, "signature_bits") == "512");
    std::vector<std::string> offline_args = det;
    offline_args.push_back("--charlie-offline");
    const Result offline = invoke(offline_args);
    CHECK(offline.code == cli::kExitReject);
    CHECK(field(offline.out, "bob_outcome") == "PENDING");

    const Result legacy = invoke({"run", "--mode", "legacy", "--n", "64", "--r", "64", "--seed", "3"});
    CHECK(legacy.code == cli::kExitOk);
    CHECK(field(legacy.out, "signature_bits") == "1048576");
  }

  TEST_CASE("run with key files writes a verifiable signed message") {
    TempDir dir;
    REQUIRE(invoke({"keygen", "--n", "4", "--r", "64", "--seed", "9", "--out", dir / "k"}).code == 0);
    write_file(dir / "m.txt", Bytes{'h', 'i', '\n'});
    const Result r = invoke({"run", "--n", "4", "--r", "64", "--seed", "9", "--key1", dir / "k.k1", "--key2", dir / "k.k2",
                          "--message", dir / "m.txt", "--out", dir / "sm"});
    CHECK(r.code == cli::kExitOk);
    const DecodedSignedMessage d = decode_signed_message(read_file(dir / "sm"));
    CHECK(d.signed_message.message == Bytes{'h', 'i', '\n'});
    const Parties p = distribute_with_keys(read_key_file(dir / "k.k1"), read_key_file(dir / "k.k2"), parse_seed("9"),
                                           d.params, d.mac);
    CHECK(verify(p.charlie, d.signed_message).outcome == Outcome::Accept);

    CHECK(invoke({"run", "--n", "4", "--r", "64", "--seed", "1", "--key1", dir / "nope", "--key2", dir / "k.k2"}).code ==
          cli::kExitIoError);
  }

  TEST_CASE("usage errors exit with 3") {
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"bogus"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--n", "4", "--vc", "2", "--seed", "1"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--seed", "zz"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--seed", "1", "--format", "xml"}).code == cli::kExitUsage);
    CHECK(invoke({"attack", "--seed", "1", "--trials", "0"}).code == cli::kExitUsage);
    CHECK(invoke({"attack", "--n", "4", "--seed", "1", "--errors", "0"}).code == cli::kExitUsage);
    CHECK(invoke({"optimize", "--seed", "1", "--figure", "fig9"}).code == cli::kExitUsage);
    CHECK(invoke({"optimize", "--seed", "1", "--L", "64", "--targets", "80-133"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--n", "four"}).code == cli::kExitUsage);
  }

  TEST_CASE("attack reports empirical and exact figures") {
    const Result r = invoke({"attack", "--n", "4", "--r", "32", "--seed", "1", "--trials", "3000", "--format", "csv"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream in(r.out);
    std::string echo, header, row;
    std::getline(in, echo);
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.starts_with("attack,trial_count,successes,rate,stderr,mean_cost,fingerprint"));
    CHECK(row.starts_with("repudiation,3000,"));

    const Result j = invoke({"attack", "--attack", "forgery-toy", "--n", "6", "--toy-r", "6", "--seed", "1", "--trials",
                          "200", "--format", "json-lines"});
    REQUIRE(j.code == cli::kExitOk);
    std::istringstream jin(j.out);
    std::string l1, l2;
    std::getline(jin, l1);
    std::getline(jin, l2);
    const auto rec = nlohmann::json::parse(l2);
    CHECK(rec.at("trial_count") == 200);
    CHECK(rec.at("successes") == 200);
    CHECK(std::abs(std::stod(rec.at("z_score").get<std::string>())) < 4.0);
  }

  TEST_CASE("optimize outputs") {
    const Result l = invoke({"optimize", "--L", "4096", "--seed", "1"});
    REQUIRE(l.code == cli::kExitOk);
    CHECK(field(l.out, "n_opt") == "64");
    CHECK(field(l.out, "r_opt") == "64");
    CHECK(field(l.out, "balanced_square") == "true");

    const Result t = invoke({"optimize", "--L", "11676", "--targets", "80:133", "--seed", "1"});
    CHECK(t.code == cli::kExitOk);
    CHECK(field(t.out, "meets_targets") == "true");
    const Result miss = invoke({"optimize", "--L", "64", "--targets", "80:133", "--seed", "1"});
    CHECK(miss.code == cli::kExitInfeasible);
    CHECK(field(miss.out, "meets_targets") == "false");

    const Result k = invoke({"optimize", "--targets", "80:133", "--seed", "1"});
    CHECK(k.code == cli::kExitOk);
    CHECK(field(k.out, "L") == "11676");

    const Result fig = invoke({"optimize", "--figure", "p_vs_threshold", "--seed", "1"});
    CHECK(fig.code == cli::kExitOk);
    CHECK(fig.out.find("\nn,S,r,x,V_C,P_R,log2P_R,P_F,log2P_F\n") != std::string::npos);

    const Result empty = invoke({"optimize", "--n", "1", "--r", "8", "--seed", "1"});
    CHECK(empty.code == cli::kExitInfeasible);
  }

  TEST_CASE("optimize --out writes the report to a file") {
    TempDir dir;
    const Result r = invoke({"optimize", "--L", "256", "--seed", "1", "--out", dir / "o.txt"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.empty());
    const Bytes file = read_file(dir / "o.txt");
    const std::string text(file.begin(), file.end());
    CHECK(field(text, "n_opt") == "16");
  }

  TEST_CASE("re-running the echoed config reproduces the output byte for byte") {
    TempDir dir;
    const std::vector<std::vector<std::string>> invocations = {
        {"run", "--n", "8", "--r", "32", "--seed", "5", "--text", "it's a \"quoted\" message"},
        {"run", "--mode", "deterministic", "--n", "2", "--r", "256", "--format", "json-lines", "--seed", "6"},
        {"run", "--mode", "legacy", "--n", "4", "--r", "8", "--seed", "ff", "--tamper", "flip-tag"},
        {"attack", "--n", "6", "--r", "32", "--trials", "300", "--seed", "7", "--format", "csv"},
        {"attack", "--n", "6", "--r", "32", "--trials", "300", "--seed", "7", "--errors", "5"},
        {"attack", "--attack", "forgery-toy", "--n", "5", "--toy-r", "5", "--trials", "100", "--seed", "8"},
        {"optimize", "--L", "1024", "--targets", "20:30", "--rule", "half", "--format", "json-lines"},
        {"optimize", "--figure", "gamma_vs_nopt", "--seed", "9"},
        {"run", "--n", "4", "--r", "16"},
    };
    for (const auto& args : invocations) {
      CAPTURE(args.front());
      const Result first = invoke(args);
      const Result again = invoke(echoed_args(first.out));
      CHECK(again.code == first.code);
      CHECK(again.out == first.out);
    }
    // Key files: echo carries the output prefix; rerun into the same path.
    const Result k = invoke({"keygen", "--n", "4", "--r", "8", "--out", dir / "dir with space/k"});
    CHECK(k.code == cli::kExitIoError);
    fs::create_directories(dir.path / "dir with space");
    const Result k1 = invoke({"keygen", "--n", "4", "--r", "8", "--out", dir / "dir with space/k"});
    REQUIRE(k1.code == cli::kExitOk);
    const Bytes before = read_file(dir / "dir with space/k.k1");
    const Result k2 = invoke(echoed_args(k1.out));
    CHECK(k2.out == k1.out);
    CHECK(read_file(dir / "dir with space/k.k1") == before);
  }

  TEST_CASE("seed fallback and echo") {
    ::setenv("GQADS_SEED", "abc", 1);
    const Result env = invoke({"run", "--n", "4", "--r", "16"});
    CHECK(first_line(env.out).find("--seed " + std::string(61, '0') + "abc ") != std::string::npos);
    CHECK(invoke({"run", "--n", "4", "--r", "16", "--seed", "abc"}).out == env.out);
    ::unsetenv("GQADS_SEED");

    const Result r1 = invoke({"run", "--n", "4", "--r", "16"});
    const Result r2 = invoke({"run", "--n", "4", "--r", "16"});
    const auto seed_of = [](const std::string& out) {
      const std::string line = first_line(out);
      const std::size_t at = line.find("--seed ") + 7;
      return line.substr(at, line.find(' ', at) - at);
    };
    const std::string s1 = seed_of(r1.out);
    CHECK(s1.size() == 64);
    CHECK(s1.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(s1 != seed_of(r2.out));
  }

  TEST_CASE("json-lines output parses line by line") {
    const Result r = invoke({"run", "--n", "4", "--r", "64", "--seed", "3", "--format", "json-lines"});
    std::istringstream in(r.out);
    int lines = 0;
    for (std::string line; std::getline(in, line); ++lines) CHECK_NOTHROW(static_cast<void>(nlohmann::json::parse(line)));
    CHECK(lines == 2);
    const Result o = invoke({"optimize", "--L", "4096", "--seed", "3", "--format", "json-lines"});
    std::istringstream oin(o.out);
    std::string cfg, body;
    std::getline(oin, cfg);
    std::getline(oin, body);
    CHECK(nlohmann::json::parse(cfg).contains("config"));
    CHECK(nlohmann::json::parse(body).at("n_opt") == 64);
  }
}
