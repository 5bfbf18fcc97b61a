// Drives the installed binary end to end: exit codes, config files,
// output formats, determinism.

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "testutil.hpp"

#ifndef EMBKIT_BIN
#define EMBKIT_BIN "embkit"
#endif
#ifndef EMBKIT_DATA_DIR
#define EMBKIT_DATA_DIR "data"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string base = std::string("/tmp/embkit_cli_") + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++);
  std::string out_path = base + ".out", err_path = base + ".err";
  std::string cmd =
      std::string(EMBKIT_BIN) + " " + args + " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file(out_path);
  r.err = testutil::read_file(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string data_file(const std::string& name) {
  return std::string(EMBKIT_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists the subcommands") {
  auto r = run_cli("--help");
  CHECK(r.exit_code == 0);
  for (const char* sub : {"tokenizer", "train", "eval", "nn", "project", "inventory", "stats"}) {
    CHECK(r.out.find(sub) != std::string::npos);
  }
}

TEST_CASE("subcommand help shows every flag with its default") {
  auto r = run_cli("train sgns --help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("--dim") != std::string::npos);
  CHECK(r.out.find("[300]") != std::string::npos);
  CHECK(r.out.find("--window") != std::string::npos);
  CHECK(r.out.find("[11]") != std::string::npos);
  CHECK(r.out.find("--epochs") != std::string::npos);
  CHECK(r.out.find("[80]") != std::string::npos);
  CHECK(r.out.find("--negatives") != std::string::npos);
  CHECK(r.out.find("[5]") != std::string::npos);
  CHECK(r.out.find("0.025") != std::string::npos);
  auto g = run_cli("train glove --help");
  CHECK(g.out.find("[100]") != std::string::npos);   // x-max
  CHECK(g.out.find("[0.75]") != std::string::npos);  // alpha
  auto t = run_cli("tokenizer train --help");
  CHECK(t.out.find("[32000]") != std::string::npos);
  auto s = run_cli("train subsgns --help");
  CHECK(s.out.find("[3]") != std::string::npos);
  CHECK(s.out.find("[2000000]") != std::string::npos);
}

TEST_CASE("unknown flags exit with the usage code") {
  auto r = run_cli("stats --corpus x.txt --no-such-flag");
  CHECK(r.exit_code == 64);
  CHECK(r.err.find("error: usage:") != std::string::npos);
}

TEST_CASE("missing files exit with the no-input code") {
  auto r = run_cli("stats --corpus /nonexistent/void.txt");
  CHECK(r.exit_code == 66);
  CHECK(r.err.find("error: config:") != std::string::npos);
}

TEST_CASE("malformed data exits with the data code") {
  testutil::TempDir tmp;
  auto bad = tmp.write("bad.vec", "2 3\nfoo 1 2\n");
  auto r = run_cli("nn foo --vectors " + bad);
  CHECK(r.exit_code == 65);
  CHECK(r.err.find("error: data:") != std::string::npos);
}

TEST_CASE("two config files conflict") {
  testutil::TempDir tmp;
  auto cfg = tmp.write("a.cfg", "dim = 8\n");
  auto r = run_cli("train sgns --config " + cfg + " --config " + cfg);
  CHECK(r.exit_code == 67);
  CHECK(r.err.find("error: conflict:") != std::string::npos);
}

TEST_CASE("numeric blowups exit with the numeric code") {
  testutil::TempDir tmp;
  auto r = run_cli("train sgns --corpus " + data_file("toy_corpus.txt") +
                   " --dim 8 --epochs 1 --lr 1e30 --out " + tmp.path("v.vec"));
  CHECK(r.exit_code == 70);
  CHECK(r.err.find("error: numeric:") != std::string::npos);
}

TEST_CASE("config file fills defaults and command-line flags win") {
  testutil::TempDir tmp;
  auto cfg = tmp.write("run.cfg",
                       "# toy training config\n"
                       "dim = 8\n"
                       "epochs = 0\n"
                       "corpus = " + data_file("toy_corpus.txt") + "\n");
  auto out1 = tmp.path("a.vec");
  auto r1 = run_cli("train sgns --config " + cfg + " --out " + out1);
  CHECK(r1.exit_code == 0);
  std::string header1 = testutil::read_file(out1).substr(0, 20);
  CHECK(header1.find(" 8\n") != std::string::npos);

  auto out2 = tmp.path("b.vec");
  auto r2 = run_cli("train sgns --config " + cfg + " --dim 4 --out " + out2);
  CHECK(r2.exit_code == 0);
  std::string header2 = testutil::read_file(out2).substr(0, 20);
  CHECK(header2.find(" 4\n") != std::string::npos);
}

TEST_CASE("stats reports corpus counts") {
  testutil::TempDir tmp;
  auto corpus = tmp.write("c.txt", "a b\nc\na\n");
  auto r = run_cli("stats --corpus " + corpus);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("sentences\t3") != std::string::npos);
  CHECK(r.out.find("tokens\t4") != std::string::npos);
  CHECK(r.out.find("distinct_tokens\t3") != std::string::npos);
}

TEST_CASE("tokenizer pipeline roundtrips a file") {
  testutil::TempDir tmp;
  auto model = tmp.path("toy.subword");
  auto r1 = run_cli("tokenizer train --corpus " + data_file("toy_corpus.txt") +
                    " --vocab-size 100 --out " + model);
  REQUIRE(r1.exit_code == 0);
  auto text = tmp.write("in.txt", "zuv bem kat\nrip tog\n");
  auto encoded = tmp.path("enc.txt");
  auto r2 = run_cli("tokenizer encode --model " + model + " --in " + text + " --out " + encoded);
  REQUIRE(r2.exit_code == 0);
  auto decoded = tmp.path("dec.txt");
  auto r3 =
      run_cli("tokenizer decode --model " + model + " --in " + encoded + " --out " + decoded);
  REQUIRE(r3.exit_code == 0);
  CHECK(testutil::read_file(decoded) == testutil::read_file(text));
}

TEST_CASE("nn prints tab-separated neighbors") {
  testutil::TempDir tmp;
  auto vec = tmp.write("v.vec", "3 2\nalpha 1 0\nbeta 0.9 0.1\ngamma 0 1\n");
  auto r = run_cli("nn alpha --vectors " + vec + " --k 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("beta\t0.99") != std::string::npos);
  size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 2);
}

TEST_CASE("project emits label x y rows") {
  testutil::TempDir tmp;
  auto vec = tmp.write("v.vec", "3 3\na 1 0 0\nb -1 0 0\nc 0 0.5 0\n");
  auto out = tmp.path("coords.tsv");
  auto r = run_cli("project " + vec + " --out " + out);
  CHECK(r.exit_code == 0);
  std::string tsv = testutil::read_file(out);
  size_t lines = 0;
  for (char c : tsv) lines += c == '\n';
  CHECK(lines == 3);
  CHECK(tsv.find("a\t") != std::string::npos);
}

TEST_CASE("eval all produces the report table and TSV") {
  testutil::TempDir tmp;
  auto r1 = run_cli("train sgns --corpus " + data_file("toy_corpus.txt") +
                    " --dim 16 --epochs 2 --seed 4 --out " + tmp.path("m.vec"));
  REQUIRE(r1.exit_code == 0);
  auto r = run_cli("eval all --vectors " + tmp.path("m.vec") +
                   " --relatedness " + data_file("toy_relatedness.tsv") +
                   " --synonym " + data_file("toy_synonym.tsv") +
                   " --analogy " + data_file("toy_analogy.tsv") +
                   " --categorization-syn " + data_file("toy_categorization_syn.tsv") +
                   " --categorization-sem " + data_file("toy_categorization_sem.tsv") +
                   " --tsv " + tmp.path("report.tsv") +
                   " --emit-per-item " + tmp.path("items.tsv"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("Relatedness") != std::string::npos);
  CHECK(r.out.find("Categorization") != std::string::npos);
  CHECK(r.out.find("Similarity") != std::string::npos);
  CHECK(r.out.find("Analogy") != std::string::npos);
  CHECK(r.out.find("\nm ") != std::string::npos);  // model row named after the file stem
  std::string tsv = testutil::read_file(tmp.path("report.tsv"));
  CHECK(tsv.find("model\ttask\tmetric\tvalue\toov_count\tn_items") == 0);
  CHECK(tsv.find("\trelatedness\tmacro_f1\t") != std::string::npos);
  CHECK(tsv.find("\tanalogy-syn\taccuracy\t") != std::string::npos);
  std::string items = testutil::read_file(tmp.path("items.tsv"));
  CHECK(items.find("relatedness\t") != std::string::npos);
  CHECK(items.find("analogy\t") != std::string::npos);
}

TEST_CASE("eval without any model file is a config error") {
  auto r = run_cli("eval all --relatedness " + data_file("toy_relatedness.tsv"));
  CHECK(r.exit_code == 66);
}

TEST_CASE("inventory builders run against the bundled lexicon") {
  testutil::TempDir tmp;
  auto rel = tmp.path("rel.tsv");
  auto r1 = run_cli("inventory build-relatedness --lexicon " + data_file("toy_lexicon.tsv") +
                    " --n-total 90 --dev-fraction 0.5 --seed 2 --out " + rel);
  REQUIRE(r1.exit_code == 0);
  auto v1 = run_cli("inventory validate --kind relatedness " + rel);
  CHECK(v1.exit_code == 0);
  CHECK(v1.out.find("90 pairs") != std::string::npos);

  auto syn = tmp.path("syn.tsv");
  auto r2 = run_cli("inventory build-synonym --lexicon " + data_file("toy_lexicon.tsv") +
                    " --seed 2 --out " + syn);
  REQUIRE(r2.exit_code == 0);
  CHECK(run_cli("inventory validate --kind synonym " + syn).exit_code == 0);

  auto ana = tmp.path("ana.tsv");
  auto r3 = run_cli("inventory build-analogy --paradigms " + data_file("toy_paradigms.tsv") +
                    " --relations " + data_file("toy_relations.tsv") + " --out " + ana);
  REQUIRE(r3.exit_code == 0);
  CHECK(run_cli("inventory validate --kind analogy " + ana).exit_code == 0);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  testutil::TempDir tmp;
  std::string flags = "--dim 12 --epochs 2 --seed 31 --workers 1";
  auto r1 = run_cli("train sgns --corpus " + data_file("toy_corpus.txt") + " " + flags +
                    " --out " + tmp.path("a.vec") + " --save-vocab " + tmp.path("a.vocab"));
  auto r2 = run_cli("train sgns --corpus " + data_file("toy_corpus.txt") + " " + flags +
                    " --out " + tmp.path("b.vec") + " --save-vocab " + tmp.path("b.vocab"));
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(testutil::read_file(tmp.path("a.vec")) == testutil::read_file(tmp.path("b.vec")));
  CHECK(testutil::read_file(tmp.path("a.vocab")) == testutil::read_file(tmp.path("b.vocab")));
}

TEST_CASE("glove round-trips its co-occurrence file") {
  testutil::TempDir tmp;
  auto r1 = run_cli("train glove --corpus " + data_file("toy_corpus.txt") +
                    " --dim 8 --epochs 1 --seed 3 --out " + tmp.path("g1.vec") +
                    " --save-cooc " + tmp.path("g.cooc") + " --save-vocab " + tmp.path("g.vocab"));
  REQUIRE(r1.exit_code == 0);
  auto r2 = run_cli("train glove --cooc " + tmp.path("g.cooc") + " --vocab " +
                    tmp.path("g.vocab") + " --dim 8 --epochs 1 --seed 3 --out " +
                    tmp.path("g2.vec"));
  REQUIRE(r2.exit_code == 0);
  CHECK(testutil::read_file(tmp.path("g1.vec")) == testutil::read_file(tmp.path("g2.vec")));

  auto conflict = run_cli("train glove --cooc " + tmp.path("g.cooc") + " --corpus " +
                          data_file("toy_corpus.txt") + " --out " + tmp.path("g3.vec"));
  CHECK(conflict.exit_code == 67);
}

TEST_CASE("eval and nn accept subsgns models directly") {
  testutil::TempDir tmp;
  auto model = tmp.path("m.subsgns");
  auto r1 = run_cli("train subsgns --corpus " + data_file("toy_corpus.txt") +
                    " --dim 8 --epochs 1 --seed 2 --subsample 0 --buckets 5000 --out " + model);
  REQUIRE(r1.exit_code == 0);
  auto r2 = run_cli("eval synonym --subsgns-model " + model + " --synonym " +
                    data_file("toy_synonym.tsv"));
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("Similarity") != std::string::npos);
  auto r3 = run_cli("nn zuvunseen --subsgns-model " + model + " --k 3");
  CHECK(r3.exit_code == 0);
  CHECK(r3.err.find("OOV") != std::string::npos);  // composed, flagged on stderr
  size_t lines = 0;
  for (char c : r3.out) lines += c == '\n';
  CHECK(lines == 3);
}

TEST_CASE("subsgns exports composed vectors for a word list") {
  testutil::TempDir tmp;
  auto wordlist = tmp.write("words.txt", "zuv\nbem\nunseenword\n");
  auto r = run_cli("train subsgns --corpus " + data_file("toy_corpus.txt") +
                   " --dim 8 --epochs 1 --seed 6 --subsample 0 --out " + tmp.path("m.subsgns") +
                   " --export-composed " + wordlist + " " + tmp.path("composed.vec"));
  REQUIRE(r.exit_code == 0);
  std::string composed = testutil::read_file(tmp.path("composed.vec"));
  CHECK(composed.rfind("3 8\n", 0) == 0);
  CHECK(composed.find("unseenword ") != std::string::npos);
}

}  // TEST_SUITE
