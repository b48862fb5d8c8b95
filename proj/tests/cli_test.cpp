#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "notesect/labeltree.hpp"
#include "notesect/synthetic.hpp"
#include "test_util.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

const char* cli_path() {
  const char* p = std::getenv("NOTESECT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "NOTESECT_CLI must point at the binary under test");
  return p;
}

RunResult run(const std::string& args, const testutil::TempDir& tmp) {
  std::string out_file = (tmp.path() / "cmd_stdout").string();
  std::string err_file = (tmp.path() / "cmd_stderr").string();
  std::string cmd = std::string(cli_path()) + " " + args + " >" + out_file + " 2>" + err_file;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file(out_file);
  r.err = testutil::read_file(err_file);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string write_two_branch_hierarchy(const testutil::TempDir& tmp) {
  return tmp.write("twobranch.tsv",
                   "!root\t1\n"
                   "2\t1\n"
                   "3\t1\n"
                   "5\t2\n"
                   "6\t3\n"
                   "7\t3\n")
      .string();
}

std::string write_synthetic_hierarchy(const testutil::TempDir& tmp) {
  std::string body = "!root\tROOT\n";
  for (const auto& [child, parent] :
       notesect::derive_dotted_parents(notesect::synthetic_code_universe()))
    body += child + "\t" + parent + "\n";
  return tmp.write("codes.tsv", body).string();
}

}  // namespace

TEST_CASE("similarity prints the bare value") {
  testutil::TempDir tmp;
  std::string h = write_two_branch_hierarchy(tmp);
  RunResult r = run("similarity --hierarchy " + h + " --labels-a 5,7 --labels-b 2,6", tmp);
  CHECK(r.code == 0);
  CHECK(r.out == "0.200000\n");

  r = run("similarity --hierarchy " + h + " --labels-a 5,7 --labels-b 5,7", tmp);
  CHECK(r.code == 0);
  CHECK(r.out == "1.000000\n");

  r = run("similarity --hierarchy " + h +
              " --labels-a 5,7 --labels-b 2,6 --similarity jaccard",
          tmp);
  CHECK(r.code == 0);
  CHECK(r.out == "0.000000\n");
}

TEST_CASE("bad invocations exit 2") {
  testutil::TempDir tmp;
  CHECK(run("no-such-subcommand", tmp).code == 2);
  CHECK(run("", tmp).code == 2);
  CHECK(run("similarity --labels-a x", tmp).code == 2);  // missing required flag

  // randomized subcommands refuse to run without a seed
  RunResult r = run("make-pairs --segmented x --hierarchy y --out z", tmp);
  CHECK(r.code == 2);
  CHECK(r.err.find("requires --seed") != std::string::npos);
  r = run("augment --segmented x --out z", tmp);
  CHECK(r.code == 2);
  CHECK(r.err.find("requires --seed") != std::string::npos);
  r = run("gen-synthetic --out z", tmp);
  CHECK(r.code == 2);
  CHECK(r.err.find("requires --seed") != std::string::npos);

  // similarity mode names are validated
  std::string h = write_two_branch_hierarchy(tmp);
  r = run("similarity --hierarchy " + h + " --labels-a 5 --labels-b 6 --similarity fuzzy", tmp);
  CHECK(r.code == 2);

  // unknown config keys are refused
  auto cfg = tmp.write("bad.cfg", "bogus=1\n");
  r = run("--config " + cfg.string() + " similarity --hierarchy " + h +
              " --labels-a 5 --labels-b 6",
          tmp);
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("runtime failures exit 1") {
  testutil::TempDir tmp;
  RunResult r = run("extract-titles --corpus /no/such/file.jsonl --out " +
                        (tmp.path() / "t.tsv").string(),
                    tmp);
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  // bare root vs bare root has no defined similarity
  std::string h = write_two_branch_hierarchy(tmp);
  r = run("similarity --hierarchy " + h + " --labels-a 1 --labels-b 1", tmp);
  CHECK(r.code == 1);
}

TEST_CASE("the pipeline runs end to end") {
  testutil::TempDir tmp;
  std::string dir = tmp.path().string();
  std::string synth = dir + "/synth.jsonl";
  std::string titles_tsv = dir + "/titles.tsv";
  std::string seg = dir + "/seg.jsonl";
  std::string pairs = dir + "/pairs.jsonl";
  std::string aug = dir + "/aug.jsonl";
  std::string hier = write_synthetic_hierarchy(tmp);

  RunResult r = run("gen-synthetic --docs 40 --seed 11 --out " + synth, tmp);
  REQUIRE(r.code == 0);
  auto synth_lines = lines_of(testutil::read_file(synth));
  REQUIRE(synth_lines.size() == 41);
  CHECK(synth_lines[0].rfind("# notesect 0.1.0 gen-synthetic", 0) == 0);

  r = run("extract-titles --corpus " + synth + " --out " + titles_tsv, tmp);
  REQUIRE(r.code == 0);
  auto tsv = lines_of(testutil::read_file(titles_tsv));
  REQUIRE(tsv.size() > 1);
  CHECK(tsv[0].rfind("# notesect 0.1.0 extract-titles", 0) == 0);
  std::set<std::string> perfect;
  for (std::size_t i = 1; i < tsv.size(); ++i) {
    std::size_t tab = tsv[i].find('\t');
    REQUIRE(tab != std::string::npos);
    if (tsv[i].substr(tab + 1, 8) == "1.000000") perfect.insert(tsv[i].substr(0, tab));
  }
  CHECK(perfect.size() == 23);
  CHECK(perfect.count("history of present illness") == 1);
  CHECK(perfect.count("brief hospital course") == 1);
  CHECK(perfect.count("sex") == 1);

  // threaded counting does not change a byte
  std::string titles_tsv4 = dir + "/titles4.tsv";
  r = run("extract-titles --corpus " + synth + " --threads 4 --out " + titles_tsv4, tmp);
  REQUIRE(r.code == 0);
  auto tsv4 = lines_of(testutil::read_file(titles_tsv4));
  REQUIRE(tsv4.size() == tsv.size());
  for (std::size_t i = 1; i < tsv.size(); ++i) CHECK(tsv4[i] == tsv[i]);

  r = run("segment --corpus " + synth + " --out " + seg, tmp);
  REQUIRE(r.code == 0);
  auto seg_lines = lines_of(testutil::read_file(seg));
  REQUIRE(seg_lines.size() == 41);
  CHECK(seg_lines[0].rfind("# notesect 0.1.0 segment", 0) == 0);
  CHECK(seg_lines[1].find("\"id\":\"note-0000\"") != std::string::npos);
  CHECK(seg_lines[1].find("\"sections\":[") != std::string::npos);

  r = run("make-pairs --segmented " + seg + " --hierarchy " + hier +
              " --count 50 --seed 7 --out " + pairs,
          tmp);
  REQUIRE(r.code == 0);
  auto pair_lines = lines_of(testutil::read_file(pairs));
  REQUIRE(pair_lines.size() == 51);
  CHECK(pair_lines[0].rfind("# notesect 0.1.0 make-pairs", 0) == 0);
  CHECK(pair_lines[1].find("\"note_i\":") != std::string::npos);
  CHECK(pair_lines[1].find("\"alpha\":") != std::string::npos);
  CHECK(pair_lines[1].find("\"s_k2j\":") != std::string::npos);

  // reruns are byte identical; strict mode only changes the header
  std::string pairs2 = dir + "/pairs2.jsonl";
  r = run("make-pairs --segmented " + seg + " --hierarchy " + hier +
              " --count 50 --seed 7 --out " + pairs2,
          tmp);
  REQUIRE(r.code == 0);
  CHECK(testutil::read_file(pairs2) == testutil::read_file(pairs));
  std::string pairs3 = dir + "/pairs3.jsonl";
  r = run("make-pairs --segmented " + seg + " --hierarchy " + hier +
              " --count 50 --seed 7 --strict --out " + pairs3,
          tmp);
  REQUIRE(r.code == 0);
  auto strict_lines = lines_of(testutil::read_file(pairs3));
  REQUIRE(strict_lines.size() == pair_lines.size());
  for (std::size_t i = 1; i < pair_lines.size(); ++i) CHECK(strict_lines[i] == pair_lines[i]);

  r = run("augment --segmented " + seg + " --gamma 0.3 --seed 5 --epochs 2 --out " + aug, tmp);
  REQUIRE(r.code == 0);
  auto aug_lines = lines_of(testutil::read_file(aug));
  REQUIRE(aug_lines.size() == 81);  // header + 40 docs x 2 epochs
  CHECK(aug_lines[0].rfind("# notesect 0.1.0 augment", 0) == 0);
  CHECK(aug_lines[1].find("\"epoch\":0") != std::string::npos);
  CHECK(aug_lines[2].find("\"epoch\":1") != std::string::npos);
  std::string aug2 = dir + "/aug2.jsonl";
  r = run("augment --segmented " + seg + " --gamma 0.3 --seed 5 --epochs 2 --out " + aug2, tmp);
  REQUIRE(r.code == 0);
  CHECK(testutil::read_file(aug2) == testutil::read_file(aug));

  // near-total masking floods the stderr warning but still succeeds
  r = run("augment --segmented " + seg + " --gamma 0.99 --seed 5 --out " + dir + "/aug99.jsonl",
          tmp);
  CHECK(r.code == 0);
  CHECK(r.err.find("kept no sections") != std::string::npos);
}

TEST_CASE("evaluate reports fixed-point metrics") {
  testutil::TempDir tmp;
  std::string pred = tmp.write("pred.jsonl",
                               "{\"id\":\"d0\",\"scores\":{\"a\":0.9,\"b\":0.9,\"c\":0.9,"
                               "\"d\":0.9,\"e\":0.9},\"gold\":[\"a\",\"b\",\"c\",\"d\",\"e\"]}\n"
                               "{\"id\":\"d1\",\"scores\":{\"a\":0.9,\"b\":0.9,\"c\":0.9,"
                               "\"d\":0.9,\"e\":0.9},\"gold\":[\"a\",\"b\",\"c\",\"d\",\"e\"]}\n")
                         .string();
  RunResult r = run("evaluate --pred " + pred + " --k 5,8", tmp);
  REQUIRE(r.code == 0);
  auto out = lines_of(r.out);
  REQUIRE(out.size() == 5);
  CHECK(out[0].rfind("# notesect 0.1.0 evaluate", 0) == 0);
  CHECK(out[1] == "micro_f1=1.0000");
  CHECK(out[2] == "macro_f1=1.0000");
  CHECK(out[3] == "p_at_5=1.0000");
  CHECK(out[4] == "p_at_8=0.6250");
}

TEST_CASE("config files feed defaults and flags win") {
  testutil::TempDir tmp;
  std::string dir = tmp.path().string();
  std::string outdir = dir + "/cfgout";
  std::filesystem::create_directories(outdir);
  std::string cfg =
      tmp.write("run.cfg", "out_dir=" + outdir + "\nseed=77\ngamma=0.400000\n").string();

  RunResult r = run("gen-synthetic --docs 6 --seed 2 --out " + dir + "/c.jsonl", tmp);
  REQUIRE(r.code == 0);

  // segment takes its output name from out_dir
  r = run("--config " + cfg + " segment --corpus " + dir + "/c.jsonl", tmp);
  REQUIRE(r.code == 0);
  REQUIRE(std::filesystem::exists(outdir + "/segmented.jsonl"));

  // augment finds the segmented file, the seed and gamma in the config
  r = run("--config " + cfg + " augment", tmp);
  REQUIRE(r.code == 0);
  std::string aug = testutil::read_file(outdir + "/augmented.jsonl");
  CHECK(aug.find("gamma=0.400000") != std::string::npos);
  CHECK(aug.find("seed=77") != std::string::npos);

  // a flag beats the config value
  r = run("--config " + cfg + " augment --gamma 0.9 --out " + dir + "/over.jsonl", tmp);
  REQUIRE(r.code == 0);
  std::string over = testutil::read_file(dir + "/over.jsonl");
  CHECK(over.find("gamma=0.900000") != std::string::npos);
  CHECK(over.find("seed=77") != std::string::npos);
}
