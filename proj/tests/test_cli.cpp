#include <sstream>
#include <string>

#include "doctest.h"
#include "nsd/eval.hpp"
#include "nsd/grid_io.hpp"
#include "nsd/image.hpp"
#include "nsd/lcnn.hpp"
#include "nsd/rng.hpp"
#include "nsd/signal.hpp"
#include "support.hpp"

using namespace nsd;
using testutil::CliResult;
using testutil::make_test_image;
using testutil::read_file;
using testutil::run_cli;
using testutil::TempDir;
using testutil::write_file;

namespace {

// CSV text minus comment lines (the runtime footer is wall-clock noise).
std::string strip_comments(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

std::string make_corpus(const TempDir& dir, int n) {
  const std::string sub = dir.file("sharp");
  std::filesystem::create_directory(sub);
  for (int i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%02d.ppm", i);
    save_image(make_test_image(400 + static_cast<std::uint64_t>(i), 64, 64),
               sub + "/" + name);
  }
  return sub;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and usage errors") {
  TempDir dir;
  CliResult v = run_cli("--version", dir);
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("nsd 1.0") != std::string::npos);

  CliResult none = run_cli("", dir);
  CHECK(none.exit_code == 2);
  CHECK(none.err.rfind("usage-error:", 0) == 0);

  CliResult unknown = run_cli("frobnicate", dir);
  CHECK(unknown.exit_code == 2);

  // gen-rkg refuses to run without an explicit seed.
  CliResult noseed = run_cli("gen-rkg --out x.rkg --count 1", dir);
  CHECK(noseed.exit_code == 2);
  CHECK(noseed.err.rfind("usage-error:", 0) == 0);
}

TEST_CASE("gen-rkg: deterministic output plus a resolved config") {
  TempDir dir;
  const std::string a = dir.file("a.rkg");
  const std::string b = dir.file("b.rkg");
  const std::string c = dir.file("c.rkg");
  CHECK(run_cli("gen-rkg --out '" + a + "' --count 2 --seed 7", dir)
            .exit_code == 0);
  CHECK(run_cli("gen-rkg --out '" + b + "' --count 2 --seed 7", dir)
            .exit_code == 0);
  CHECK(run_cli("gen-rkg --out '" + c + "' --count 2 --seed 8", dir)
            .exit_code == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a) != read_file(c));

  const std::string cfg = read_file(a + ".config");
  CHECK(cfg.find("count=2\n") != std::string::npos);
  CHECK(cfg.find("seed=7\n") != std::string::npos);
  CHECK(cfg.find("sigma_lo=0.174") != std::string::npos);  // 0.175 via %.17g
}

TEST_CASE("config file feeds knobs; flags win; unknown keys are fatal") {
  TempDir dir;
  write_file(dir.file("good.config"), "count=3\nseed=11\n");
  const std::string a = dir.file("a.rkg");
  CHECK(run_cli("gen-rkg --out '" + a + "' --config '" +
                    dir.file("good.config") + "'",
                dir)
            .exit_code == 0);
  CHECK(load_rkg(a).kernels.size() == 3);
  CHECK(load_rkg(a).seed == 11);

  // A flag passed explicitly overrides the file.
  const std::string b = dir.file("b.rkg");
  CHECK(run_cli("gen-rkg --out '" + b + "' --config '" +
                    dir.file("good.config") + "' --count 5",
                dir)
            .exit_code == 0);
  CHECK(load_rkg(b).kernels.size() == 5);

  write_file(dir.file("bad.config"), "coutn=3\nseed=11\n");
  CliResult bad = run_cli("gen-rkg --out '" + dir.file("c.rkg") +
                              "' --config '" + dir.file("bad.config") + "'",
                          dir);
  CHECK(bad.exit_code == 4);
  CHECK(bad.err.rfind("format-error: unknown config key: coutn", 0) == 0);
}

TEST_CASE("error classes map to distinct exit codes") {
  TempDir dir;
  // Missing gallery file -> io error.
  CliResult io = run_cli("train --rkg '" + dir.file("absent.rkg") +
                             "' --out '" + dir.file("x.lcnn") + "' --seed 1",
                         dir);
  CHECK(io.exit_code == 5);
  CHECK(io.err.rfind("io-error:", 0) == 0);

  // Even sigma ordering violation -> contract error.
  CliResult ce = run_cli("gen-rkg --out '" + dir.file("x.rkg") +
                             "' --count 1 --sigma-lo 2 --sigma-hi 1 --seed 1",
                         dir);
  CHECK(ce.exit_code == 3);
  CHECK(ce.err.rfind("contract-error:", 0) == 0);

  // Garbage bytes where an RKG1 file should be -> format error.
  write_file(dir.file("junk.rkg"), "not a gallery");
  CliResult fe = run_cli("train --rkg '" + dir.file("junk.rkg") +
                             "' --out '" + dir.file("x.lcnn") + "' --seed 1",
                         dir);
  CHECK(fe.exit_code == 4);
  CHECK(fe.err.rfind("format-error:", 0) == 0);
}

TEST_CASE("deblur: delta kernel reproduces the file byte for byte") {
  TempDir dir;
  save_image(make_test_image(3, 40, 32), dir.file("in.ppm"));
  save_grid(make_impulse(11, 11, ImpulsePlacement::center), dir.file("delta.grd"));
  CliResult res = run_cli("deblur --in '" + dir.file("in.ppm") + "' --out '" +
                              dir.file("out.ppm") + "' --drk '" +
                              dir.file("delta.grd") + "'",
                          dir);
  CHECK(res.exit_code == 0);
  CHECK(res.err.empty());  // NSD_LOG=quiet keeps stderr silent on success
  CHECK(read_file(dir.file("out.ppm")) == read_file(dir.file("in.ppm")));

  // Exactly one kernel source may be given.
  CliResult both = run_cli("deblur --in '" + dir.file("in.ppm") +
                               "' --out '" + dir.file("o2.ppm") + "' --drk '" +
                               dir.file("delta.grd") +
                               "' --checkpoint whatever",
                           dir);
  CHECK(both.exit_code == 3);

  // Restoration kernels must be odd and square.
  save_grid(Grid2D(4, 4), dir.file("even.grd"));
  CliResult even = run_cli("deblur --in '" + dir.file("in.ppm") +
                               "' --out '" + dir.file("o3.ppm") + "' --drk '" +
                               dir.file("even.grd") + "'",
                           dir);
  CHECK(even.exit_code == 3);
  CHECK(even.err.find("odd and square") != std::string::npos);
}

TEST_CASE("sr: doubles the frame before restoring") {
  TempDir dir;
  save_image(make_test_image(5, 24, 20), dir.file("in.ppm"));
  save_grid(make_impulse(11, 11, ImpulsePlacement::center), dir.file("delta.grd"));
  CliResult res = run_cli("sr --in '" + dir.file("in.ppm") + "' --out '" +
                              dir.file("out.ppm") + "' --drk '" +
                              dir.file("delta.grd") + "' --scale 2",
                          dir);
  CHECK(res.exit_code == 0);
  const Image up = load_image(dir.file("out.ppm"));
  CHECK(up.planes[0].rows() == 48);
  CHECK(up.planes[0].cols() == 40);
}

TEST_CASE("extract-drk: summary line and a loadable kernel file") {
  TempDir dir;
  Rng rng(1);
  Lcnn::init_model(rng, Lcnn::default_channels(), InitScheme::near_identity,
                   0.0)
      .save(dir.file("ck.lcnn"));
  CliResult res = run_cli("extract-drk --checkpoint '" + dir.file("ck.lcnn") +
                              "' --out '" + dir.file("drk.grd") + "'",
                          dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out == "sum=1 min=0 max=1 center=1\n");
  const Grid2D drk = load_grid(dir.file("drk.grd"));
  CHECK(drk.rows() == 11);
  CHECK(drk(5, 5) == 1.0);
}

TEST_CASE("train: reruns are byte-identical, artifacts land next to --out") {
  TempDir dir;
  const std::string rkg = dir.file("g.rkg");
  REQUIRE(run_cli("gen-rkg --out '" + rkg + "' --count 6 --seed 3", dir)
              .exit_code == 0);
  const std::string args = "train --rkg '" + rkg +
                           "' --depth 1 --width 2 --epochs 2 --batch-size 4 "
                           "--seed 5 --out '";
  CHECK(run_cli(args + dir.file("ck.lcnn") + "'", dir).exit_code == 0);
  CHECK(run_cli(args + dir.file("ck2.lcnn") + "'", dir).exit_code == 0);
  CHECK(read_file(dir.file("ck.lcnn")) == read_file(dir.file("ck2.lcnn")));
  CHECK(read_file(dir.file("ck.lcnn.loss.csv")) ==
        read_file(dir.file("ck2.lcnn.loss.csv")));
  CHECK(read_file(dir.file("ck.lcnn.loss.csv"))
            .rfind("epoch,identity,r1,r2,r3,total\n", 0) == 0);
  const std::string cfg = read_file(dir.file("ck.lcnn.config"));
  CHECK(cfg.find("depth=1\n") != std::string::npos);
  CHECK(cfg.find("learning_rate=0.001\n") != std::string::npos);
}

TEST_CASE("eval: sharp-dir mode matches the library and needs a seed") {
  TempDir dir;
  const std::string sharp = make_corpus(dir, 1);
  CliResult noseed = run_cli("eval --method identity --sharp-dir '" + sharp +
                                 "' --out '" + dir.file("x.csv") + "'",
                             dir);
  CHECK(noseed.exit_code == 2);
  CHECK(noseed.err.rfind("usage-error:", 0) == 0);
  CHECK(noseed.err.find("--seed") != std::string::npos);

  CliResult res = run_cli("eval --method identity --sharp-dir '" + sharp +
                              "' --sizes 11,15 --seed 9 --out '" +
                              dir.file("id.csv") + "'",
                          dir);
  CHECK(res.exit_code == 0);

  SimulateOptions sim;
  sim.sizes = {11, 15};
  sim.seed = 9;
  const auto pairs = simulate_blur_dataset(sharp, sim);
  const EvalReport want = evaluate(EvalMethod::identity, pairs, nullptr);
  write_eval_csv(want, dir.file("want.csv"));
  CHECK(strip_comments(read_file(dir.file("id.csv"))) ==
        strip_comments(read_file(dir.file("want.csv"))));

  CliResult nockpt = run_cli("eval --method drk --sharp-dir '" + sharp +
                                 "' --sizes 11 --seed 9 --out '" +
                                 dir.file("y.csv") + "'",
                             dir);
  CHECK(nockpt.exit_code == 3);
  CHECK(nockpt.err.find("--checkpoint") != std::string::npos);
}

TEST_CASE("simulate writes a manifest that eval reproduces exactly") {
  TempDir dir;
  const std::string sharp = make_corpus(dir, 1);
  const std::string outdir = dir.file("blurred");
  CliResult sim = run_cli("simulate --sharp-dir '" + sharp + "' --out-dir '" +
                              outdir + "' --sizes 11,15 --seed 9",
                          dir);
  CHECK(sim.exit_code == 0);
  CHECK(std::filesystem::exists(outdir + "/manifest.txt"));
  CHECK(std::filesystem::exists(outdir + "/img_00_k11.ppm"));
  CHECK(std::filesystem::exists(outdir + "/run.config"));

  CliResult ev = run_cli("eval --method identity --manifest '" + outdir +
                             "/manifest.txt' --out '" + dir.file("m.csv") +
                             "'",
                         dir);
  CHECK(ev.exit_code == 0);
  CliResult ev2 = run_cli("eval --method identity --sharp-dir '" + sharp +
                              "' --sizes 11,15 --seed 9 --out '" +
                              dir.file("s.csv") + "'",
                          dir);
  CHECK(ev2.exit_code == 0);
  CHECK(strip_comments(read_file(dir.file("m.csv"))) ==
        strip_comments(read_file(dir.file("s.csv"))));

  CliResult bothsrc = run_cli("eval --method identity --manifest '" + outdir +
                                  "/manifest.txt' --sharp-dir '" + sharp +
                                  "' --out '" + dir.file("z.csv") + "'",
                              dir);
  CHECK(bothsrc.exit_code == 3);
}

TEST_CASE("info logging is opt-in") {
  TempDir dir;
  CliResult quiet = run_cli(
      "gen-rkg --out '" + dir.file("q.rkg") + "' --count 1 --seed 2", dir);
  CHECK(quiet.err.empty());
  CliResult chatty =
      run_cli("gen-rkg --out '" + dir.file("v.rkg") + "' --count 1 --seed 2",
              dir, "info");
  CHECK(chatty.err.find("wrote 1 kernels") != std::string::npos);
}

}  // TEST_SUITE
