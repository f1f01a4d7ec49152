// End-to-end criteria on the citation benchmarks. Bundles are read from
// $MGCN_DATA_ROOT/{cora,citeseer,pubmed} (build them with `mgcn convert`);
// criteria whose bundle is missing are reported as SKIP. Pubmed only runs
// when MGCN_ACCEPT_PUBMED=1.
#include "report.hpp"

#include <mgcn/trainer.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace mgcn::acceptance {
namespace {

std::filesystem::path data_root() {
  const char* env = std::getenv("MGCN_DATA_ROOT");
  return env != nullptr && *env != '\0' ? env : "data";
}

std::optional<Bundle> try_load(const std::string& name) {
  const auto dir = data_root() / name;
  if (!std::filesystem::exists(dir / "meta.json")) return std::nullopt;
  return load_bundle(dir);
}

TrainConfig preset(const std::string& name) {
  std::ifstream in(std::filesystem::path(MGCN_PRESET_DIR) / (name + ".json"));
  if (!in) throw DataError("missing preset " + name);
  return config_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

RepeatedResult repeat(const TrainConfig& config, const Bundle& b, Index runs) {
  RepeatOptions options;
  options.runs = runs;
  return run_repeated(config, b.dataset, b.split, options);
}

std::string pct(double accuracy) { return fixed(100.0 * accuracy, 2) + "%"; }

void end_to_end(Report& report, int id, const std::string& name, Index runs, double gate, double limit_seconds) {
  const std::string title = name + ": mean test accuracy over " + std::to_string(runs) + " seeds >= " +
                            fixed(100 * gate, 1) + "% within " + fixed(limit_seconds / 60, 0) + " min";
  const auto bundle = try_load(name);
  if (!bundle) {
    report.add(id, Status::skip, title, "no bundle at " + (data_root() / name).string());
    return;
  }
  Stopwatch clock;
  const RepeatedResult r = repeat(preset(name), *bundle, runs);
  const double secs = clock.seconds();
  report.check(id, r.mean >= gate && secs < limit_seconds, title,
               pct(r.mean) + " +/- " + fixed(100 * r.std, 2) + ", " + fixed(secs, 1) + " s");
}

void ablation(Report& report, const std::optional<Bundle>& cora) {
  const std::string title = "cora ablation: full > om_only > softmax, om_only - softmax >= 2 points";
  if (!cora) {
    report.add(9, Status::skip, title, "no cora bundle");
    return;
  }
  TrainConfig base = preset("cora");
  double acc[3];
  const Mode modes[3] = {Mode::full, Mode::om_only, Mode::softmax};
  for (int i = 0; i < 3; ++i) {
    base.mode = modes[i];
    acc[i] = repeat(base, *cora, 10).mean;
  }
  report.check(9, acc[0] > acc[1] && acc[1] > acc[2] && acc[1] - acc[2] >= 0.02, title,
               "full " + pct(acc[0]) + ", om_only " + pct(acc[1]) + ", softmax " + pct(acc[2]));
}

void sensitivity(Report& report, const std::optional<Bundle>& cora) {
  const std::string title = "cora lambda in 2^-3..2^3: max - min mean accuracy <= 3 points";
  if (!cora) {
    report.add(10, Status::skip, title, "no cora bundle");
    return;
  }
  TrainConfig config = preset("cora");
  std::vector<double> means;
  std::string detail;
  for (int e = -3; e <= 3; ++e) {
    config.lambda = std::ldexp(1.0, e);
    means.push_back(repeat(config, *cora, 10).mean);
    detail += "2^" + std::to_string(e) + ": " + pct(means.back()) + (e < 3 ? ", " : "");
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double spread = *hi - *lo;
  report.check(10, spread <= 0.03, title, detail + "; spread " + fixed(100 * spread, 2) + " points");
}

}  // namespace
}  // namespace mgcn::acceptance

int main() {
  using namespace mgcn::acceptance;
  Report report;
  try {
    end_to_end(report, 6, "cora", 10, 0.825, 600);
    end_to_end(report, 7, "citeseer", 10, 0.715, 900);
    const char* pubmed = std::getenv("MGCN_ACCEPT_PUBMED");
    if (pubmed != nullptr && std::string(pubmed) == "1") {
      end_to_end(report, 8, "pubmed", 5, 0.78, 3600);
    } else {
      report.add(8, Status::skip, "pubmed: mean test accuracy over 5 seeds >= 78.0% within 60 min",
                 "set MGCN_ACCEPT_PUBMED=1 to run");
    }
    const auto cora = try_load("cora");
    ablation(report, cora);
    sensitivity(report, cora);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << report.passes() << " passed, " << report.failures() << " failed, " << report.skips() << " skipped"
            << std::endl;
  return report.exit_code();
}
