#include "ens/eval/sweep.hpp"

#include <algorithm>
#include <cstdio>

#include "ens/core/error.hpp"
#include "ens/training/loop.hpp"

namespace ens::eval {

std::vector<SweepPoint> default_grid() {
  std::vector<SweepPoint> grid;
  for (double t1 : {0.75, 0.8, 0.85}) {
    for (double t2 : {0.35, 0.4, 0.45}) grid.push_back({t1, t2, t1});
  }
  return grid;
}

std::vector<MetricReport> threshold_sensitivity_sweep(const PipelineRunner& runner,
                                                      const training::TrainingConfig& base,
                                                      const std::vector<SweepPoint>& grid) {
  auto points = grid;
  std::stable_sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.tau1 != b.tau1 ? a.tau1 < b.tau1 : a.tau2 < b.tau2;
  });
  std::vector<MetricReport> rows;
  for (const auto& p : points) {
    auto cfg = base;
    cfg.tau1 = p.tau1;
    cfg.tau2 = p.tau2;
    cfg.tau3 = p.tau3;
    MetricReport row;
    try {
      cfg.validate();
      row = runner(cfg);
    } catch (const std::exception& e) {
      row = MetricReport{};
      row.error = e.what();
    }
    row.tau1 = p.tau1;
    row.tau2 = p.tau2;
    row.tau3 = p.tau3;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<MetricReport>& rows) {
  std::string out = "tau1,tau2,tau3,ppl,b4,d3,bsf1,rlen,ea,ensc\n";
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("nan");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out += cell(r.tau1) + "," + cell(r.tau2) + "," + cell(r.tau3) + "," + cell(r.ppl) + "," +
           cell(r.b4) + "," + cell(r.d3) + "," + cell(r.bsf1) + "," + cell(r.rlen) + "," +
           cell(r.ea) + "," + cell(r.ensc) + "\n";
  }
  return out;
}

PipelineRunner make_pipeline_runner(PipelineInputs in) {
  if (!in.embedder) throw Error(ErrorCode::kConfig, "pipeline runner needs an embedder");
  return [in = std::move(in)](const training::TrainingConfig& cfg) {
    training::LoopOptions lo;
    const auto state = training::run_iterative_loop(in.factory, *in.embedder, in.labeled, in.unlabeled,
                                                    cfg, lo);
    auto policy = in.factory();
    policy->restore(*state.final_policy);
    auto opts = in.eval;
    opts.mask = cfg.mask;
    opts.decoding.seed = cfg.seed;
    return evaluate_policy(*policy, *in.embedder, in.test, opts);
  };
}

}  // namespace ens::eval
