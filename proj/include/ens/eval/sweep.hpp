#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ens/eval/report.hpp"
#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/records.hpp"

namespace ens::eval {

struct SweepPoint {
  double tau1 = 0.8, tau2 = 0.4, tau3 = 0.8;
};

// tau1 in {0.75, 0.8, 0.85} x tau2 in {0.35, 0.4, 0.45}, tau3 = tau1.
std::vector<SweepPoint> default_grid();

using PipelineRunner = std::function<MetricReport(const training::TrainingConfig&)>;

// One runner call per grid point; rows sorted by (tau1, tau2). A failing
// point yields a row with its error set and no metric values.
std::vector<MetricReport> threshold_sensitivity_sweep(const PipelineRunner& runner,
                                                      const training::TrainingConfig& base,
                                                      const std::vector<SweepPoint>& grid);

// Header: tau1,tau2,tau3,ppl,b4,d3,bsf1,rlen,ea,ensc
std::string sweep_csv(const std::vector<MetricReport>& rows);

struct PipelineInputs {
  model::BackendFactory factory;
  const model::Embedder* embedder = nullptr;
  std::vector<training::LabeledRecord> labeled;
  std::vector<training::UnlabeledRecord> unlabeled;
  std::vector<training::LabeledRecord> test;
  EvalOptions eval;
};

// Runs the iterative loop in memory and evaluates its final policy.
PipelineRunner make_pipeline_runner(PipelineInputs inputs);

}  // namespace ens::eval
