#pragma once

#include "kgalign/training.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kgalign {

/// Joint run on a digit dataset against a human graph. Writes into out_dir:
/// metrics.csv, alignment.json, kgv_means.json, vsa_g.json,
/// vsa_nn_initial.json, vsa_nn_final.json and checkpoint.{json,bin}.
struct Experiment1Result {
    std::vector<EpochMetrics> history;
    AlignmentReport final_report;
};

Experiment1Result run_experiment1(const TrainConfig& cfg, const std::filesystem::path& kg_path,
                                  const std::filesystem::path& mnist_dir,
                                  const std::filesystem::path& out_dir);

enum class SweepAxis {
    EntityCount,
    RelationProportion,
    TripletProportion,
    DistributionAlpha,
    NnConceptRatio,
};

SweepAxis sweep_axis_from_name(const std::string& name); // throws InvalidArgument
std::string sweep_axis_name(SweepAxis axis);

/// One swept aspect; every other aspect stays at its default.
struct SweepSpec {
    SweepAxis axis = SweepAxis::EntityCount;
    std::vector<double> values;
    int seeds_per_point = 5;
    VsaAlignConfig align; // schedule shared by every point
};

struct SweepRow {
    std::string axis;
    double value = 0.0;
    int seed = 0;
    double consistency = 0.0;
    double similarity = 0.0;
    double bipolar_loss = 0.0;
    double recovered = 0.0;
};

/// Runs the sweep and writes out_dir/sweep.csv (one row per value x seed).
std::vector<SweepRow> run_experiment2(const SweepSpec& sweep,
                                      const std::filesystem::path& out_dir);

/// Mean consistency at each sweep value, in value order.
std::vector<double> sweep_point_means(const std::vector<SweepRow>& rows,
                                      const std::vector<double>& values);

} // namespace kgalign
