#pragma once

#include <string>
#include <vector>

#include "pixeltrack/mot_io.hpp"

namespace pixeltrack {

struct EvalConfig {
    double iou_threshold = 0.5;
    // Ground-truth rows below this visibility are ignored (rows with the
    // unknown marker -1 are kept).
    double min_visibility = 0.1;
};

struct SequenceEval {
    std::string name;
    long gt_count = 0;
    long fp = 0;
    long fn = 0;
    long idsw = 0;
    long idtp = 0;
    long idfp = 0;
    long idfn = 0;
    int gt_tracks = 0;
    int mostly_tracked = 0;
    int mostly_lost = 0;
    double mota = 0.0;
    double idf1 = 0.0;
};

/// CLEAR-MOT and identity metrics. mota can go negative; idf1, mt, ml are
/// fractions in [0,1].
struct EvalReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double mt = 0.0;
    double ml = 0.0;
    long fp = 0;
    long fn = 0;
    long idsw = 0;
    std::vector<SequenceEval> sequences;
};

/// Evaluate one sequence: per-frame Hungarian matching on 1-IoU with the
/// CLEAR persistent-match carryover, then the global min-cost identity
/// mapping for IDF1 and 80%/20% coverage fractions for MT/ML.
EvalReport evaluate(const std::vector<MotRow>& gt, const std::vector<MotRow>& hyp,
                    const EvalConfig& config = {});

struct NamedSequence {
    std::string name;
    std::vector<MotRow> gt;
    std::vector<MotRow> hyp;
};

/// Evaluate several sequences and aggregate the counts into one report.
EvalReport evaluate_sequences(const std::vector<NamedSequence>& sequences,
                              const EvalConfig& config = {});

/// Intersection-over-union of two top-left-origin boxes.
double box_iou(double l1, double t1, double w1, double h1, double l2, double t2, double w2,
               double h2);

}  // namespace pixeltrack
