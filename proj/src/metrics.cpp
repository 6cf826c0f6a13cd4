#include "pixeltrack/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "pixeltrack/assignment.hpp"

namespace pixeltrack {

double box_iou(double l1, double t1, double w1, double h1, double l2, double t2, double w2,
               double h2) {
    const double ix = std::max(0.0, std::min(l1 + w1, l2 + w2) - std::max(l1, l2));
    const double iy = std::max(0.0, std::min(t1 + h1, t2 + h2) - std::max(t1, t2));
    const double inter = ix * iy;
    const double uni = w1 * h1 + w2 * h2 - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

constexpr double kBig = 1e9;

double row_iou(const MotRow& a, const MotRow& b) {
    return box_iou(a.left, a.top, a.width, a.height, b.left, b.top, b.width, b.height);
}

void validate(const std::vector<MotRow>& rows, const char* what) {
    for (const MotRow& r : rows) {
        if (r.frame < 1)
            throw std::invalid_argument(std::string("evaluate: ") + what + " frame " +
                                        std::to_string(r.frame) + " out of range");
        if (r.width <= 0 || r.height <= 0)
            throw std::invalid_argument(std::string("evaluate: ") + what +
                                        " non-positive box in frame " + std::to_string(r.frame));
    }
}

SequenceEval evaluate_one(const std::string& name, const std::vector<MotRow>& gt_rows,
                          const std::vector<MotRow>& hyp_rows, const EvalConfig& config) {
    validate(gt_rows, "gt");
    validate(hyp_rows, "hypothesis");

    std::vector<MotRow> gt;
    gt.reserve(gt_rows.size());
    for (const MotRow& r : gt_rows) {
        if (r.conf == 0.0) continue;  // inactive annotation
        if (r.visibility >= 0.0 && r.visibility < config.min_visibility) continue;
        gt.push_back(r);
    }

    const auto gt_frames = group_by_frame(gt);
    const auto hyp_frames = group_by_frame(hyp_rows);
    std::set<int> frames;
    for (const auto& [f, _] : gt_frames) frames.insert(f);
    for (const auto& [f, _] : hyp_frames) frames.insert(f);

    SequenceEval ev;
    ev.name = name;

    std::map<int, int> last_match;                  // gt id -> hyp id
    std::map<int, long> gt_length, gt_covered;      // per gt trajectory
    static const std::vector<MotRow> kNone;

    for (int frame : frames) {
        const auto git = gt_frames.find(frame);
        const auto hit = hyp_frames.find(frame);
        const std::vector<MotRow>& g = git != gt_frames.end() ? git->second : kNone;
        const std::vector<MotRow>& h = hit != hyp_frames.end() ? hit->second : kNone;
        ev.gt_count += static_cast<long>(g.size());
        for (const MotRow& r : g) gt_length[r.id] += 1;

        std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);
        long matched = 0;

        // Persistent-match carryover: keep last frame's pairing wherever it
        // still overlaps.
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto prev = last_match.find(g[i].id);
            if (prev == last_match.end()) continue;
            for (std::size_t j = 0; j < h.size(); ++j) {
                if (h_used[j] || h[j].id != prev->second) continue;
                if (row_iou(g[i], h[j]) >= config.iou_threshold) {
                    g_used[i] = 1;
                    h_used[j] = 1;
                    ++matched;
                    gt_covered[g[i].id] += 1;
                }
                break;
            }
        }

        // Hungarian over the rest, gated at the IoU threshold.
        std::vector<int> gi, hj;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!g_used[i]) gi.push_back(static_cast<int>(i));
        for (std::size_t j = 0; j < h.size(); ++j)
            if (!h_used[j]) hj.push_back(static_cast<int>(j));
        if (!gi.empty() && !hj.empty()) {
            std::vector<std::vector<double>> cost(gi.size(), std::vector<double>(hj.size()));
            for (std::size_t a = 0; a < gi.size(); ++a)
                for (std::size_t b = 0; b < hj.size(); ++b) {
                    const double iou = row_iou(g[gi[a]], h[hj[b]]);
                    cost[a][b] = iou >= config.iou_threshold ? 1.0 - iou : kBig;
                }
            const Assignment assign = solve_assignment(cost);
            for (std::size_t a = 0; a < gi.size(); ++a) {
                const int b = assign.row_to_col[a];
                if (b < 0 || cost[a][b] >= kBig) continue;
                const int gt_id = g[gi[a]].id;
                const int hyp_id = h[hj[b]].id;
                const auto prev = last_match.find(gt_id);
                if (prev != last_match.end() && prev->second != hyp_id) ev.idsw += 1;
                last_match[gt_id] = hyp_id;
                ++matched;
                gt_covered[gt_id] += 1;
            }
        }

        ev.fn += static_cast<long>(g.size()) - matched;
        ev.fp += static_cast<long>(h.size()) - matched;
    }

    ev.mota = 1.0 - static_cast<double>(ev.fp + ev.fn + ev.idsw) /
                        std::max<long>(ev.gt_count, 1);

    // Trajectory coverage for MT/ML.
    ev.gt_tracks = static_cast<int>(gt_length.size());
    for (const auto& [id, len] : gt_length) {
        const double ratio = static_cast<double>(gt_covered[id]) / len;
        if (ratio >= 0.8) ev.mostly_tracked += 1;
        if (ratio <= 0.2) ev.mostly_lost += 1;
    }

    // Global identity mapping for IDF1 (trajectory-level min-cost matching
    // with dummy rows/columns for unmatched trajectories).
    std::map<int, std::map<int, const MotRow*>> gt_traj, hyp_traj;
    for (const MotRow& r : gt) gt_traj[r.id][r.frame] = &r;
    for (const MotRow& r : hyp_rows) hyp_traj[r.id][r.frame] = &r;

    std::vector<int> gt_ids, hyp_ids;
    for (const auto& [id, _] : gt_traj) gt_ids.push_back(id);
    for (const auto& [id, _] : hyp_traj) hyp_ids.push_back(id);
    const std::size_t k = gt_ids.size(), m = hyp_ids.size();

    long total_hyp = 0;
    for (const auto& [id, t] : hyp_traj) total_hyp += static_cast<long>(t.size());

    if (k + m > 0) {
        std::vector<std::vector<long>> overlap(k, std::vector<long>(m, 0));
        for (std::size_t a = 0; a < k; ++a) {
            const auto& gmap = gt_traj[gt_ids[a]];
            for (std::size_t b = 0; b < m; ++b) {
                const auto& hmap = hyp_traj[hyp_ids[b]];
                for (const auto& [frame, grow] : gmap) {
                    const auto it = hmap.find(frame);
                    if (it != hmap.end() && row_iou(*grow, *it->second) >= config.iou_threshold)
                        overlap[a][b] += 1;
                }
            }
        }
        const std::size_t dim = k + m;
        std::vector<std::vector<double>> cost(dim, std::vector<double>(dim, 0.0));
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) {
                if (a < k && b < m) {
                    const long lg = static_cast<long>(gt_traj[gt_ids[a]].size());
                    const long lh = static_cast<long>(hyp_traj[hyp_ids[b]].size());
                    cost[a][b] = static_cast<double>(lg + lh - 2 * overlap[a][b]);
                } else if (a < k) {
                    cost[a][b] = (b == m + a) ? static_cast<double>(gt_traj[gt_ids[a]].size())
                                              : kBig;
                } else if (b < m) {
                    cost[a][b] = (a == k + b) ? static_cast<double>(hyp_traj[hyp_ids[b]].size())
                                              : kBig;
                }
            }
        const Assignment assign = solve_assignment(cost);
        for (std::size_t a = 0; a < k; ++a) {
            const int b = assign.row_to_col[a];
            if (b >= 0 && b < static_cast<int>(m)) ev.idtp += overlap[a][b];
        }
    }
    ev.idfn = ev.gt_count - ev.idtp;
    ev.idfp = total_hyp - ev.idtp;
    const long denom = 2 * ev.idtp + ev.idfp + ev.idfn;
    ev.idf1 = denom > 0 ? 2.0 * static_cast<double>(ev.idtp) / denom : 1.0;
    return ev;
}

}  // namespace

EvalReport evaluate(const std::vector<MotRow>& gt, const std::vector<MotRow>& hyp,
                    const EvalConfig& config) {
    return evaluate_sequences({NamedSequence{"seq", gt, hyp}}, config);
}

EvalReport evaluate_sequences(const std::vector<NamedSequence>& sequences,
                              const EvalConfig& config) {
    EvalReport report;
    long gt_total = 0, idtp = 0, idfp = 0, idfn = 0;
    int tracks = 0, mt = 0, ml = 0;
    for (const NamedSequence& seq : sequences) {
        SequenceEval ev = evaluate_one(seq.name, seq.gt, seq.hyp, config);
        report.fp += ev.fp;
        report.fn += ev.fn;
        report.idsw += ev.idsw;
        gt_total += ev.gt_count;
        idtp += ev.idtp;
        idfp += ev.idfp;
        idfn += ev.idfn;
        tracks += ev.gt_tracks;
        mt += ev.mostly_tracked;
        ml += ev.mostly_lost;
        report.sequences.push_back(std::move(ev));
    }
    report.mota =
        1.0 - static_cast<double>(report.fp + report.fn + report.idsw) / std::max<long>(gt_total, 1);
    const long denom = 2 * idtp + idfp + idfn;
    report.idf1 = denom > 0 ? 2.0 * static_cast<double>(idtp) / denom : 1.0;
    report.mt = tracks > 0 ? static_cast<double>(mt) / tracks : 0.0;
    report.ml = tracks > 0 ? static_cast<double>(ml) / tracks : 0.0;
    return report;
}

}  // namespace pixeltrack
