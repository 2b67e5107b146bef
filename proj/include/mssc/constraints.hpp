#ifndef MSSC_CONSTRAINTS_HPP
#define MSSC_CONSTRAINTS_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace mssc {

using IndexPair = std::pair<int, int>;

inline IndexPair ordered_pair(int a, int b) { return a < b ? IndexPair{a, b} : IndexPair{b, a}; }

/// Must-link / cannot-link constraints over n points. The transitive closure
/// of must-link merges points into groups; a cannot-link pair inside one
/// group makes the set infeasible, which construction and the with_* helpers
/// report by returning nullopt.
class ConstraintSet {
public:
    explicit ConstraintSet(int n) : parent_(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
    }

    static std::optional<ConstraintSet> create(int n, const std::vector<IndexPair>& must,
                                               const std::vector<IndexPair>& cannot) {
        ConstraintSet cs(n);
        for (auto [a, b] : must)
            if (!cs.add_must_link(a, b)) return std::nullopt;
        for (auto [a, b] : cannot)
            if (!cs.add_cannot_link(a, b)) return std::nullopt;
        return cs;
    }

    int n() const { return static_cast<int>(parent_.size()); }

    const std::set<IndexPair>& must_link() const { return must_; }
    const std::set<IndexPair>& cannot_link() const { return cannot_; }

    /// Representative (smallest member) of the point's must-link group.
    int find(int i) const {
        while (parent_[static_cast<std::size_t>(i)] != i) i = parent_[static_cast<std::size_t>(i)];
        return i;
    }

    bool same_group(int i, int j) const { return find(i) == find(j); }

    bool separated(int i, int j) const {
        return cl_groups_.count(ordered_pair(find(i), find(j))) > 0;
    }

    bool decided(int i, int j) const { return same_group(i, j) || separated(i, j); }

    /// Groups in order of their smallest member; singletons included.
    std::vector<std::vector<int>> groups() const {
        std::vector<std::vector<int>> out;
        std::vector<int> slot(parent_.size(), -1);
        for (int i = 0; i < n(); ++i) {
            const int r = find(i);
            if (slot[static_cast<std::size_t>(r)] < 0) {
                slot[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
                out.emplace_back();
            }
            out[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
        }
        return out;
    }

    int group_count() const {
        int g = 0;
        for (int i = 0; i < n(); ++i)
            if (find(i) == i) ++g;
        return g;
    }

    /// True when every pair of points is either merged or separated.
    bool all_decided() const {
        const int g = group_count();
        return cl_groups_.size() == static_cast<std::size_t>(g) * (g - 1) / 2;
    }

    std::optional<ConstraintSet> with_must_link(int i, int j) const {
        ConstraintSet c = *this;
        if (!c.add_must_link(i, j)) return std::nullopt;
        return c;
    }

    std::optional<ConstraintSet> with_cannot_link(int i, int j) const {
        ConstraintSet c = *this;
        if (!c.add_cannot_link(i, j)) return std::nullopt;
        return c;
    }

    /// Pair-by-pair check that a label sequence honors every constraint.
    bool satisfied_by(const std::vector<int>& labels) const {
        for (auto [a, b] : must_)
            if (labels[static_cast<std::size_t>(a)] != labels[static_cast<std::size_t>(b)]) return false;
        for (auto [a, b] : cannot_)
            if (labels[static_cast<std::size_t>(a)] == labels[static_cast<std::size_t>(b)]) return false;
        return true;
    }

    bool empty() const { return must_.empty() && cannot_.empty(); }

    /// A greedy search for a cannot-link clique of more than k groups; a hit
    /// proves the node infeasible by pigeonhole. Misses are inconclusive.
    bool has_cl_clique_exceeding(int k) const {
        std::vector<int> reps;
        for (int i = 0; i < n(); ++i)
            if (find(i) == i) reps.push_back(i);
        const auto adjacent = [&](int a, int b) { return cl_groups_.count(ordered_pair(a, b)) > 0; };
        for (std::size_t s = 0; s < reps.size(); ++s) {
            std::vector<int> clique{reps[s]};
            for (std::size_t t = 0; t < reps.size(); ++t) {
                if (t == s) continue;
                bool ok = true;
                for (int c : clique)
                    if (!adjacent(c, reps[t])) {
                        ok = false;
                        break;
                    }
                if (ok) clique.push_back(reps[t]);
                if (static_cast<int>(clique.size()) > k) return true;
            }
        }
        return false;
    }

private:
    bool add_must_link(int i, int j) {
        auto p = ordered_pair(i, j);
        if (p.first == p.second) return true;
        if (separated(i, j)) return false;
        must_.insert(p);
        const int ri = find(i), rj = find(j);
        if (ri != rj) {
            const int keep = std::min(ri, rj), drop = std::max(ri, rj);
            parent_[static_cast<std::size_t>(drop)] = keep;
            rebuild_group_cl();
            // a merge can collapse two previously separated groups onto the
            // same representative pair; that is fine, but a self-pair is not
            for (auto [a, b] : cannot_)
                if (find(a) == find(b)) return false;
        }
        return true;
    }

    bool add_cannot_link(int i, int j) {
        auto p = ordered_pair(i, j);
        if (p.first == p.second) return false;
        if (same_group(i, j)) return false;
        if (must_.count(p)) return false;
        cannot_.insert(p);
        cl_groups_.insert(ordered_pair(find(i), find(j)));
        return true;
    }

    void rebuild_group_cl() {
        cl_groups_.clear();
        for (auto [a, b] : cannot_) cl_groups_.insert(ordered_pair(find(a), find(b)));
    }

    std::vector<int> parent_;
    std::set<IndexPair> must_;
    std::set<IndexPair> cannot_;
    std::set<IndexPair> cl_groups_;
};

}  // namespace mssc

#endif  // MSSC_CONSTRAINTS_HPP
