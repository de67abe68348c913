#ifndef CDARELAY_SCHEDULE_HPP
#define CDARELAY_SCHEDULE_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdarelay/error.hpp"

namespace cdarelay {

/// Nested activation sets I_1 ⊆ ... ⊆ I_B over 1-based node indices, source = 1.
struct ActivationSchedule {
    std::vector<std::set<int>> sets;    // sets[k-1] = I_k
    std::map<int, int> decode_block;    // relay -> block after which it decoded

    int blocks() const { return static_cast<int>(sets.size()); }

    bool active(int node, int block) const
    {
        return sets.at(static_cast<std::size_t>(block - 1)).count(node) > 0;
    }

    /// First block in which `node` transmits, if any.
    std::optional<int> first_block(int node) const
    {
        for (int k = 1; k <= blocks(); ++k)
            if (active(node, k))
                return k;
        return std::nullopt;
    }

    /// I_1 = {1}, nesting, and decode_block consistent with first activation.
    void validate(int nodes_transmitting) const
    {
        if (sets.empty() || sets.front() != std::set<int>{1})
            throw ValidationError("activation schedule must start with I_1 = {1}");
        for (std::size_t k = 1; k < sets.size(); ++k)
            if (!std::includes(sets[k].begin(), sets[k].end(), sets[k - 1].begin(), sets[k - 1].end()))
                throw ValidationError("activation sets must be nested");
        for (const auto& s : sets)
            for (int n : s)
                if (n < 1 || n > nodes_transmitting)
                    throw ValidationError("activation set names node " + std::to_string(n) + " outside 1.." +
                                          std::to_string(nodes_transmitting));
        for (const auto& [node, b] : decode_block) {
            auto first = first_block(node);
            if (!first || *first != b + 1)
                throw ValidationError("decode_block inconsistent with activation sets");
        }
    }

    /// Compact text form such as "1|1,3|1,3|1,3,4".
    std::string signature() const
    {
        std::string out;
        for (std::size_t k = 0; k < sets.size(); ++k) {
            if (k)
                out += '|';
            bool first = true;
            for (int n : sets[k]) {
                if (!first)
                    out += ',';
                out += std::to_string(n);
                first = false;
            }
        }
        return out;
    }

    /// Builds decode_block from the sets.
    static ActivationSchedule from_sets(std::vector<std::set<int>> sets)
    {
        ActivationSchedule s;
        s.sets = std::move(sets);
        for (std::size_t k = 1; k < s.sets.size(); ++k)
            for (int n : s.sets[k])
                if (!s.sets[k - 1].count(n))
                    s.decode_block[n] = static_cast<int>(k);  // joined I_{k+1}, decoded after block k
        return s;
    }
};

} // namespace cdarelay

#endif // CDARELAY_SCHEDULE_HPP
