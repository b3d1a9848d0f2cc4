#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cxorder {

/// Non-increasing tuple of non-negative integers p_1 >= ... >= p_k.
class ExponentTuple {
  public:
    /// Throws InvalidArgument on negative or increasing entries; unsorted input is not reordered.
    explicit ExponentTuple(std::vector<int> entries);

    /// Comma-separated integers, e.g. "2,1,0".
    static ExponentTuple parse(std::string_view text);

    [[nodiscard]] const std::vector<int>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] int total() const;
    /// "(2,1,0)"
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const ExponentTuple&, const ExponentTuple&) = default;

  private:
    std::vector<int> entries_;
};

/// Majorization (p) < (q): equal totals and every prefix sum of p at most that of q.
/// Throws InvalidArgument on a length mismatch.
bool leq(const ExponentTuple& p, const ExponentTuple& q);

/// Single-transfer condition: q equals p with one unit moved from position l2
/// to position l1 < l2. Positions are 1-based. Requires leq(p, q).
std::optional<std::pair<int, int>> satisfies_S(const ExponentTuple& p, const ExponentTuple& q);

/// sum over m of sum_{l <= m} (q_l - p_l); zero iff p == q when leq(p, q).
long potential(const ExponentTuple& p, const ExponentTuple& q);

/**
 * Chain p = p^0 < p^1 < ... < p^I = q of single transfers.
 *
 * Each step takes the leftmost run l1 <= m < l2 of positive prefix-sum
 * differences and moves one unit from l2 to l1, which lowers the potential
 * by l2 - l1. Requires leq(p, q).
 */
std::vector<ExponentTuple> transfer_chain(const ExponentTuple& p, const ExponentTuple& q);

/// All non-increasing k-tuples of non-negative integers with the given total,
/// in descending lexicographic order.
std::vector<ExponentTuple> enumerate_tuples(int k, int total);

}  // namespace cxorder
