#include "cxorder/majorization.hpp"

#include <charconv>
#include <numeric>

#include "cxorder/scalar.hpp"

namespace cxorder {

ExponentTuple::ExponentTuple(std::vector<int> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw InvalidArgument("exponent tuple must be non-empty");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i] < 0) {
            throw InvalidArgument("exponent tuple entries must be non-negative");
        }
        if (i > 0 && entries_[i] > entries_[i - 1]) {
            throw InvalidArgument("exponent tuple must be non-increasing: " + to_string());
        }
    }
}

ExponentTuple ExponentTuple::parse(std::string_view text) {
    std::vector<int> out;
    while (true) {
        const auto comma = text.find(',');
        auto item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ') {
            item.remove_prefix(1);
        }
        while (!item.empty() && item.back() == ' ') {
            item.remove_suffix(1);
        }
        int value = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw InvalidArgument("malformed exponent tuple '" + std::string(text) + "'");
        }
        out.push_back(value);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return ExponentTuple(std::move(out));
}

int ExponentTuple::total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

std::string ExponentTuple::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        s += (i ? "," : "") + std::to_string(entries_[i]);
    }
    return s + ")";
}

namespace {

void require_same_length(const ExponentTuple& p, const ExponentTuple& q) {
    if (p.size() != q.size()) {
        throw InvalidArgument("tuples " + p.to_string() + " and " + q.to_string() + " differ in length");
    }
}

void require_leq(const ExponentTuple& p, const ExponentTuple& q) {
    if (!leq(p, q)) {
        throw InvalidArgument(p.to_string() + " is not majorized by " + q.to_string());
    }
}

/// D_m = sum_{l <= m} (q_l - p_l) for m = 1..k, stored 0-based.
std::vector<long> prefix_differences(const std::vector<int>& p, const std::vector<int>& q) {
    std::vector<long> d(p.size());
    long run = 0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        run += q[m] - p[m];
        d[m] = run;
    }
    return d;
}

}  // namespace

bool leq(const ExponentTuple& p, const ExponentTuple& q) {
    require_same_length(p, q);
    const auto d = prefix_differences(p.entries(), q.entries());
    for (long v : d) {
        if (v < 0) {
            return false;
        }
    }
    return d.back() == 0;
}

std::optional<std::pair<int, int>> satisfies_S(const ExponentTuple& p, const ExponentTuple& q) {
    require_leq(p, q);
    std::vector<std::size_t> differ;
    for (std::size_t l = 0; l < p.size(); ++l) {
        if (p[l] != q[l]) {
            differ.push_back(l);
        }
    }
    if (differ.size() != 2) {
        return std::nullopt;
    }
    const auto l1 = differ[0];
    const auto l2 = differ[1];
    if (q[l1] != p[l1] + 1 || q[l2] != p[l2] - 1) {
        return std::nullopt;
    }
    return std::pair{static_cast<int>(l1) + 1, static_cast<int>(l2) + 1};
}

long potential(const ExponentTuple& p, const ExponentTuple& q) {
    require_same_length(p, q);
    const auto d = prefix_differences(p.entries(), q.entries());
    return std::accumulate(d.begin(), d.end(), 0L);
}

std::vector<ExponentTuple> transfer_chain(const ExponentTuple& p, const ExponentTuple& q) {
    require_leq(p, q);
    std::vector<ExponentTuple> chain{p};
    std::vector<int> r = p.entries();
    while (r != q.entries()) {
        const auto d = prefix_differences(r, q.entries());
        std::size_t l1 = 0;
        while (d[l1] == 0) {
            ++l1;
        }
        std::size_t l2 = l1 + 1;
        while (d[l2] != 0) {
            ++l2;
        }
        ++r[l1];
        --r[l2];
        chain.emplace_back(r);
    }
    return chain;
}

namespace {

void partitions(int k, int remaining, int cap, std::vector<int>& prefix, std::vector<ExponentTuple>& out) {
    if (static_cast<int>(prefix.size()) == k) {
        if (remaining == 0) {
            out.emplace_back(prefix);
        }
        return;
    }
    const int slots = k - static_cast<int>(prefix.size());
    for (int v = std::min(cap, remaining); v >= 0; --v) {
        if (static_cast<long>(v) * slots < remaining) {
            break;
        }
        prefix.push_back(v);
        partitions(k, remaining - v, v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<ExponentTuple> enumerate_tuples(int k, int total) {
    if (k < 1 || total < 0) {
        throw InvalidArgument("enumerate_tuples needs k >= 1 and total >= 0");
    }
    std::vector<ExponentTuple> out;
    std::vector<int> prefix;
    partitions(k, total, total, prefix, out);
    return out;
}

}  // namespace cxorder
